#pragma once

#include <random>
#include <string>
#include <vector>

#include "leofl/tensor.hpp"

namespace leofl::data {

struct Dataset {
  nn::Tensor features;  // N x F
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  std::size_t feature_dim() const { return features.cols(); }
  Dataset subset(const std::vector<std::size_t>& indices) const;
  Dataset slice(std::size_t begin, std::size_t end) const;
  void validate() const;
};

// Gaussian clusters around random class centres. Each class owns
// `clusters_per_class` centres so that linear separability is not guaranteed.
struct SyntheticSpec {
  int num_classes = 10;
  int feature_dim = 32;
  int clusters_per_class = 2;
  double centre_scale = 1.0;
  double noise = 1.0;
  std::uint64_t task_seed = 7;  // fixes the centres; sample draws use their own seed
};

class SyntheticTask {
 public:
  explicit SyntheticTask(const SyntheticSpec& spec);
  // Class-balanced sample of n points.
  Dataset sample(std::size_t n, std::uint64_t seed) const;
  const SyntheticSpec& spec() const { return spec_; }

 private:
  SyntheticSpec spec_;
  std::vector<std::vector<double>> centres_;  // [class * clusters + k][F]
};

// Two well-separated Gaussian blobs; linearly separable with overwhelming probability.
Dataset two_blobs(std::size_t n, double separation, std::uint64_t seed);

// IID: shuffle and deal evenly.
std::vector<Dataset> partition_iid(const Dataset& d, int parts, std::uint64_t seed);
// Non-IID: sort by label, cut into `shards` contiguous shards, deal shards equally at random.
std::vector<Dataset> partition_shards(const Dataset& d, int parts, int shards, std::uint64_t seed);

// CSV feature-vector loader: each row is f_1,...,f_F,label. '#' lines are skipped.
Dataset load_csv(const std::string& path, int num_classes);

}  // namespace leofl::data
