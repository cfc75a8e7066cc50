#include "leofl/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace leofl::data {

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.num_classes = num_classes;
  out.features = nn::Tensor(indices.size(), feature_dim());
  out.labels.reserve(indices.size());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const std::size_t src = indices[r];
    for (std::size_t c = 0; c < feature_dim(); ++c) out.features(r, c) = features(src, c);
    out.labels.push_back(labels[src]);
  }
  return out;
}

Dataset Dataset::slice(std::size_t begin, std::size_t end) const {
  std::vector<std::size_t> idx(end - begin);
  std::iota(idx.begin(), idx.end(), begin);
  return subset(idx);
}

void Dataset::validate() const {
  if (features.rows() != labels.size()) throw std::invalid_argument("dataset: feature/label count mismatch");
  for (int y : labels) {
    if (y < 0 || y >= num_classes) throw std::invalid_argument("dataset: label out of range");
  }
}

SyntheticTask::SyntheticTask(const SyntheticSpec& spec) : spec_(spec) {
  if (spec.num_classes < 2 || spec.feature_dim < 1 || spec.clusters_per_class < 1) {
    throw std::invalid_argument("synthetic task: bad spec");
  }
  std::mt19937_64 rng(spec.task_seed);
  std::normal_distribution<double> n(0.0, spec.centre_scale);
  centres_.resize(static_cast<std::size_t>(spec.num_classes * spec.clusters_per_class));
  for (auto& c : centres_) {
    c.resize(static_cast<std::size_t>(spec.feature_dim));
    for (auto& v : c) v = n(rng);
  }
}

Dataset SyntheticTask::sample(std::size_t n, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, spec_.noise);
  std::uniform_int_distribution<int> pick(0, spec_.clusters_per_class - 1);
  Dataset d;
  d.num_classes = spec_.num_classes;
  d.features = nn::Tensor(n, static_cast<std::size_t>(spec_.feature_dim));
  d.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = static_cast<int>(r % static_cast<std::size_t>(spec_.num_classes));
    const auto& c = centres_[static_cast<std::size_t>(y * spec_.clusters_per_class + pick(rng))];
    for (std::size_t k = 0; k < c.size(); ++k) d.features(r, k) = c[k] + noise(rng);
    d.labels[r] = y;
  }
  return d;
}

Dataset two_blobs(std::size_t n, double separation, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  Dataset d;
  d.num_classes = 2;
  d.features = nn::Tensor(n, 2);
  d.labels.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const int y = static_cast<int>(r % 2);
    const double cx = y == 0 ? -separation / 2 : separation / 2;
    d.features(r, 0) = cx + noise(rng);
    d.features(r, 1) = noise(rng);
    d.labels[r] = y;
  }
  return d;
}

std::vector<Dataset> partition_iid(const Dataset& d, int parts, std::uint64_t seed) {
  if (parts < 1) throw std::invalid_argument("partition: need at least one part");
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::vector<Dataset> out;
  const std::size_t per = d.size() / static_cast<std::size_t>(parts);
  for (int p = 0; p < parts; ++p) {
    std::vector<std::size_t> mine(idx.begin() + static_cast<std::ptrdiff_t>(p * per),
                                  idx.begin() + static_cast<std::ptrdiff_t>((p + 1) * per));
    out.push_back(d.subset(mine));
  }
  return out;
}

std::vector<Dataset> partition_shards(const Dataset& d, int parts, int shards, std::uint64_t seed) {
  if (parts < 1 || shards < parts) throw std::invalid_argument("partition: need shards >= parts >= 1");
  std::vector<std::size_t> idx(d.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return d.labels[a] < d.labels[b]; });
  const std::size_t shard_len = d.size() / static_cast<std::size_t>(shards);
  std::vector<int> order(static_cast<std::size_t>(shards));
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const int per_part = shards / parts;
  std::vector<Dataset> out;
  for (int p = 0; p < parts; ++p) {
    std::vector<std::size_t> mine;
    for (int s = p * per_part; s < (p + 1) * per_part; ++s) {
      const std::size_t start = static_cast<std::size_t>(order[static_cast<std::size_t>(s)]) * shard_len;
      mine.insert(mine.end(), idx.begin() + static_cast<std::ptrdiff_t>(start),
                  idx.begin() + static_cast<std::ptrdiff_t>(start + shard_len));
    }
    out.push_back(d.subset(mine));
  }
  return out;
}

Dataset load_csv(const std::string& path, int num_classes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset " + path);
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) vals.push_back(std::stod(cell));
    if (vals.size() < 2) throw std::invalid_argument("dataset row needs features and a label");
    labels.push_back(static_cast<int>(vals.back()));
    vals.pop_back();
    if (!rows.empty() && vals.size() != rows.front().size()) throw std::invalid_argument("ragged dataset rows");
    rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw std::invalid_argument("dataset is empty");
  Dataset d;
  d.num_classes = num_classes;
  d.features = nn::Tensor(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) d.features(r, c) = rows[r][c];
  d.labels = std::move(labels);
  d.validate();
  return d;
}

}  // namespace leofl::data
