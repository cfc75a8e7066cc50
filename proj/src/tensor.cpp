#include "leofl/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <string>

namespace leofl::nn {

Tensor::Tensor(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (data_.size() != rows * cols) throw std::invalid_argument("tensor: value count does not match shape");
}

Tensor Tensor::row(std::vector<double> values) {
  const std::size_t n = values.size();
  return Tensor(1, n, std::move(values));
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

namespace {
void require_same(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) throw std::invalid_argument(std::string(op) + ": shape mismatch");
}
}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
  using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const auto r = static_cast<Eigen::Index>(a.rows()), n = static_cast<Eigen::Index>(a.cols()),
             m = static_cast<Eigen::Index>(b.cols());
  Tensor out(a.rows(), b.cols());
  if (r == 0 || m == 0 || n == 0) return out;
  Eigen::Map<Mat>(out.values().data(), r, m).noalias() =
      Eigen::Map<const Mat>(a.values().data(), r, n) * Eigen::Map<const Mat>(b.values().data(), n, m);
  return out;
}

Tensor transpose(const Tensor& a) {
  Tensor out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same(a, b, "add");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same(a, b, "sub");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= b[i];
  return out;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_same(a, b, "hadamard");
  Tensor out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= b[i];
  return out;
}

Tensor scale(const Tensor& a, double s) {
  Tensor out = a;
  for (auto& v : out.values()) v *= s;
  return out;
}

Tensor softmax_rows(const Tensor& z, double temperature) {
  if (!(temperature > 0)) throw std::invalid_argument("softmax: temperature must be positive");
  if (z.cols() == 0) throw std::invalid_argument("softmax: need at least one class");
  Tensor out(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    double mx = z(r, 0);
    for (std::size_t c = 1; c < z.cols(); ++c) mx = std::max(mx, z(r, c));
    double s = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) {
      out(r, c) = std::exp((z(r, c) - mx) / temperature);
      s += out(r, c);
    }
    for (std::size_t c = 0; c < z.cols(); ++c) out(r, c) /= s;
  }
  return out;
}

Tensor log_softmax_rows(const Tensor& z, double temperature) {
  if (!(temperature > 0)) throw std::invalid_argument("log_softmax: temperature must be positive");
  if (z.cols() == 0) throw std::invalid_argument("log_softmax: need at least one class");
  Tensor out(z.rows(), z.cols());
  for (std::size_t r = 0; r < z.rows(); ++r) {
    double mx = z(r, 0);
    for (std::size_t c = 1; c < z.cols(); ++c) mx = std::max(mx, z(r, c));
    double s = 0.0;
    for (std::size_t c = 0; c < z.cols(); ++c) s += std::exp((z(r, c) - mx) / temperature);
    const double lse = std::log(s);
    for (std::size_t c = 0; c < z.cols(); ++c) out(r, c) = (z(r, c) - mx) / temperature - lse;
  }
  return out;
}

double max_abs_diff(const Tensor& a, const Tensor& b) {
  require_same(a, b, "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

Tensor glorot_uniform(std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> u(-s, s);
  Tensor t(fan_in, fan_out);
  for (auto& v : t.values()) v = u(rng);
  return t;
}

}  // namespace leofl::nn
