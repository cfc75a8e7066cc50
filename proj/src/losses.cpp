#include "leofl/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leofl::nn {

Tensor softened_softmax(const Tensor& z, double temperature) { return softmax_rows(z, temperature); }

double cross_entropy(std::span<const double> p, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= p.size()) {
    throw std::invalid_argument("cross_entropy: label out of range");
  }
  return -std::log(std::max(p[static_cast<std::size_t>(label)], kProbEpsilon));
}

double kl_divergence(std::span<const double> qt, std::span<const double> qs) {
  if (qt.size() != qs.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < qt.size(); ++c) {
    if (qt[c] <= 0) continue;
    s += qt[c] * (std::log(qt[c]) - std::log(std::max(qs[c], kProbEpsilon)));
  }
  return std::max(s, 0.0);
}

Graph::Var cross_entropy_loss(Graph& g, Graph::Var logits, const std::vector<int>& labels) {
  return g.nll(g.log_softmax_rows(logits, 1.0), labels);
}

Graph::Var softened_kl_loss(Graph& g, Graph::Var teacher_logits, Graph::Var student_logits, double temperature) {
  const Graph::Var qt = g.softmax_rows(teacher_logits, temperature);
  const Graph::Var lt = g.log_softmax_rows(teacher_logits, temperature);
  const Graph::Var ls = g.log_softmax_rows(student_logits, temperature);
  const double rows = static_cast<double>(g.value(teacher_logits).rows());
  return g.scale(g.sum(g.mul(qt, g.sub(lt, ls))), 1.0 / rows);
}

}  // namespace leofl::nn
