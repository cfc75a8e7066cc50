#include "leofl/autodiff.hpp"

#include <cmath>
#include <stdexcept>

namespace leofl::nn {

Parameter& ParamSet::add(std::string name, Tensor value) {
  for (const auto& p : params_) {
    if (p.name == name) throw std::invalid_argument("duplicate parameter name " + name);
  }
  params_.emplace_back(std::move(name), std::move(value));
  return params_.back();
}

Parameter& ParamSet::at(const std::string& name) {
  for (auto& p : params_) {
    if (p.name == name) return p;
  }
  throw std::out_of_range("no parameter named " + name);
}

const Parameter& ParamSet::at(const std::string& name) const {
  return const_cast<ParamSet*>(this)->at(name);
}

std::size_t ParamSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.size();
  return n;
}

std::vector<double> ParamSet::flatten() const {
  std::vector<double> out;
  out.reserve(scalar_count());
  for (const auto& p : params_) out.insert(out.end(), p.value.data().begin(), p.value.data().end());
  return out;
}

void ParamSet::assign_flat(std::span<const double> flat) {
  if (flat.size() != scalar_count()) throw std::invalid_argument("assign_flat: dimension mismatch");
  std::size_t off = 0;
  for (auto& p : params_) {
    auto dst = p.value.values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = flat[off + i];
    off += dst.size();
  }
}

bool ParamSet::same_layout(const ParamSet& o) const {
  if (params_.size() != o.params_.size()) return false;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    if (params_[i].name != o.params_[i].name || !params_[i].value.same_shape(o.params_[i].value)) return false;
  }
  return true;
}

void ParamSet::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

void ParamSet::sgd_step(double lr) {
  for (auto& p : params_) {
    auto v = p.value.values();
    const auto g = p.grad.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= lr * g[i];
    if (!p.value.all_finite()) throw NumericError("non-finite parameter after SGD step: " + p.name);
  }
}

Graph::Var Graph::push(Tensor value, bool needs_grad, std::function<void(Graph&, Var)> back) {
  if (!value.all_finite()) throw NumericError("non-finite value in forward pass");
  Node n;
  n.value = std::move(value);
  n.needs_grad = needs_grad;
  if (needs_grad) n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return nodes_.size() - 1;
}

void Graph::accumulate(Var v, const Tensor& g) {
  Node& n = nodes_[v];
  if (!n.needs_grad) return;
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    for (std::size_t i = 0; i < g.size(); ++i) n.grad[i] += g[i];
  }
}

Graph::Var Graph::constant(Tensor v) { return push(std::move(v), false, nullptr); }

Graph::Var Graph::param(Parameter& p) {
  Var v = push(p.value, true, nullptr);
  nodes_[v].bound = &p;
  return v;
}

Graph::Var Graph::matmul(Var a, Var b) {
  return push(nn::matmul(value(a), value(b)), needs(a) || needs(b), [a, b](Graph& g, Var self) {
    const Tensor& up = g.nodes_[self].grad;
    if (g.needs(a)) g.accumulate(a, nn::matmul(up, nn::transpose(g.value(b))));
    if (g.needs(b)) g.accumulate(b, nn::matmul(nn::transpose(g.value(a)), up));
  });
}

Graph::Var Graph::transpose(Var a) {
  return push(nn::transpose(value(a)), needs(a),
              [a](Graph& g, Var self) { g.accumulate(a, nn::transpose(g.nodes_[self].grad)); });
}

Graph::Var Graph::add(Var a, Var b) {
  return push(nn::add(value(a), value(b)), needs(a) || needs(b), [a, b](Graph& g, Var self) {
    g.accumulate(a, g.nodes_[self].grad);
    g.accumulate(b, g.nodes_[self].grad);
  });
}

Graph::Var Graph::sub(Var a, Var b) {
  return push(nn::sub(value(a), value(b)), needs(a) || needs(b), [a, b](Graph& g, Var self) {
    g.accumulate(a, g.nodes_[self].grad);
    if (g.needs(b)) g.accumulate(b, nn::scale(g.nodes_[self].grad, -1.0));
  });
}

Graph::Var Graph::mul(Var a, Var b) {
  return push(hadamard(value(a), value(b)), needs(a) || needs(b), [a, b](Graph& g, Var self) {
    const Tensor& up = g.nodes_[self].grad;
    if (g.needs(a)) g.accumulate(a, hadamard(up, g.value(b)));
    if (g.needs(b)) g.accumulate(b, hadamard(up, g.value(a)));
  });
}

Graph::Var Graph::add_row(Var x, Var bias) {
  const Tensor& xv = value(x);
  const Tensor& bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw std::invalid_argument("add_row: bias shape mismatch");
  Tensor out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r)
    for (std::size_t c = 0; c < out.cols(); ++c) out(r, c) += bv(0, c);
  return push(std::move(out), needs(x) || needs(bias), [x, bias](Graph& g, Var self) {
    const Tensor& up = g.nodes_[self].grad;
    g.accumulate(x, up);
    if (g.needs(bias)) {
      Tensor gb(1, up.cols());
      for (std::size_t r = 0; r < up.rows(); ++r)
        for (std::size_t c = 0; c < up.cols(); ++c) gb(0, c) += up(r, c);
      g.accumulate(bias, gb);
    }
  });
}

Graph::Var Graph::scale(Var a, double s) {
  return push(nn::scale(value(a), s), needs(a),
              [a, s](Graph& g, Var self) { g.accumulate(a, nn::scale(g.nodes_[self].grad, s)); });
}

Graph::Var Graph::tanh(Var a) {
  Tensor out = value(a);
  for (auto& v : out.values()) v = std::tanh(v);
  return push(std::move(out), needs(a), [a](Graph& g, Var self) {
    const Tensor& y = g.value(self);
    Tensor d = g.nodes_[self].grad;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= 1.0 - y[i] * y[i];
    g.accumulate(a, d);
  });
}

Graph::Var Graph::relu(Var a) {
  Tensor out = value(a);
  for (auto& v : out.values()) v = v > 0 ? v : 0.0;
  return push(std::move(out), needs(a), [a](Graph& g, Var self) {
    const Tensor& x = g.value(a);
    Tensor d = g.nodes_[self].grad;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = x[i] > 0 ? d[i] : 0.0;
    g.accumulate(a, d);
  });
}

Graph::Var Graph::softmax_rows(Var z, double temperature) {
  return push(nn::softmax_rows(value(z), temperature), needs(z), [z, temperature](Graph& g, Var self) {
    const Tensor& y = g.value(self);
    const Tensor& up = g.nodes_[self].grad;
    Tensor d(y.rows(), y.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += up(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) = y(r, c) * (up(r, c) - dot) / temperature;
    }
    g.accumulate(z, d);
  });
}

Graph::Var Graph::log_softmax_rows(Var z, double temperature) {
  return push(nn::log_softmax_rows(value(z), temperature), needs(z), [z, temperature](Graph& g, Var self) {
    const Tensor& y = g.value(self);
    const Tensor& up = g.nodes_[self].grad;
    Tensor d(y.rows(), y.cols());
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) total += up(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) = (up(r, c) - std::exp(y(r, c)) * total) / temperature;
    }
    g.accumulate(z, d);
  });
}

Graph::Var Graph::sum(Var a) {
  double s = 0.0;
  for (double v : value(a).values()) s += v;
  return push(Tensor(1, 1, s), needs(a), [a](Graph& g, Var self) {
    const Tensor& x = g.value(a);
    g.accumulate(a, Tensor(x.rows(), x.cols(), g.nodes_[self].grad[0]));
  });
}

Graph::Var Graph::nll(Var log_probs, const std::vector<int>& labels) {
  const Tensor& lp = value(log_probs);
  if (labels.size() != lp.rows() || lp.rows() == 0) throw std::invalid_argument("nll: label count mismatch");
  double s = 0.0;
  for (std::size_t r = 0; r < lp.rows(); ++r) {
    const int y = labels[r];
    if (y < 0 || static_cast<std::size_t>(y) >= lp.cols()) throw std::invalid_argument("nll: label out of range");
    s -= lp(r, static_cast<std::size_t>(y));
  }
  const double n = static_cast<double>(lp.rows());
  return push(Tensor(1, 1, s / n), needs(log_probs), [log_probs, labels, n](Graph& g, Var self) {
    const Tensor& x = g.value(log_probs);
    Tensor d(x.rows(), x.cols());
    const double up = g.nodes_[self].grad[0];
    for (std::size_t r = 0; r < x.rows(); ++r) d(r, static_cast<std::size_t>(labels[r])) = -up / n;
    g.accumulate(log_probs, d);
  });
}

double Graph::scalar(Var v) const {
  const Tensor& t = value(v);
  if (t.size() != 1) throw std::invalid_argument("scalar: node is not 1 x 1");
  return t[0];
}

void Graph::backward(Var loss) {
  if (value(loss).size() != 1) throw std::invalid_argument("backward: loss must be a scalar");
  for (auto& n : nodes_) n.grad = Tensor();
  if (!needs(loss)) return;
  nodes_[loss].grad = Tensor(1, 1, 1.0);
  for (Var v = loss + 1; v-- > 0;) {
    Node& n = nodes_[v];
    if (!n.needs_grad || n.grad.size() == 0) continue;
    if (n.back) n.back(*this, v);
    if (n.bound != nullptr) {
      Tensor& pg = n.bound->grad;
      if (!pg.same_shape(n.grad)) pg = Tensor(n.grad.rows(), n.grad.cols());
      for (std::size_t i = 0; i < pg.size(); ++i) pg[i] += n.grad[i];
    }
  }
}

}  // namespace leofl::nn
