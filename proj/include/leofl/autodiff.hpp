#pragma once

#include <functional>
#include <string>
#include <vector>

#include "leofl/tensor.hpp"

namespace leofl::nn {

struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}
  void zero_grad() { grad = Tensor(value.rows(), value.cols()); }
};

// Ordered, named collection of parameters. Layout (order + shapes) defines the
// flat vector used for aggregation and serialization.
class ParamSet {
 public:
  Parameter& add(std::string name, Tensor value);
  Parameter& at(const std::string& name);
  const Parameter& at(const std::string& name) const;
  std::vector<Parameter>& items() { return params_; }
  const std::vector<Parameter>& items() const { return params_; }

  std::size_t scalar_count() const;
  std::vector<double> flatten() const;
  void assign_flat(std::span<const double> flat);
  bool same_layout(const ParamSet& o) const;
  void zero_grad();
  void sgd_step(double lr);

 private:
  std::vector<Parameter> params_;
};

// Tape-based reverse-mode differentiation over 2-D tensors. Nodes are appended
// in evaluation order, so reverse creation order is a valid topological order.
class Graph {
 public:
  using Var = std::size_t;

  Var constant(Tensor v);
  // Leaf bound to p: backward accumulates into p.grad.
  Var param(Parameter& p);
  // Leaf holding p's current value with no gradient path (frozen weights).
  Var frozen(const Parameter& p) { return constant(p.value); }

  Var matmul(Var a, Var b);
  Var transpose(Var a);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);          // elementwise
  Var add_row(Var x, Var bias);   // bias is 1 x cols, broadcast over rows
  Var scale(Var a, double s);
  Var tanh(Var a);
  Var relu(Var a);
  Var softmax_rows(Var z, double temperature = 1.0);
  Var log_softmax_rows(Var z, double temperature = 1.0);
  Var sum(Var a);                 // -> 1 x 1
  // -mean_r logp[r, labels[r]]
  Var nll(Var log_probs, const std::vector<int>& labels);

  const Tensor& value(Var v) const { return nodes_.at(v).value; }
  const Tensor& grad(Var v) const { return nodes_.at(v).grad; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool needs_grad = false;
    Parameter* bound = nullptr;
    std::function<void(Graph&, Var)> back;
  };

  Var push(Tensor value, bool needs_grad, std::function<void(Graph&, Var)> back);
  bool needs(Var v) const { return nodes_[v].needs_grad; }
  void accumulate(Var v, const Tensor& g);

  std::vector<Node> nodes_;
};

}  // namespace leofl::nn
