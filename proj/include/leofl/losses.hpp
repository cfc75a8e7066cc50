#pragma once

#include <vector>

#include "leofl/autodiff.hpp"
#include "leofl/tensor.hpp"

namespace leofl::nn {

// Guard inside logs of explicit probability vectors.
inline constexpr double kProbEpsilon = 1e-12;

// Temperature-softened softmax of each row of z.
Tensor softened_softmax(const Tensor& z, double temperature);

// -sum_c y_c log p_c for one probability row and a class index.
double cross_entropy(std::span<const double> p, int label);
// sum_c q_t log(q_t / q_s); teacher first.
double kl_divergence(std::span<const double> q_teacher, std::span<const double> q_student);

// Graph-level composites, averaged over batch rows.
// Cross-entropy of softmax(logits) against integer labels.
Graph::Var cross_entropy_loss(Graph& g, Graph::Var logits, const std::vector<int>& labels);
// KL(softmax(teacher/tau) || softmax(student/tau)) per row, averaged; no tau^2 factor.
Graph::Var softened_kl_loss(Graph& g, Graph::Var teacher_logits, Graph::Var student_logits, double temperature);

}  // namespace leofl::nn
