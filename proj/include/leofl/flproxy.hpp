#pragma once

#include <optional>
#include <random>
#include <vector>

#include "leofl/autodiff.hpp"
#include "leofl/dataset.hpp"

namespace leofl::fl {

using nn::Graph;
using nn::ParamSet;
using nn::Tensor;

// Hidden width of the local body for a budget tier {1.0, 0.75, 0.5, 0.25}.
int width_for_budget(double budget);
inline constexpr int kProxyWidth = 32;

// Single-hidden-layer dense body (relu) plus an affine head.
struct DenseClassifier {
  ParamSet body;  // "body.w" (F x D), "body.b" (1 x D)
  ParamSet head;  // "head.w" (D x C), "head.b" (1 x C)

  static DenseClassifier make(int input_dim, int width, int num_classes, std::mt19937_64& rng);
  int feature_dim() const { return static_cast<int>(body.at("body.w").value.cols()); }
  int input_dim() const { return static_cast<int>(body.at("body.w").value.rows()); }
  int num_classes() const { return static_cast<int>(head.at("head.w").value.cols()); }

  Graph::Var features(Graph& g, Graph::Var x, bool trainable);
  Graph::Var logits_from(Graph& g, Graph::Var features, bool trainable);
  Graph::Var logits(Graph& g, Graph::Var x, bool trainable) { return logits_from(g, features(g, x, trainable), trainable); }
};

struct LocalModel : DenseClassifier {
  double tier = 1.0;
  static LocalModel make(int input_dim, double tier, int num_classes, std::mt19937_64& rng);
};

// Shared proxy; identical architecture on every satellite so its flat
// parameter vector is the aggregation currency.
struct ProxyModel : DenseClassifier {
  static ProxyModel make(int input_dim, int num_classes, std::mt19937_64& rng);
  std::vector<double> flat() const;
  void assign(std::span<const double> flat);
  std::size_t dimension() const { return body.scalar_count() + head.scalar_count(); }
  ParamSet as_param_set() const;
};

struct KnowledgeReceiver {
  ParamSet params;  // w_d (Dl x Dp), w_q, w_k, w_v (Dp x Dp), w_out (Dp x Dl)
  static KnowledgeReceiver make(int local_dim, int proxy_dim, std::mt19937_64& rng);
};

struct KnowledgeTransmitter {
  ParamSet params;  // w_d (Dl x Dp), w_q, w_k, w_v (Dp x Dp)
  static KnowledgeTransmitter make(int local_dim, int proxy_dim, std::mt19937_64& rng);
};

// I_loc + softmax((I_loc Wd Wq)(I_p Wk)^T / sqrt(Dp)) (I_p Wv) Wout
Graph::Var receiver_forward(Graph& g, Graph::Var local_feat, Graph::Var proxy_feat, KnowledgeReceiver& r,
                            bool trainable);
// I_p + softmax((I_p Wq')(I_loc Wd' Wk')^T / sqrt(Dp)) (I_loc Wd' Wv')
Graph::Var transmitter_forward(Graph& g, Graph::Var proxy_feat, Graph::Var local_feat, KnowledgeTransmitter& t,
                               bool trainable);

Tensor receiver_forward(const Tensor& local_feat, const Tensor& proxy_feat, const KnowledgeReceiver& r);
Tensor transmitter_forward(const Tensor& proxy_feat, const Tensor& local_feat, const KnowledgeTransmitter& t);

struct DistillConfig {
  double temperature = 2.0;
  double lambda_ce = 1.0;   // weight on the proxy's own cross-entropy
  double lambda_kl = 1.0;   // weight on the softened KL toward the local model
  double lr_proxy = 1e-4;
  double lr_transmitter = 1e-3;
  int batch_size = 128;
  int epochs = 1;
  void validate() const;
};

struct InjectConfig {
  double temperature = 2.0;
  double alpha = 0.5;  // in (0, 1]; 1 is pure local cross-entropy
  double lr_local = 1e-3;
  double lr_receiver = 1e-3;
  int batch_size = 128;
  int epochs = 1;
  void validate() const;
};

struct LocalTrainConfig {
  double lr = 1e-3;
  int batch_size = 128;
  int epochs = 1;
  bool shuffle = true;
};

// On-board learning state of one satellite. With a global proxy present the
// local prediction runs through the knowledge receiver.
struct LocalLearner {
  LocalModel model;
  KnowledgeReceiver receiver;
  std::optional<ProxyModel> global_proxy;

  Graph::Var logits(Graph& g, Graph::Var x, bool train_model, bool train_receiver);
  Tensor predict_logits(const Tensor& x);
};

struct Batch {
  Tensor x;
  std::vector<int> y;
};
Batch make_batch(const data::Dataset& d, std::span<const std::size_t> idx);
std::vector<std::vector<std::size_t>> minibatches(std::size_t n, int batch_size, bool shuffle, std::mt19937_64& rng);

struct StepResult {
  double loss = 0.0;
  double ce = 0.0;
  double kl = 0.0;
};

// Loss value and gradients only (no update); used by steps and by gradient checks.
StepResult distill_loss(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const Batch& b,
                        const DistillConfig& cfg, bool accumulate_grads);
StepResult inject_loss(LocalLearner& local, ProxyModel& global_proxy, const Batch& b, const InjectConfig& cfg,
                       bool accumulate_grads);

StepResult distill_step(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const Batch& b,
                        const DistillConfig& cfg);
StepResult inject_step(LocalLearner& local, const Batch& b, const InjectConfig& cfg);

double distill_epochs(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const data::Dataset& d,
                      const DistillConfig& cfg, std::mt19937_64& rng);
double inject_epochs(LocalLearner& local, const data::Dataset& d, const InjectConfig& cfg, std::mt19937_64& rng);

// Cross-entropy minibatch descent on the local model (receiver frozen).
double local_train(LocalLearner& local, const data::Dataset& d, const LocalTrainConfig& cfg, std::mt19937_64& rng);
double batch_loss(LocalLearner& local, const data::Dataset& d);

double accuracy(LocalLearner& local, const data::Dataset& d, int batch_size = 128);
double accuracy(ProxyModel& proxy, const data::Dataset& d);

}  // namespace leofl::fl
