#include "leofl/flproxy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "leofl/losses.hpp"

namespace leofl::fl {

namespace {

Graph::Var bind(Graph& g, nn::Parameter& p, bool trainable) { return trainable ? g.param(p) : g.frozen(p); }

void require_cols(const Tensor& t, std::size_t cols, const char* what) {
  if (t.cols() != cols) throw std::invalid_argument(std::string(what) + ": column mismatch");
}

// softmax(q k^T / sqrt(d)) v, all as graph nodes.
Graph::Var attend(Graph& g, Graph::Var q, Graph::Var k, Graph::Var v, std::size_t d) {
  auto scores = g.scale(g.matmul(q, g.transpose(k)), 1.0 / std::sqrt(static_cast<double>(d)));
  return g.matmul(g.softmax_rows(scores), v);
}

}  // namespace

int width_for_budget(double budget) {
  if (budget >= 0.875) return 256;
  if (budget >= 0.625) return 192;
  if (budget >= 0.375) return 128;
  return 64;
}

DenseClassifier DenseClassifier::make(int input_dim, int width, int num_classes, std::mt19937_64& rng) {
  if (input_dim <= 0 || width <= 0 || num_classes < 2) throw std::invalid_argument("DenseClassifier: bad shape");
  DenseClassifier m;
  m.body.add("body.w", nn::glorot_uniform(input_dim, width, rng));
  m.body.add("body.b", Tensor(1, width));
  m.head.add("head.w", nn::glorot_uniform(width, num_classes, rng));
  m.head.add("head.b", Tensor(1, num_classes));
  return m;
}

Graph::Var DenseClassifier::features(Graph& g, Graph::Var x, bool trainable) {
  require_cols(g.value(x), static_cast<std::size_t>(input_dim()), "features");
  auto w = bind(g, body.at("body.w"), trainable);
  auto b = bind(g, body.at("body.b"), trainable);
  return g.relu(g.add_row(g.matmul(x, w), b));
}

Graph::Var DenseClassifier::logits_from(Graph& g, Graph::Var f, bool trainable) {
  auto w = bind(g, head.at("head.w"), trainable);
  auto b = bind(g, head.at("head.b"), trainable);
  return g.add_row(g.matmul(f, w), b);
}

LocalModel LocalModel::make(int input_dim, double tier, int num_classes, std::mt19937_64& rng) {
  LocalModel m;
  static_cast<DenseClassifier&>(m) = DenseClassifier::make(input_dim, width_for_budget(tier), num_classes, rng);
  m.tier = tier;
  return m;
}

ProxyModel ProxyModel::make(int input_dim, int num_classes, std::mt19937_64& rng) {
  ProxyModel m;
  static_cast<DenseClassifier&>(m) = DenseClassifier::make(input_dim, kProxyWidth, num_classes, rng);
  return m;
}

std::vector<double> ProxyModel::flat() const {
  auto out = body.flatten();
  auto h = head.flatten();
  out.insert(out.end(), h.begin(), h.end());
  return out;
}

void ProxyModel::assign(std::span<const double> flat) {
  if (flat.size() != dimension()) throw std::invalid_argument("ProxyModel::assign: size mismatch");
  const auto nb = body.scalar_count();
  body.assign_flat(flat.subspan(0, nb));
  head.assign_flat(flat.subspan(nb));
}

ParamSet ProxyModel::as_param_set() const {
  ParamSet s;
  for (const auto& p : body.items()) s.add(p.name, p.value);
  for (const auto& p : head.items()) s.add(p.name, p.value);
  return s;
}

KnowledgeReceiver KnowledgeReceiver::make(int local_dim, int proxy_dim, std::mt19937_64& rng) {
  KnowledgeReceiver r;
  r.params.add("w_d", nn::glorot_uniform(local_dim, proxy_dim, rng));
  r.params.add("w_q", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  r.params.add("w_k", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  r.params.add("w_v", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  // Starts as the identity on the local stream.
  r.params.add("w_out", Tensor(proxy_dim, local_dim));
  return r;
}

KnowledgeTransmitter KnowledgeTransmitter::make(int local_dim, int proxy_dim, std::mt19937_64& rng) {
  KnowledgeTransmitter t;
  t.params.add("w_d", nn::glorot_uniform(local_dim, proxy_dim, rng));
  t.params.add("w_q", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  t.params.add("w_k", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  t.params.add("w_v", nn::glorot_uniform(proxy_dim, proxy_dim, rng));
  return t;
}

Graph::Var receiver_forward(Graph& g, Graph::Var local_feat, Graph::Var proxy_feat, KnowledgeReceiver& r,
                            bool trainable) {
  auto& wd = r.params.at("w_d");
  const auto dp = wd.value.cols();
  require_cols(g.value(local_feat), wd.value.rows(), "receiver_forward local");
  require_cols(g.value(proxy_feat), dp, "receiver_forward proxy");
  if (g.value(local_feat).rows() != g.value(proxy_feat).rows())
    throw std::invalid_argument("receiver_forward: row mismatch");
  auto aligned = g.matmul(local_feat, bind(g, wd, trainable));
  auto q = g.matmul(aligned, bind(g, r.params.at("w_q"), trainable));
  auto k = g.matmul(proxy_feat, bind(g, r.params.at("w_k"), trainable));
  auto v = g.matmul(proxy_feat, bind(g, r.params.at("w_v"), trainable));
  auto mixed = g.matmul(attend(g, q, k, v, dp), bind(g, r.params.at("w_out"), trainable));
  return g.add(local_feat, mixed);
}

Graph::Var transmitter_forward(Graph& g, Graph::Var proxy_feat, Graph::Var local_feat, KnowledgeTransmitter& t,
                               bool trainable) {
  auto& wd = t.params.at("w_d");
  const auto dp = wd.value.cols();
  require_cols(g.value(local_feat), wd.value.rows(), "transmitter_forward local");
  require_cols(g.value(proxy_feat), dp, "transmitter_forward proxy");
  if (g.value(local_feat).rows() != g.value(proxy_feat).rows())
    throw std::invalid_argument("transmitter_forward: row mismatch");
  auto aligned = g.matmul(local_feat, bind(g, wd, trainable));
  auto q = g.matmul(proxy_feat, bind(g, t.params.at("w_q"), trainable));
  auto k = g.matmul(aligned, bind(g, t.params.at("w_k"), trainable));
  auto v = g.matmul(aligned, bind(g, t.params.at("w_v"), trainable));
  return g.add(proxy_feat, attend(g, q, k, v, dp));
}

Tensor receiver_forward(const Tensor& local_feat, const Tensor& proxy_feat, const KnowledgeReceiver& r) {
  Graph g;
  auto copy = r;
  return g.value(receiver_forward(g, g.constant(local_feat), g.constant(proxy_feat), copy, false));
}

Tensor transmitter_forward(const Tensor& proxy_feat, const Tensor& local_feat, const KnowledgeTransmitter& t) {
  Graph g;
  auto copy = t;
  return g.value(transmitter_forward(g, g.constant(proxy_feat), g.constant(local_feat), copy, false));
}

void DistillConfig::validate() const {
  if (!(temperature > 0.0)) throw std::invalid_argument("DistillConfig: temperature must be > 0");
  if (lambda_ce < 0.0 || lambda_kl < 0.0) throw std::invalid_argument("DistillConfig: weights must be >= 0");
  if (!(lr_proxy >= 0.0) || !(lr_transmitter >= 0.0)) throw std::invalid_argument("DistillConfig: bad rate");
  if (batch_size <= 0 || epochs < 0) throw std::invalid_argument("DistillConfig: bad batch/epochs");
}

void InjectConfig::validate() const {
  if (!(temperature > 0.0)) throw std::invalid_argument("InjectConfig: temperature must be > 0");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("InjectConfig: alpha must be in (0, 1]");
  if (!(lr_local >= 0.0) || !(lr_receiver >= 0.0)) throw std::invalid_argument("InjectConfig: bad rate");
  if (batch_size <= 0 || epochs < 0) throw std::invalid_argument("InjectConfig: bad batch/epochs");
}

Graph::Var LocalLearner::logits(Graph& g, Graph::Var x, bool train_model, bool train_receiver) {
  auto f = model.features(g, x, train_model);
  if (global_proxy) {
    auto pf = global_proxy->features(g, x, false);
    f = receiver_forward(g, f, pf, receiver, train_receiver);
  }
  return model.logits_from(g, f, train_model);
}

Tensor LocalLearner::predict_logits(const Tensor& x) {
  Graph g;
  return g.value(logits(g, g.constant(x), false, false));
}

Batch make_batch(const data::Dataset& d, std::span<const std::size_t> idx) {
  Batch b;
  const auto f = d.feature_dim();
  b.x = Tensor(idx.size(), f);
  b.y.reserve(idx.size());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    for (std::size_t c = 0; c < f; ++c) b.x(r, c) = d.features(idx[r], c);
    b.y.push_back(d.labels.at(idx[r]));
  }
  return b;
}

std::vector<std::vector<std::size_t>> minibatches(std::size_t n, int batch_size, bool shuffle, std::mt19937_64& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  if (shuffle) std::shuffle(order.begin(), order.end(), rng);
  std::vector<std::vector<std::size_t>> out;
  const auto bs = static_cast<std::size_t>(batch_size);
  for (std::size_t i = 0; i < n; i += bs)
    out.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(i),
                     order.begin() + static_cast<std::ptrdiff_t>(std::min(n, i + bs)));
  return out;
}

StepResult distill_loss(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const Batch& b,
                        const DistillConfig& cfg, bool accumulate_grads) {
  cfg.validate();
  if (b.y.empty()) throw std::invalid_argument("distill: empty batch");
  Graph g;
  auto x = g.constant(b.x);
  auto teacher = local.logits(g, x, false, false);
  auto local_feat = g.constant(g.value(local.model.features(g, x, false)));
  auto pf = proxy.features(g, x, true);
  auto bridged = transmitter_forward(g, pf, local_feat, tx, true);
  auto zp = proxy.logits_from(g, bridged, true);
  auto ce = nn::cross_entropy_loss(g, zp, b.y);
  auto kl = nn::softened_kl_loss(g, teacher, zp, cfg.temperature);
  const double t2 = cfg.temperature * cfg.temperature;
  auto loss = g.add(g.scale(ce, cfg.lambda_ce), g.scale(kl, cfg.lambda_kl * t2));
  StepResult r{g.scalar(loss), g.scalar(ce), t2 * g.scalar(kl)};
  if (accumulate_grads) g.backward(loss);
  return r;
}

StepResult inject_loss(LocalLearner& local, ProxyModel& global_proxy, const Batch& b, const InjectConfig& cfg,
                       bool accumulate_grads) {
  cfg.validate();
  if (b.y.empty()) throw std::invalid_argument("inject: empty batch");
  Graph g;
  auto x = g.constant(b.x);
  auto teacher = global_proxy.logits(g, x, false);
  auto zl = local.logits(g, x, true, true);
  auto ce = nn::cross_entropy_loss(g, zl, b.y);
  auto kl = nn::softened_kl_loss(g, teacher, zl, cfg.temperature);
  const double t2 = cfg.temperature * cfg.temperature;
  auto loss = g.add(g.scale(ce, cfg.alpha), g.scale(kl, (1.0 - cfg.alpha) * t2));
  StepResult r{g.scalar(loss), g.scalar(ce), t2 * g.scalar(kl)};
  if (accumulate_grads) g.backward(loss);
  return r;
}

StepResult distill_step(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const Batch& b,
                        const DistillConfig& cfg) {
  proxy.body.zero_grad();
  proxy.head.zero_grad();
  tx.params.zero_grad();
  auto r = distill_loss(local, proxy, tx, b, cfg, true);
  proxy.body.sgd_step(cfg.lr_proxy);
  proxy.head.sgd_step(cfg.lr_proxy);
  tx.params.sgd_step(cfg.lr_transmitter);
  return r;
}

StepResult inject_step(LocalLearner& local, const Batch& b, const InjectConfig& cfg) {
  if (!local.global_proxy) throw std::logic_error("inject_step: no global proxy installed");
  local.model.body.zero_grad();
  local.model.head.zero_grad();
  local.receiver.params.zero_grad();
  auto r = inject_loss(local, *local.global_proxy, b, cfg, true);
  local.model.body.sgd_step(cfg.lr_local);
  local.model.head.sgd_step(cfg.lr_local);
  local.receiver.params.sgd_step(cfg.lr_receiver);
  return r;
}

double distill_epochs(LocalLearner& local, ProxyModel& proxy, KnowledgeTransmitter& tx, const data::Dataset& d,
                      const DistillConfig& cfg, std::mt19937_64& rng) {
  if (d.size() == 0) throw std::invalid_argument("distill: empty shard");
  double last = 0.0;
  for (int e = 0; e < cfg.epochs; ++e)
    for (const auto& idx : minibatches(d.size(), cfg.batch_size, true, rng))
      last = distill_step(local, proxy, tx, make_batch(d, idx), cfg).loss;
  return last;
}

double inject_epochs(LocalLearner& local, const data::Dataset& d, const InjectConfig& cfg, std::mt19937_64& rng) {
  if (d.size() == 0) throw std::invalid_argument("inject: empty shard");
  double last = 0.0;
  for (int e = 0; e < cfg.epochs; ++e)
    for (const auto& idx : minibatches(d.size(), cfg.batch_size, true, rng))
      last = inject_step(local, make_batch(d, idx), cfg).loss;
  return last;
}

double local_train(LocalLearner& local, const data::Dataset& d, const LocalTrainConfig& cfg, std::mt19937_64& rng) {
  if (d.size() == 0) throw std::invalid_argument("local_train: empty shard");
  if (cfg.batch_size <= 0 || cfg.epochs < 0) throw std::invalid_argument("local_train: bad config");
  double last = 0.0;
  for (int e = 0; e < cfg.epochs; ++e) {
    for (const auto& idx : minibatches(d.size(), cfg.batch_size, cfg.shuffle, rng)) {
      auto b = make_batch(d, idx);
      local.model.body.zero_grad();
      local.model.head.zero_grad();
      Graph g;
      auto loss = nn::cross_entropy_loss(g, local.logits(g, g.constant(b.x), true, false), b.y);
      last = g.scalar(loss);
      g.backward(loss);
      local.model.body.sgd_step(cfg.lr);
      local.model.head.sgd_step(cfg.lr);
    }
  }
  return last;
}

double batch_loss(LocalLearner& local, const data::Dataset& d) {
  Graph g;
  auto loss = nn::cross_entropy_loss(g, local.logits(g, g.constant(d.features), false, false), d.labels);
  return g.scalar(loss);
}

namespace {
int argmax_row(const Tensor& z, std::size_t r) {
  int best = 0;
  for (std::size_t c = 1; c < z.cols(); ++c)
    if (z(r, c) > z(r, static_cast<std::size_t>(best))) best = static_cast<int>(c);
  return best;
}
}  // namespace

double accuracy(LocalLearner& local, const data::Dataset& d, int batch_size) {
  if (d.size() == 0) return 0.0;
  std::size_t hits = 0;
  const auto bs = static_cast<std::size_t>(std::max(1, batch_size));
  for (std::size_t i = 0; i < d.size(); i += bs) {
    auto part = d.slice(i, std::min(d.size(), i + bs));
    auto z = local.predict_logits(part.features);
    for (std::size_t r = 0; r < part.size(); ++r) hits += argmax_row(z, r) == part.labels[r];
  }
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

double accuracy(ProxyModel& proxy, const data::Dataset& d) {
  if (d.size() == 0) return 0.0;
  Graph g;
  const auto& z = g.value(proxy.logits(g, g.constant(d.features), false));
  std::size_t hits = 0;
  for (std::size_t r = 0; r < d.size(); ++r) hits += argmax_row(z, r) == d.labels[r];
  return static_cast<double>(hits) / static_cast<double>(d.size());
}

}  // namespace leofl::fl
