#include "leofl/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "leofl/losses.hpp"

namespace leofl::agg {

double group_load(std::span<const MemberLoad> members) {
  double s = 0.0;
  for (const auto& m : members) s += m.proxy_bytes / std::max(m.budget, kBudgetClamp);
  return s;
}

double utility(double capacity_integral, std::span<const MemberLoad> group, double mu_bal) {
  if (mu_bal < 0.0) throw std::invalid_argument("utility: mu_bal must be >= 0");
  return capacity_integral - (mu_bal == 0.0 ? 0.0 : mu_bal * group_load(group));
}

std::optional<int> GroupAssignment::group_of(int sat) const {
  for (const auto& [h, members] : groups)
    if (members.count(sat)) return h;
  return std::nullopt;
}

std::size_t GroupAssignment::assigned_count() const {
  std::size_t n = 0;
  for (const auto& [h, members] : groups) n += members.size();
  return n;
}

bool GroupAssignment::is_partition() const {
  std::set<int> seen;
  for (const auto& [h, members] : groups)
    for (int s : members)
      if (!seen.insert(s).second) return false;
  return true;
}

GroupAssignment assign_groups(const std::vector<std::vector<std::optional<double>>>& utilities, double t) {
  GroupAssignment a;
  a.timestamp = t;
  for (std::size_t s = 0; s < utilities.size(); ++s) {
    std::optional<std::size_t> best;
    for (std::size_t h = 0; h < utilities[s].size(); ++h) {
      const auto& u = utilities[s][h];
      if (!u) continue;
      if (!best || *u > *utilities[s][*best]) best = h;
    }
    if (best) a.groups[static_cast<int>(*best)].insert(static_cast<int>(s));
  }
  return a;
}

double l2_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("l2_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

double linf_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("linf_distance: size mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

GroupMetrics group_metrics(const GroupAssignment& a, const std::map<int, std::vector<double>>& states) {
  GroupMetrics out;
  for (const auto& [h, members] : a.groups) {
    if (members.empty()) {
      out.skipped_empty.push_back(h);
      continue;
    }
    std::vector<const std::vector<double>*> rows;
    for (int s : members) rows.push_back(&states.at(s));
    const auto dim = rows.front()->size();
    std::vector<double> c(dim, 0.0);
    for (const auto* r : rows) {
      if (r->size() != dim) throw std::invalid_argument("group_metrics: state length mismatch");
      for (std::size_t j = 0; j < dim; ++j) c[j] += (*r)[j];
    }
    for (auto& v : c) v /= static_cast<double>(rows.size());
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j, ++pairs) total += l2_distance(*rows[i], *rows[j]);
    out.sizes[h] = rows.size();
    out.mean_intra_distance[h] = pairs ? total / static_cast<double>(pairs) : 0.0;
    out.centroids[h] = std::move(c);
  }
  for (auto i = out.centroids.begin(); i != out.centroids.end(); ++i)
    for (auto j = std::next(i); j != out.centroids.end(); ++j)
      out.inter_centroid_distance[{i->first, j->first}] = l2_distance(i->second, j->second);
  return out;
}

double stage1_weight(const StalenessRecord& r, double budget, std::span<const double> group_budgets) {
  if (r.t_event < r.t_gen) throw std::invalid_argument("stage1_weight: event precedes generation");
  if (r.nu < 0.0) throw std::invalid_argument("stage1_weight: volatility must be >= 0");
  if (!(budget > 0.0)) throw std::invalid_argument("stage1_weight: budget must be > 0");
  double sum = 0.0;
  for (double b : group_budgets) {
    if (!(b > 0.0)) throw std::invalid_argument("stage1_weight: group budgets must be > 0");
    sum += b;
  }
  if (sum < budget) throw std::invalid_argument("stage1_weight: group budgets must include the sender");
  return budget / sum * std::exp(-r.nu * r.staleness());
}

void stage1_update(HapState& hap, std::span<const double> incoming, double eta, double t) {
  if (incoming.size() != hap.omega.size()) throw std::invalid_argument("stage1_update: dimension mismatch");
  if (!(eta >= 0.0 && eta <= 1.0)) throw std::invalid_argument("stage1_update: eta must be in [0, 1]");
  // Convex form so that eta = 0 and eta = 1 reproduce their endpoints bit for bit.
  for (std::size_t j = 0; j < incoming.size(); ++j) hap.omega[j] = (1.0 - eta) * hap.omega[j] + eta * incoming[j];
  hap.last_update = t;
}

double fisher_trace(fl::ProxyModel& proxy, const fl::Batch& probe) {
  if (probe.y.empty()) throw std::invalid_argument("fisher_trace: empty probe batch");
  double total = 0.0;
  const auto f = probe.x.cols();
  for (std::size_t r = 0; r < probe.y.size(); ++r) {
    nn::Tensor x(1, f);
    for (std::size_t c = 0; c < f; ++c) x(0, c) = probe.x(r, c);
    proxy.body.zero_grad();
    proxy.head.zero_grad();
    nn::Graph g;
    auto loss = nn::cross_entropy_loss(g, proxy.logits(g, g.constant(x), true), {probe.y[r]});
    g.backward(loss);
    for (const auto* set : {&proxy.body, &proxy.head})
      for (const auto& p : set->items())
        for (double v : p.grad.values()) total += v * v;
  }
  proxy.body.zero_grad();
  proxy.head.zero_grad();
  return total / static_cast<double>(probe.y.size());
}

double info_yield(std::span<const MassSegment> trace, double t_prev, double t_k, double fisher_tr, double kappa) {
  if (!(t_k > t_prev)) throw std::invalid_argument("info_yield: interval must be nonempty");
  if (fisher_tr < 0.0 || kappa < 0.0) throw std::invalid_argument("info_yield: negative trace or decay");
  double integral = 0.0;
  for (const auto& s : trace) {
    const double a = std::max(s.begin, t_prev), b = std::min(s.end, t_k);
    if (b <= a || s.mass == 0.0) continue;
    if (s.mass < 0.0) throw std::invalid_argument("info_yield: negative mass");
    integral += kappa == 0.0 ? s.mass * (b - a)
                             : s.mass * (std::exp(-kappa * (t_k - b)) - std::exp(-kappa * (t_k - a))) / kappa;
  }
  return std::log(fisher_tr + 1.0) * integral;
}

namespace {
void check_stage2(std::span<const ParamVec> haps, std::span<const double> gammas, std::span<const double> prev,
                  double mu) {
  if (haps.empty()) throw std::invalid_argument("stage2: no groups");
  if (haps.size() != gammas.size()) throw std::invalid_argument("stage2: gamma count mismatch");
  if (mu < 0.0) throw std::invalid_argument("stage2: mu must be >= 0");
  for (const auto& h : haps)
    if (h.size() != prev.size()) throw std::invalid_argument("stage2: dimension mismatch");
  for (double g : gammas)
    if (!(g >= 0.0)) throw std::invalid_argument("stage2: yields must be >= 0");
}
}  // namespace

double stage2_objective(std::span<const ParamVec> haps, std::span<const double> gammas, std::span<const double> prev,
                        double mu, std::span<const double> w) {
  check_stage2(haps, gammas, prev, mu);
  double j = 0.0;
  for (std::size_t h = 0; h < haps.size(); ++h) j += gammas[h] * std::pow(l2_distance(w, haps[h]), 2);
  return j + 0.5 * mu * std::pow(l2_distance(w, prev), 2);
}

ParamVec stage2_gradient(std::span<const ParamVec> haps, std::span<const double> gammas,
                         std::span<const double> prev, double mu, std::span<const double> w) {
  check_stage2(haps, gammas, prev, mu);
  ParamVec g(w.size(), 0.0);
  for (std::size_t j = 0; j < w.size(); ++j) {
    for (std::size_t h = 0; h < haps.size(); ++h) g[j] += 2.0 * gammas[h] * (w[j] - haps[h][j]);
    g[j] += mu * (w[j] - prev[j]);
  }
  return g;
}

ParamVec stage2_aggregate(std::span<const ParamVec> haps, std::span<const double> gammas,
                          std::span<const double> prev, double mu) {
  check_stage2(haps, gammas, prev, mu);
  const double denom = 2.0 * std::accumulate(gammas.begin(), gammas.end(), 0.0) + mu;
  if (!(denom > 0.0)) throw std::invalid_argument("stage2: zero denominator");
  ParamVec out(prev.size(), 0.0);
  for (std::size_t j = 0; j < out.size(); ++j) {
    double num = mu * prev[j];
    for (std::size_t h = 0; h < haps.size(); ++h) num += 2.0 * gammas[h] * haps[h][j];
    out[j] = num / denom;
  }
  return out;
}

double convergence_bound(double gap, double L, double sigma2, std::span<const double> etas, int tau_max) {
  if (etas.empty()) throw std::invalid_argument("convergence_bound: K must be > 0");
  if (gap < 0.0 || L < 0.0 || sigma2 < 0.0 || tau_max < 0)
    throw std::invalid_argument("convergence_bound: inputs must be >= 0");
  const double k = static_cast<double>(etas.size());
  double sum = 0.0, sum_sq = 0.0;
  for (double e : etas) {
    if (e < 0.0) throw std::invalid_argument("convergence_bound: negative step");
    sum += e;
    sum_sq += e * e;
  }
  const double eta_mean = sum / k;
  if (!(eta_mean > 0.0)) throw std::invalid_argument("convergence_bound: mean step must be > 0");
  const double tau2 = static_cast<double>(tau_max) * tau_max;
  return 2.0 * gap / (eta_mean * k) + eta_mean * L * sigma2 + 2.0 * L * L * sigma2 / k * sum_sq * tau2;
}

double QuadraticSpec::smoothness() const {
  if (eigenvalues.empty()) throw std::invalid_argument("QuadraticSpec: no eigenvalues");
  return *std::max_element(eigenvalues.begin(), eigenvalues.end());
}

double QuadraticSpec::value(std::span<const double> w) const {
  double f = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) f += 0.5 * eigenvalues[j] * w[j] * w[j];
  return f;
}

std::vector<double> QuadraticSpec::gradient(std::span<const double> w) const {
  std::vector<double> g(w.size());
  for (std::size_t j = 0; j < w.size(); ++j) g[j] = eigenvalues[j] * w[j];
  return g;
}

namespace {
double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}
}  // namespace

DescentReport run_descent_check(const DescentCheckConfig& cfg) {
  const auto& q = cfg.objective;
  const double L = q.smoothness();
  if (q.start.size() != q.eigenvalues.size()) throw std::invalid_argument("descent check: start dimension mismatch");
  if (!(cfg.eta > 0.0) || cfg.eta > 1.0 / (2.0 * L) * (1.0 + 1e-12))
    throw std::invalid_argument("descent check: step must satisfy 0 < eta <= 1/(2L)");
  if (cfg.steps <= 0 || cfg.seeds <= 0 || cfg.tau_max < 0 || cfg.sigma < 0.0)
    throw std::invalid_argument("descent check: bad configuration");

  const auto K = static_cast<std::size_t>(cfg.steps);
  const auto d = q.eigenvalues.size();
  const double noise_sd = cfg.sigma / std::sqrt(static_cast<double>(d));
  std::vector<double> f_next(K, 0.0), f_now(K, 0.0), grad_now(K, 0.0), drift(K, 0.0);

  for (int s = 0; s < cfg.seeds; ++s) {
    std::mt19937_64 rng(cfg.base_seed * 1000003ULL + static_cast<std::uint64_t>(s));
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<std::vector<double>> hist{q.start};
    for (std::size_t k = 0; k < K; ++k) {
      const auto& w = hist.back();
      const auto cap = std::min<std::size_t>(static_cast<std::size_t>(cfg.tau_max), k);
      std::size_t tau = cap;
      if (cfg.delays == DelaySchedule::uniform_random)
        tau = std::uniform_int_distribution<std::size_t>(0, cap)(rng);
      const auto g_now = q.gradient(w);
      const auto g_old = q.gradient(hist[k - tau]);
      std::vector<double> next(w);
      double dsq = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double g = g_old[j] + (cfg.sigma > 0.0 ? noise_sd * noise(rng) : 0.0);
        next[j] -= cfg.eta * g;
        dsq += (g_now[j] - g_old[j]) * (g_now[j] - g_old[j]);
      }
      f_now[k] += q.value(w);
      f_next[k] += q.value(next);
      grad_now[k] += norm_sq(g_now);
      drift[k] += dsq;
      hist.push_back(std::move(next));
    }
  }

  DescentReport rep;
  const double n = static_cast<double>(cfg.seeds);
  const double sigma2 = cfg.sigma * cfg.sigma;
  double grad_total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double lhs = f_next[k] / n;
    const double rhs = f_now[k] / n - cfg.eta / 2.0 * grad_now[k] / n + cfg.eta / 2.0 * drift[k] / n +
                       L * cfg.eta * cfg.eta / 2.0 * sigma2;
    const double residual = rhs - lhs;
    rep.lemma_residuals.push_back(residual);
    if (residual < -1e-12 * std::max(1.0, std::abs(rhs))) ++rep.lemma_violations;
    grad_total += grad_now[k] / n;
  }
  rep.avg_grad_norm_sq = grad_total / static_cast<double>(K);
  const std::vector<double> etas(K, cfg.eta);
  rep.bound = convergence_bound(q.value(q.start), L, sigma2, etas, cfg.tau_max);
  rep.theorem_holds = rep.avg_grad_norm_sq <= rep.bound;
  return rep;
}

}  // namespace leofl::agg
