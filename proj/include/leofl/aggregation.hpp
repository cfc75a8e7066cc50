#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "leofl/flproxy.hpp"

namespace leofl::agg {

using ParamVec = std::vector<double>;

// Floor applied to member budgets in the load penalty; a zero budget would
// otherwise make the penalty infinite.
inline constexpr double kBudgetClamp = 1e-3;

struct MemberLoad {
  double proxy_bytes = 0.0;  // Phi_p
  double budget = 0.0;       // B_j
};

double group_load(std::span<const MemberLoad> members);
// capacity integral - mu_bal * sum_j Phi_p,j / B_j
double utility(double capacity_integral, std::span<const MemberLoad> group, double mu_bal);

struct GroupAssignment {
  std::map<int, std::set<int>> groups;  // hap id -> satellite ids
  double timestamp = 0.0;

  std::optional<int> group_of(int sat) const;
  std::size_t assigned_count() const;
  // Every satellite appears in at most one group.
  bool is_partition() const;
};

// utilities[s][h] is the utility of satellite s toward HAP h, or nullopt when
// h is not visible to s. Argmax per satellite, ties to the lowest HAP id.
GroupAssignment assign_groups(const std::vector<std::vector<std::optional<double>>>& utilities, double t);

struct GroupMetrics {
  std::map<int, std::size_t> sizes;
  std::map<int, double> mean_intra_distance;  // mean pairwise L2 between member state vectors; 0 for singletons
  std::map<int, std::vector<double>> centroids;
  std::map<std::pair<int, int>, double> inter_centroid_distance;
  std::vector<int> skipped_empty;
};

// states maps satellite id -> Theta vector (all the same length).
GroupMetrics group_metrics(const GroupAssignment& a, const std::map<int, std::vector<double>>& states);

struct StalenessRecord {
  double t_gen = 0.0;    // local training start
  double t_event = 0.0;  // application time at the HAP
  double nu = 0.0;       // constant volatility, 1/s
  double staleness() const { return t_event - t_gen; }
};

// (B_i / sum_j B_j) * exp(-nu * (t_e - t_gen)); group_budgets includes B_i.
double stage1_weight(const StalenessRecord& r, double budget, std::span<const double> group_budgets);

struct HapState {
  int id = 0;
  ParamVec omega;
  double last_update = 0.0;
};

void stage1_update(HapState& hap, std::span<const double> incoming, double eta, double t);

// Mean over the probe batch of the squared gradient norm of the per-example
// cross-entropy with respect to every proxy parameter.
double fisher_trace(fl::ProxyModel& proxy, const fl::Batch& probe);

// Piecewise-constant membership mass sum_{i in A_h} |D_i| B_i on [begin, end).
struct MassSegment {
  double begin = 0.0;
  double end = 0.0;
  double mass = 0.0;
};

// ln(Tr + 1) * integral over [t_prev, t_k] of mass(tau) exp(-kappa (t_k - tau));
// integrated exactly on each segment.
double info_yield(std::span<const MassSegment> trace, double t_prev, double t_k, double fisher_tr, double kappa);

// J(w) = sum_h Gamma_h |w - w_h|^2 + mu/2 |w - w_prev|^2
double stage2_objective(std::span<const ParamVec> haps, std::span<const double> gammas, std::span<const double> prev,
                        double mu, std::span<const double> w);
ParamVec stage2_gradient(std::span<const ParamVec> haps, std::span<const double> gammas,
                         std::span<const double> prev, double mu, std::span<const double> w);
ParamVec stage2_aggregate(std::span<const ParamVec> haps, std::span<const double> gammas,
                          std::span<const double> prev, double mu);

double linf_distance(std::span<const double> a, std::span<const double> b);
double l2_distance(std::span<const double> a, std::span<const double> b);

// ---- convergence machinery ----

// 2 gap / (eta_mean K) + eta_mean L sigma^2 + (2 L^2 sigma^2 / K) sum_k eta_k^2 tau_max^2
double convergence_bound(double gap, double L, double sigma2, std::span<const double> etas, int tau_max);

enum class DelaySchedule { uniform_random, constant_max };

// F(w) = 1/2 sum_j lambda_j w_j^2, so L = max lambda and F* = 0.
struct QuadraticSpec {
  std::vector<double> eigenvalues;
  std::vector<double> start;
  double smoothness() const;
  double value(std::span<const double> w) const;
  std::vector<double> gradient(std::span<const double> w) const;
};

struct DescentCheckConfig {
  QuadraticSpec objective;
  double eta = 0.1;        // constant step, must be <= 1/(2L)
  int tau_max = 0;
  double sigma = 0.0;      // E|g - grad F|^2 = sigma^2
  int steps = 200;         // K
  int seeds = 100;
  DelaySchedule delays = DelaySchedule::uniform_random;
  std::uint64_t base_seed = 1;
};

struct DescentReport {
  // Seed-averaged RHS - LHS of the one-step inequality, one entry per step.
  std::vector<double> lemma_residuals;
  std::size_t lemma_violations = 0;
  double avg_grad_norm_sq = 0.0;  // (1/K) sum_k E|grad F(w_k)|^2
  double bound = 0.0;
  bool theorem_holds = false;
};

DescentReport run_descent_check(const DescentCheckConfig& cfg);

}  // namespace leofl::agg
