#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "leofl/aggregation.hpp"

using namespace leofl;
using namespace leofl::agg;
using Utilities = std::vector<std::vector<std::optional<double>>>;

namespace {

std::vector<double> random_vec(std::size_t n, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> d(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

}  // namespace

TEST_CASE("utility examples") {
  const std::vector<MemberLoad> loaded{{10.0, 1.0}};
  CHECK(utility(123.0, loaded, 0.0) == 123.0);
  CHECK(utility(0.0, {}, 1.0) == 0.0);
  CHECK(utility(50.0, {}, 1.0) - utility(50.0, loaded, 1.0) == doctest::Approx(10.0));
  const std::vector<MemberLoad> zero_budget{{2.0, 0.0}};
  CHECK(utility(0.0, zero_budget, 1.0) == doctest::Approx(-2.0 / kBudgetClamp));
  CHECK_THROWS_AS(utility(0.0, {}, -1.0), std::invalid_argument);
}

TEST_CASE("single visible HAP collects every visible satellite") {
  const Utilities u{{1.0}, {std::nullopt}, {-3.0}, {0.0}};
  const auto a = assign_groups(u, 5.0);
  CHECK(a.timestamp == 5.0);
  REQUIRE(a.groups.size() == 1);
  CHECK(a.groups.at(0) == std::set<int>{0, 2, 3});
  CHECK_FALSE(a.group_of(1).has_value());
}

TEST_CASE("assignment matches an exhaustive argmax oracle") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::bernoulli_distribution vis(0.7);
  for (int trial = 0; trial < 200; ++trial) {
    const int sats = 3, haps = 2 + trial % 3;
    Utilities table(sats, std::vector<std::optional<double>>(haps));
    for (auto& row : table)
      for (auto& cell : row)
        if (vis(rng)) cell = trial % 4 == 0 ? std::round(u(rng)) : u(rng);  // rounding forces ties
    const auto a = assign_groups(table, 0.0);
    for (int s = 0; s < sats; ++s) {
      int best = -1;
      for (int h = 0; h < haps; ++h) {
        if (!table[s][h]) continue;
        bool dominated = false;
        for (int o = 0; o < haps; ++o)
          if (table[s][o] && (*table[s][o] > *table[s][h] || (*table[s][o] == *table[s][h] && o < h))) dominated = true;
        if (!dominated) best = h;
      }
      if (best < 0) {
        CHECK_FALSE(a.group_of(s).has_value());
      } else {
        CHECK(a.group_of(s) == best);
      }
    }
    CHECK(a.is_partition());
  }
}

TEST_CASE("assignment is invariant under positive rescaling") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  for (int trial = 0; trial < 50; ++trial) {
    // capacity integrals and loads scale together, mu_bal fixed
    Utilities base(6, std::vector<std::optional<double>>(3)), scaled = base;
    const double c = 0.01 + 10.0 * u(rng) / 100.0;
    for (int s = 0; s < 6; ++s) {
      for (int h = 0; h < 3; ++h) {
        if (u(rng) < 20.0) continue;
        const double cap = u(rng);
        const std::vector<MemberLoad> load{{u(rng), 0.5}};
        const std::vector<MemberLoad> load_scaled{{load[0].proxy_bytes * c, 0.5}};
        base[s][h] = utility(cap, load, 1.0);
        scaled[s][h] = utility(cap * c, load_scaled, 1.0);
      }
    }
    CHECK(assign_groups(base, 0).groups == assign_groups(scaled, 0).groups);
  }
}

TEST_CASE("group partition helpers") {
  GroupAssignment a;
  a.groups[0] = {1, 2};
  a.groups[1] = {3};
  CHECK(a.assigned_count() == 3);
  CHECK(a.is_partition());
  a.groups[1].insert(2);
  CHECK_FALSE(a.is_partition());
}

TEST_CASE("group metrics hand cases") {
  GroupAssignment a;
  a.groups[0] = {0, 1};
  a.groups[1] = {2};
  a.groups[2] = {};
  const std::map<int, std::vector<double>> states{{0, {1.0, 0.0, 2.0}}, {1, {3.0, 4.0, 2.0}}, {2, {5.0, 5.0, 5.0}}};
  const auto m = group_metrics(a, states);
  CHECK(m.sizes.at(0) == 2);
  CHECK(m.centroids.at(0) == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(m.centroids.at(1) == states.at(2));
  CHECK(m.mean_intra_distance.at(0) == doctest::Approx(std::sqrt(4.0 + 16.0)));
  CHECK(m.mean_intra_distance.at(1) == 0.0);
  CHECK(m.inter_centroid_distance.at({0, 1}) == doctest::Approx(std::sqrt(27.0)));
  CHECK(m.skipped_empty == std::vector<int>{2});

  GroupAssignment twins;
  twins.groups[4] = {0, 1};
  const auto t = group_metrics(twins, {{0, {1.0, 2.0}}, {1, {1.0, 2.0}}});
  CHECK(t.mean_intra_distance.at(4) == 0.0);
}

TEST_CASE("stage-one weight examples") {
  const std::vector<double> group{0.5, 1.5};
  CHECK(stage1_weight({0.0, 100.0, 0.01}, 0.5, group) == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  CHECK(stage1_weight({0.0, 100.0, 0.01}, 0.5, group) == doctest::Approx(0.09197).epsilon(1e-4));
  const std::vector<double> single{0.75};
  CHECK(stage1_weight({10.0, 10.0, 0.3}, 0.75, single) == 1.0);
  CHECK(stage1_weight({0.0, 1e4, 0.0}, 0.5, group) == 0.25);
  CHECK_THROWS_AS(stage1_weight({10.0, 5.0, 0.0}, 0.5, group), std::invalid_argument);
  CHECK_THROWS_AS(stage1_weight({0.0, 5.0, -1.0}, 0.5, group), std::invalid_argument);
}

TEST_CASE("stage-one weight decays monotonically to zero") {
  const std::vector<double> group{1.0, 0.25, 0.5};
  double prev = 1.0;
  for (double s = 0.0; s <= 5000.0; s += 50.0) {
    const double w = stage1_weight({0.0, s, 1e-3}, 1.0, group);
    CHECK(w <= prev);
    CHECK(w >= 0.0);
    prev = w;
  }
  CHECK(stage1_weight({0.0, 1e6, 1e-3}, 1.0, group) < 1e-300);
}

TEST_CASE("stage-one update examples") {
  HapState h{0, {0.0, 0.0}, 0.0};
  stage1_update(h, std::vector<double>{2.0, 4.0}, 0.5, 12.0);
  CHECK(h.omega == std::vector<double>{1.0, 2.0});
  CHECK(h.last_update == 12.0);
  const auto before = h.omega;
  stage1_update(h, std::vector<double>{9.0, 9.0}, 0.0, 13.0);
  CHECK(h.omega == before);
  stage1_update(h, std::vector<double>{9.0, -9.0}, 1.0, 14.0);
  CHECK(h.omega == std::vector<double>{9.0, -9.0});
  CHECK_THROWS_AS(stage1_update(h, std::vector<double>{1.0}, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(stage1_update(h, std::vector<double>{1.0, 1.0}, 1.5, 0.0), std::invalid_argument);
}

TEST_CASE("stage-one update contracts toward the incoming model") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    HapState h{1, random_vec(12, rng), 0.0};
    const auto in = random_vec(12, rng);
    const double eta = u(rng);
    const double d0 = l2_distance(h.omega, in);
    stage1_update(h, in, eta, 1.0);
    CHECK(l2_distance(h.omega, in) == doctest::Approx((1.0 - eta) * d0).epsilon(1e-12));
  }
}

TEST_CASE("fisher trace matches per-example hand gradients") {
  std::mt19937_64 rng(21);
  auto proxy = fl::ProxyModel::make(3, 3, rng);
  for (auto* s : {&proxy.body, &proxy.head})
    for (auto& p : s->items())
      for (auto& v : p.value.values()) v += 0.1;
  fl::Batch b{nn::Tensor(3, 3, {0.5, -1.0, 2.0, 1.5, 0.3, -0.7, -0.2, 0.9, 0.4}), {0, 2, 1}};
  const auto& W = proxy.body.at("body.w").value;
  const auto& bw = proxy.body.at("body.b").value;
  const auto& V = proxy.head.at("head.w").value;
  const auto& c = proxy.head.at("head.b").value;
  const std::size_t H = W.cols();
  double expect = 0.0;
  for (std::size_t n = 0; n < 3; ++n) {
    std::vector<double> pre(H), h(H);
    for (std::size_t j = 0; j < H; ++j) {
      pre[j] = bw[j];
      for (std::size_t i = 0; i < 3; ++i) pre[j] += b.x(n, i) * W(i, j);
      h[j] = std::max(0.0, pre[j]);
    }
    std::vector<double> z(3);
    double mx = -1e300;
    for (std::size_t k = 0; k < 3; ++k) {
      z[k] = c[k];
      for (std::size_t j = 0; j < H; ++j) z[k] += h[j] * V(j, k);
      mx = std::max(mx, z[k]);
    }
    double zs = 0;
    for (double v : z) zs += std::exp(v - mx);
    std::vector<double> dz(3);
    for (std::size_t k = 0; k < 3; ++k) dz[k] = std::exp(z[k] - mx) / zs - (static_cast<int>(k) == b.y[n] ? 1.0 : 0.0);
    double sq = 0;
    for (std::size_t k = 0; k < 3; ++k) sq += dz[k] * dz[k];  // head bias
    for (std::size_t j = 0; j < H; ++j) {
      double dh = 0;
      for (std::size_t k = 0; k < 3; ++k) {
        sq += h[j] * dz[k] * h[j] * dz[k];  // head weights
        dh += dz[k] * V(j, k);
      }
      const double dpre = pre[j] > 0 ? dh : 0.0;
      sq += dpre * dpre;  // body bias
      for (std::size_t i = 0; i < 3; ++i) sq += b.x(n, i) * dpre * b.x(n, i) * dpre;
    }
    expect += sq / 3.0;
  }
  CHECK(fisher_trace(proxy, b) == doctest::Approx(expect).epsilon(1e-12));
  CHECK(fisher_trace(proxy, b) >= 0.0);
  CHECK_THROWS_AS(fisher_trace(proxy, fl::Batch{}), std::invalid_argument);
}

TEST_CASE("fisher trace of a saturated fit is zero") {
  std::mt19937_64 rng(2);
  auto proxy = fl::ProxyModel::make(2, 2, rng);
  for (auto* s : {&proxy.body, &proxy.head})
    for (auto& p : s->items()) p.value.fill(0.0);
  proxy.head.at("head.b").value[0] = 800.0;  // softmax saturates on class 0
  fl::Batch b{nn::Tensor(2, 2, {1.0, 2.0, -1.0, 0.5}), {0, 0}};
  CHECK(fisher_trace(proxy, b) == 0.0);
}

TEST_CASE("information yield closed forms") {
  const std::vector<MassSegment> constant{{0.0, 600.0, 600.0 * 0.75 + 600.0 * 0.5}};
  CHECK(info_yield(constant, 0.0, 600.0, 0.0, 1e-3) == 0.0);
  CHECK(info_yield(constant, 0.0, 600.0, 2.0, 0.0) == doctest::Approx(std::log(3.0) * 750.0 * 600.0));
  const double kappa = 1e-3;
  CHECK(info_yield(constant, 0.0, 600.0, 2.0, kappa) ==
        doctest::Approx(std::log(3.0) * 750.0 * (1.0 - std::exp(-kappa * 600.0)) / kappa));
  CHECK(info_yield({}, 0.0, 600.0, 2.0, kappa) == 0.0);
  // segments outside the interval are clipped
  const std::vector<MassSegment> wide{{-100.0, 300.0, 2.0}, {300.0, 900.0, 4.0}};
  CHECK(info_yield(wide, 0.0, 600.0, std::exp(1.0) - 1.0, 0.0) == doctest::Approx(2.0 * 300.0 + 4.0 * 300.0));
  CHECK_THROWS_AS(info_yield(constant, 10.0, 10.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("stage-two trivial cases") {
  const std::vector<ParamVec> one{{1.0, 2.0}};
  const std::vector<double> g1{3.0};
  const ParamVec prev{9.0, 9.0};
  CHECK(stage2_aggregate(one, g1, prev, 0.0) == one[0]);
  const std::vector<ParamVec> two{{0.0, 4.0}, {2.0, 0.0}};
  const std::vector<double> eq{1.5, 1.5};
  const auto mean = stage2_aggregate(two, eq, prev, 0.0);
  CHECK(mean[0] == doctest::Approx(1.0));
  CHECK(mean[1] == doctest::Approx(2.0));
  const std::vector<double> zero{0.0, 0.0};
  CHECK_THROWS_AS(stage2_aggregate(two, zero, prev, 0.0), std::invalid_argument);
  CHECK(stage2_aggregate(two, zero, prev, 0.1) == prev);
}

TEST_CASE("stage-two closed form agrees with an iterative minimizer") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<ParamVec> haps;
    std::vector<double> gammas;
    for (int h = 0; h < 4; ++h) {
      haps.push_back(random_vec(16, rng));
      gammas.push_back(u(rng));
    }
    const auto prev = random_vec(16, rng);
    const double mu = 0.1;
    const auto closed = stage2_aggregate(haps, gammas, prev, mu);

    // gradient descent on sum_h G_h |w - w_h|^2 + mu/2 |w - prev|^2
    double curvature = mu;
    for (double g : gammas) curvature += 2.0 * g;
    ParamVec w(16, 0.0);
    for (int it = 0; it < 200; ++it) {
      for (std::size_t j = 0; j < 16; ++j) {
        double grad = mu * (w[j] - prev[j]);
        for (std::size_t h = 0; h < 4; ++h) grad += 2.0 * gammas[h] * (w[j] - haps[h][j]);
        w[j] -= 0.5 / curvature * grad;
      }
    }
    CHECK(linf_distance(closed, w) <= 1e-8);
    const auto grad = stage2_gradient(haps, gammas, prev, mu, closed);
    for (double gj : grad) CHECK(std::abs(gj) <= 1e-8);
    const double j0 = stage2_objective(haps, gammas, prev, mu, closed);
    auto nudged = closed;
    nudged[3] += 1e-3;
    CHECK(stage2_objective(haps, gammas, prev, mu, nudged) > j0);
  }
}

TEST_CASE("stage-two output is a convex combination") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ParamVec> haps;
    std::vector<double> gammas;
    for (int h = 0; h < 3; ++h) {
      haps.push_back(random_vec(5, rng));
      gammas.push_back(u(rng));
    }
    const auto prev = random_vec(5, rng);
    const double mu = u(rng);
    const auto w = stage2_aggregate(haps, gammas, prev, mu);
    double denom = mu;
    for (double g : gammas) denom += 2.0 * g;
    std::vector<double> coef;
    for (double g : gammas) coef.push_back(2.0 * g / denom);
    coef.push_back(mu / denom);
    double total = 0;
    for (double c : coef) {
      CHECK(c >= 0.0);
      total += c;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
    for (std::size_t j = 0; j < 5; ++j) {
      double lo = prev[j], hi = prev[j];
      for (const auto& h : haps) {
        lo = std::min(lo, h[j]);
        hi = std::max(hi, h[j]);
      }
      CHECK(w[j] >= lo - 1e-12);
      CHECK(w[j] <= hi + 1e-12);
    }
  }
}

TEST_CASE("convergence bound examples") {
  const std::vector<double> etas(10, 0.1);
  CHECK(convergence_bound(1.0, 1.0, 1.0, etas, 2) == doctest::Approx(2.18).epsilon(1e-12));
  CHECK(convergence_bound(1.0, 1.0, 0.0, etas, 7) == doctest::Approx(2.0));
  CHECK(convergence_bound(1.0, 1.0, 1.0, etas, 0) == doctest::Approx(2.1));
  CHECK_THROWS_AS(convergence_bound(1.0, 1.0, 1.0, {}, 0), std::invalid_argument);
}

TEST_CASE("noiseless undelayed descent decreases strictly") {
  DescentCheckConfig cfg;
  cfg.objective = {{1.0, 0.5, 2.0}, {1.0, -2.0, 0.5}};
  cfg.eta = 0.25;
  cfg.steps = 50;
  cfg.seeds = 1;
  const auto rep = run_descent_check(cfg);
  CHECK(rep.lemma_violations == 0);
  CHECK(rep.theorem_holds);
  // F strictly decreasing: replay the recursion
  std::vector<double> w = cfg.objective.start;
  double f = cfg.objective.value(w);
  for (int k = 0; k < 50; ++k) {
    const auto g = cfg.objective.gradient(w);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] -= cfg.eta * g[j];
    const double fn = cfg.objective.value(w);
    CHECK(fn < f);
    f = fn;
  }
}

TEST_CASE("one-step delayed descent on a 1-D quadratic matches the exact recursion") {
  const double lambda = 2.0, eta = 0.2;
  DescentCheckConfig cfg;
  cfg.objective = {{lambda}, {3.0}};
  cfg.eta = eta;
  cfg.tau_max = 1;
  cfg.delays = DelaySchedule::constant_max;
  cfg.steps = 30;
  cfg.seeds = 3;
  const auto rep = run_descent_check(cfg);
  REQUIRE(rep.lemma_residuals.size() == 30);
  double w_prev = 3.0, w = 3.0;
  for (int k = 0; k < 30; ++k) {
    const double stale = k == 0 ? w : w_prev;
    const double next = w - eta * lambda * stale;
    const double lhs = 0.5 * lambda * next * next;
    const double rhs = 0.5 * lambda * w * w - eta / 2 * lambda * lambda * w * w +
                       eta / 2 * (lambda * w - lambda * stale) * (lambda * w - lambda * stale);
    CHECK(rep.lemma_residuals[k] == doctest::Approx(rhs - lhs).epsilon(1e-9).scale(1e-12));
    CHECK(rhs - lhs >= -1e-15);
    w_prev = w;
    w = next;
  }
  CHECK(rep.lemma_violations == 0);
}

TEST_CASE("descent check rejects steps above 1/(2L)") {
  DescentCheckConfig cfg;
  cfg.objective = {{4.0}, {1.0}};
  cfg.eta = 0.2;
  CHECK_THROWS_AS(run_descent_check(cfg), std::invalid_argument);
  cfg.eta = 0.125;
  CHECK_NOTHROW(run_descent_check(cfg));
}

TEST_CASE("distance helpers") {
  const std::vector<double> a{1.0, -2.0, 3.0}, b{1.0, 2.0, 0.0};
  CHECK(linf_distance(a, b) == 4.0);
  CHECK(l2_distance(a, b) == doctest::Approx(5.0));
  CHECK_THROWS_AS(l2_distance(a, std::vector<double>{1.0}), std::invalid_argument);
}
