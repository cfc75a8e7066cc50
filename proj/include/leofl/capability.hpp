#pragma once

#include <functional>
#include <vector>

#include "leofl/geometry.hpp"

namespace leofl::capability {

// Piecewise-constant processing rate: value of the last breakpoint at or before t.
struct ComputeSchedule {
  std::vector<std::pair<double, double>> breakpoints;  // (t_start s, FLOP/s), sorted

  static ComputeSchedule constant(double flops_per_s) { return {{{0.0, flops_per_s}}}; }
  double rate_at(double t) const;
  double integrate(double t0, double t1) const;
};

struct ResourceProfile {
  ComputeSchedule compute;
  int local_epochs = 1;
  double flops_per_batch = 1.0;
  double memory_bytes = 1.0;
  double global_model_bytes = 1.0;
  double local_model_bytes = 1.0;
  double proxy_model_bytes = 1.0;
  int dataset_size = 1;

  void validate() const;
};

struct CapabilityVector {
  double compute = 0.0;
  double memory = 0.0;
  double communication = 0.0;
};

struct Budget {
  double value = 0.0;
};

struct CapabilityOptions {
  bool normalize_comm_by_proxy = false;
  double quadrature_step = 1.0;  // s, trapezoid step for the capacity integral
};

// Integral of a rate trace over every interval of the window (trapezoid).
double integrate_over_window(const geometry::ContactWindow& window, const std::function<double(double)>& trace,
                             double step);

CapabilityVector compute_capability(const ResourceProfile& profile, const geometry::ContactWindow& window,
                                    const std::function<double(double)>& capacity_trace,
                                    const CapabilityOptions& opt = {});

Budget budget(const CapabilityVector& rho);

inline constexpr double kBudgetTiers[] = {1.0, 0.75, 0.5, 0.25};
// Largest tier not exceeding b (smallest tier when b is below all tiers).
double snap_to_tier(double b);

}  // namespace leofl::capability
