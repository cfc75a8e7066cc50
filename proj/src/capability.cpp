#include "leofl/capability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace leofl::capability {

double ComputeSchedule::rate_at(double t) const {
  double r = 0.0;
  for (const auto& [start, rate] : breakpoints) {
    if (start <= t) r = rate;
  }
  return r;
}

double ComputeSchedule::integrate(double t0, double t1) const {
  if (t1 <= t0 || breakpoints.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < breakpoints.size(); ++k) {
    const double seg_lo = std::max(t0, breakpoints[k].first);
    const double seg_hi = k + 1 < breakpoints.size() ? std::min(t1, breakpoints[k + 1].first) : t1;
    if (seg_hi > seg_lo) acc += breakpoints[k].second * (seg_hi - seg_lo);
  }
  return acc;
}

void ResourceProfile::validate() const {
  if (local_epochs < 1 || !(flops_per_batch > 0) || !(memory_bytes > 0) || !(global_model_bytes > 0) ||
      !(local_model_bytes > 0) || !(proxy_model_bytes > 0) || dataset_size < 1) {
    throw std::invalid_argument("resource profile fields must be positive");
  }
  if (proxy_model_bytes > local_model_bytes) {
    throw std::invalid_argument("proxy model must not exceed the local model size");
  }
  for (const auto& [t, r] : compute.breakpoints) {
    if (!(r >= 0)) throw std::invalid_argument("compute rate must be >= 0");
  }
}

double integrate_over_window(const geometry::ContactWindow& window, const std::function<double(double)>& trace,
                             double step) {
  if (!(step > 0)) throw std::invalid_argument("quadrature step must be positive");
  double acc = 0.0;
  for (const auto& iv : window.intervals) {
    const double len = iv.length();
    if (len <= 0) continue;
    const int n = std::max(1, static_cast<int>(std::ceil(len / step)));
    const double h = len / n;
    double s = 0.5 * (trace(iv.start) + trace(iv.end));
    for (int k = 1; k < n; ++k) s += trace(iv.start + k * h);
    acc += s * h;
  }
  return acc;
}

CapabilityVector compute_capability(const ResourceProfile& profile, const geometry::ContactWindow& window,
                                    const std::function<double(double)>& capacity_trace,
                                    const CapabilityOptions& opt) {
  profile.validate();
  CapabilityVector rho;
  rho.memory = std::min(1.0, profile.memory_bytes / profile.global_model_bytes);
  if (window.empty()) return rho;

  double work = 0.0;
  for (const auto& iv : window.intervals) work += profile.compute.integrate(iv.start, iv.end);
  rho.compute = std::min(1.0, work / (profile.local_epochs * profile.flops_per_batch));

  // capacity trace is in bits/s; model sizes are bytes
  const double bits = integrate_over_window(window, capacity_trace, opt.quadrature_step);
  const double norm = opt.normalize_comm_by_proxy ? profile.proxy_model_bytes : profile.local_model_bytes;
  rho.communication = std::min(1.0, bits / (8.0 * norm));
  return rho;
}

Budget budget(const CapabilityVector& rho) {
  return {std::clamp(std::min({rho.compute, rho.memory, rho.communication}), 0.0, 1.0)};
}

double snap_to_tier(double b) {
  for (double tier : kBudgetTiers) {
    if (b >= tier) return tier;
  }
  return kBudgetTiers[std::size(kBudgetTiers) - 1];
}

}  // namespace leofl::capability
