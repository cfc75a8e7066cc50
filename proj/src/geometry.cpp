#include "leofl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace leofl::geometry {

using orbital::GroundAsset;
using orbital::OrbitalElements;
using orbital::PhysicalConstants;

void VisibilityConfig::validate() const {
  const double half_pi = std::numbers::pi / 2;
  if (!(min_elev_sat_hap >= 0 && min_elev_sat_hap < half_pi && min_elev_sat_gs >= 0 && min_elev_sat_gs < half_pi)) {
    throw std::invalid_argument("elevation thresholds must lie in [0, pi/2)");
  }
  if (!(coarse_step > 0) || !(refine_tolerance > 0)) {
    throw std::invalid_argument("coarse_step and refine_tolerance must be positive");
  }
}

double ContactWindow::total_duration() const {
  double s = 0.0;
  for (const auto& iv : intervals) s += iv.length();
  return s;
}

bool ContactWindow::contains(double t) const {
  return std::any_of(intervals.begin(), intervals.end(), [t](const Interval& iv) { return iv.contains(t); });
}

const Interval* ContactWindow::next_from(double t) const {
  for (const auto& iv : intervals) {
    if (iv.end >= t) return &iv;
  }
  return nullptr;
}

double elevation(const Vec3& target, const Vec3& observer) {
  const Vec3 d = target - observer;
  const double dn = d.norm();
  const double on = observer.norm();
  if (on == 0.0) throw std::invalid_argument("elevation: observer at the origin");
  if (dn == 0.0) throw std::invalid_argument("elevation: target coincides with observer");
  const double c = std::clamp(d.dot(observer) / (dn * on), -1.0, 1.0);
  return std::numbers::pi / 2 - std::acos(c);
}

bool visible(const Vec3& target, const Vec3& observer, double threshold) {
  return elevation(target, observer) >= threshold;
}

ContactWindow extract_windows(const std::function<bool(double)>& pred, double t0, double t1, double step,
                              double tolerance) {
  ContactWindow out;
  if (!(t1 > t0)) return out;
  auto refine = [&](double lo, double hi, bool lo_val) {
    while (hi - lo > tolerance) {
      const double mid = 0.5 * (lo + hi);
      if (pred(mid) == lo_val) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return 0.5 * (lo + hi);
  };

  bool prev = pred(t0);
  double prev_t = t0;
  double open_start = t0;
  const auto n = static_cast<long long>(std::ceil((t1 - t0) / step));
  for (long long k = 1; k <= n; ++k) {
    const double t = std::min(t1, t0 + static_cast<double>(k) * step);
    const bool cur = pred(t);
    if (cur != prev) {
      const double edge = refine(prev_t, t, prev);
      if (cur) {
        open_start = edge;
      } else {
        out.intervals.push_back({open_start, edge});
      }
    }
    prev = cur;
    prev_t = t;
  }
  if (prev) out.intervals.push_back({open_start, t1});
  return out;
}

ContactWindow interval_union(const std::vector<ContactWindow>& parts) {
  std::vector<Interval> all;
  for (const auto& p : parts) all.insert(all.end(), p.intervals.begin(), p.intervals.end());
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.start < b.start; });
  ContactWindow out;
  for (const auto& iv : all) {
    if (!out.intervals.empty() && iv.start <= out.intervals.back().end) {
      out.intervals.back().end = std::max(out.intervals.back().end, iv.end);
    } else {
      out.intervals.push_back(iv);
    }
  }
  return out;
}

ContactWindow contact_window_single(const OrbitalElements& sat, const GroundAsset& asset,
                                    const VisibilityConfig& cfg, double horizon, const PhysicalConstants& pc) {
  return contact_windows(sat, {asset}, cfg, horizon, pc);
}

ContactWindow contact_windows(const OrbitalElements& sat, const std::vector<GroundAsset>& assets,
                              const VisibilityConfig& cfg, double horizon, const PhysicalConstants& pc) {
  cfg.validate();
  if (!(horizon > 0)) throw std::invalid_argument("contact window horizon must be positive");
  auto indicator = [&](double t) {
    const Vec3 r = orbital::propagate(sat, t, pc).position;
    for (const auto& a : assets) {
      const Vec3 g = orbital::ground_position(a, t, pc).position;
      if (visible(r, g, cfg.threshold_for(a.kind))) return true;
    }
    return false;
  };
  return extract_windows(indicator, 0.0, horizon, cfg.coarse_step, cfg.refine_tolerance);
}

Census visibility_census(const std::vector<OrbitalElements>& constellation, const std::vector<GroundAsset>& assets,
                         const VisibilityConfig& cfg, double t, const PhysicalConstants& pc) {
  Census c;
  if (constellation.empty()) return c;
  for (const auto& sat : constellation) {
    const Vec3 r = orbital::propagate(sat, t, pc).position;
    for (const auto& a : assets) {
      if (visible(r, orbital::ground_position(a, t, pc).position, cfg.threshold_for(a.kind))) {
        ++c.visible_count;
        break;
      }
    }
  }
  c.fraction = static_cast<double>(c.visible_count) / static_cast<double>(constellation.size());
  return c;
}

ContactSummary contact_summary(const std::vector<OrbitalElements>& constellation,
                               const std::vector<GroundAsset>& assets, const VisibilityConfig& cfg,
                               const PhysicalConstants& pc) {
  ContactSummary s;
  s.satellites = static_cast<int>(constellation.size());
  if (constellation.empty()) return s;
  double window_sum = 0.0;
  double duty_sum = 0.0;
  for (const auto& sat : constellation) {
    const double period = sat.period(pc);
    ContactWindow w = contact_windows(sat, assets, cfg, period, pc);
    const double total = w.total_duration();
    if (total > 0) {
      ++s.ever_visible;
      window_sum += total;
    }
    duty_sum += total / period;
    s.windows.push_back(std::move(w));
  }
  s.ever_visible_fraction = static_cast<double>(s.ever_visible) / s.satellites;
  s.mean_window = s.ever_visible > 0 ? window_sum / s.ever_visible : 0.0;
  s.time_averaged_fraction = duty_sum / s.satellites;
  return s;
}

double max_period(const std::vector<OrbitalElements>& constellation, const PhysicalConstants& pc) {
  double m = 0.0;
  for (const auto& s : constellation) m = std::max(m, s.period(pc));
  return m;
}

void write_window_csv(std::ostream& os, const std::vector<WindowRow>& rows) {
  os << "# schema: leofl.windows v1\n";
  os << "sat_id,asset_id,start_s,end_s\n";
  os.precision(6);
  os << std::fixed;
  for (const auto& r : rows) {
    os << r.sat_id << ',' << r.asset_id << ',' << r.interval.start << ',' << r.interval.end << '\n';
  }
}

}  // namespace leofl::geometry
