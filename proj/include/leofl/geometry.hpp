#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "leofl/orbital.hpp"

namespace leofl::geometry {

struct VisibilityConfig {
  double min_elev_sat_hap = 5.0 * std::numbers::pi / 180.0;
  double min_elev_sat_gs = 5.0 * std::numbers::pi / 180.0;
  double coarse_step = 1.0;        // s
  double refine_tolerance = 1e-3;  // s

  void validate() const;
  double threshold_for(orbital::AssetKind kind) const {
    return kind == orbital::AssetKind::hap ? min_elev_sat_hap : min_elev_sat_gs;
  }
};

struct Interval {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
  bool contains(double t) const { return t >= start && t <= end; }
};

struct ContactWindow {
  std::vector<Interval> intervals;

  double total_duration() const;
  bool empty() const { return intervals.empty(); }
  bool contains(double t) const;
  // First interval whose end is >= t, or nullptr.
  const Interval* next_from(double t) const;
};

// Elevation of target above the observer's local horizontal plane, in [-pi/2, pi/2].
double elevation(const Vec3& target, const Vec3& observer);
bool visible(const Vec3& target, const Vec3& observer, double threshold);

// Intervals on [t0, t1] where pred holds. Coarse sampling at `step`, then each
// sign change is bisected down to `tolerance`.
ContactWindow extract_windows(const std::function<bool(double)>& pred, double t0, double t1,
                              double step, double tolerance);

ContactWindow interval_union(const std::vector<ContactWindow>& parts);

ContactWindow contact_window_single(const orbital::OrbitalElements& sat, const orbital::GroundAsset& asset,
                                    const VisibilityConfig& cfg, double horizon,
                                    const orbital::PhysicalConstants& pc = orbital::default_constants());

// Union over all assets of the per-asset line-of-sight indicator.
ContactWindow contact_windows(const orbital::OrbitalElements& sat, const std::vector<orbital::GroundAsset>& assets,
                              const VisibilityConfig& cfg, double horizon,
                              const orbital::PhysicalConstants& pc = orbital::default_constants());

struct Census {
  int visible_count = 0;
  double fraction = 0.0;
};

// Instantaneous census at time t.
Census visibility_census(const std::vector<orbital::OrbitalElements>& constellation,
                         const std::vector<orbital::GroundAsset>& assets, const VisibilityConfig& cfg, double t,
                         const orbital::PhysicalConstants& pc = orbital::default_constants());

struct ContactSummary {
  int satellites = 0;
  int ever_visible = 0;            // satellites with a nonempty window over their horizon
  double ever_visible_fraction = 0.0;
  double mean_window = 0.0;        // mean total window over ever-visible satellites, s
  double time_averaged_fraction = 0.0;  // mean instantaneous visible fraction
  std::vector<ContactWindow> windows;   // per satellite
};

// Per-satellite integrated window over one orbital period of that satellite.
ContactSummary contact_summary(const std::vector<orbital::OrbitalElements>& constellation,
                               const std::vector<orbital::GroundAsset>& assets, const VisibilityConfig& cfg,
                               const orbital::PhysicalConstants& pc = orbital::default_constants());

double max_period(const std::vector<orbital::OrbitalElements>& constellation,
                  const orbital::PhysicalConstants& pc = orbital::default_constants());

// CSV rows (sat_id, asset_id|"union", start_s, end_s).
struct WindowRow {
  int sat_id = 0;
  std::string asset_id;
  Interval interval;
};
void write_window_csv(std::ostream& os, const std::vector<WindowRow>& rows);

}  // namespace leofl::geometry
