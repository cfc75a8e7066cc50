#pragma once

#include <numbers>
#include <vector>

#include "leofl/vec3.hpp"

namespace leofl::orbital {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct PhysicalConstants {
  double earth_radius_km = 6371.0;
  double gravitational_parameter = 398600.4418;  // km^3/s^2
  double earth_rotation_rate = 7.2921159e-5;     // rad/s, sidereal
  double boltzmann = 1.380649e-23;               // J/K
  double light_speed = 299792458.0;              // m/s

  void validate() const;
};

const PhysicalConstants& default_constants();

// How consecutive slots within a plane are phased.
//   printed:      u0 + (m-1) F 2pi/T + (i-1) P 2pi/T
//   conventional: u0 + (m-1) F 2pi/N + (i-1) 2pi/T_m   (classic Walker delta)
enum class InPlaneSpacing { printed, conventional };

struct ConstellationSpec {
  int num_planes = 1;
  int sats_per_plane = 1;
  // When > 0, overrides num_planes * sats_per_plane; the remainder is spread
  // one-per-plane over the leading planes and T = total / P in the phasing.
  int total_satellites = 0;
  int phasing = 0;
  double inclination = 0.0;
  std::vector<double> plane_altitudes_km{550.0};
  double raan_ref = 0.0;
  double anomaly_ref = 0.0;
  InPlaneSpacing spacing = InPlaneSpacing::printed;

  int satellite_count() const;
  int satellites_in_plane(int plane) const;
  void validate() const;
};

struct OrbitalElements {
  double semi_major_axis_km = 0.0;
  double raan = 0.0;
  double anomaly_at_epoch = 0.0;
  double inclination = 0.0;
  int plane_index = 0;  // zero-based
  int slot_index = 0;   // zero-based

  double mean_motion(const PhysicalConstants& pc = default_constants()) const;
  double period(const PhysicalConstants& pc = default_constants()) const;
};

struct BodyState {
  Vec3 position;  // km, Earth-centred inertial
  double timestamp = 0.0;
};

enum class AssetKind { ground_station, hap };

struct GroundAsset {
  double latitude = 0.0;   // rad
  double longitude = 0.0;  // rad, at t = 0 measured from the inertial x axis
  double altitude_km = 0.0;
  AssetKind kind = AssetKind::ground_station;

  void validate() const;
};

double normalize_angle(double a);

std::vector<OrbitalElements> build_constellation(const ConstellationSpec& spec,
                                                 const PhysicalConstants& pc = default_constants());

double anomaly_at(const OrbitalElements& elem, double t, const PhysicalConstants& pc = default_constants());

BodyState propagate(const OrbitalElements& elem, double t,
                    const PhysicalConstants& pc = default_constants());

BodyState ground_position(const GroundAsset& asset, double t,
                          const PhysicalConstants& pc = default_constants());

}  // namespace leofl::orbital
