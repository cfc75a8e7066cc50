#include "leofl/orbital.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace leofl::orbital {

void PhysicalConstants::validate() const {
  if (!(earth_radius_km > 0 && gravitational_parameter > 0 && earth_rotation_rate >= 0 &&
        boltzmann > 0 && light_speed > 0)) {
    throw std::invalid_argument("physical constants must be positive");
  }
}

const PhysicalConstants& default_constants() {
  static const PhysicalConstants pc{};
  return pc;
}

int ConstellationSpec::satellite_count() const {
  return total_satellites > 0 ? total_satellites : num_planes * sats_per_plane;
}

int ConstellationSpec::satellites_in_plane(int plane) const {
  if (total_satellites <= 0) return sats_per_plane;
  const int base = total_satellites / num_planes;
  return base + (plane < total_satellites % num_planes ? 1 : 0);
}

void ConstellationSpec::validate() const {
  if (num_planes < 1) throw std::invalid_argument("constellation needs at least one plane");
  if (total_satellites <= 0 && sats_per_plane < 1) {
    throw std::invalid_argument("constellation needs at least one satellite per plane");
  }
  if (total_satellites > 0 && total_satellites < num_planes) {
    throw std::invalid_argument("total_satellites must cover every plane");
  }
  if (plane_altitudes_km.empty()) throw std::invalid_argument("no plane altitudes given");
  for (double h : plane_altitudes_km) {
    if (!(h > 0)) throw std::invalid_argument("plane altitude must be positive");
  }
  if (!(inclination >= 0 && inclination <= std::numbers::pi)) {
    throw std::invalid_argument("inclination must lie in [0, pi]");
  }
}

double OrbitalElements::mean_motion(const PhysicalConstants& pc) const {
  const double a = semi_major_axis_km;
  return std::sqrt(pc.gravitational_parameter / (a * a * a));
}

double OrbitalElements::period(const PhysicalConstants& pc) const { return kTwoPi / mean_motion(pc); }

void GroundAsset::validate() const {
  if (std::abs(latitude) > std::numbers::pi / 2 + 1e-15) {
    throw std::invalid_argument("asset latitude outside [-pi/2, pi/2]");
  }
  if (!(altitude_km >= 0)) throw std::invalid_argument("asset altitude must be >= 0");
}

double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

std::vector<OrbitalElements> build_constellation(const ConstellationSpec& spec,
                                                 const PhysicalConstants& pc) {
  spec.validate();
  const int planes = spec.num_planes;
  const int total = spec.satellite_count();
  const double per_plane = static_cast<double>(total) / planes;  // T in the phasing terms

  std::vector<OrbitalElements> out;
  out.reserve(static_cast<std::size_t>(total));
  for (int m = 0; m < planes; ++m) {
    const double altitude = spec.plane_altitudes_km[static_cast<std::size_t>(m) % spec.plane_altitudes_km.size()];
    const int in_plane = spec.satellites_in_plane(m);
    for (int i = 0; i < in_plane; ++i) {
      OrbitalElements e;
      e.semi_major_axis_km = pc.earth_radius_km + altitude;
      e.inclination = spec.inclination;
      e.plane_index = m;
      e.slot_index = i;
      e.raan = normalize_angle(spec.raan_ref + m * kTwoPi / planes);
      double anomaly = 0.0;
      if (spec.spacing == InPlaneSpacing::printed) {
        anomaly = spec.anomaly_ref + m * spec.phasing * kTwoPi / per_plane + i * planes * kTwoPi / per_plane;
      } else {
        anomaly = spec.anomaly_ref + m * spec.phasing * kTwoPi / total + i * kTwoPi / in_plane;
      }
      e.anomaly_at_epoch = normalize_angle(anomaly);
      out.push_back(e);
    }
  }
  return out;
}

double anomaly_at(const OrbitalElements& elem, double t, const PhysicalConstants& pc) {
  return normalize_angle(elem.anomaly_at_epoch + elem.mean_motion(pc) * t);
}

BodyState propagate(const OrbitalElements& elem, double t, const PhysicalConstants& pc) {
  if (!(elem.semi_major_axis_km > pc.earth_radius_km)) {
    throw std::invalid_argument("semi-major axis must exceed the Earth radius");
  }
  if (t < 0) throw std::invalid_argument("propagation time must be >= 0");
  const double u = anomaly_at(elem, t, pc);
  const double a = elem.semi_major_axis_km;
  // Rz(raan) * Rx(incl) * (a cos u, a sin u, 0)
  const double xp = a * std::cos(u);
  const double yp = a * std::sin(u);
  const double ci = std::cos(elem.inclination), si = std::sin(elem.inclination);
  const double co = std::cos(elem.raan), so = std::sin(elem.raan);
  const double y1 = yp * ci;
  const double z1 = yp * si;
  return {{xp * co - y1 * so, xp * so + y1 * co, z1}, t};
}

BodyState ground_position(const GroundAsset& asset, double t, const PhysicalConstants& pc) {
  const double r = pc.earth_radius_km + asset.altitude_km;
  const double lon = asset.longitude + pc.earth_rotation_rate * t;
  const double cl = std::cos(asset.latitude);
  return {{r * cl * std::cos(lon), r * cl * std::sin(lon), r * std::sin(asset.latitude)}, t};
}

}  // namespace leofl::orbital
