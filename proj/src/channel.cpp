#include "leofl/channel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace leofl::channel {

double dbm_to_watts(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }

double aperture_gain(double diameter_m, double frequency_hz, double efficiency) {
  const double x = std::numbers::pi * diameter_m * frequency_hz / kLightSpeed;
  return x * x * efficiency;
}

LinkBudget LinkBudget::from_apertures(double total_power_w, double tx_diameter_m, double rx_diameter_m,
                                      double efficiency, double f_lo, double f_hi) {
  LinkBudget lb;
  lb.f_lo = f_lo;
  lb.f_hi = f_hi;
  const double fc = 0.5 * (f_lo + f_hi);
  lb.tx_gain = aperture_gain(tx_diameter_m, fc, efficiency);
  lb.rx_gain = aperture_gain(rx_diameter_m, fc, efficiency);
  lb.set_flat_power(total_power_w);
  return lb;
}

double LinkBudget::psd_at(double f) const {
  for (const auto& s : tx_psd) {
    if (f >= s.f_lo && f <= s.f_hi) return s.psd;
  }
  return 0.0;
}

double LinkBudget::total_power() const {
  double p = 0.0;
  for (const auto& s : tx_psd) p += s.psd * (s.f_hi - s.f_lo);
  return p;
}

void LinkBudget::set_flat_power(double total_power_w) {
  tx_psd = {{f_lo, f_hi, total_power_w / (f_hi - f_lo)}};
}

void LinkBudget::validate() const {
  if (!(f_lo < f_hi)) throw std::invalid_argument("link budget: f_lo must be below f_hi");
  for (const auto& s : tx_psd) {
    if (!(s.psd >= 0) || !(s.f_lo < s.f_hi)) throw std::invalid_argument("link budget: bad PSD segment");
  }
  if (!(tx_gain > 0 && rx_gain > 0)) throw std::invalid_argument("link budget: gains must be positive");
  if (!(temperature > 0)) throw std::invalid_argument("link budget: temperature must be positive");
  if (sub_bands < 1) throw std::invalid_argument("link budget: sub_bands must be >= 1");
}

std::string to_string(PathClass c) { return c == PathClass::space_air ? "space-air" : "air-ground"; }

PathClass path_class_from_string(const std::string& s) {
  if (s == "space-air" || s == "space_air") return PathClass::space_air;
  if (s == "air-ground" || s == "air_ground") return PathClass::air_ground;
  throw std::invalid_argument("unknown path class: " + s);
}

AbsorptionModel AbsorptionModel::builtin() {
  AbsorptionModel m;
  // Above ~20 km the residual oxygen wing is tiny.
  m.set_table(PathClass::space_air, {{90e9, 1.9e-5}, {94e9, 2.0e-5}, {97e9, 2.1e-5}, {100e9, 2.3e-5}, {105e9, 2.6e-5}});
  // Sea-level standard atmosphere, 7.5 g/m^3 water vapour (~0.4 dB/km).
  m.set_table(PathClass::air_ground, {{90e9, 0.083}, {94e9, 0.088}, {97e9, 0.094}, {100e9, 0.101}, {105e9, 0.112}});
  return m;
}

void AbsorptionModel::set_table(PathClass c, Table t) {
  if (t.empty()) throw std::invalid_argument("absorption table is empty");
  std::sort(t.begin(), t.end());
  for (const auto& [f, k] : t) {
    if (!(k >= 0) || !std::isfinite(f)) throw std::invalid_argument("absorption coefficient must be >= 0");
  }
  tables_[c] = std::move(t);
}

const AbsorptionModel::Table& AbsorptionModel::table(PathClass c) const {
  auto it = tables_.find(c);
  if (it == tables_.end()) throw std::out_of_range("no absorption table for " + to_string(c));
  return it->second;
}

double AbsorptionModel::coefficient(double f, PathClass c) const {
  const Table& t = table(c);
  if (f < t.front().first || f > t.back().first) {
    throw std::out_of_range("frequency outside the absorption table");
  }
  if (t.size() == 1) return t.front().second;
  auto hi = std::lower_bound(t.begin(), t.end(), f, [](const auto& p, double v) { return p.first < v; });
  if (hi == t.begin()) return hi->second;
  auto lo = hi - 1;
  const double w = (f - lo->first) / (hi->first - lo->first);
  return lo->second + w * (hi->second - lo->second);
}

AbsorptionModel::Table AbsorptionModel::load_table(std::istream& is) {
  Table t;
  std::string line;
  while (std::getline(is, line)) {
    if (auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double f = 0, k = 0;
    if (!(ls >> f)) continue;
    if (!(ls >> k)) throw std::invalid_argument("absorption table row needs two columns: " + line);
    t.emplace_back(f, k);
  }
  if (t.empty()) throw std::invalid_argument("absorption table has no rows");
  return t;
}

AbsorptionModel::Table AbsorptionModel::load_table_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open absorption table " + path);
  return load_table(in);
}

void PointingModel::validate() const {
  if (!(error_angle >= 0 && error_sigma >= 0 && beam_waist_tx > 0 && rx_aperture_radius > 0)) {
    throw std::invalid_argument("pointing model parameters out of range");
  }
}

double PointingModel::draw_angle(std::mt19937_64& rng) const {
  if (error_sigma <= 0) return error_angle;
  std::normal_distribution<double> n(0.0, error_sigma);
  return std::abs(n(rng));
}

double pointing_loss(const PointingModel& pm, double z, double f, double angle) {
  if (!(z > 0)) throw std::invalid_argument("pointing_loss: distance must be positive");
  if (angle == 0.0) return 1.0;
  const double w_z = kLightSpeed * z / (std::numbers::pi * f * pm.beam_waist_tx);
  const double v = std::sqrt(std::numbers::pi / 2) * (pm.rx_aperture_radius / w_z);
  double w_eq2 = 0.0;
  if (v < 1e-8) {
    // erf(v) ~ 2v/sqrt(pi), exp(-v^2) ~ 1
    w_eq2 = w_z * w_z;
  } else if (v * v > 700.0) {
    return 1.0;  // equivalent waist overflows; misalignment is irrelevant
  } else {
    w_eq2 = w_z * w_z * std::sqrt(std::numbers::pi) * std::erf(v) / (2.0 * v * std::exp(-v * v));
  }
  const double off = z * std::tan(angle);
  return std::exp(-2.0 * off * off / w_eq2);
}

double absorption(const AbsorptionModel& am, double f, double path_length_km, PathClass c) {
  if (!(path_length_km >= 0)) throw std::invalid_argument("absorption: negative path length");
  if (path_length_km == 0.0) return 1.0;
  return std::exp(am.coefficient(f, c) * path_length_km);
}

double noise_density(double temperature_k, double noise_figure_db) {
  if (!(temperature_k > 0)) throw std::invalid_argument("noise_density: temperature must be positive");
  return kBoltzmann * temperature_k * std::pow(10.0, noise_figure_db / 10.0);
}

double capacity(const LinkBudget& lb, const AbsorptionModel& am, const PointingModel& pm, double d,
                const CapacityOptions& opt) {
  lb.validate();
  pm.validate();
  if (!(d > 0)) throw std::invalid_argument("capacity: distance must be positive");
  const double angle = opt.pointing_angle >= 0 ? opt.pointing_angle : pm.error_angle;
  const double noise = noise_density(lb.temperature, lb.noise_figure_db);
  auto spectral_eff = [&](double f) {
    const double psd = lb.psd_at(f);
    if (psd <= 0) return 0.0;
    const double fspl = kLightSpeed / (4.0 * std::numbers::pi * f * d);
    const double snr = psd * lb.tx_gain * lb.rx_gain * fspl * fspl * pointing_loss(pm, d, f, angle) /
                       (absorption(am, f, d / 1000.0, opt.path) * noise);
    return std::log2(1.0 + snr);
  };
  const int n = lb.sub_bands;
  const double h = (lb.f_hi - lb.f_lo) / n;
  double acc = 0.5 * (spectral_eff(lb.f_lo) + spectral_eff(lb.f_hi));
  for (int k = 1; k < n; ++k) acc += spectral_eff(lb.f_lo + k * h);
  return acc * h;
}

double per_satellite_rate(double total_capacity, int n_sharing) {
  if (n_sharing < 1) throw std::invalid_argument("per_satellite_rate: need at least one sharer");
  return total_capacity / n_sharing;
}

double transmission_latency(double payload_bytes, double rate_bps) {
  if (!(rate_bps > 0)) throw std::invalid_argument("transmission_latency: rate must be positive");
  return 8.0 * payload_bytes / rate_bps;
}

void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows) {
  os << "# schema: leofl.capacity v1\n";
  os << "power_dbm,distance_m,total_bps,per_sat_bps,latency_s_for_payload\n";
  for (const auto& r : rows) {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.6e,%.6e,%.6e\n", r.power_dbm, r.distance_m, r.total_bps,
                  r.per_sat_bps, r.latency_s);
    os << buf;
  }
}

}  // namespace leofl::channel
