#pragma once

#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace leofl::channel {

inline constexpr double kBoltzmann = 1.380649e-23;
inline constexpr double kLightSpeed = 299792458.0;

double dbm_to_watts(double dbm);
// Parabolic aperture gain (pi D f / c)^2 * efficiency.
double aperture_gain(double diameter_m, double frequency_hz, double efficiency);

struct PsdSegment {
  double f_lo = 0.0;
  double f_hi = 0.0;
  double psd = 0.0;  // W/Hz
};

struct LinkBudget {
  double f_lo = 94.1e9;
  double f_hi = 100e9;
  std::vector<PsdSegment> tx_psd;  // piecewise constant over [f_lo, f_hi]
  double tx_gain = 1.0;
  double rx_gain = 1.0;
  double temperature = 220.0;   // K
  double noise_figure_db = 10.0;
  int sub_bands = 64;

  // Flat PSD of total_power_w over the band, gains from aperture diameters at band centre.
  static LinkBudget from_apertures(double total_power_w, double tx_diameter_m, double rx_diameter_m,
                                   double efficiency = 1.0, double f_lo = 94.1e9, double f_hi = 100e9);

  double psd_at(double f) const;
  double total_power() const;
  void set_flat_power(double total_power_w);
  void validate() const;
};

enum class PathClass { space_air, air_ground };
std::string to_string(PathClass c);
PathClass path_class_from_string(const std::string& s);

class AbsorptionModel {
 public:
  using Table = std::vector<std::pair<double, double>>;  // (Hz, 1/km), sorted by frequency

  // Built-in W-band table: near-transparent above the HAP layer, water-vapour
  // dominated through the troposphere.
  static AbsorptionModel builtin();

  void set_table(PathClass c, Table t);
  const Table& table(PathClass c) const;
  // Linear interpolation; throws std::out_of_range outside the tabulated span.
  double coefficient(double frequency_hz, PathClass c) const;

  // Two-column whitespace/comma separated text: frequency_hz kappa_per_km. '#' starts a comment.
  static Table load_table(std::istream& is);
  static Table load_table_file(const std::string& path);

 private:
  std::map<PathClass, Table> tables_;
};

struct PointingModel {
  double error_angle = 1e-6;      // rad
  double error_sigma = 0.0;       // rad, > 0 enables zero-mean Gaussian draws
  double beam_waist_tx = 0.1;     // m
  double rx_aperture_radius = 0.25;  // m

  void validate() const;
  // Fixed angle, or |N(0, sigma)| + error_angle draw when error_sigma > 0.
  double draw_angle(std::mt19937_64& rng) const;
};

double pointing_loss(const PointingModel& pm, double distance_m, double frequency_hz, double angle);
inline double pointing_loss(const PointingModel& pm, double distance_m, double frequency_hz) {
  return pointing_loss(pm, distance_m, frequency_hz, pm.error_angle);
}

double absorption(const AbsorptionModel& am, double frequency_hz, double path_length_km, PathClass c);

double noise_density(double temperature_k, double noise_figure_db);

struct CapacityOptions {
  PathClass path = PathClass::space_air;
  double pointing_angle = -1.0;  // < 0: use the model's fixed angle
};

double capacity(const LinkBudget& lb, const AbsorptionModel& am, const PointingModel& pm, double distance_m,
                const CapacityOptions& opt = {});

double per_satellite_rate(double total_capacity, int n_sharing);
double transmission_latency(double payload_bytes, double rate_bps);

struct CapacityRow {
  double power_dbm = 0.0;
  double distance_m = 0.0;
  double total_bps = 0.0;
  double per_sat_bps = 0.0;
  double latency_s = 0.0;
};
void write_capacity_csv(std::ostream& os, const std::vector<CapacityRow>& rows);

}  // namespace leofl::channel
