#include "leofl/studies.hpp"

#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include "leofl/geometry.hpp"

namespace leofl::sim {

std::string to_string(Architecture a) { return a == Architecture::sat_gs ? "sat-gs" : "sat-hap-gs"; }

Architecture architecture_from_string(const std::string& s) {
  if (s == "sat-gs") return Architecture::sat_gs;
  if (s == "sat-hap-gs") return Architecture::sat_hap_gs;
  throw std::invalid_argument("unknown architecture: " + s + " (expected sat-gs or sat-hap-gs)");
}

TopologyRow topology_row(const Scenario& base, double inclination_deg, int satellites, Architecture arch) {
  auto spec = base.constellation;
  spec.inclination = inclination_deg * std::numbers::pi / 180.0;
  spec.total_satellites = satellites;
  const auto sats = orbital::build_constellation(spec);
  std::vector<orbital::GroundAsset> assets;
  if (arch == Architecture::sat_hap_gs) assets = base.haps;
  assets.push_back(base.ground_station);
  const auto sum = geometry::contact_summary(sats, assets, base.visibility);
  return {inclination_deg, satellites, arch, 100.0 * sum.ever_visible_fraction, sum.mean_window,
          100.0 * sum.time_averaged_fraction};
}

std::vector<TopologyRow> topology_sweep(const Scenario& base, const std::vector<double>& inclinations_deg,
                                        const std::vector<int>& sizes, const std::vector<Architecture>& archs) {
  std::vector<TopologyRow> out;
  for (double inc : inclinations_deg)
    for (int n : sizes)
      for (auto a : archs) out.push_back(topology_row(base, inc, n, a));
  return out;
}

void write_topology_csv(std::ostream& os, const std::vector<TopologyRow>& rows) {
  os << "# schema: leofl.topology v1\n"
     << "inclination_deg,satellites,architecture,visible_pct,mean_window_s,time_avg_visible_pct\n";
  os << std::setprecision(10);
  for (const auto& r : rows)
    os << r.inclination_deg << ',' << r.satellites << ',' << to_string(r.architecture) << ',' << r.visible_pct << ','
       << r.mean_window_s << ',' << r.time_avg_visible_pct << '\n';
}

std::vector<channel::CapacityRow> capacity_sweep(const ChannelConfig& cfg, const std::vector<double>& powers_dbm,
                                                 const std::vector<double>& distances_km, double payload_bytes,
                                                 int n_sharing) {
  if (powers_dbm.empty() || distances_km.empty()) throw std::invalid_argument("capacity sweep: empty sweep");
  const auto am = channel::AbsorptionModel::builtin();
  std::vector<channel::CapacityRow> rows;
  for (double p : powers_dbm) {
    ChannelConfig c = cfg;
    c.power_dbm = p;
    auto lb = c.budget();
    for (double d : distances_km) {
      const double total = channel::capacity(lb, am, c.pointing, d * 1000.0);
      const double per = channel::per_satellite_rate(total, n_sharing);
      rows.push_back({p, d * 1000.0, total, per, channel::transmission_latency(payload_bytes, per)});
    }
  }
  return rows;
}

bool validate_csv(const std::string& path, const std::string& schema) {
  std::ifstream in(path);
  std::string line;
  if (!std::getline(in, line) || line != "# schema: " + schema) return false;
  if (!std::getline(in, line)) return false;
  const auto cols = std::count(line.begin(), line.end(), ',');
  while (std::getline(in, line))
    if (std::count(line.begin(), line.end(), ',') != cols) return false;
  return true;
}

}  // namespace leofl::sim
