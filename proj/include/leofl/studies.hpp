#pragma once

#include <string>
#include <vector>

#include "leofl/channel.hpp"
#include "leofl/scenario.hpp"

namespace leofl::sim {

enum class Architecture { sat_gs, sat_hap_gs };
std::string to_string(Architecture a);
Architecture architecture_from_string(const std::string& s);

struct TopologyRow {
  double inclination_deg = 0.0;
  int satellites = 0;
  Architecture architecture = Architecture::sat_gs;
  double visible_pct = 0.0;     // satellites with any contact within their own period
  double mean_window_s = 0.0;   // over those satellites
  double time_avg_visible_pct = 0.0;
};

// Uses base's geometry (planes, altitudes, assets, thresholds) with the
// inclination and satellite count replaced.
TopologyRow topology_row(const Scenario& base, double inclination_deg, int satellites, Architecture arch);
std::vector<TopologyRow> topology_sweep(const Scenario& base, const std::vector<double>& inclinations_deg,
                                        const std::vector<int>& sizes, const std::vector<Architecture>& archs);
void write_topology_csv(std::ostream& os, const std::vector<TopologyRow>& rows);

std::vector<channel::CapacityRow> capacity_sweep(const ChannelConfig& cfg, const std::vector<double>& powers_dbm,
                                                 const std::vector<double>& distances_km, double payload_bytes,
                                                 int n_sharing);

// Checks the "# schema: <name>" header and that every data row has the header's column count.
bool validate_csv(const std::string& path, const std::string& schema);

}  // namespace leofl::sim
