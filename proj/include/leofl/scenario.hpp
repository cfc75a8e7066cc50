#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "leofl/channel.hpp"
#include "leofl/dataset.hpp"
#include "leofl/flproxy.hpp"
#include "leofl/geometry.hpp"
#include "leofl/orbital.hpp"

#include "json.hpp"

namespace leofl::sim {

enum class Scheme { proposed, async_baseline, sync_baseline, ideal, no_injection };
std::string to_string(Scheme s);
Scheme scheme_from_string(const std::string& s);

struct AggregationConstants {
  double t_sync = 600.0;   // s
  double mu_bal = 1.0;
  double mu_prox = 0.1;
  double kappa = 1e-3;     // 1/s
  double nu = 1e-4;        // 1/s, constant volatility (also accepted as "gamma")
  int probe_batch = 64;
  void validate() const;
};

struct ChannelConfig {
  double power_dbm = 20.0;
  double tx_diameter_m = 0.2;
  double rx_diameter_m = 0.5;
  double aperture_efficiency = 1.0;
  channel::PointingModel pointing;
  double utility_step = 10.0;  // s, quadrature step of the capacity integral in the utility
  channel::LinkBudget budget() const;
  void validate() const;
};

// Wall-clock cost of one local round: local_epochs * flops_per_epoch / (budget * peak_compute).
struct ResourceConfig {
  double peak_compute = 1e9;       // FLOP/s at budget 1
  double flops_per_epoch = 3e11;   // FLOP
  int local_epochs = 2;
  double memory_bytes = 4e6;
  double global_model_bytes = 4e6;
  void validate() const;
};

struct LearningConfig {
  data::SyntheticSpec task;
  std::size_t train_per_satellite = 600;
  std::size_t test_size = 1000;
  bool iid = false;
  int shards = 240;
  fl::LocalTrainConfig local;
  fl::DistillConfig distill;
  fl::InjectConfig inject;
  void validate() const;
};

struct Scenario {
  std::string name = "custom";
  orbital::ConstellationSpec constellation;
  std::vector<orbital::GroundAsset> haps;
  orbital::GroundAsset ground_station;
  geometry::VisibilityConfig visibility;
  ChannelConfig channel;
  ResourceConfig resources;
  std::vector<double> tiers{1.0, 0.75, 0.5, 0.25};  // cycled over satellites
  LearningConfig learning;
  AggregationConstants aggregation;
  Scheme scheme = Scheme::proposed;
  double horizon = 86400.0;  // s
  // Start the next local round right after upload instead of idling until
  // the global proxy has been downloaded and injected.
  bool continue_training = false;
  std::uint64_t seed = 1;

  double tier_of(int sat) const { return tiers[static_cast<std::size_t>(sat) % tiers.size()]; }
  void validate() const;
};

inline constexpr int kScenarioSchema = 1;

std::vector<std::string> preset_names();
// "desk": 4 tiered satellites, 2 HAPs; "table1": topology study geometry;
// "zenith": one geostationary satellite over an equatorial HAP.
Scenario preset(const std::string& name);

// Overlays keys present in j onto base. Angles in the file are degrees.
Scenario scenario_from_json(const nlohmann::json& j, Scenario base);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);

// Topology study assets: GS at 30N 90W, HAPs at 15N and 45N on 120W, 20 km.
orbital::GroundAsset table1_ground_station();
std::vector<orbital::GroundAsset> table1_haps();

}  // namespace leofl::sim
