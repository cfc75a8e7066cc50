#include "leofl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

namespace leofl::sim {

using nlohmann::json;

namespace {
constexpr double kDeg = std::numbers::pi / 180.0;

orbital::GroundAsset asset(double lat_deg, double lon_deg, double alt_km, orbital::AssetKind kind) {
  return {lat_deg * kDeg, lon_deg * kDeg, alt_km, kind};
}

template <typename T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

void take_deg(const json& j, const char* key, double& out) {
  if (j.contains(key)) out = j.at(key).get<double>() * kDeg;
}

json asset_json(const orbital::GroundAsset& a) {
  return {{"lat_deg", a.latitude / kDeg}, {"lon_deg", a.longitude / kDeg}, {"alt_km", a.altitude_km}};
}

orbital::GroundAsset asset_from(const json& j, orbital::AssetKind kind) {
  orbital::GroundAsset a{0.0, 0.0, 0.0, kind};
  take_deg(j, "lat_deg", a.latitude);
  take_deg(j, "lon_deg", a.longitude);
  take(j, "alt_km", a.altitude_km);
  a.validate();
  return a;
}
}  // namespace

std::string to_string(Scheme s) {
  switch (s) {
    case Scheme::proposed: return "proposed";
    case Scheme::async_baseline: return "async-baseline";
    case Scheme::sync_baseline: return "sync-baseline";
    case Scheme::ideal: return "ideal";
    case Scheme::no_injection: return "no-injection";
  }
  return "?";
}

Scheme scheme_from_string(const std::string& s) {
  for (auto v : {Scheme::proposed, Scheme::async_baseline, Scheme::sync_baseline, Scheme::ideal, Scheme::no_injection})
    if (to_string(v) == s) return v;
  throw std::invalid_argument("unknown scheme: " + s);
}

void AggregationConstants::validate() const {
  if (!(t_sync > 0.0)) throw std::invalid_argument("aggregation: t_sync must be > 0");
  if (mu_bal < 0.0 || mu_prox < 0.0 || kappa < 0.0 || nu < 0.0)
    throw std::invalid_argument("aggregation: constants must be >= 0");
  if (probe_batch <= 0) throw std::invalid_argument("aggregation: probe_batch must be > 0");
}

channel::LinkBudget ChannelConfig::budget() const {
  return channel::LinkBudget::from_apertures(channel::dbm_to_watts(power_dbm), tx_diameter_m, rx_diameter_m,
                                             aperture_efficiency);
}

void ChannelConfig::validate() const {
  if (!(tx_diameter_m > 0.0 && rx_diameter_m > 0.0)) throw std::invalid_argument("channel: apertures must be > 0");
  if (!(aperture_efficiency > 0.0 && aperture_efficiency <= 1.0))
    throw std::invalid_argument("channel: efficiency must be in (0, 1]");
  if (!(utility_step > 0.0)) throw std::invalid_argument("channel: utility_step must be > 0");
  pointing.validate();
}

void ResourceConfig::validate() const {
  if (!(peak_compute > 0.0 && flops_per_epoch > 0.0 && memory_bytes > 0.0 && global_model_bytes > 0.0))
    throw std::invalid_argument("resources: values must be > 0");
  if (local_epochs < 0) throw std::invalid_argument("resources: local_epochs must be >= 0");
}

void LearningConfig::validate() const {
  if (task.num_classes < 2 || task.feature_dim <= 0) throw std::invalid_argument("learning: bad task shape");
  if (train_per_satellite == 0 || test_size == 0) throw std::invalid_argument("learning: empty data");
  if (!iid && shards <= 0) throw std::invalid_argument("learning: shards must be > 0");
  distill.validate();
  inject.validate();
}

void Scenario::validate() const {
  constellation.validate();
  for (const auto& h : haps) h.validate();
  ground_station.validate();
  visibility.validate();
  channel.validate();
  resources.validate();
  learning.validate();
  aggregation.validate();
  if (haps.empty() && scheme != Scheme::ideal) throw std::invalid_argument("scenario: at least one HAP required");
  if (tiers.empty()) throw std::invalid_argument("scenario: tiers must be nonempty");
  for (double t : tiers)
    if (!(t > 0.0 && t <= 1.0)) throw std::invalid_argument("scenario: tiers must lie in (0, 1]");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("scenario: horizon must be >= 0");
}

orbital::GroundAsset table1_ground_station() { return asset(30.0, -90.0, 0.0, orbital::AssetKind::ground_station); }

std::vector<orbital::GroundAsset> table1_haps() {
  return {asset(15.0, -120.0, 20.0, orbital::AssetKind::hap), asset(45.0, -120.0, 20.0, orbital::AssetKind::hap)};
}

std::vector<std::string> preset_names() { return {"desk", "table1", "zenith"}; }

Scenario preset(const std::string& name) {
  Scenario s;
  s.name = name;
  s.ground_station = table1_ground_station();
  s.haps = table1_haps();
  if (name == "table1") {
    s.constellation.num_planes = 6;
    s.constellation.total_satellites = 50;
    s.constellation.phasing = 1;
    s.constellation.inclination = 70.0 * kDeg;
    s.constellation.plane_altitudes_km = {500.0, 1000.0, 1500.0};
    return s;
  }
  if (name == "desk") {
    s.constellation.num_planes = 4;
    s.constellation.sats_per_plane = 1;
    s.constellation.phasing = 1;
    s.constellation.inclination = 70.0 * kDeg;
    s.constellation.plane_altitudes_km = {500.0, 1000.0, 1500.0};
    // Desk-scale rates: the default rates are tuned for deep nets and barely
    // move these small dense models within a day of simulated time.
    s.learning.local.lr = 0.05;
    s.learning.local.batch_size = 64;
    s.learning.distill.lr_proxy = 0.05;
    s.learning.distill.lr_transmitter = 0.05;
    s.learning.distill.batch_size = 64;
    s.learning.inject.lr_local = 0.05;
    s.learning.inject.lr_receiver = 0.05;
    s.learning.inject.batch_size = 64;
    return s;
  }
  if (name == "zenith") {
    s = preset("desk");
    s.name = name;
    s.constellation = {};
    s.constellation.plane_altitudes_km = {42164.0 - 6371.0};
    s.haps = {asset(0.0, 0.0, 20.0, orbital::AssetKind::hap)};
    s.tiers = {1.0};
    s.aggregation.nu = 0.0;
    s.horizon = 7200.0;
    return s;
  }
  throw std::invalid_argument("unknown preset: " + name);
}

Scenario scenario_from_json(const json& j, Scenario s) {
  if (!j.contains("schema") || j.at("schema").get<int>() != kScenarioSchema)
    throw std::invalid_argument("scenario: missing or unsupported \"schema\" (expected 1)");
  take(j, "name", s.name);
  take(j, "horizon_s", s.horizon);
  take(j, "seed", s.seed);
  take(j, "continue_training", s.continue_training);
  if (j.contains("scheme")) s.scheme = scheme_from_string(j.at("scheme").get<std::string>());
  take(j, "tiers", s.tiers);
  if (j.contains("constellation")) {
    const auto& c = j.at("constellation");
    take(c, "num_planes", s.constellation.num_planes);
    take(c, "sats_per_plane", s.constellation.sats_per_plane);
    take(c, "total_satellites", s.constellation.total_satellites);
    take(c, "phasing", s.constellation.phasing);
    take_deg(c, "inclination_deg", s.constellation.inclination);
    take(c, "plane_altitudes_km", s.constellation.plane_altitudes_km);
    take_deg(c, "raan_ref_deg", s.constellation.raan_ref);
    take_deg(c, "anomaly_ref_deg", s.constellation.anomaly_ref);
    if (c.contains("spacing"))
      s.constellation.spacing = c.at("spacing").get<std::string>() == "conventional"
                                    ? orbital::InPlaneSpacing::conventional
                                    : orbital::InPlaneSpacing::printed;
  }
  if (j.contains("haps")) {
    s.haps.clear();
    for (const auto& h : j.at("haps")) s.haps.push_back(asset_from(h, orbital::AssetKind::hap));
  }
  if (j.contains("ground_station")) s.ground_station = asset_from(j.at("ground_station"), orbital::AssetKind::ground_station);
  if (j.contains("visibility")) {
    const auto& v = j.at("visibility");
    take_deg(v, "min_elev_sat_hap_deg", s.visibility.min_elev_sat_hap);
    take_deg(v, "min_elev_sat_gs_deg", s.visibility.min_elev_sat_gs);
    take(v, "coarse_step_s", s.visibility.coarse_step);
    take(v, "refine_tolerance_s", s.visibility.refine_tolerance);
  }
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    take(c, "power_dbm", s.channel.power_dbm);
    take(c, "tx_diameter_m", s.channel.tx_diameter_m);
    take(c, "rx_diameter_m", s.channel.rx_diameter_m);
    take(c, "aperture_efficiency", s.channel.aperture_efficiency);
    take(c, "pointing_error_rad", s.channel.pointing.error_angle);
    take(c, "pointing_sigma_rad", s.channel.pointing.error_sigma);
    take(c, "utility_step_s", s.channel.utility_step);
  }
  if (j.contains("resources")) {
    const auto& r = j.at("resources");
    take(r, "peak_compute_flops", s.resources.peak_compute);
    take(r, "flops_per_epoch", s.resources.flops_per_epoch);
    take(r, "local_epochs", s.resources.local_epochs);
    take(r, "memory_bytes", s.resources.memory_bytes);
    take(r, "global_model_bytes", s.resources.global_model_bytes);
  }
  if (j.contains("learning")) {
    const auto& l = j.at("learning");
    auto& L = s.learning;
    take(l, "num_classes", L.task.num_classes);
    take(l, "feature_dim", L.task.feature_dim);
    take(l, "clusters_per_class", L.task.clusters_per_class);
    take(l, "noise", L.task.noise);
    take(l, "task_seed", L.task.task_seed);
    take(l, "train_per_satellite", L.train_per_satellite);
    take(l, "test_size", L.test_size);
    take(l, "iid", L.iid);
    take(l, "shards", L.shards);
    take(l, "local_lr", L.local.lr);
    take(l, "local_batch", L.local.batch_size);
    take(l, "temperature", L.distill.temperature);
    if (l.contains("temperature")) L.inject.temperature = L.distill.temperature;
    take(l, "lambda_ce", L.distill.lambda_ce);
    take(l, "lambda_kl", L.distill.lambda_kl);
    take(l, "lr_distill", L.distill.lr_proxy);
    take(l, "lr_transmitter", L.distill.lr_transmitter);
    take(l, "alpha_inject", L.inject.alpha);
    take(l, "lr_inject", L.inject.lr_local);
    take(l, "lr_receiver", L.inject.lr_receiver);
    take(l, "transfer_batch", L.distill.batch_size);
    if (l.contains("transfer_batch")) L.inject.batch_size = L.distill.batch_size;
    take(l, "transfer_epochs", L.distill.epochs);
    if (l.contains("transfer_epochs")) L.inject.epochs = L.distill.epochs;
  }
  if (j.contains("aggregation")) {
    const auto& a = j.at("aggregation");
    take(a, "t_sync_s", s.aggregation.t_sync);
    take(a, "mu_bal", s.aggregation.mu_bal);
    take(a, "mu_prox", s.aggregation.mu_prox);
    take(a, "kappa", s.aggregation.kappa);
    take(a, "gamma", s.aggregation.nu);
    take(a, "nu", s.aggregation.nu);
    take(a, "probe_batch", s.aggregation.probe_batch);
  }
  s.validate();
  return s;
}

Scenario scenario_from_json(const json& j) {
  Scenario base = j.contains("preset") ? preset(j.at("preset").get<std::string>()) : Scenario{};
  return scenario_from_json(j, std::move(base));
}

json scenario_to_json(const Scenario& s) {
  const auto& c = s.constellation;
  const auto& L = s.learning;
  json haps = json::array();
  for (const auto& h : s.haps) haps.push_back(asset_json(h));
  return {
      {"schema", kScenarioSchema},
      {"name", s.name},
      {"horizon_s", s.horizon},
      {"seed", s.seed},
      {"continue_training", s.continue_training},
      {"scheme", to_string(s.scheme)},
      {"tiers", s.tiers},
      {"constellation",
       {{"num_planes", c.num_planes},
        {"sats_per_plane", c.sats_per_plane},
        {"total_satellites", c.total_satellites},
        {"phasing", c.phasing},
        {"inclination_deg", c.inclination / kDeg},
        {"plane_altitudes_km", c.plane_altitudes_km},
        {"raan_ref_deg", c.raan_ref / kDeg},
        {"anomaly_ref_deg", c.anomaly_ref / kDeg},
        {"spacing", c.spacing == orbital::InPlaneSpacing::conventional ? "conventional" : "printed"}}},
      {"haps", haps},
      {"ground_station", asset_json(s.ground_station)},
      {"visibility",
       {{"min_elev_sat_hap_deg", s.visibility.min_elev_sat_hap / kDeg},
        {"min_elev_sat_gs_deg", s.visibility.min_elev_sat_gs / kDeg},
        {"coarse_step_s", s.visibility.coarse_step},
        {"refine_tolerance_s", s.visibility.refine_tolerance}}},
      {"channel",
       {{"power_dbm", s.channel.power_dbm},
        {"tx_diameter_m", s.channel.tx_diameter_m},
        {"rx_diameter_m", s.channel.rx_diameter_m},
        {"aperture_efficiency", s.channel.aperture_efficiency},
        {"pointing_error_rad", s.channel.pointing.error_angle},
        {"pointing_sigma_rad", s.channel.pointing.error_sigma},
        {"utility_step_s", s.channel.utility_step}}},
      {"resources",
       {{"peak_compute_flops", s.resources.peak_compute},
        {"flops_per_epoch", s.resources.flops_per_epoch},
        {"local_epochs", s.resources.local_epochs},
        {"memory_bytes", s.resources.memory_bytes},
        {"global_model_bytes", s.resources.global_model_bytes}}},
      {"learning",
       {{"num_classes", L.task.num_classes},
        {"feature_dim", L.task.feature_dim},
        {"clusters_per_class", L.task.clusters_per_class},
        {"noise", L.task.noise},
        {"task_seed", L.task.task_seed},
        {"train_per_satellite", L.train_per_satellite},
        {"test_size", L.test_size},
        {"iid", L.iid},
        {"shards", L.shards},
        {"local_lr", L.local.lr},
        {"local_batch", L.local.batch_size},
        {"temperature", L.distill.temperature},
        {"lambda_ce", L.distill.lambda_ce},
        {"lambda_kl", L.distill.lambda_kl},
        {"lr_distill", L.distill.lr_proxy},
        {"lr_transmitter", L.distill.lr_transmitter},
        {"alpha_inject", L.inject.alpha},
        {"lr_inject", L.inject.lr_local},
        {"lr_receiver", L.inject.lr_receiver},
        {"transfer_batch", L.distill.batch_size},
        {"transfer_epochs", L.distill.epochs}}},
      {"aggregation",
       {{"t_sync_s", s.aggregation.t_sync},
        {"mu_bal", s.aggregation.mu_bal},
        {"mu_prox", s.aggregation.mu_prox},
        {"kappa", s.aggregation.kappa},
        {"nu", s.aggregation.nu},
        {"probe_batch", s.aggregation.probe_batch}}},
  };
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  return scenario_from_json(json::parse(in));
}

}  // namespace leofl::sim
