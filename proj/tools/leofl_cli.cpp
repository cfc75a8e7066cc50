#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "leofl/aggregation.hpp"
#include "leofl/scenario.hpp"
#include "leofl/simkernel.hpp"
#include "leofl/studies.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace leofl;

namespace {

struct Globals {
  std::string config;
  std::uint64_t seed = 1;
  bool seed_set = false;
  std::string out_dir = "out";
};

sim::Scenario base_scenario(const Globals& g, const std::string& preset) {
  sim::Scenario s = sim::preset(preset);
  if (!g.config.empty()) {
    std::ifstream in(g.config);
    if (!in) throw std::runtime_error("cannot open config " + g.config);
    s = sim::scenario_from_json(json::parse(in), s);
  }
  if (g.seed_set) s.seed = g.seed;
  return s;
}

fs::path output_path(const Globals& g, const std::string& out, const char* fallback) {
  fs::path p = out.empty() ? fs::path(g.out_dir) / fallback : fs::path(out);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  return p;
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error("output failed validation: " + what);
}

void write_json(const fs::path& p, const json& j) {
  std::ofstream f(p, std::ios::binary);
  f << j.dump(2) << '\n';
  f.close();
  std::ifstream in(p);
  require(json::parse(in).contains("schema"), p.string());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LEO-HAP federated learning simulator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "scenario JSON file (schema 1)")->envname("LEOFL_CONFIG");
  app.add_option_function<std::uint64_t>(
         "--seed", [&](std::uint64_t v) { g.seed = v, g.seed_set = true; }, "master seed")
      ->envname("LEOFL_SEED");
  app.add_option("--out-dir", g.out_dir, "output directory")->envname("LEOFL_OUT_DIR");

  // visibility
  auto* vis = app.add_subcommand("visibility", "contact statistics per inclination / constellation size");
  std::vector<double> inclinations{70.0};
  std::vector<int> sizes{50};
  std::string arch = "both", vis_out;
  vis->add_option("--inclination", inclinations, "inclination(s), degrees")->envname("LEOFL_INCLINATION");
  vis->add_option("--nsats", sizes, "constellation size(s)")->envname("LEOFL_NSATS");
  vis->add_option("--architecture", arch, "sat-gs | sat-hap-gs | both")->envname("LEOFL_ARCHITECTURE");
  vis->add_option("--out", vis_out, "CSV path (default <out-dir>/visibility.csv)");

  // capacity
  auto* cap = app.add_subcommand("capacity", "capacity / rate / latency versus distance");
  std::vector<double> powers{10.0, 20.0, 30.0}, distances;
  double payload = 0.0, efficiency = -1.0;
  int sharing = 1;
  std::string cap_out;
  cap->add_option("--power-dbm", powers, "transmit power(s), dBm")->envname("LEOFL_POWER_DBM");
  cap->add_option("--distance-km", distances, "distance(s), km (default 100..1500 step 100)")
      ->envname("LEOFL_DISTANCE_KM");
  cap->add_option("--payload-bytes", payload, "payload for latency (default: proxy size)")
      ->envname("LEOFL_PAYLOAD_BYTES");
  cap->add_option("--n-sharing", sharing, "satellites sharing the link")->check(CLI::PositiveNumber)
      ->envname("LEOFL_N_SHARING");
  cap->add_option("--aperture-efficiency", efficiency, "antenna aperture efficiency")
      ->envname("LEOFL_APERTURE_EFFICIENCY");
  cap->add_option("--out", cap_out, "CSV path (default <out-dir>/capacity.csv)");

  // train
  auto* train = app.add_subcommand("train", "end-to-end federated run");
  std::string preset = "desk", scheme = "proposed";
  std::vector<double> tiers;
  double horizon = -1.0;
  train->add_option("--preset", preset, "scenario preset")->envname("LEOFL_PRESET");
  train->add_option("--scheme", scheme, "proposed | async-baseline | sync-baseline | ideal | no-injection")
      ->envname("LEOFL_SCHEME");
  train->add_option("--tiers", tiers, "budget tier per satellite (cycled)")->envname("LEOFL_TIERS");
  train->add_option("--horizon", horizon, "simulated seconds")->envname("LEOFL_HORIZON");
  bool keep_training = false;
  train->add_flag("--continue-training", keep_training, "train again while waiting for the global proxy")
      ->envname("LEOFL_CONTINUE_TRAINING");

  // bound
  auto* bound = app.add_subcommand("bound", "convergence bound versus delayed SGD on a quadratic");
  double L = 1.0, sigma = 0.1, eta = 0.25;
  int tau_max = 2, steps = 200, seeds = 100, dim = 8;
  std::string delays = "uniform", bound_out;
  bound->add_option("--L", L, "smoothness")->envname("LEOFL_L");
  bound->add_option("--sigma", sigma, "gradient noise std")->envname("LEOFL_SIGMA");
  bound->add_option("--eta", eta, "step size (<= 1/(2L))")->envname("LEOFL_ETA");
  bound->add_option("--tau-max", tau_max, "maximum delay")->envname("LEOFL_TAU_MAX");
  bound->add_option("--K", steps, "steps")->envname("LEOFL_K");
  bound->add_option("--seeds", seeds, "Monte-Carlo seeds")->envname("LEOFL_SEEDS");
  bound->add_option("--dim", dim, "problem dimension")->envname("LEOFL_DIM");
  bound->add_option("--delays", delays, "uniform | constant")->envname("LEOFL_DELAYS");
  bound->add_option("--out", bound_out, "JSON path (default <out-dir>/bound.json)");

  // report
  auto* report = app.add_subcommand("report", "topology sweep plus capacity summary");
  std::string report_out;
  report->add_option("--out", report_out, "JSON path (default <out-dir>/report.json)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*vis) {
      const auto base = base_scenario(g, "table1");
      std::vector<sim::Architecture> archs;
      if (arch == "both")
        archs = {sim::Architecture::sat_gs, sim::Architecture::sat_hap_gs};
      else
        archs = {sim::architecture_from_string(arch)};
      const auto rows = sim::topology_sweep(base, inclinations, sizes, archs);
      const auto p = output_path(g, vis_out, "visibility.csv");
      {
        std::ofstream f(p, std::ios::binary);
        sim::write_topology_csv(f, rows);
      }
      require(sim::validate_csv(p.string(), "leofl.topology v1"), p.string());
      sim::write_topology_csv(std::cout, rows);
    } else if (*cap) {
      auto cfg = base_scenario(g, "desk").channel;
      if (efficiency > 0.0) cfg.aperture_efficiency = efficiency;
      if (distances.empty())
        for (int d = 100; d <= 1500; d += 100) distances.push_back(d);
      if (payload <= 0.0) {
        std::mt19937_64 rng(0);
        payload = 8.0 * static_cast<double>(fl::ProxyModel::make(32, 10, rng).dimension());
      }
      const auto rows = sim::capacity_sweep(cfg, powers, distances, payload, sharing);
      const auto p = output_path(g, cap_out, "capacity.csv");
      {
        std::ofstream f(p, std::ios::binary);
        channel::write_capacity_csv(f, rows);
      }
      require(sim::validate_csv(p.string(), "leofl.capacity v1"), p.string());
      channel::write_capacity_csv(std::cout, rows);
    } else if (*train) {
      auto s = base_scenario(g, preset);
      s.scheme = sim::scheme_from_string(scheme);
      if (!tiers.empty()) s.tiers = tiers;
      if (horizon >= 0.0) s.horizon = horizon;
      if (keep_training) s.continue_training = true;
      s.validate();
      const auto log = sim::run(s);
      const fs::path dir(g.out_dir);
      sim::write_run(log, dir.string());
      require(sim::validate_csv((dir / "events.csv").string(), "leofl.events v1"), "events.csv");
      require(sim::validate_csv((dir / "aggregation_trace.csv").string(), "leofl.aggregation v1"),
              "aggregation_trace.csv");
      require(sim::validate_csv((dir / "accuracy.csv").string(), "leofl.accuracy v1"), "accuracy.csv");
      std::cout << sim::summary_json(log).dump(2) << '\n';
      for (const auto& w : log.warnings) std::cerr << "warning: " << w << '\n';
    } else if (*bound) {
      if (dim <= 0) throw std::invalid_argument("--dim must be > 0");
      agg::DescentCheckConfig c;
      c.objective.eigenvalues.resize(static_cast<std::size_t>(dim));
      c.objective.start.assign(static_cast<std::size_t>(dim), 1.0);
      for (int j = 0; j < dim; ++j)
        c.objective.eigenvalues[static_cast<std::size_t>(j)] = L * (0.1 + 0.9 * j / std::max(1, dim - 1));
      c.eta = eta;
      c.tau_max = tau_max;
      c.sigma = sigma;
      c.steps = steps;
      c.seeds = seeds;
      c.base_seed = g.seed;
      if (delays == "constant")
        c.delays = agg::DelaySchedule::constant_max;
      else if (delays != "uniform")
        throw std::invalid_argument("--delays must be uniform or constant");
      const auto r = agg::run_descent_check(c);
      std::size_t violations = r.lemma_violations;
      const json j{{"schema", "leofl.bound v1"},
                   {"L", L},
                   {"sigma", sigma},
                   {"eta", eta},
                   {"tau_max", tau_max},
                   {"K", steps},
                   {"seeds", seeds},
                   {"delays", delays},
                   {"bound", r.bound},
                   {"avg_grad_norm_sq", r.avg_grad_norm_sq},
                   {"theorem_holds", r.theorem_holds},
                   {"lemma_violations", violations},
                   {"lemma_min_residual", *std::min_element(r.lemma_residuals.begin(), r.lemma_residuals.end())}};
      write_json(output_path(g, bound_out, "bound.json"), j);
      std::cout << j.dump(2) << '\n';
    } else if (*report) {
      const auto base = base_scenario(g, "table1");
      const auto rows = sim::topology_sweep(base, {10.0, 40.0, 70.0}, {50, 100, 150, 200},
                                            {sim::Architecture::sat_gs, sim::Architecture::sat_hap_gs});
      json topo = json::array();
      for (const auto& r : rows)
        topo.push_back({{"inclination_deg", r.inclination_deg},
                        {"satellites", r.satellites},
                        {"architecture", sim::to_string(r.architecture)},
                        {"visible_pct", r.visible_pct},
                        {"mean_window_s", r.mean_window_s}});
      json caps = json::array();
      for (const auto& r : sim::capacity_sweep(base.channel, {10.0, 20.0, 30.0}, {100, 500, 1000, 1500}, 1e6, 1))
        caps.push_back({{"power_dbm", r.power_dbm}, {"distance_m", r.distance_m}, {"total_bps", r.total_bps}});
      const json j{{"schema", "leofl.report v1"}, {"topology", topo}, {"capacity", caps}};
      write_json(output_path(g, report_out, "report.json"), j);
      std::cout << j.dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
