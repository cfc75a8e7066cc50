#include "leofl/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "leofl/capability.hpp"

namespace leofl::sim {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::sync_epoch: return "sync";
    case EventKind::upload_arrival: return "arrival";
    case EventKind::training_complete: return "training_complete";
    case EventKind::handover: return "handover";
  }
  return "?";
}

bool later(const Event& a, const Event& b) {
  if (a.time != b.time) return a.time > b.time;
  if (a.kind != b.kind) return a.kind > b.kind;
  if (a.sat != b.sat) return a.sat > b.sat;
  return a.seq > b.seq;
}

const Event& EventQueue::push(double time, EventKind kind, int sat, int hap) {
  if (!std::isfinite(time)) throw std::invalid_argument("EventQueue: non-finite event time");
  heap_.push(Event{time, kind, sat, hap, next_seq_++});
  return heap_.top();
}

Event EventQueue::pop() {
  if (heap_.empty()) throw std::logic_error("EventQueue: pop on empty queue");
  Event e = heap_.top();
  heap_.pop();
  return e;
}

std::vector<double> schedule_sync(double period, double horizon) {
  if (!(period > 0.0)) throw std::invalid_argument("schedule_sync: period must be > 0");
  std::vector<double> out;
  for (long k = 1; static_cast<double>(k) * period <= horizon; ++k) out.push_back(static_cast<double>(k) * period);
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Phase { training, awaiting_upload, uploading, waiting_global, idle };

struct Satellite {
  int id = 0;
  double budget = 1.0;
  data::Dataset shard;
  fl::LocalLearner learner;
  fl::ProxyModel proxy;
  fl::KnowledgeTransmitter transmitter;
  std::mt19937_64 rng;
  Phase phase = Phase::training;
  double t_gen = 0.0;
  int upload_hap = -1;
  bool awaiting_global = false;
  bool download_pending = false;
  agg::ParamVec payload;   // outgoing proxy
  agg::ParamVec incoming;  // global (or HAP) proxy being downloaded
};

class Simulator {
 public:
  explicit Simulator(const Scenario& s) : sc_(s) {}

  RunLog run() {
    sc_.validate();
    log_.scheme = to_string(sc_.scheme);
    setup();
    if (sc_.scheme == Scheme::ideal)
      run_ideal();
    else
      run_events();
    finish();
    return std::move(log_);
  }

 private:
  const Scenario& sc_;
  RunLog log_;
  std::vector<orbital::OrbitalElements> elems_;
  std::vector<Satellite> sats_;
  data::Dataset test_;
  fl::Batch probe_;
  fl::ProxyModel global_;
  std::vector<agg::HapState> haps_;
  std::vector<std::vector<geometry::ContactWindow>> windows_;  // [sat][hap]
  channel::LinkBudget link_;
  channel::AbsorptionModel absorption_ = channel::AbsorptionModel::builtin();
  EventQueue queue_;
  std::vector<int> group_of_;  // sat -> hap or -1
  std::vector<std::vector<agg::MassSegment>> mass_trace_;  // per hap
  std::vector<double> mass_since_;
  int epoch_ = 0;
  double last_sync_ = 0.0;
  std::vector<int> sync_round_arrivals_;  // sync baseline

  double proxy_bytes() const { return static_cast<double>(global_.dimension()) * 8.0; }

  double compute_time(const Satellite& s) const {
    const double b = sc_.scheme == Scheme::ideal ? 1.0 : s.budget;
    return sc_.resources.local_epochs * sc_.resources.flops_per_epoch / (b * sc_.resources.peak_compute);
  }

  void setup() {
    const auto& L = sc_.learning;
    elems_ = orbital::build_constellation(sc_.constellation);
    const int n = static_cast<int>(elems_.size());
    data::SyntheticTask task(L.task);
    const auto train = task.sample(L.train_per_satellite * static_cast<std::size_t>(n), sc_.seed * 7919 + 1);
    test_ = task.sample(L.test_size, sc_.seed * 7919 + 2);
    auto probe_set = task.sample(static_cast<std::size_t>(sc_.aggregation.probe_batch), sc_.seed * 7919 + 3);
    std::vector<std::size_t> all(probe_set.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    probe_ = fl::make_batch(probe_set, all);
    const auto shards = L.iid ? data::partition_iid(train, n, sc_.seed * 7919 + 4)
                              : data::partition_shards(train, n, std::max(L.shards, n), sc_.seed * 7919 + 4);

    std::mt19937_64 init_rng(sc_.seed * 7919 + 5);
    global_ = fl::ProxyModel::make(L.task.feature_dim, L.task.num_classes, init_rng);
    for (int i = 0; i < n; ++i) {
      Satellite s;
      s.id = i;
      s.budget = sc_.tier_of(i);
      s.shard = shards[static_cast<std::size_t>(i)];
      s.rng.seed(sc_.seed * 1000003ULL + static_cast<std::uint64_t>(i) * 7919ULL + 11);
      auto model = fl::LocalModel::make(L.task.feature_dim, s.budget, L.task.num_classes, s.rng);
      auto recv = fl::KnowledgeReceiver::make(model.feature_dim(), fl::kProxyWidth, s.rng);
      s.learner = fl::LocalLearner{std::move(model), std::move(recv), std::nullopt};
      s.transmitter = fl::KnowledgeTransmitter::make(s.learner.model.feature_dim(), fl::kProxyWidth, s.rng);
      s.proxy = global_;
      sats_.push_back(std::move(s));
    }
    link_ = sc_.channel.budget();
    group_of_.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t h = 0; h < sc_.haps.size(); ++h) haps_.push_back({static_cast<int>(h), global_.flat(), 0.0});
    mass_trace_.assign(sc_.haps.size(), {});
    mass_since_.assign(sc_.haps.size(), 0.0);
    if (sc_.scheme == Scheme::ideal || sc_.horizon <= 0.0) return;
    windows_.resize(static_cast<std::size_t>(n));
    bool any = false;
    for (int i = 0; i < n; ++i)
      for (const auto& hap : sc_.haps) {
        windows_[static_cast<std::size_t>(i)].push_back(
            geometry::contact_window_single(elems_[static_cast<std::size_t>(i)], hap, sc_.visibility, sc_.horizon));
        any = any || !windows_[static_cast<std::size_t>(i)].back().empty();
      }
    if (!any) {
      log_.no_contacts = true;
      log_.warnings.push_back("no satellite-HAP contact within the horizon");
    }
  }

  double distance_m(int sat, int hap, double t) const {
    const auto p = orbital::propagate(elems_[static_cast<std::size_t>(sat)], t).position;
    const auto q = orbital::ground_position(sc_.haps[static_cast<std::size_t>(hap)], t).position;
    return distance(p, q) * 1000.0;
  }

  double link_capacity(int sat, int hap, double t) const {
    return channel::capacity(link_, absorption_, sc_.channel.pointing, distance_m(sat, hap, t));
  }

  // Earliest t' >= t with some HAP in view; nullopt if none before the horizon.
  std::optional<double> next_contact(int sat, double t) const {
    std::optional<double> best;
    for (const auto& w : windows_[static_cast<std::size_t>(sat)]) {
      const auto* iv = w.next_from(t);
      if (!iv) continue;
      const double start = std::max(t, iv->start);
      if (!best || start < *best) best = start;
    }
    if (best && *best > sc_.horizon) return std::nullopt;
    return best;
  }

  std::vector<int> members(int hap) const {
    std::vector<int> m;
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      if (group_of_[i] == hap) m.push_back(static_cast<int>(i));
    return m;
  }

  double mass_of(int hap) const {
    double m = 0.0;
    for (int i : members(hap)) {
      const auto& s = sats_[static_cast<std::size_t>(i)];
      m += static_cast<double>(s.shard.size()) * s.budget;
    }
    return m;
  }

  void set_group(int sat, int hap, double t) {
    const int old = group_of_[static_cast<std::size_t>(sat)];
    if (old == hap) return;
    for (int h : {old, hap}) {
      if (h < 0) continue;
      auto& since = mass_since_[static_cast<std::size_t>(h)];
      if (t > since) mass_trace_[static_cast<std::size_t>(h)].push_back({since, t, mass_of(h)});
      since = t;
    }
    group_of_[static_cast<std::size_t>(sat)] = hap;
    agg::GroupAssignment a;
    a.timestamp = t;
    for (std::size_t i = 0; i < group_of_.size(); ++i)
      if (group_of_[i] >= 0) a.groups[group_of_[i]].insert(static_cast<int>(i));
    log_.groups.push_back({t, std::move(a)});
  }

  double utility_of(int sat, int hap, double t) const {
    const auto* iv = windows_[static_cast<std::size_t>(sat)][static_cast<std::size_t>(hap)].next_from(t);
    if (!iv || iv->start > t) return -kInf;
    geometry::ContactWindow rest{{{t, iv->end}}};
    const double integral = capability::integrate_over_window(
        rest, [&](double tau) { return link_capacity(sat, hap, tau); }, sc_.channel.utility_step);
    std::vector<agg::MemberLoad> load;
    for (int j : members(hap))
      if (j != sat) load.push_back({proxy_bytes(), sats_[static_cast<std::size_t>(j)].budget});
    return agg::utility(integral, load, sc_.aggregation.mu_bal);
  }

  double latency(int sat, int hap, double t) const {
    int sharing = 1;
    for (int j : members(hap)) sharing += j != sat;
    const double rate = channel::per_satellite_rate(link_capacity(sat, hap, t), sharing);
    return channel::transmission_latency(proxy_bytes(), rate);
  }

  int nearest_visible_hap(int sat, double t) const {
    int best = -1;
    double best_d = kInf;
    for (std::size_t h = 0; h < sc_.haps.size(); ++h) {
      if (!windows_[static_cast<std::size_t>(sat)][h].contains(t)) continue;
      const double d = distance_m(sat, static_cast<int>(h), t);
      if (d < best_d) best_d = d, best = static_cast<int>(h);
    }
    return best;
  }

  void log_sat_accuracy(double t, Satellite& s) {
    log_.accuracy.push_back({t, s.id, fl::accuracy(s.learner, test_)});
  }

  void start_round(Satellite& s, double t) {
    s.phase = Phase::training;
    s.t_gen = t;
    const double done = t + compute_time(s);
    if (done <= sc_.horizon)
      queue_.push(done, EventKind::training_complete, s.id);
    else
      s.phase = Phase::idle;
  }

  void train_locally(Satellite& s) {
    fl::LocalTrainConfig lc = sc_.learning.local;
    lc.epochs = sc_.resources.local_epochs;
    fl::local_train(s.learner, s.shard, lc, s.rng);
    fl::distill_epochs(s.learner, s.proxy, s.transmitter, s.shard, sc_.learning.distill, s.rng);
  }

  void on_training_complete(Satellite& s, double t) {
    train_locally(s);
    s.payload = s.proxy.flat();
    const auto tc = next_contact(s.id, t);
    if (!tc) {
      s.phase = Phase::idle;
      return;
    }
    s.phase = Phase::awaiting_upload;
    queue_.push(*tc, EventKind::handover, s.id, -1);
  }

  void on_upload_start(Satellite& s, double t) {
    std::vector<std::optional<double>> row(sc_.haps.size());
    for (std::size_t h = 0; h < sc_.haps.size(); ++h) {
      const double u = utility_of(s.id, static_cast<int>(h), t);
      if (u > -kInf) row[h] = u;
    }
    const auto a = agg::assign_groups({row}, t);
    if (a.groups.empty()) {
      s.phase = Phase::idle;
      return;
    }
    const int hap = a.groups.begin()->first;
    set_group(s.id, hap, t);
    s.upload_hap = hap;
    s.phase = Phase::uploading;
    const double arrive = t + latency(s.id, hap, t);
    if (arrive <= sc_.horizon) queue_.push(arrive, EventKind::upload_arrival, s.id, hap);
  }

  void on_arrival(Satellite& s, int hap, double t) {
    auto& hs = haps_[static_cast<std::size_t>(hap)];
    std::vector<double> budgets;
    for (int j : members(hap)) budgets.push_back(sats_[static_cast<std::size_t>(j)].budget);
    const agg::StalenessRecord rec{s.t_gen, t, sc_.aggregation.nu};
    AggregationRow row{t, "arrival", s.id, hap, 0.0, rec.staleness(), epoch_, 0.0, 0.0};
    if (sc_.scheme == Scheme::sync_baseline) {
      row.eta = 0.0;
      row.dist_before = row.dist_after = agg::l2_distance(hs.omega, s.payload);
      log_.aggregation.push_back(row);
      after_upload(s, t);
      if (std::find(sync_round_arrivals_.begin(), sync_round_arrivals_.end(), s.id) == sync_round_arrivals_.end())
        sync_round_arrivals_.push_back(s.id);
      if (sync_round_arrivals_.size() == sats_.size()) fedavg_round(t);
      return;
    }
    row.eta = agg::stage1_weight(rec, s.budget, budgets);
    row.dist_before = agg::l2_distance(hs.omega, s.payload);
    agg::stage1_update(hs, s.payload, row.eta, t);
    row.dist_after = agg::l2_distance(hs.omega, s.payload);
    log_.aggregation.push_back(row);
    after_upload(s, t);
    if (sc_.scheme == Scheme::async_baseline) schedule_download(s, t, hap, hs.omega);
  }

  void after_upload(Satellite& s, double t) {
    s.awaiting_global = true;
    if (sc_.continue_training)
      start_round(s, t);
    else
      s.phase = Phase::waiting_global;
  }

  void schedule_download(Satellite& s, double t, int hap, const agg::ParamVec& model) {
    if (s.download_pending) {
      s.incoming = model;  // newer model replaces the one in flight
      return;
    }
    if (hap < 0 || !windows_[static_cast<std::size_t>(s.id)][static_cast<std::size_t>(hap)].contains(t)) {
      const auto tc = next_contact(s.id, t);
      if (!tc) return;
      t = *tc;
      hap = nearest_visible_hap(s.id, t);
    }
    const double done = t + latency(s.id, hap, t);
    if (done > sc_.horizon) return;
    s.incoming = model;
    s.download_pending = true;
    queue_.push(done, EventKind::handover, s.id, hap);
  }

  void on_download(Satellite& s, double t) {
    s.download_pending = false;
    s.awaiting_global = false;
    fl::ProxyModel incoming = global_;
    incoming.assign(s.incoming);
    s.proxy = incoming;
    if (sc_.scheme != Scheme::no_injection) {
      s.learner.global_proxy = std::move(incoming);
      fl::inject_epochs(s.learner, s.shard, sc_.learning.inject, s.rng);
    }
    ++log_.rounds_completed;
    log_sat_accuracy(t, s);
    if (s.phase == Phase::waiting_global) start_round(s, t);
  }

  void fedavg_round(double t) {
    agg::ParamVec mean(global_.dimension(), 0.0);
    double total = 0.0;
    for (int i : sync_round_arrivals_) {
      const auto& s = sats_[static_cast<std::size_t>(i)];
      const double w = static_cast<double>(s.shard.size());
      for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w * s.payload[j];
      total += w;
    }
    for (auto& v : mean) v /= total;
    global_.assign(mean);
    ++epoch_;
    log_.aggregation.push_back({t, "sync", -1, -1, 0.0, 0.0, epoch_, 0.0, 0.0});
    log_.accuracy.push_back({t, -1, fl::accuracy(global_, test_)});
    for (int i : sync_round_arrivals_) {
      auto& s = sats_[static_cast<std::size_t>(i)];
      schedule_download(s, t, s.upload_hap, mean);
    }
    sync_round_arrivals_.clear();
  }

  void on_sync(double t) {
    std::vector<agg::ParamVec> states;
    std::vector<double> gammas;
    for (std::size_t h = 0; h < haps_.size(); ++h) {
      auto trace = mass_trace_[h];
      if (t > mass_since_[h]) trace.push_back({mass_since_[h], t, mass_of(static_cast<int>(h))});
      double gamma = 0.0;
      if (agg::info_yield(trace, last_sync_, t, 1.0, sc_.aggregation.kappa) > 0.0) {
        fl::ProxyModel probe_model = global_;
        probe_model.assign(haps_[h].omega);
        const double tr = agg::fisher_trace(probe_model, probe_);
        gamma = agg::info_yield(trace, last_sync_, t, tr, sc_.aggregation.kappa);
      }
      states.push_back(haps_[h].omega);
      gammas.push_back(gamma);
    }
    double sum_gamma = 0.0;
    for (double g : gammas) sum_gamma += g;
    if (2.0 * sum_gamma + sc_.aggregation.mu_prox > 0.0)
      global_.assign(agg::stage2_aggregate(states, gammas, global_.flat(), sc_.aggregation.mu_prox));
    ++epoch_;
    last_sync_ = t;
    const auto g = global_.flat();
    for (auto& hs : haps_) {
      hs.omega = g;
      hs.last_update = t;
    }
    log_.aggregation.push_back({t, "sync", -1, -1, sum_gamma, 0.0, epoch_, 0.0, 0.0});
    log_.accuracy.push_back({t, -1, fl::accuracy(global_, test_)});
    for (auto& s : sats_)
      if (s.awaiting_global) schedule_download(s, t, -1, g);
  }

  void run_events() {
    if (sc_.horizon <= 0.0) return;
    if (sc_.scheme == Scheme::proposed || sc_.scheme == Scheme::no_injection)
      for (double t : schedule_sync(sc_.aggregation.t_sync, sc_.horizon)) queue_.push(t, EventKind::sync_epoch);
    for (auto& s : sats_) start_round(s, 0.0);
    while (!queue_.empty()) {
      const Event e = queue_.pop();
      log_.events.push_back(e);
      if (e.kind == EventKind::sync_epoch) {
        on_sync(e.time);
        continue;
      }
      auto& s = sats_[static_cast<std::size_t>(e.sat)];
      switch (e.kind) {
        case EventKind::training_complete: on_training_complete(s, e.time); break;
        case EventKind::upload_arrival: on_arrival(s, e.hap, e.time); break;
        case EventKind::handover:
          if (e.hap < 0)
            on_upload_start(s, e.time);
          else
            on_download(s, e.time);
          break;
        case EventKind::sync_epoch: break;
      }
    }
  }

  // Synchronous rounds with no visibility, staleness or budget gating.
  void run_ideal() {
    const double period = compute_time(sats_.front());
    for (double t = period; t <= sc_.horizon; t += period) {
      agg::ParamVec mean(global_.dimension(), 0.0);
      double total = 0.0;
      for (auto& s : sats_) {
        s.t_gen = t - period;
        train_locally(s);
        const auto p = s.proxy.flat();
        const double w = static_cast<double>(s.shard.size());
        for (std::size_t j = 0; j < mean.size(); ++j) mean[j] += w * p[j];
        total += w;
        log_.events.push_back({t, EventKind::training_complete, s.id, -1, log_.events.size()});
      }
      for (auto& v : mean) v /= total;
      global_.assign(mean);
      ++epoch_;
      log_.aggregation.push_back({t, "sync", -1, -1, 0.0, 0.0, epoch_, 0.0, 0.0});
      log_.accuracy.push_back({t, -1, fl::accuracy(global_, test_)});
      for (auto& s : sats_) on_download_ideal(s, t);
    }
  }

  void on_download_ideal(Satellite& s, double t) {
    fl::ProxyModel incoming = global_;
    s.proxy = incoming;
    s.learner.global_proxy = std::move(incoming);
    fl::inject_epochs(s.learner, s.shard, sc_.learning.inject, s.rng);
    ++log_.rounds_completed;
    log_sat_accuracy(t, s);
  }

  void finish() {
    double lo = kInf, hi = -kInf, sum = 0.0;
    for (auto& s : sats_) {
      const double a = fl::accuracy(s.learner, test_);
      log_.final_accuracy.push_back(a);
      lo = std::min(lo, a);
      hi = std::max(hi, a);
      sum += a;
    }
    if (!sats_.empty()) {
      log_.mean_accuracy = sum / static_cast<double>(sats_.size());
      log_.accuracy_spread = hi - lo;
    }
    log_.global_proxy_accuracy = fl::accuracy(global_, test_);
    if (sc_.scheme != Scheme::ideal && sc_.horizon > 0.0 &&
        std::none_of(log_.aggregation.begin(), log_.aggregation.end(),
                     [](const AggregationRow& r) { return r.kind == "arrival"; }))
      log_.warnings.push_back("empty aggregation trace");
    group_report();
  }

  // Theta_i = (rho_cmp, rho_mem, rho_com, B, Phi_p) over each satellite's first period.
  void group_report() {
    if (sc_.scheme == Scheme::ideal || log_.groups.empty()) {
      log_.group_metrics = nlohmann::json::object();
      return;
    }
    std::map<int, std::vector<double>> theta;
    for (auto& s : sats_) {
      const double period = elems_[static_cast<std::size_t>(s.id)].period();
      geometry::ContactWindow w;
      for (const auto& hw : windows_[static_cast<std::size_t>(s.id)])
        for (const auto& iv : hw.intervals)
          if (iv.start < period) w.intervals.push_back({iv.start, std::min(iv.end, period)});
      w = geometry::interval_union({w});
      capability::ResourceProfile p;
      p.compute = capability::ComputeSchedule::constant(s.budget * sc_.resources.peak_compute);
      p.local_epochs = std::max(1, sc_.resources.local_epochs);
      p.flops_per_batch = sc_.resources.flops_per_epoch;
      p.memory_bytes = sc_.resources.memory_bytes;
      p.global_model_bytes = sc_.resources.global_model_bytes;
      p.local_model_bytes =
          8.0 * static_cast<double>(s.learner.model.body.scalar_count() + s.learner.model.head.scalar_count());
      p.proxy_model_bytes = proxy_bytes();
      p.dataset_size = static_cast<int>(s.shard.size());
      const auto rho = capability::compute_capability(
          p, w,
          [&](double t) {
            const int h = nearest_visible_hap(s.id, t);
            return h < 0 ? 0.0 : link_capacity(s.id, h, t);
          },
          {false, sc_.channel.utility_step});
      theta[s.id] = {rho.compute, rho.memory, rho.communication, s.budget, proxy_bytes()};
    }
    const auto m = agg::group_metrics(log_.groups.back().assignment, theta);
    nlohmann::json j;
    for (const auto& [h, n] : m.sizes) {
      j["groups"][std::to_string(h)] = {{"size", n},
                                        {"mean_intra_distance", m.mean_intra_distance.at(h)},
                                        {"centroid", m.centroids.at(h)}};
    }
    for (const auto& [pair, d] : m.inter_centroid_distance)
      j["inter_centroid"].push_back({{"a", pair.first}, {"b", pair.second}, {"distance", d}});
    log_.group_metrics = j;
  }
};

std::string num(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

RunLog run(const Scenario& scenario) { return Simulator(scenario).run(); }

void write_events_csv(std::ostream& os, const RunLog& log) {
  os << "# schema: leofl.events v1\n" << "time_s,kind,sat_id,hap_id,seq\n";
  for (const auto& e : log.events)
    os << num(e.time) << ',' << to_string(e.kind) << ',' << e.sat << ',' << e.hap << ',' << e.seq << '\n';
}

void write_aggregation_csv(std::ostream& os, const RunLog& log) {
  os << "# schema: leofl.aggregation v1\n" << "event_time_s,kind,sat_id,hap_id,eta,staleness_s,global_epoch\n";
  for (const auto& r : log.aggregation)
    os << num(r.time) << ',' << r.kind << ',' << r.sat << ',' << r.hap << ',' << num(r.eta) << ','
       << num(r.staleness) << ',' << r.global_epoch << '\n';
}

void write_accuracy_csv(std::ostream& os, const RunLog& log) {
  os << "# schema: leofl.accuracy v1\n" << "time_s,sat_id,accuracy\n";
  for (const auto& r : log.accuracy) os << num(r.time) << ',' << r.sat << ',' << num(r.accuracy) << '\n';
}

nlohmann::json summary_json(const RunLog& log) {
  return {{"schema", "leofl.summary v1"},
          {"scheme", log.scheme},
          {"final_accuracy", log.final_accuracy},
          {"mean_accuracy", log.mean_accuracy},
          {"accuracy_spread", log.accuracy_spread},
          {"global_proxy_accuracy", log.global_proxy_accuracy},
          {"rounds_completed", log.rounds_completed},
          {"events", log.events.size()},
          {"no_contacts", log.no_contacts},
          {"warnings", log.warnings},
          {"group_metrics", log.group_metrics}};
}

void write_run(const RunLog& log, const std::string& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream f(std::filesystem::path(dir) / name, std::ios::binary);
    if (!f) throw std::runtime_error(std::string("cannot write ") + name);
    return f;
  };
  {
    auto f = open("events.csv");
    write_events_csv(f, log);
  }
  {
    auto f = open("aggregation_trace.csv");
    write_aggregation_csv(f, log);
  }
  {
    auto f = open("accuracy.csv");
    write_accuracy_csv(f, log);
  }
  auto f = open("summary.json");
  f << summary_json(log).dump(2) << '\n';
}

}  // namespace leofl::sim
