#pragma once

#include <cstdint>
#include <iosfwd>
#include <queue>
#include <string>
#include <vector>

#include "leofl/aggregation.hpp"
#include "leofl/scenario.hpp"

#include "json.hpp"

namespace leofl::sim {

// Declaration order is the tie-break order for events at equal time.
enum class EventKind { sync_epoch = 0, upload_arrival = 1, training_complete = 2, handover = 3 };
std::string to_string(EventKind k);

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::sync_epoch;
  int sat = -1;
  int hap = -1;
  std::uint64_t seq = 0;
};

// True when a is processed after b.
bool later(const Event& a, const Event& b);

class EventQueue {
 public:
  const Event& push(double time, EventKind kind, int sat = -1, int hap = -1);
  Event pop();
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const { return later(a, b); }
  };
  std::priority_queue<Event, std::vector<Event>, Later> heap_;
  std::uint64_t next_seq_ = 0;
};

// k * period for k = 1, 2, ... while <= horizon.
std::vector<double> schedule_sync(double period, double horizon);

struct AggregationRow {
  double time = 0.0;
  std::string kind;  // "arrival" | "sync"
  int sat = -1;
  int hap = -1;
  double eta = 0.0;
  double staleness = 0.0;
  int global_epoch = 0;
  double dist_before = 0.0;  // |w_h - w_i| before the update (arrivals only)
  double dist_after = 0.0;
};

struct AccuracyRow {
  double time = 0.0;
  int sat = -1;  // -1: global proxy
  double accuracy = 0.0;
};

struct GroupSnapshot {
  double time = 0.0;
  agg::GroupAssignment assignment;
};

struct RunLog {
  std::string scheme;
  std::vector<Event> events;
  std::vector<AggregationRow> aggregation;
  std::vector<AccuracyRow> accuracy;
  std::vector<GroupSnapshot> groups;
  std::vector<double> final_accuracy;  // per satellite
  double mean_accuracy = 0.0;
  double accuracy_spread = 0.0;  // max - min over satellites
  double global_proxy_accuracy = 0.0;
  int rounds_completed = 0;
  bool no_contacts = false;
  std::vector<std::string> warnings;
  nlohmann::json group_metrics;
};

RunLog run(const Scenario& scenario);

void write_events_csv(std::ostream& os, const RunLog& log);
void write_aggregation_csv(std::ostream& os, const RunLog& log);
void write_accuracy_csv(std::ostream& os, const RunLog& log);
nlohmann::json summary_json(const RunLog& log);
// events.csv, aggregation_trace.csv, accuracy.csv, summary.json
void write_run(const RunLog& log, const std::string& dir);

}  // namespace leofl::sim
