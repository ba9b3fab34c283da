#pragma once

#include <string>
#include <vector>

#include "coversim/config.hpp"
#include "coversim/node.hpp"
#include "coversim/world.hpp"

// Deterministic discrete-event loop, metrics collection, mode comparison
// and file outputs. Metrics are a pure function of the ScenarioConfig.

namespace coversim {

class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NodeSummary {
  int id = 0;
  Position position;
  EnvKind env = EnvKind::Sunny;
  double initial_soc_j = 0, final_soc_j = 0;
  double harvested_j = 0, consumed_j = 0, wasted_j = 0;
  double sensing_s = 0;
  NodeCounters counters;
};

struct PacketRecord {
  Micros time = 0;
  int sender = -1;
  PacketKind kind = PacketKind::Beacon;
  std::int64_t bytes = 0;
  std::vector<int> receivers;
};

struct Metrics {
  // sampled on the metrics grid
  std::vector<double> sample_times_s;
  std::vector<double> coverage;
  std::vector<std::vector<float>> soc_fraction;  // node-major traces
  double mean_coverage = 0, std_coverage = 0;

  std::vector<AcousticEvent> events;
  std::int64_t events_occurred = 0, events_captured = 0;

  std::vector<NodeSummary> nodes;
  std::vector<PacketRecord> packets;  // populated when packet_trace is on

  std::int64_t frames_sent = 0, frames_delivered = 0, lost_offloads = 0;
  std::int64_t tasks_created = 0, tasks_completed = 0, tasks_offloaded = 0,
               tasks_dropped = 0;
  std::int64_t hysteresis_violations = 0;
  double wasted_harvest_j = 0;
  double energy_audit_gap_j = 0;  // |sum(initial+harvested-consumed) - sum(soc)|

  double region_area_m2 = 0;
};

Metrics run(const ScenarioConfig& config);

struct ComparisonRow {
  std::uint64_t seed = 0;
  double mean_cov_vanilla = 0, mean_cov_algorithm = 0;
  double std_cov_vanilla = 0, std_cov_algorithm = 0;
  std::int64_t events_occurred = 0;
  std::int64_t captured_vanilla = 0, captured_algorithm = 0;
};

struct ComparisonReport {
  std::vector<ComparisonRow> rows;
  double region_area_m2 = 0;
  double duration_s = 0;

  // aggregates over all rows
  double delta_mean_coverage = 0;     // percentage points / 100
  double delta_std_coverage = 0;
  double extra_area_m2 = 0;           // delta_mean_coverage * area
  double capture_rate_vanilla = 0, capture_rate_algorithm = 0;
  double projected_extra_events_per_day = 0;
  int seeds_with_coverage_gain = 0;
  int seeds_with_lower_std = 0;
};

// Runs both modes on identical worlds/seeds and aggregates the deltas.
ComparisonReport compare_modes(const ScenarioConfig& config, int n_seeds = 1);

// File outputs (schemas documented in the README):
//   coverage.csv, events.csv, nodes.csv, packets.csv (optional), summary.svg
void write_run_outputs(const Metrics& metrics, const ScenarioConfig& config,
                       const std::string& out_dir);
// report.txt and report.csv
void write_comparison(const ComparisonReport& report,
                      const std::string& out_dir);

std::string coverage_csv(const Metrics& m);
std::string events_csv(const Metrics& m);
std::string nodes_csv(const Metrics& m);
std::string packets_csv(const Metrics& m);
std::string comparison_csv(const ComparisonReport& r);
std::string comparison_text(const ComparisonReport& r);
std::string summary_svg(const Metrics& m, const ScenarioConfig& config);

}  // namespace coversim
