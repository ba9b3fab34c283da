#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "coversim/engine.hpp"

namespace coversim {

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

const char* kind_name(PacketKind k) {
  switch (k) {
    case PacketKind::Beacon:
      return "beacon";
    case PacketKind::TaskTensor:
      return "tensor";
    case PacketKind::Result:
      return "result";
  }
  return "?";
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << body;
}

}  // namespace

std::string coverage_csv(const Metrics& m) {
  std::ostringstream os;
  os << "t_s,coverage_frac\n";
  for (std::size_t i = 0; i < m.coverage.size(); ++i)
    os << fmt("%.3f", m.sample_times_s[i]) << ","
       << fmt("%.9f", m.coverage[i]) << "\n";
  return os.str();
}

std::string events_csv(const Metrics& m) {
  std::ostringstream os;
  os << "t_s,x_m,y_m,captured,node_id\n";
  for (const auto& e : m.events) {
    os << fmt("%.6f", seconds(e.time)) << "," << fmt("%.6f", e.position.x)
       << "," << fmt("%.6f", e.position.y) << "," << (e.captured_by ? 1 : 0)
       << "," << (e.captured_by ? *e.captured_by : -1) << "\n";
  }
  return os.str();
}

std::string nodes_csv(const Metrics& m) {
  std::ostringstream os;
  os << "id,x_m,y_m,env,initial_soc_j,final_soc_j,harvested_j,consumed_j,"
        "wasted_j,sensing_s,cycles,deep_sleeps,aborted_sensing,tasks_created,"
        "tasks_adopted,tasks_completed,tasks_offloaded,tasks_dropped,"
        "frames_sent,overlap_backoffs\n";
  for (const auto& n : m.nodes) {
    os << n.id << "," << fmt("%.3f", n.position.x) << ","
       << fmt("%.3f", n.position.y) << ","
       << (n.env == EnvKind::Sunny ? "sunny" : "shady") << ","
       << fmt("%.9f", n.initial_soc_j) << "," << fmt("%.9f", n.final_soc_j)
       << "," << fmt("%.9f", n.harvested_j) << "," << fmt("%.9f", n.consumed_j)
       << "," << fmt("%.9f", n.wasted_j) << "," << fmt("%.3f", n.sensing_s)
       << "," << n.counters.cycles << "," << n.counters.deep_sleeps << ","
       << n.counters.aborted_sensing << "," << n.counters.tasks_created << ","
       << n.counters.tasks_adopted << "," << n.counters.tasks_completed << ","
       << n.counters.tasks_offloaded << "," << n.counters.tasks_dropped << ","
       << n.counters.frames_sent << "," << n.counters.overlap_backoffs << "\n";
  }
  return os.str();
}

std::string packets_csv(const Metrics& m) {
  std::ostringstream os;
  os << "t_s,sender,kind,bytes,receivers\n";
  for (const auto& p : m.packets) {
    os << fmt("%.6f", seconds(p.time)) << "," << p.sender << ","
       << kind_name(p.kind) << "," << p.bytes << ",";
    for (std::size_t i = 0; i < p.receivers.size(); ++i) {
      if (i) os << ";";
      os << p.receivers[i];
    }
    os << "\n";
  }
  return os.str();
}

std::string comparison_csv(const ComparisonReport& r) {
  std::ostringstream os;
  os << "seed,mean_cov_vanilla,mean_cov_algorithm,delta_pp,std_vanilla,"
        "std_algorithm,events_occurred,captured_vanilla,captured_algorithm\n";
  for (const auto& row : r.rows) {
    os << row.seed << "," << fmt("%.6f", row.mean_cov_vanilla) << ","
       << fmt("%.6f", row.mean_cov_algorithm) << ","
       << fmt("%.4f", (row.mean_cov_algorithm - row.mean_cov_vanilla) * 100.0)
       << "," << fmt("%.6f", row.std_cov_vanilla) << ","
       << fmt("%.6f", row.std_cov_algorithm) << "," << row.events_occurred
       << "," << row.captured_vanilla << "," << row.captured_algorithm << "\n";
  }
  return os.str();
}

std::string comparison_text(const ComparisonReport& r) {
  std::ostringstream os;
  std::int64_t occ = 0, cap_v = 0, cap_a = 0;
  double mean_v = 0, mean_a = 0, std_v = 0, std_a = 0;
  for (const auto& row : r.rows) {
    occ += row.events_occurred;
    cap_v += row.captured_vanilla;
    cap_a += row.captured_algorithm;
    mean_v += row.mean_cov_vanilla;
    mean_a += row.mean_cov_algorithm;
    std_v += row.std_cov_vanilla;
    std_a += row.std_cov_algorithm;
  }
  const double n = std::max<std::size_t>(r.rows.size(), 1);
  os << "mode comparison over " << r.rows.size() << " seed(s), "
     << fmt("%.0f", r.duration_s) << " s each\n";
  os << "  mean coverage   vanilla " << fmt("%6.2f", 100.0 * mean_v / n)
     << "%   algorithm " << fmt("%6.2f", 100.0 * mean_a / n) << "%   delta "
     << fmt("%+.2f", 100.0 * r.delta_mean_coverage) << " pp ("
     << r.seeds_with_coverage_gain << "/" << r.rows.size() << " seeds improved)\n";
  os << "  coverage std    vanilla " << fmt("%6.2f", 100.0 * std_v / n)
     << "    algorithm " << fmt("%6.2f", 100.0 * std_a / n) << "    delta "
     << fmt("%+.2f", 100.0 * r.delta_std_coverage) << " ("
     << r.seeds_with_lower_std << "/" << r.rows.size() << " seeds more stable)\n";
  os << "  extra area      " << fmt("%.0f", r.extra_area_m2) << " m2 of "
     << fmt("%.0f", r.region_area_m2) << " m2 region\n";
  os << "  events          occurred " << occ << "  captured vanilla " << cap_v
     << " (" << fmt("%.1f", 100.0 * r.capture_rate_vanilla) << "%)  algorithm "
     << cap_a << " (" << fmt("%.1f", 100.0 * r.capture_rate_algorithm)
     << "%)\n";
  os << "  projected extra captures per day: "
     << fmt("%+.1f", r.projected_extra_events_per_day) << "\n";
  return os.str();
}

std::string summary_svg(const Metrics& m, const ScenarioConfig& config) {
  const int w = 960, h = 420;
  const int plot_x = 50, plot_y = 30, plot_w = 560, plot_h = 340;
  const int map_x = 660, map_y = 30, map_w = 270, map_h = 340;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" viewBox=\"0 0 " << w << " " << h << "\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h << "\" fill=\"white\"/>\n";

  // coverage-vs-time panel
  os << "<rect x=\"" << plot_x << "\" y=\"" << plot_y << "\" width=\"" << plot_w
     << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  os << "<text x=\"" << plot_x << "\" y=\"" << plot_y - 10
     << "\" font-size=\"13\" fill=\"#222\">coverage fraction vs time (mode: "
     << config.mode << ", mean " << fmt("%.2f", 100.0 * m.mean_coverage)
     << "%, std " << fmt("%.2f", 100.0 * m.std_coverage) << ")</text>\n";
  if (m.coverage.size() > 1) {
    const double t_max = std::max(m.sample_times_s.back(), 1e-9);
    os << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" "
          "points=\"";
    for (std::size_t i = 0; i < m.coverage.size(); ++i) {
      const double px = plot_x + (m.sample_times_s[i] / t_max) * plot_w;
      const double py = plot_y + (1.0 - m.coverage[i]) * plot_h;
      os << fmt("%.1f", px) << "," << fmt("%.1f", py) << " ";
    }
    os << "\"/>\n";
  }
  for (int g = 0; g <= 4; ++g) {
    const double py = plot_y + plot_h - g * plot_h / 4.0;
    os << "<text x=\"" << plot_x - 34 << "\" y=\"" << fmt("%.0f", py + 4)
       << "\" font-size=\"11\" fill=\"#666\">" << fmt("%.2f", g / 4.0)
       << "</text>\n";
  }

  // node map colored by environment; ring radius shows sensing share
  os << "<text x=\"" << map_x << "\" y=\"" << map_y - 10
     << "\" font-size=\"13\" fill=\"#222\">node map (gold sunny, gray "
        "shady)</text>\n";
  os << "<rect x=\"" << map_x << "\" y=\"" << map_y << "\" width=\"" << map_w
     << "\" height=\"" << map_h
     << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
  double min_x = 0, max_x = 1, min_y = 0, max_y = 1;
  if (!m.nodes.empty()) {
    min_x = max_x = m.nodes[0].position.x;
    min_y = max_y = m.nodes[0].position.y;
    for (const auto& n : m.nodes) {
      min_x = std::min(min_x, n.position.x);
      max_x = std::max(max_x, n.position.x);
      min_y = std::min(min_y, n.position.y);
      max_y = std::max(max_y, n.position.y);
    }
  }
  const double span_x = std::max(max_x - min_x, 1e-9);
  const double span_y = std::max(max_y - min_y, 1e-9);
  for (const auto& n : m.nodes) {
    const double px = map_x + 12 + (n.position.x - min_x) / span_x * (map_w - 24);
    const double py =
        map_y + map_h - 12 - (n.position.y - min_y) / span_y * (map_h - 24);
    const char* color = n.env == EnvKind::Sunny ? "#e6b422" : "#8a8a8a";
    os << "<circle cx=\"" << fmt("%.1f", px) << "\" cy=\"" << fmt("%.1f", py)
       << "\" r=\"4\" fill=\"" << color << "\" stroke=\"#333\" "
          "stroke-width=\"0.5\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_run_outputs(const Metrics& metrics, const ScenarioConfig& config,
                       const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/coverage.csv", coverage_csv(metrics));
  write_file(out_dir + "/events.csv", events_csv(metrics));
  write_file(out_dir + "/nodes.csv", nodes_csv(metrics));
  if (config.packet_trace)
    write_file(out_dir + "/packets.csv", packets_csv(metrics));
  write_file(out_dir + "/summary.svg", summary_svg(metrics, config));
}

void write_comparison(const ComparisonReport& report,
                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/report.csv", comparison_csv(report));
  write_file(out_dir + "/report.txt", comparison_text(report));
}

}  // namespace coversim
