#include "coversim/world.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace coversim {

double distance(const Position& a, const Position& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::vector<Position> build_hex_grid(int n_nodes, double spacing) {
  std::vector<Position> out;
  out.reserve(static_cast<std::size_t>(n_nodes));
  const int cols = static_cast<int>(std::ceil(std::sqrt(double(n_nodes))));
  const double pitch = spacing * std::sqrt(3.0) / 2.0;
  for (int i = 0; i < n_nodes; ++i) {
    const int row = i / cols;
    const int col = i % cols;
    const double offset = (row % 2 == 1) ? spacing / 2.0 : 0.0;
    out.push_back({col * spacing + offset, row * pitch});
  }
  return out;
}

Region Region::bounding(std::span<const Position> positions, double raster_m) {
  Region r;
  r.raster_m = raster_m;
  if (positions.empty()) {
    r.nx = r.ny = 1;
    return r;
  }
  r.min_x = r.max_x = positions[0].x;
  r.min_y = r.max_y = positions[0].y;
  for (const auto& p : positions) {
    r.min_x = std::min(r.min_x, p.x);
    r.max_x = std::max(r.max_x, p.x);
    r.min_y = std::min(r.min_y, p.y);
    r.max_y = std::max(r.max_y, p.y);
  }
  r.nx = std::max(1, static_cast<int>(std::ceil((r.max_x - r.min_x) / raster_m)));
  r.ny = std::max(1, static_cast<int>(std::ceil((r.max_y - r.min_y) / raster_m)));
  return r;
}

std::vector<EnvClass> assign_env(int n, double sunny_ratio, Microwatts sunny_uw,
                                 Microwatts shady_uw, Rng& rng) {
  const int n_sunny = static_cast<int>(std::llround(sunny_ratio * n));
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;
  rng.shuffle(ids);
  std::vector<EnvClass> env(static_cast<std::size_t>(n),
                            EnvClass{EnvKind::Shady, shady_uw});
  for (int i = 0; i < n_sunny && i < n; ++i)
    env[static_cast<std::size_t>(ids[static_cast<std::size_t>(i)])] =
        EnvClass{EnvKind::Sunny, sunny_uw};
  return env;
}

std::vector<AcousticEvent> gen_events(double rate_per_hour, Micros duration,
                                      Micros event_duration,
                                      const Region& region, Rng& rng,
                                      bool fixed_count) {
  std::vector<AcousticEvent> events;
  if (rate_per_hour <= 0.0 || duration <= 0) return events;
  const double mean = rate_per_hour * seconds(duration) / 3600.0;
  const std::uint64_t count =
      fixed_count ? static_cast<std::uint64_t>(std::llround(mean))
                  : rng.poisson(mean);
  events.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    AcousticEvent e;
    e.time = static_cast<Micros>(rng.uniform01() * static_cast<double>(duration));
    e.position = {rng.uniform(region.min_x, region.max_x),
                  rng.uniform(region.min_y, region.max_y)};
    e.duration = event_duration;
    events.push_back(e);
  }
  std::sort(events.begin(), events.end(),
            [](const AcousticEvent& a, const AcousticEvent& b) {
              if (a.time != b.time) return a.time < b.time;
              if (a.position.x != b.position.x) return a.position.x < b.position.x;
              return a.position.y < b.position.y;
            });
  return events;
}

double coverage_fraction(std::span<const Position> sensing, double radius,
                         const Region& region) {
  if (sensing.empty()) return 0.0;
  const double r2 = radius * radius;
  std::int64_t covered = 0;
  for (int iy = 0; iy < region.ny; ++iy) {
    for (int ix = 0; ix < region.nx; ++ix) {
      const Position c = region.cell_center(ix, iy);
      for (const auto& p : sensing) {
        const double dx = c.x - p.x;
        const double dy = c.y - p.y;
        if (dx * dx + dy * dy <= r2) {
          ++covered;
          break;
        }
      }
    }
  }
  return static_cast<double>(covered) / static_cast<double>(region.cell_count());
}

CoverageRaster::CoverageRaster(const Region& region,
                               std::span<const Position> positions,
                               double radius) {
  total_cells_ = region.cell_count();
  words_ = static_cast<std::size_t>((total_cells_ + 63) / 64);
  masks_.assign(words_ * positions.size(), 0);
  scratch_.assign(words_, 0);
  const double r2 = radius * radius;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    std::uint64_t* mask = masks_.data() + n * words_;
    // only sweep the cell rows a disk of this radius can reach
    const int iy0 = std::max(
        0, static_cast<int>((positions[n].y - radius - region.min_y) /
                            region.raster_m) -
               1);
    const int iy1 = std::min(
        region.ny - 1,
        static_cast<int>((positions[n].y + radius - region.min_y) /
                         region.raster_m) +
            1);
    const int ix0 = std::max(
        0, static_cast<int>((positions[n].x - radius - region.min_x) /
                            region.raster_m) -
               1);
    const int ix1 = std::min(
        region.nx - 1,
        static_cast<int>((positions[n].x + radius - region.min_x) /
                         region.raster_m) +
            1);
    for (int iy = iy0; iy <= iy1; ++iy) {
      for (int ix = ix0; ix <= ix1; ++ix) {
        const Position c = region.cell_center(ix, iy);
        const double dx = c.x - positions[n].x;
        const double dy = c.y - positions[n].y;
        if (dx * dx + dy * dy <= r2) {
          const std::int64_t cell = static_cast<std::int64_t>(iy) * region.nx + ix;
          mask[static_cast<std::size_t>(cell >> 6)] |=
              std::uint64_t{1} << (cell & 63);
        }
      }
    }
  }
}

double CoverageRaster::fraction(std::span<const int> sensing_ids) const {
  if (sensing_ids.empty() || total_cells_ == 0) return 0.0;
  std::fill(scratch_.begin(), scratch_.end(), 0);
  for (int id : sensing_ids) {
    const std::uint64_t* mask = masks_.data() + static_cast<std::size_t>(id) * words_;
    for (std::size_t w = 0; w < words_; ++w) scratch_[w] |= mask[w];
  }
  std::int64_t covered = 0;
  for (std::uint64_t w : scratch_) covered += std::popcount(w);
  return static_cast<double>(covered) / static_cast<double>(total_cells_);
}

std::optional<int> event_captured(const AcousticEvent& event,
                                  std::span<const std::vector<Interval>> sensing,
                                  std::span<const Position> positions,
                                  double radius, Micros min_overlap) {
  std::optional<int> best;
  double best_dist = 0.0;
  const Micros ev_start = event.time;
  const Micros ev_end = event.time + event.duration;
  for (std::size_t n = 0; n < sensing.size(); ++n) {
    const double d = distance(event.position, positions[n]);
    if (d > radius) continue;
    bool overlaps = false;
    for (const auto& iv : sensing[n]) {
      if (iv.start >= ev_end) break;  // intervals are time-ordered
      const Micros lo = std::max(iv.start, ev_start);
      const Micros hi = std::min(iv.end, ev_end);
      if (hi - lo >= min_overlap) {
        overlaps = true;
        break;
      }
    }
    if (!overlaps) continue;
    if (!best || d < best_dist) {
      best = static_cast<int>(n);
      best_dist = d;
    }
  }
  return best;
}

}  // namespace coversim
