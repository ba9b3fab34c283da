#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "coversim/energy.hpp"
#include "coversim/rng.hpp"
#include "coversim/units.hpp"

// Deployment geometry and the acoustic event process: triangular-lattice
// node placement, the rasterized coverage region, seeded environment
// assignment, and the Poisson event generator.

namespace coversim {

struct Position {
  double x = 0.0;
  double y = 0.0;
};

double distance(const Position& a, const Position& b);

// Rows offset by spacing/2 with row pitch spacing*sqrt(3)/2, so every
// nearest-neighbor distance equals `spacing`. Laid out as close to
// square as the count allows (10x10 for n=100).
std::vector<Position> build_hex_grid(int n_nodes, double spacing);

// Axis-aligned bounding rectangle of the deployment, rasterized into
// square cells of side `raster_m` for coverage measurement.
struct Region {
  double min_x = 0.0, min_y = 0.0;
  double max_x = 0.0, max_y = 0.0;
  double raster_m = 1.0;
  int nx = 1, ny = 1;

  static Region bounding(std::span<const Position> positions, double raster_m);

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  std::int64_t cell_count() const {
    return static_cast<std::int64_t>(nx) * ny;
  }
  Position cell_center(int ix, int iy) const {
    return {min_x + (ix + 0.5) * raster_m, min_y + (iy + 0.5) * raster_m};
  }
};

// Exactly round(ratio * n) nodes come out Sunny, chosen by seeded shuffle.
std::vector<EnvClass> assign_env(int n, double sunny_ratio,
                                 Microwatts sunny_uw, Microwatts shady_uw,
                                 Rng& rng);

struct AcousticEvent {
  Micros time = 0;
  Position position;
  Micros duration = 5 * kSecond;
  std::optional<int> captured_by;
};

// Count ~ Poisson(rate * duration / 3600 s) unless fixed_count, times
// sorted, positions uniform over the region.
std::vector<AcousticEvent> gen_events(double rate_per_hour, Micros duration,
                                      Micros event_duration,
                                      const Region& region, Rng& rng,
                                      bool fixed_count = false);

// Fraction of raster cells whose center lies within `radius` of at least
// one sensing position. Reference implementation; the engine uses the
// precomputed CoverageRaster below.
double coverage_fraction(std::span<const Position> sensing, double radius,
                         const Region& region);

// Per-node covered-cell masks, computed once for the static deployment.
class CoverageRaster {
 public:
  CoverageRaster(const Region& region, std::span<const Position> positions,
                 double radius);

  // Union coverage over the given node ids.
  double fraction(std::span<const int> sensing_ids) const;
  std::int64_t cell_count() const { return total_cells_; }

 private:
  std::int64_t total_cells_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> masks_;  // node-major, words_ per node
  mutable std::vector<std::uint64_t> scratch_;
};

struct Interval {
  Micros start = 0;
  Micros end = 0;
};

// Nearest node (ties to lowest id) within `radius` whose recorded sensing
// intervals overlap the event window by at least `min_overlap`.
std::optional<int> event_captured(const AcousticEvent& event,
                                  std::span<const std::vector<Interval>> sensing,
                                  std::span<const Position> positions,
                                  double radius, Micros min_overlap);

}  // namespace coversim
