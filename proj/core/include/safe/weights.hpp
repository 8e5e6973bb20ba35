#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "safe/bip_data.hpp"
#include "safe/geometry.hpp"

namespace safe {

constexpr std::array<int, 3> kVelocities = {1, 2, 3};

// Evaluation lattice: cell centers inside fair territory (planar, feet) or
// across the fair angular span (angular, degrees).
struct Grid {
  enum class Kind { Planar, Angular };

  Kind kind = Kind::Planar;
  double spacing = 4.0;
  ParkGeometry park;
  std::vector<double> xs, ys;  // planar, parallel arrays
  std::vector<double> angles;  // angular

  std::size_t size() const {
    return kind == Kind::Planar ? xs.size() : angles.size();
  }
  double cell_measure() const {
    return kind == Kind::Planar ? spacing * spacing : spacing;
  }

  static Grid planar(double spacing_ft, const ParkGeometry& park = {});
  static Grid angular(double spacing_deg, const ParkGeometry& park = {});
};

// Gaussian-kernel density on a planar grid, renormalized so that
// sum(density * cellArea) = 1.
std::vector<double> kde_2d(const std::vector<std::pair<double, double>>& points,
                           const Grid& grid, double bandwidth);

// One-dimensional analogue over angles.
std::vector<double> kde_1d(const std::vector<double>& angles, const Grid& grid,
                           double bandwidth);

// Scott's rule of thumb, floored at 10 ft (planar) / 2 degrees (angular).
double scott_bandwidth_2d(const std::vector<std::pair<double, double>>& points);
double scott_bandwidth_1d(const std::vector<double>& values);

// Linear-weights run values per hit type (Thorn and Palmer).
constexpr double kRunSingle = 0.5;
constexpr double kRunDouble = 0.8;
constexpr double kRunTriple = 1.1;

struct WeightFieldOptions {
  double bandwidth = 0.0;   // 0 = Scott's rule per stratum
  int min_stratum = 25;     // below this, pool velocities for run consequence
};

// Expected run cost of an unfielded ball per (grid point, velocity): the
// per-point relative frequencies of singles/doubles/triples combined with
// the linear weights. `failures` must all carry a hit result. Velocity
// strata with fewer than `min_stratum` failures fall back to the pooled
// failure set; points with no local mass fall back to the stratum-wide hit
// mix. Notes about fallbacks are appended to `notes` when given.
std::array<std::vector<double>, 3> run_consequence(
    const std::vector<BipRecord>& failures, const Grid& grid, double bandwidth,
    int min_stratum = 25, std::vector<std::string>* notes = nullptr);

// Per-point probability vector apportioning credit across positions from the
// smoothed success mass, one simplex per (point, velocity). Points with no
// mass copy the nearest point that has mass.
std::vector<std::array<std::vector<double>, 3>> shared_responsibility(
    const std::vector<BipRecord>& successes, const Grid& grid, double bandwidth,
    std::vector<std::string>* notes = nullptr);

// All three weighting surfaces for one BIP type, each estimated separately
// per velocity stratum.
struct WeightField {
  BipType bip_type = BipType::Flyball;
  Grid grid;
  std::vector<Position> positions;
  std::array<std::vector<double>, 3> freq;       // [velocity-1][point]
  std::array<std::vector<double>, 3> run_value;  // [velocity-1][point]
  // responsibility[pos][velocity-1][point], pos indexing `positions`
  std::vector<std::array<std::vector<double>, 3>> responsibility;
  std::vector<std::string> notes;

  int position_index(Position pos) const;
};

WeightField build_weight_field(const std::vector<BipRecord>& records, BipType type,
                               const Grid& grid, const WeightFieldOptions& opts = {});

}  // namespace safe
