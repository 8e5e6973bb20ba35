#include "safe/weights.hpp"

#include <algorithm>
#include <cmath>

#include "safe/errors.hpp"

namespace safe {

namespace {

constexpr double kMinPlanarBandwidth = 10.0;  // feet
constexpr double kMinAngularBandwidth = 2.0;  // degrees
constexpr double kMassEps = 1e-12;

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return ss / static_cast<double>(v.size());
}

// Unnormalized Gaussian kernel sums at every grid point.
std::vector<double> kernel_mass_planar(
    const std::vector<std::pair<double, double>>& pts, const Grid& grid,
    double h) {
  std::vector<double> mass(grid.size(), 0.0);
  const double inv = 1.0 / (2.0 * h * h);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (const auto& [px, py] : pts) {
      const double dx = px - grid.xs[g];
      const double dy = py - grid.ys[g];
      s += std::exp(-(dx * dx + dy * dy) * inv);
    }
    mass[g] = s;
  }
  return mass;
}

std::vector<double> kernel_mass_angular(const std::vector<double>& pts,
                                        const Grid& grid, double h) {
  std::vector<double> mass(grid.size(), 0.0);
  const double inv = 1.0 / (2.0 * h * h);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (double p : pts) {
      const double d = p - grid.angles[g];
      s += std::exp(-d * d * inv);
    }
    mass[g] = s;
  }
  return mass;
}

void normalize_density(std::vector<double>& mass, double cell) {
  double total = 0.0;
  for (double m : mass) total += m;
  total *= cell;
  if (!(total > 0.0)) throw numerical_error("density mass vanished on the grid");
  for (double& m : mass) m /= total;
}

std::vector<std::pair<double, double>> planar_points(
    const std::vector<BipRecord>& recs) {
  std::vector<std::pair<double, double>> pts;
  pts.reserve(recs.size());
  for (const auto& r : recs) pts.emplace_back(r.x, r.y);
  return pts;
}

std::vector<double> angular_points(const std::vector<BipRecord>& recs) {
  std::vector<double> pts;
  pts.reserve(recs.size());
  for (const auto& r : recs) pts.push_back(field_angle_deg(r.x, r.y));
  return pts;
}

std::vector<double> raw_mass(const std::vector<BipRecord>& recs, const Grid& grid,
                             double h) {
  if (grid.kind == Grid::Kind::Planar)
    return kernel_mass_planar(planar_points(recs), grid, h);
  return kernel_mass_angular(angular_points(recs), grid, h);
}

double auto_bandwidth(const std::vector<BipRecord>& recs, const Grid& grid) {
  if (grid.kind == Grid::Kind::Planar) return scott_bandwidth_2d(planar_points(recs));
  return scott_bandwidth_1d(angular_points(recs));
}

std::size_t nearest_index(const Grid& grid, std::size_t from,
                          const std::vector<std::size_t>& candidates) {
  double best = std::numeric_limits<double>::infinity();
  std::size_t pick = candidates.front();
  for (std::size_t c : candidates) {
    double d;
    if (grid.kind == Grid::Kind::Planar) {
      const double dx = grid.xs[c] - grid.xs[from];
      const double dy = grid.ys[c] - grid.ys[from];
      d = dx * dx + dy * dy;
    } else {
      const double da = grid.angles[c] - grid.angles[from];
      d = da * da;
    }
    if (d < best) {
      best = d;
      pick = c;
    }
  }
  return pick;
}

}  // namespace

Grid Grid::planar(double spacing_ft, const ParkGeometry& park) {
  if (!(spacing_ft > 0.0)) throw validation_error("grid spacing must be positive");
  Grid g;
  g.kind = Kind::Planar;
  g.spacing = spacing_ft;
  g.park = park;
  const double r = park.fence_radius;
  const long nx = static_cast<long>(std::ceil(r / spacing_ft));
  const long ny = static_cast<long>(std::ceil(r / spacing_ft));
  for (long iy = 0; iy < ny; ++iy) {
    const double y = (static_cast<double>(iy) + 0.5) * spacing_ft;
    for (long ix = -nx; ix < nx; ++ix) {
      const double x = (static_cast<double>(ix) + 0.5) * spacing_ft;
      if (park.contains(x, y)) {
        g.xs.push_back(x);
        g.ys.push_back(y);
      }
    }
  }
  if (g.xs.empty()) throw validation_error("planar grid has no points inside the park");
  return g;
}

Grid Grid::angular(double spacing_deg, const ParkGeometry& park) {
  if (!(spacing_deg > 0.0)) throw validation_error("grid spacing must be positive");
  Grid g;
  g.kind = Kind::Angular;
  g.spacing = spacing_deg;
  g.park = park;
  const double span = park.angular_span_deg();
  const long n = static_cast<long>(std::floor(span / spacing_deg));
  for (long i = 0; i < n; ++i)
    g.angles.push_back(park.foul_line_low_deg + (static_cast<double>(i) + 0.5) * spacing_deg);
  if (g.angles.empty()) throw validation_error("angular grid has no points");
  return g;
}

std::vector<double> kde_2d(const std::vector<std::pair<double, double>>& points,
                           const Grid& grid, double bandwidth) {
  if (grid.kind != Grid::Kind::Planar)
    throw validation_error("kde_2d requires a planar grid");
  if (points.size() < 2) throw validation_error("kde_2d needs at least 2 points");
  if (!(bandwidth > 0.0)) throw validation_error("bandwidth must be positive");
  std::vector<double> mass = kernel_mass_planar(points, grid, bandwidth);
  normalize_density(mass, grid.cell_measure());
  return mass;
}

std::vector<double> kde_1d(const std::vector<double>& angles, const Grid& grid,
                           double bandwidth) {
  if (grid.kind != Grid::Kind::Angular)
    throw validation_error("kde_1d requires an angular grid");
  if (angles.size() < 2) throw validation_error("kde_1d needs at least 2 points");
  if (!(bandwidth > 0.0)) throw validation_error("bandwidth must be positive");
  std::vector<double> mass = kernel_mass_angular(angles, grid, bandwidth);
  normalize_density(mass, grid.cell_measure());
  return mass;
}

double scott_bandwidth_2d(const std::vector<std::pair<double, double>>& points) {
  if (points.size() < 2) return kMinPlanarBandwidth;
  std::vector<double> xs, ys;
  xs.reserve(points.size());
  ys.reserve(points.size());
  for (const auto& [x, y] : points) {
    xs.push_back(x);
    ys.push_back(y);
  }
  const double sd = std::sqrt(0.5 * (variance_of(xs) + variance_of(ys)));
  const double h = sd * std::pow(static_cast<double>(points.size()), -1.0 / 6.0);
  return std::max(h, kMinPlanarBandwidth);
}

double scott_bandwidth_1d(const std::vector<double>& values) {
  if (values.size() < 2) return kMinAngularBandwidth;
  const double sd = std::sqrt(variance_of(values));
  const double h = sd * std::pow(static_cast<double>(values.size()), -1.0 / 5.0);
  return std::max(h, kMinAngularBandwidth);
}

std::array<std::vector<double>, 3> run_consequence(
    const std::vector<BipRecord>& failures, const Grid& grid, double bandwidth,
    int min_stratum, std::vector<std::string>* notes) {
  if (failures.empty()) throw validation_error("run_consequence needs failure records");
  for (const auto& r : failures)
    if (r.hit_result == HitResult::None)
      throw validation_error("run_consequence input must carry hit results");

  std::array<std::vector<double>, 3> out;
  for (int v : kVelocities) {
    std::vector<BipRecord> stratum;
    for (const auto& r : failures)
      if (r.velocity == v) stratum.push_back(r);
    if (static_cast<int>(stratum.size()) < min_stratum) {
      if (notes)
        notes->push_back("run_consequence: velocity " + std::to_string(v) +
                         " stratum has " + std::to_string(stratum.size()) +
                         " failures; pooled across velocities");
      stratum = failures;
    }

    const double h = bandwidth > 0.0 ? bandwidth : auto_bandwidth(stratum, grid);

    std::array<std::vector<BipRecord>, 3> by_hit;
    for (const auto& r : stratum) {
      const int idx = static_cast<int>(r.hit_result) - 1;  // Single=0 .. Triple=2
      by_hit[static_cast<std::size_t>(idx)].push_back(r);
    }
    std::array<std::vector<double>, 3> mass;
    std::array<double, 3> global_counts{};
    for (std::size_t t = 0; t < 3; ++t) {
      global_counts[t] = static_cast<double>(by_hit[t].size());
      mass[t] = by_hit[t].empty() ? std::vector<double>(grid.size(), 0.0)
                                  : raw_mass(by_hit[t], grid, h);
    }
    const double global_total = global_counts[0] + global_counts[1] + global_counts[2];

    std::vector<double> rtot(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
      double m1 = mass[0][g], m2 = mass[1][g], m3 = mass[2][g];
      double total = m1 + m2 + m3;
      if (total < kMassEps) {
        m1 = global_counts[0];
        m2 = global_counts[1];
        m3 = global_counts[2];
        total = global_total;
      }
      rtot[g] = (kRunSingle * m1 + kRunDouble * m2 + kRunTriple * m3) / total;
    }
    out[static_cast<std::size_t>(v - 1)] = std::move(rtot);
  }
  return out;
}

std::vector<std::array<std::vector<double>, 3>> shared_responsibility(
    const std::vector<BipRecord>& successes, const Grid& grid, double bandwidth,
    std::vector<std::string>* notes) {
  if (successes.empty())
    throw validation_error("shared_responsibility needs success records");
  for (const auto& r : successes)
    if (r.outcome != Outcome::Success)
      throw validation_error("shared_responsibility input must be successes");

  const BipType type =
      grid.kind == Grid::Kind::Angular ? BipType::Grounder : BipType::Flyball;
  const auto& positions = positions_for(type);
  const std::size_t npos = positions.size();

  std::vector<std::array<std::vector<double>, 3>> out(
      npos, std::array<std::vector<double>, 3>{});

  for (int v : kVelocities) {
    std::vector<BipRecord> stratum;
    for (const auto& r : successes)
      if (r.velocity == v) stratum.push_back(r);
    if (stratum.empty()) {
      if (notes)
        notes->push_back("shared_responsibility: velocity " + std::to_string(v) +
                         " has no successes; pooled across velocities");
      stratum = successes;
    }
    const double h = bandwidth > 0.0 ? bandwidth : auto_bandwidth(stratum, grid);

    std::vector<std::vector<double>> mass(npos);
    for (std::size_t p = 0; p < npos; ++p) {
      std::vector<BipRecord> pos_recs;
      for (const auto& r : stratum)
        if (r.position == positions[p]) pos_recs.push_back(r);
      mass[p] = pos_recs.empty() ? std::vector<double>(grid.size(), 0.0)
                                 : raw_mass(pos_recs, grid, h);
    }

    std::vector<std::size_t> defined;
    std::vector<std::size_t> undefined;
    std::vector<double> totals(grid.size(), 0.0);
    for (std::size_t g = 0; g < grid.size(); ++g) {
      for (std::size_t p = 0; p < npos; ++p) totals[g] += mass[p][g];
      (totals[g] >= kMassEps ? defined : undefined).push_back(g);
    }
    if (defined.empty())
      throw numerical_error("shared_responsibility: no success mass on the grid");

    for (std::size_t p = 0; p < npos; ++p) {
      auto& field = out[p][static_cast<std::size_t>(v - 1)];
      field.assign(grid.size(), 0.0);
      for (std::size_t g : defined) field[g] = mass[p][g] / totals[g];
    }
    for (std::size_t g : undefined) {
      const std::size_t src = nearest_index(grid, g, defined);
      for (std::size_t p = 0; p < npos; ++p)
        out[p][static_cast<std::size_t>(v - 1)][g] =
            out[p][static_cast<std::size_t>(v - 1)][src];
    }
    if (!undefined.empty() && notes)
      notes->push_back("shared_responsibility: velocity " + std::to_string(v) + ": " +
                       std::to_string(undefined.size()) +
                       " grid points used nearest-mass fallback");
  }
  return out;
}

int WeightField::position_index(Position pos) const {
  for (std::size_t i = 0; i < positions.size(); ++i)
    if (positions[i] == pos) return static_cast<int>(i);
  return -1;
}

WeightField build_weight_field(const std::vector<BipRecord>& records, BipType type,
                               const Grid& grid, const WeightFieldOptions& opts) {
  const bool angular_expected = type == BipType::Grounder;
  if (angular_expected != (grid.kind == Grid::Kind::Angular))
    throw validation_error("grid kind does not match the BIP type");

  const std::vector<BipRecord> typed = records_of_type(records, type);
  if (typed.empty()) throw validation_error("no records of the requested BIP type");

  WeightField field;
  field.bip_type = type;
  field.grid = grid;
  field.positions = positions_for(type);

  // BIP frequency, per velocity stratum
  for (int v : kVelocities) {
    std::vector<BipRecord> stratum;
    for (const auto& r : typed)
      if (r.velocity == v) stratum.push_back(r);
    if (stratum.size() < 2) {
      field.notes.push_back("frequency: velocity " + std::to_string(v) +
                            " stratum too small; pooled across velocities");
      stratum = typed;
    }
    const double h = opts.bandwidth > 0.0 ? opts.bandwidth : auto_bandwidth(stratum, grid);
    std::vector<double> dens;
    if (grid.kind == Grid::Kind::Planar)
      dens = kde_2d(planar_points(stratum), grid, h);
    else
      dens = kde_1d(angular_points(stratum), grid, h);
    field.freq[static_cast<std::size_t>(v - 1)] = std::move(dens);
  }

  std::vector<BipRecord> failures, successes;
  for (const auto& r : typed) {
    if (r.outcome == Outcome::Failure) failures.push_back(r);
    else successes.push_back(r);
  }
  field.run_value =
      run_consequence(failures, grid, opts.bandwidth, opts.min_stratum, &field.notes);
  field.responsibility =
      shared_responsibility(successes, grid, opts.bandwidth, &field.notes);
  return field;
}

}  // namespace safe
