#include "safe/bip_data.hpp"

#include <algorithm>
#include <cmath>

#include "safe/errors.hpp"

namespace safe {

bool is_infield(Position pos) {
  switch (pos) {
    case Position::FirstBase:
    case Position::SecondBase:
    case Position::ThirdBase:
    case Position::Shortstop:
      return true;
    default:
      return false;
  }
}

const std::vector<Position>& positions_for(BipType type) {
  static const std::vector<Position> all = {
      Position::FirstBase,  Position::SecondBase, Position::ThirdBase,
      Position::Shortstop,  Position::LeftField,  Position::CenterField,
      Position::RightField};
  static const std::vector<Position> infield = {
      Position::FirstBase, Position::SecondBase, Position::ThirdBase,
      Position::Shortstop};
  return type == BipType::Grounder ? infield : all;
}

std::string to_string(BipType type) {
  switch (type) {
    case BipType::Flyball: return "Flyball";
    case BipType::Liner: return "Liner";
    case BipType::Grounder: return "Grounder";
  }
  return "?";
}

std::string to_string(Position pos) {
  switch (pos) {
    case Position::FirstBase: return "1B";
    case Position::SecondBase: return "2B";
    case Position::ThirdBase: return "3B";
    case Position::Shortstop: return "SS";
    case Position::LeftField: return "LF";
    case Position::CenterField: return "CF";
    case Position::RightField: return "RF";
  }
  return "?";
}

std::string to_string(Outcome outcome) {
  return outcome == Outcome::Success ? "Success" : "Failure";
}

std::string to_string(HitResult hit) {
  switch (hit) {
    case HitResult::None: return "";
    case HitResult::Single: return "Single";
    case HitResult::Double: return "Double";
    case HitResult::Triple: return "Triple";
  }
  return "?";
}

std::optional<BipType> parse_bip_type(const std::string& token) {
  if (token == "Flyball") return BipType::Flyball;
  if (token == "Liner") return BipType::Liner;
  if (token == "Grounder") return BipType::Grounder;
  return std::nullopt;
}

std::optional<Position> parse_position(const std::string& token) {
  if (token == "1B") return Position::FirstBase;
  if (token == "2B") return Position::SecondBase;
  if (token == "3B") return Position::ThirdBase;
  if (token == "SS") return Position::Shortstop;
  if (token == "LF") return Position::LeftField;
  if (token == "CF") return Position::CenterField;
  if (token == "RF") return Position::RightField;
  return std::nullopt;
}

std::optional<Outcome> parse_outcome(const std::string& token) {
  if (token == "Success") return Outcome::Success;
  if (token == "Failure") return Outcome::Failure;
  return std::nullopt;
}

std::optional<HitResult> parse_hit_result(const std::string& token) {
  if (token.empty() || token == "None") return HitResult::None;
  if (token == "Single") return HitResult::Single;
  if (token == "Double") return HitResult::Double;
  if (token == "Triple") return HitResult::Triple;
  return std::nullopt;
}

std::optional<std::string> validate_record(const BipRecord& rec,
                                           const ParkGeometry& park) {
  if (rec.velocity < 1 || rec.velocity > 3) return "velocity out of range";
  const bool success = rec.outcome == Outcome::Success;
  if (success != (rec.hit_result == HitResult::None))
    return "hit_result inconsistent with outcome";
  if (rec.bip_type == BipType::Grounder && !is_infield(rec.position))
    return "grounder recorded for outfield position";
  if (!park.contains(rec.x, rec.y)) return "location outside park polygon";
  return std::nullopt;
}

Centroid estimate_centroid(const std::vector<BipRecord>& records, Position pos,
                           BipType type, const CentroidOptions& opts) {
  std::vector<std::pair<double, double>> succ;
  std::vector<std::pair<double, double>> elig;
  for (const auto& rec : records) {
    if (rec.bip_type != type) continue;
    const bool success_here = rec.outcome == Outcome::Success && rec.position == pos;
    if (success_here) succ.emplace_back(rec.x, rec.y);
    if (success_here || rec.outcome == Outcome::Failure)
      elig.emplace_back(rec.x, rec.y);
  }
  if (succ.empty()) throw validation_error("no successes for centroid");

  const double s = opts.grid_spacing;
  const double h2 = 2.0 * opts.bandwidth * opts.bandwidth;
  const double radius = opts.park.fence_radius;
  const auto weight_sum = [&](const std::vector<std::pair<double, double>>& pts,
                              double gx, double gy) {
    double w = 0.0;
    for (const auto& [px, py] : pts) {
      const double dx = px - gx;
      const double dy = py - gy;
      w += std::exp(-(dx * dx + dy * dy) / h2);
    }
    return w;
  };

  double best_score = -1.0;
  double best_r = 0.0;
  double best_x = 0.0, best_y = 0.0;
  bool found = false;
  const long nx = static_cast<long>(std::floor(radius / s));
  for (long iy = 0; iy * s <= radius; ++iy) {
    const double gy = iy * s;
    for (long ix = -nx; ix <= nx; ++ix) {
      const double gx = ix * s;
      if (!opts.park.contains(gx, gy)) continue;
      const double denom = weight_sum(elig, gx, gy);
      if (denom < 1e-12) continue;
      const double score = weight_sum(succ, gx, gy) / denom;
      const double r = std::hypot(gx, gy);
      const bool better =
          score > best_score + 1e-12 ||
          (std::abs(score - best_score) <= 1e-12 && r < best_r - 1e-9);
      if (!found || better) {
        best_score = score;
        best_r = r;
        best_x = gx;
        best_y = gy;
        found = true;
      }
    }
  }
  if (!found) throw numerical_error("centroid search found no supported grid point");

  Centroid c;
  c.position = pos;
  c.bip_type = type;
  c.x0 = best_x;
  c.y0 = best_y;
  c.phi0_deg = (best_x == 0.0 && best_y == 0.0) ? 90.0 : field_angle_deg(best_x, best_y);
  return c;
}

EligibilityPartition partition_eligible(const std::vector<BipRecord>& records,
                                        Position pos, BipType type,
                                        const Centroid& centroid,
                                        double max_distance) {
  const bool planar = type != BipType::Grounder;
  EligibilityPartition part;
  for (const auto& rec : records) {
    if (rec.bip_type != type)
      throw validation_error("record bip_type does not match the studied type");
    if (rec.outcome == Outcome::Success && rec.position != pos) {
      part.dropped_other_success.push_back(rec);
      continue;
    }
    if (planar) {
      const double d = std::hypot(rec.x - centroid.x0, rec.y - centroid.y0);
      if (d > max_distance) {
        part.dropped_beyond_range.push_back(rec);
        continue;
      }
    }
    part.eligible.push_back(rec);
  }
  return part;
}

std::vector<BipRecord> filter_eligible(const std::vector<BipRecord>& records,
                                       Position pos, BipType type,
                                       const Centroid& centroid,
                                       double max_distance) {
  return partition_eligible(records, pos, type, centroid, max_distance).eligible;
}

CovariateRow build_fly_covariates(const BipRecord& rec, const Centroid& centroid) {
  CovariateRow row;
  row.outcome = rec.outcome == Outcome::Success ? 1 : 0;
  row.distance = std::hypot(rec.x - centroid.x0, rec.y - centroid.y0);
  row.velocity = static_cast<double>(rec.velocity);
  // Forward means the ball lands closer to home plate than the fielder starts.
  row.direction =
      radial_distance(rec.x, rec.y) < radial_distance(centroid.x0, centroid.y0) ? 1 : 0;
  return row;
}

CovariateRow build_ground_covariates(const BipRecord& rec, const Centroid& centroid) {
  const double phi = field_angle_deg(rec.x, rec.y);  // throws at home plate
  CovariateRow row;
  row.outcome = rec.outcome == Outcome::Success ? 1 : 0;
  row.distance = std::abs(phi - centroid.phi0_deg);
  row.velocity = static_cast<double>(rec.velocity);
  // Left is the first-base side of the centroid ray, i.e. the smaller field angle.
  row.direction = phi < centroid.phi0_deg ? 1 : 0;
  return row;
}

CovariateRow build_covariates(const BipRecord& rec, const Centroid& centroid) {
  return rec.bip_type == BipType::Grounder ? build_ground_covariates(rec, centroid)
                                           : build_fly_covariates(rec, centroid);
}

std::vector<BipRecord> records_of_type(const std::vector<BipRecord>& records,
                                       BipType type) {
  std::vector<BipRecord> out;
  for (const auto& rec : records)
    if (rec.bip_type == type) out.push_back(rec);
  return out;
}

}  // namespace safe
