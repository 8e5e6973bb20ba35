#pragma once

#include <optional>
#include <string>
#include <vector>

#include "safe/geometry.hpp"

namespace safe {

enum class BipType { Flyball, Liner, Grounder };
enum class Position {
  FirstBase,
  SecondBase,
  ThirdBase,
  Shortstop,
  LeftField,
  CenterField,
  RightField
};
enum class Outcome { Success, Failure };
enum class HitResult { None, Single, Double, Triple };

constexpr int kNumPositions = 7;

bool is_infield(Position pos);

// Positions modeled for a BIP type: all seven for flyballs and liners, the
// four infield positions for grounders.
const std::vector<Position>& positions_for(BipType type);

std::string to_string(BipType type);
std::string to_string(Position pos);
std::string to_string(Outcome outcome);
std::string to_string(HitResult hit);
std::optional<BipType> parse_bip_type(const std::string& token);
std::optional<Position> parse_position(const std::string& token);
std::optional<Outcome> parse_outcome(const std::string& token);
std::optional<HitResult> parse_hit_result(const std::string& token);

// One batted ball. For a success, (fielder_id, position) identify the fielder
// who made the play; for a failure they identify the fielder at the position
// the study attributes the ball to.
struct BipRecord {
  int year = 0;
  BipType bip_type = BipType::Flyball;
  double x = 0.0;  // feet, positive toward the right-field line
  double y = 0.0;  // feet, positive into the field
  int velocity = 0;  // ordinal 1..3
  std::string fielder_id;
  Position position = Position::CenterField;
  Outcome outcome = Outcome::Failure;
  HitResult hit_result = HitResult::None;
};

// Returns an error message when a record breaks an invariant, nullopt when
// the record is well formed.
std::optional<std::string> validate_record(const BipRecord& rec,
                                           const ParkGeometry& park = {});

// Estimated starting location for a (position, BIP type) pair.
struct Centroid {
  Position position = Position::CenterField;
  BipType bip_type = BipType::Flyball;
  double x0 = 0.0;
  double y0 = 0.0;
  double phi0_deg = 90.0;  // home-plate ray angle; the spatial axis for grounders
};

// Model-ready covariates for one eligible record. `distance` is feet for
// flyballs/liners and degrees of arc for grounders; `direction` is the
// forward indicator for flyballs/liners and the left (first-base-side)
// indicator for grounders.
struct CovariateRow {
  int outcome = 0;
  double distance = 0.0;
  double velocity = 0.0;
  int direction = 0;
};

struct CentroidOptions {
  double grid_spacing = 5.0;  // feet
  double bandwidth = 15.0;    // feet, Gaussian smoothing of the success rate
  ParkGeometry park;
};

// Argmax of the kernel-smoothed success proportion over a grid of candidate
// starting locations. Ties are broken toward home plate. Deterministic given
// the data.
Centroid estimate_centroid(const std::vector<BipRecord>& records, Position pos,
                           BipType type, const CentroidOptions& opts = {});

// Eligibility split for one studied (position, BIP type): balls the studied
// position fielded or nobody fielded are kept; balls another position fielded
// are treated as missing; flyballs/liners farther than `max_distance` from
// the centroid are out of reach. The three parts partition the input.
struct EligibilityPartition {
  std::vector<BipRecord> eligible;
  std::vector<BipRecord> dropped_other_success;
  std::vector<BipRecord> dropped_beyond_range;
};

EligibilityPartition partition_eligible(const std::vector<BipRecord>& records,
                                        Position pos, BipType type,
                                        const Centroid& centroid,
                                        double max_distance = 250.0);

std::vector<BipRecord> filter_eligible(const std::vector<BipRecord>& records,
                                       Position pos, BipType type,
                                       const Centroid& centroid,
                                       double max_distance = 250.0);

// Distance to the centroid plus the forward indicator (ball lands closer to
// home plate than the centroid does).
CovariateRow build_fly_covariates(const BipRecord& rec, const Centroid& centroid);

// Angle between the home-plate ray through the ball and the centroid ray,
// plus the left indicator (ball on the first-base side of the centroid ray).
CovariateRow build_ground_covariates(const BipRecord& rec, const Centroid& centroid);

CovariateRow build_covariates(const BipRecord& rec, const Centroid& centroid);

std::vector<BipRecord> records_of_type(const std::vector<BipRecord>& records,
                                       BipType type);

}  // namespace safe
