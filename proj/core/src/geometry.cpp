#include "safe/geometry.hpp"

#include <cmath>

#include "safe/errors.hpp"

namespace safe {

namespace {
constexpr double kRadToDeg = 57.29577951308232;
constexpr double kBoundaryTol = 1e-9;
}  // namespace

bool ParkGeometry::contains(double x, double y) const {
  const double r = std::hypot(x, y);
  if (r == 0.0) return true;  // degenerate apex at home plate
  if (r > fence_radius + kBoundaryTol) return false;
  const double ang = std::atan2(y, x) * kRadToDeg;
  return ang >= foul_line_low_deg - kBoundaryTol &&
         ang <= foul_line_high_deg + kBoundaryTol;
}

double field_angle_deg(double x, double y) {
  if (x == 0.0 && y == 0.0) throw validation_error("undefined angle");
  return std::atan2(y, x) * kRadToDeg;
}

double radial_distance(double x, double y) { return std::hypot(x, y); }

}  // namespace safe
