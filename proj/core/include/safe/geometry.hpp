#pragma once

namespace safe {

// Field frame: home plate at the origin, +y pointing straight out to center
// field, +x toward the right-field foul line. Field angles are measured in
// degrees counterclockwise from the +x axis, so the right-field line sits at
// 45 degrees and the left-field line at 135.
struct ParkGeometry {
  double fence_radius = 420.0;  // maximal-park outfield arc, feet
  double foul_line_low_deg = 45.0;
  double foul_line_high_deg = 135.0;

  bool contains(double x, double y) const;
  double angular_span_deg() const { return foul_line_high_deg - foul_line_low_deg; }
};

// Angle of the home-plate -> (x, y) ray in degrees from the +x axis.
// Throws validation_error at the origin, where the ray is undefined.
double field_angle_deg(double x, double y);

double radial_distance(double x, double y);

}  // namespace safe
