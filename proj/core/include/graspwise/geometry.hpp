#pragma once

#include <array>
#include <span>
#include <vector>

namespace graspwise {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Axis-aligned box in image pixels; (x, y) is the top-left corner.
struct AxisRect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double center_x() const { return x + 0.5 * w; }
  double center_y() const { return y + 0.5 * h; }
  double area() const { return w * h; }
  bool valid() const;
  bool contains(const AxisRect& other) const;

  friend bool operator==(const AxisRect&, const AxisRect&) = default;
};

/// Planar grasp configuration (cx, cy, theta, w, h). theta is in degrees,
/// measured from the image x-axis, and kept in [-90, 90).
struct GraspRect {
  double cx = 0.0;
  double cy = 0.0;
  double theta = 0.0;
  double w = 0.0;
  double h = 0.0;

  bool valid() const;
  double area() const { return w * h; }

  friend bool operator==(const GraspRect&, const GraspRect&) = default;
};

/// Maps any finite angle (degrees) into [-90, 90).
double normalize_angle(double degrees);

/// Absolute orientation difference of two rectangle angles, modulo 180.
/// Result lies in [0, 90].
double angle_difference(double a_degrees, double b_degrees);

/// GraspRect with theta normalized.
GraspRect make_grasp(double cx, double cy, double theta, double w, double h);

GraspRect to_grasp(const AxisRect& r);

/// Corners in drawing order (counter-clockwise in a y-up frame).
std::array<Point, 4> corners(const GraspRect& g);
std::array<Point, 4> corners(const AxisRect& r);

/// Shoelace area; positive for counter-clockwise order (y-up frame).
double signed_area(std::span<const Point> polygon);

/// Sutherland-Hodgman clip of a convex subject polygon by a convex clip
/// polygon. Both polygons must share the same orientation.
std::vector<Point> clip_convex(std::span<const Point> subject,
                               std::span<const Point> clip);

double intersection_area(const GraspRect& a, const GraspRect& b);
double intersection_area(const AxisRect& a, const AxisRect& b);

/// Rotated IoU via exact convex polygon clipping.
double rect_iou(const GraspRect& a, const GraspRect& b);
/// Closed-form axis-aligned IoU.
double rect_iou(const AxisRect& a, const AxisRect& b);

/// |g ∩ k| / |g|: the share of proposal g that lies inside the grounded
/// region k. Not symmetric.
double tiou(const AxisRect& g, const AxisRect& k);

/// Minimal axis-aligned box containing the rotated rectangle.
AxisRect axis_envelope(const GraspRect& g);

enum class JaccardMode { kRotated, kAxisAligned };

/// Jaccard index used by the correctness criterion.
double jaccard(const GraspRect& a, const GraspRect& b,
               JaccardMode mode = JaccardMode::kRotated);

/// Per-cell normalized plane coordinates of a W x H feature map:
/// (i/W, j/H, (i+.5)/W, (j+.5)/H, (i+1)/W, (j+1)/H, 1/W, 1/H).
class SpatialFeatureGrid {
 public:
  using Cell = std::array<double, 8>;

  SpatialFeatureGrid(int width, int height);

  int width() const { return width_; }
  int height() const { return height_; }
  /// Cell at column i, row j.
  const Cell& at(int i, int j) const;
  std::span<const Cell> cells() const { return cells_; }

 private:
  int width_;
  int height_;
  std::vector<Cell> cells_;
};

/// Throws Error(kInvalidDimension) when width or height is below 1.
SpatialFeatureGrid spatial_grid(int width, int height);

}  // namespace graspwise
