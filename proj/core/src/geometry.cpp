#include "graspwise/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "graspwise/error.hpp"

namespace graspwise {

namespace {

double cross(const Point& o, const Point& a, const Point& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Exact values on multiples of 90 degrees keep axis-aligned rectangles
// axis-aligned after the rotation.
void sin_cos_degrees(double degrees, double& s, double& c) {
  const double quarter = degrees / 90.0;
  if (quarter == std::floor(quarter) && std::abs(quarter) < 1e15) {
    static constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    static constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    const long long q = static_cast<long long>(quarter);
    const int idx = static_cast<int>(((q % 4) + 4) % 4);
    s = kSin[idx];
    c = kCos[idx];
    return;
  }
  const double rad = degrees * std::numbers::pi / 180.0;
  s = std::sin(rad);
  c = std::cos(rad);
}

// Intersection of segment s->e with the infinite line through a->b.
Point line_intersection(const Point& s, const Point& e, const Point& a,
                        const Point& b) {
  if (a.x == b.x && s.x != e.x) {
    const double t = (a.x - s.x) / (e.x - s.x);
    return {a.x, s.y == e.y ? s.y : s.y + t * (e.y - s.y)};
  }
  if (a.y == b.y && s.y != e.y) {
    const double t = (a.y - s.y) / (e.y - s.y);
    return {s.x == e.x ? s.x : s.x + t * (e.x - s.x), a.y};
  }
  const double d1 = cross(a, b, s);
  const double d2 = cross(a, b, e);
  const double t = d1 / (d1 - d2);
  return {s.x + t * (e.x - s.x), s.y + t * (e.y - s.y)};
}

}  // namespace

bool AxisRect::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0.0 && h > 0.0;
}

bool AxisRect::contains(const AxisRect& other) const {
  return other.x >= x && other.y >= y && other.right() <= right() &&
         other.bottom() <= bottom();
}

bool GraspRect::valid() const {
  return std::isfinite(cx) && std::isfinite(cy) && std::isfinite(theta) &&
         std::isfinite(w) && std::isfinite(h) && w > 0.0 && h > 0.0 &&
         theta >= -90.0 && theta < 90.0;
}

double normalize_angle(double degrees) {
  double r = std::fmod(degrees + 90.0, 180.0);
  if (r < 0.0) r += 180.0;
  r -= 90.0;
  // fmod can land exactly on the open upper bound after the shift.
  if (r >= 90.0) r -= 180.0;
  return r;
}

double angle_difference(double a_degrees, double b_degrees) {
  double d = std::fmod(std::abs(a_degrees - b_degrees), 180.0);
  return d > 90.0 ? 180.0 - d : d;
}

GraspRect make_grasp(double cx, double cy, double theta, double w, double h) {
  return GraspRect{cx, cy, normalize_angle(theta), w, h};
}

GraspRect to_grasp(const AxisRect& r) {
  return GraspRect{r.center_x(), r.center_y(), 0.0, r.w, r.h};
}

std::array<Point, 4> corners(const GraspRect& g) {
  double s = 0.0;
  double c = 1.0;
  sin_cos_degrees(g.theta, s, c);
  const double ux = 0.5 * g.w * c;
  const double uy = 0.5 * g.w * s;
  const double vx = -0.5 * g.h * s;
  const double vy = 0.5 * g.h * c;
  return {Point{g.cx - ux - vx, g.cy - uy - vy},
          Point{g.cx + ux - vx, g.cy + uy - vy},
          Point{g.cx + ux + vx, g.cy + uy + vy},
          Point{g.cx - ux + vx, g.cy - uy + vy}};
}

std::array<Point, 4> corners(const AxisRect& r) {
  return {Point{r.x, r.y}, Point{r.right(), r.y}, Point{r.right(), r.bottom()},
          Point{r.x, r.bottom()}};
}

double signed_area(std::span<const Point> polygon) {
  if (polygon.size() < 3) return 0.0;
  // Shoelace relative to the first vertex to limit cancellation.
  const Point& o = polygon[0];
  double twice = 0.0;
  for (std::size_t i = 1; i + 1 < polygon.size(); ++i) {
    twice += cross(o, polygon[i], polygon[i + 1]);
  }
  return 0.5 * twice;
}

std::vector<Point> clip_convex(std::span<const Point> subject,
                               std::span<const Point> clip) {
  std::vector<Point> output(subject.begin(), subject.end());
  std::vector<Point> input;
  for (std::size_t i = 0; i < clip.size() && !output.empty(); ++i) {
    const Point& a = clip[i];
    const Point& b = clip[(i + 1) % clip.size()];
    input.swap(output);
    output.clear();
    for (std::size_t j = 0; j < input.size(); ++j) {
      const Point& cur = input[j];
      const Point& prev = input[(j + input.size() - 1) % input.size()];
      const bool cur_in = cross(a, b, cur) >= 0.0;
      const bool prev_in = cross(a, b, prev) >= 0.0;
      if (cur_in) {
        if (!prev_in) output.push_back(line_intersection(prev, cur, a, b));
        output.push_back(cur);
      } else if (prev_in) {
        output.push_back(line_intersection(prev, cur, a, b));
      }
    }
  }
  return output;
}

double intersection_area(const GraspRect& a, const GraspRect& b) {
  const auto pa = corners(a);
  const auto pb = corners(b);
  const auto poly = clip_convex(pa, pb);
  return std::max(0.0, signed_area(poly));
}

double intersection_area(const AxisRect& a, const AxisRect& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.x, b.x);
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

double rect_iou(const GraspRect& a, const GraspRect& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double rect_iou(const AxisRect& a, const AxisRect& b) {
  const double inter = intersection_area(a, b);
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double tiou(const AxisRect& g, const AxisRect& k) {
  const double area = g.area();
  if (area <= 0.0) return 0.0;
  return std::clamp(intersection_area(g, k) / area, 0.0, 1.0);
}

AxisRect axis_envelope(const GraspRect& g) {
  double s = 0.0;
  double c = 1.0;
  sin_cos_degrees(g.theta, s, c);
  const double half_w = 0.5 * (std::abs(c) * g.w + std::abs(s) * g.h);
  const double half_h = 0.5 * (std::abs(s) * g.w + std::abs(c) * g.h);
  return AxisRect{g.cx - half_w, g.cy - half_h, 2.0 * half_w, 2.0 * half_h};
}

double jaccard(const GraspRect& a, const GraspRect& b, JaccardMode mode) {
  if (mode == JaccardMode::kAxisAligned) {
    return rect_iou(axis_envelope(a), axis_envelope(b));
  }
  return rect_iou(a, b);
}

SpatialFeatureGrid::SpatialFeatureGrid(int width, int height)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::kInvalidDimension,
                "spatial grid needs W >= 1 and H >= 1, got W=" +
                    std::to_string(width) + " H=" + std::to_string(height));
  }
  const double w = width;
  const double h = height;
  cells_.reserve(static_cast<std::size_t>(width) * height);
  for (int j = 0; j < height; ++j) {
    for (int i = 0; i < width; ++i) {
      cells_.push_back(Cell{i / w, j / h, (i + 0.5) / w, (j + 0.5) / h,
                            (i + 1) / w, (j + 1) / h, 1.0 / w, 1.0 / h});
    }
  }
}

const SpatialFeatureGrid::Cell& SpatialFeatureGrid::at(int i, int j) const {
  if (i < 0 || i >= width_ || j < 0 || j >= height_) {
    throw Error(ErrorCode::kInvalidDimension, "spatial grid index out of range");
  }
  return cells_[static_cast<std::size_t>(j) * width_ + i];
}

SpatialFeatureGrid spatial_grid(int width, int height) {
  return SpatialFeatureGrid(width, height);
}

}  // namespace graspwise
