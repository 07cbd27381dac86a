#include "snvc/box_geom.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace snvc {

double normalize_angle(double a) { return std::atan2(std::sin(a), std::cos(a)); }

Pose2D Pose2D::rotation(double angle) {
  Pose2D p;
  const double c = std::cos(angle), s = std::sin(angle);
  p.rot << c, s, -s, c;
  return p;
}

Pose2D Pose2D::translation(const Eigen::Vector2d& t) {
  Pose2D p;
  p.trans = t;
  return p;
}

double Pose2D::angle() const { return std::atan2(rot(0, 1), rot(0, 0)); }

Pose2D Pose2D::after(const Pose2D& first) const {
  Pose2D p;
  p.rot = rot * first.rot;
  p.trans = rot * first.trans + trans;
  return p;
}

Eigen::Matrix4d homography_of(const Box3D& box) {
  const double c = std::cos(box.theta), s = std::sin(box.theta);
  Eigen::Matrix4d h;
  h << c, 0, s, box.x,
       0, 1, 0, box.y,
      -s, 0, c, box.z,
       0, 0, 0, 1;
  return h;
}

namespace {

// Object-frame sign pattern of the eight corners, columns 1..8 of the part
// matrix (column 0 is the center).
constexpr int kSignL[8] = {+1, +1, +1, +1, -1, -1, -1, -1};
constexpr int kSignH[8] = {-1, +1, -1, +1, -1, +1, -1, +1};
constexpr int kSignW[8] = {+1, +1, -1, -1, +1, +1, -1, -1};

}  // namespace

PartSet parts_of(const Box3D& box) {
  const Eigen::Matrix4d h = homography_of(box);
  PartSet parts;
  parts.coords[0] = h.block<3, 1>(0, 3);
  for (int m = 0; m < 8; ++m) {
    const Eigen::Vector4d obj(kSignL[m] * box.l / 2.0, kSignH[m] * box.h / 2.0,
                              kSignW[m] * box.w / 2.0, 1.0);
    parts.coords[m + 1] = (h * obj).head<3>();
  }
  return parts;
}

std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box) {
  const double c = std::cos(box.theta), s = std::sin(box.theta);
  const double hl = box.l / 2.0, hw = box.w / 2.0;
  // Cyclic order around the footprint.
  const double ox[4] = {+hl, +hl, -hl, -hl};
  const double oz[4] = {+hw, -hw, -hw, +hw};
  std::array<Eigen::Vector2d, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {c * ox[i] + s * oz[i] + box.x, -s * ox[i] + c * oz[i] + box.z};
  }
  return out;
}

namespace {

double cross2(const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
  return a.x() * b.y() - a.y() * b.x();
}

double polygon_area(const std::vector<Eigen::Vector2d>& poly) {
  double acc = 0.0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    acc += cross2(poly[i], poly[(i + 1) % n]);
  }
  return std::abs(acc) / 2.0;
}

// Sutherland-Hodgman clip of a convex subject polygon against one directed
// edge; points on the edge are kept.
std::vector<Eigen::Vector2d> clip_edge(const std::vector<Eigen::Vector2d>& poly,
                                       const Eigen::Vector2d& e0,
                                       const Eigen::Vector2d& e1) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(poly.size() + 1);
  const Eigen::Vector2d dir = e1 - e0;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& cur = poly[i];
    const Eigen::Vector2d& nxt = poly[(i + 1) % n];
    const double side_cur = cross2(dir, cur - e0);
    const double side_nxt = cross2(dir, nxt - e0);
    if (side_cur >= 0.0) out.push_back(cur);
    if ((side_cur > 0.0 && side_nxt < 0.0) || (side_cur < 0.0 && side_nxt > 0.0)) {
      const double t = side_cur / (side_cur - side_nxt);
      out.push_back(cur + t * (nxt - cur));
    }
  }
  return out;
}

std::vector<Eigen::Vector2d> ccw(const std::array<Eigen::Vector2d, 4>& quad) {
  std::vector<Eigen::Vector2d> poly(quad.begin(), quad.end());
  double twice_area = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice_area += cross2(poly[i], poly[(i + 1) % poly.size()]);
  }
  if (twice_area < 0.0) std::reverse(poly.begin(), poly.end());
  return poly;
}

double footprint_intersection(const Box3D& a, const Box3D& b) {
  const std::vector<Eigen::Vector2d> clip = ccw(bev_corners(a));
  std::vector<Eigen::Vector2d> poly = ccw(bev_corners(b));
  for (std::size_t i = 0; i < clip.size() && poly.size() >= 3; ++i) {
    poly = clip_edge(poly, clip[i], clip[(i + 1) % clip.size()]);
  }
  if (poly.size() < 3) return 0.0;
  return polygon_area(poly);
}

}  // namespace

double bev_iou(const Box3D& a, const Box3D& b) {
  const double inter = footprint_intersection(a, b);
  const double area_a = a.l * a.w;
  const double area_b = b.l * b.w;
  const double uni = area_a + area_b - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const double inter_area = footprint_intersection(a, b);
  const double lo = std::max(a.y - a.h / 2.0, b.y - b.h / 2.0);
  const double hi = std::min(a.y + a.h / 2.0, b.y + b.h / 2.0);
  const double overlap = std::max(0.0, hi - lo);
  const double inter_vol = inter_area * overlap;
  const double uni = a.volume() + b.volume() - inter_vol;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter_vol / uni, 0.0, 1.0);
}

Box3D apply_pose2d(const Box3D& box, const Pose2D& pose) {
  Box3D out = box;
  const Eigen::Vector2d xz = pose.apply({box.x, box.z});
  out.x = xz.x();
  out.z = xz.y();
  out.theta = normalize_angle(box.theta + pose.angle());
  return out;
}

}  // namespace snvc
