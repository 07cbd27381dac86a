#pragma once

#include <Eigen/Dense>
#include <array>

namespace snvc {

/// Upright 3D bounding box in camera coordinates. (x, y, z) is the geometric
/// center of the cuboid, (h, w, l) the vertical / lateral / longitudinal
/// extents in meters, and theta the yaw about the vertical axis in radians,
/// normalized to [-pi, pi].
struct Box3D {
  double x = 0.0, y = 0.0, z = 0.0;
  double h = 1.0, w = 1.0, l = 1.0;
  double theta = 0.0;

  Eigen::Vector3d center() const { return {x, y, z}; }
  double volume() const { return h * w * l; }
};

/// Wrap an angle to [-pi, pi].
double normalize_angle(double a);

/// The nine reference points of a box: the center followed by its eight
/// corners. Corner order follows a fixed sign pattern over the object-frame
/// half extents: length ++++----, height -+-+-+-+, width ++--++--.
struct PartSet {
  std::array<Eigen::Vector3d, 9> coords;

  /// Ground-plane (x, z) coordinates of part m.
  Eigen::Vector2d xz(int m) const { return {coords[m].x(), coords[m].z()}; }
};

/// Rigid motion of the ground (x-z) plane. The rotation convention matches
/// box yaw: rotation(a) = [[cos a, sin a], [-sin a, cos a]] acting on column
/// (x, z), so applying a pose to a box adds the pose angle to its theta.
struct Pose2D {
  Eigen::Matrix2d rot = Eigen::Matrix2d::Identity();
  Eigen::Vector2d trans = Eigen::Vector2d::Zero();

  static Pose2D rotation(double angle);
  static Pose2D translation(const Eigen::Vector2d& t);

  /// Signed rotation angle, atan2(rot(0,1), rot(0,0)).
  double angle() const;

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const {
    return rot * p + trans;
  }

  /// Composition: (other.then(*this)) maps p to this(other(p)).
  Pose2D after(const Pose2D& first) const;
};

/// 4x4 rigid transform from the box object frame to the camera frame:
/// yaw rotation about the vertical axis followed by translation to the
/// box center.
Eigen::Matrix4d homography_of(const Box3D& box);

/// Camera-frame part coordinates: the object-frame part matrix of the box
/// (center plus corners at half extents) mapped through homography_of.
PartSet parts_of(const Box3D& box);

/// Ground-plane intersection-over-union of the two rotated footprints.
/// The intersection polygon is computed by Sutherland-Hodgman clipping.
double bev_iou(const Box3D& a, const Box3D& b);

/// Volumetric IoU: footprint intersection area times vertical overlap,
/// over the volume union.
double iou_3d(const Box3D& a, const Box3D& b);

/// Apply a ground-plane rigid motion: (x, z) moves by the pose, theta grows
/// by the pose angle (renormalized), y and sizes are untouched.
Box3D apply_pose2d(const Box3D& box, const Pose2D& pose);

/// Footprint corners of the box in the x-z plane, counter-ordered per the
/// part sign pattern with the height axis dropped (four distinct corners).
std::array<Eigen::Vector2d, 4> bev_corners(const Box3D& box);

}  // namespace snvc
