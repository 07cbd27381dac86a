#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <vector>

#include "snvc/box_geom.hpp"
#include "snvc/kitti_io.hpp"

namespace snvc {

/// Candidate lattice layout: cell counts along the length/height/width axes
/// of the RoI and the metric size of one cell along each.
struct GridSpec {
  int n_l = 192;
  int n_h = 32;
  int n_w = 128;
  double d_l = 0.03;
  double d_h = 0.10;
  double d_w = 0.03;

  double extent_l() const { return n_l * d_l; }
  double extent_h() const { return n_h * d_h; }
  double extent_w() const { return n_w * d_w; }
  std::int64_t candidate_count() const {
    return std::int64_t{n_l} * n_h * n_w;
  }
};

/// Dense candidate lattice inside a 3D RoI sharing the proposal's 4-DoF pose.
///
/// Candidate (i, j, k) (0-based: i over height, j over width, k over length)
/// sits at object-frame offset
///   ( -extent_l/2 + k*d_l,  -extent_h/2 + i*d_h,  +extent_w/2 - j*d_w )
/// mapped to the camera frame by the RoI homography. The (0, 0, 0) candidate
/// is the left-back-top corner of the grid.
struct VernierGrid {
  Box3D roi_pose;  // proposal pose with h/w/l replaced by the RoI extents
  GridSpec spec;
  Eigen::Matrix4d homography = Eigen::Matrix4d::Identity();
  std::vector<Eigen::Vector3d> candidates;  // flattened, k fastest then j then i

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * spec.n_w + j) * spec.n_l + k;
  }
  const Eigen::Vector3d& at(int i, int j, int k) const {
    return candidates[index(i, j, k)];
  }

  /// Object-frame offset of candidate (i, j, k) on the exact lattice.
  Eigen::Vector3d lattice_offset(int i, int j, int k) const;

  /// Continuous 0-based lattice coordinates of an object-frame point
  /// (inverse of lattice_offset on each axis).
  Eigen::Vector3d lattice_coords(const Eigen::Vector3d& obj) const;

  /// Camera-frame center of the candidate lattice (mean candidate position).
  Eigen::Vector3d lattice_center_cam() const;
};

/// One label per candidate for the foreground classification target.
enum class Occupancy : std::uint8_t { background = 0, foreground = 1, ignore = 2 };

struct OccupancyLabels {
  GridSpec spec;
  std::vector<Occupancy> labels;

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(i) * spec.n_w + j) * spec.n_l + k;
  }
  Occupancy at(int i, int j, int k) const { return labels[index(i, j, k)]; }
  std::int64_t count(Occupancy value) const;
};

/// Build the candidate lattice around a proposal.
VernierGrid build_grid(const Box3D& proposal, const GridSpec& spec);

/// Label candidates from a camera-frame point cloud and the ground-truth box:
/// a cell holding at least one in-RoI point (floor quantization from the grid
/// corner) is foreground; a candidate strictly outside the ground-truth box
/// (with optional margin) and not foreground is background; the rest are
/// ignored.
OccupancyLabels label_occupancy(const VernierGrid& grid,
                                const PointCloud& cloud_cam, const Box3D& gt,
                                double margin = 0.0);

/// Voxel count of a uniform grid over a global range, rounded to nearest.
std::int64_t voxel_budget_uniform(double range_l, double range_w,
                                  double range_h, double delta);

/// Voxel count of the two-scale scheme: one candidate lattice per proposal
/// plus a coarse uniform global grid.
std::int64_t voxel_budget_snvc(const GridSpec& spec, std::int64_t n_proposals,
                               const std::array<double, 3>& global_range,
                               double delta_g);

}  // namespace snvc
