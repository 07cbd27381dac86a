#include "snvc/voxel_grid.hpp"

#include <atomic>
#include <cmath>

#include "snvc/errors.hpp"

namespace snvc {

Eigen::Vector3d VernierGrid::lattice_offset(int i, int j, int k) const {
  return {-spec.extent_l() / 2.0 + k * spec.d_l,
          -spec.extent_h() / 2.0 + i * spec.d_h,
          +spec.extent_w() / 2.0 - j * spec.d_w};
}

Eigen::Vector3d VernierGrid::lattice_coords(const Eigen::Vector3d& obj) const {
  return {(obj.y() + spec.extent_h() / 2.0) / spec.d_h,
          (spec.extent_w() / 2.0 - obj.z()) / spec.d_w,
          (obj.x() + spec.extent_l() / 2.0) / spec.d_l};
}

Eigen::Vector3d VernierGrid::lattice_center_cam() const {
  // Mean lattice offset: half a cell shy of the pose center on each axis.
  const Eigen::Vector3d mean_obj(-spec.d_l / 2.0, -spec.d_h / 2.0,
                                 +spec.d_w / 2.0);
  return (homography * mean_obj.homogeneous()).head<3>();
}

VernierGrid build_grid(const Box3D& proposal, const GridSpec& spec) {
  VernierGrid grid;
  grid.roi_pose = proposal;
  grid.roi_pose.l = spec.extent_l();
  grid.roi_pose.h = spec.extent_h();
  grid.roi_pose.w = spec.extent_w();
  grid.spec = spec;
  grid.homography = homography_of(proposal);
  grid.candidates.resize(static_cast<std::size_t>(spec.candidate_count()));

  const Eigen::Matrix3d rot = grid.homography.block<3, 3>(0, 0);
  const Eigen::Vector3d trans = grid.homography.block<3, 1>(0, 3);
  const std::int64_t total = spec.candidate_count();
  const std::int64_t cells_per_slab = std::int64_t{spec.n_w} * spec.n_l;

#pragma omp parallel for schedule(static)
  for (std::int64_t flat = 0; flat < total; ++flat) {
    const int i = static_cast<int>(flat / cells_per_slab);
    const int j = static_cast<int>((flat / spec.n_l) % spec.n_w);
    const int k = static_cast<int>(flat % spec.n_l);
    grid.candidates[flat] = rot * grid.lattice_offset(i, j, k) + trans;
  }
  return grid;
}

namespace {

bool outside_box(const Eigen::Vector3d& obj, const Box3D& box, double margin) {
  return std::abs(obj.x()) > box.l / 2.0 + margin ||
         std::abs(obj.y()) > box.h / 2.0 + margin ||
         std::abs(obj.z()) > box.w / 2.0 + margin;
}

}  // namespace

OccupancyLabels label_occupancy(const VernierGrid& grid,
                                const PointCloud& cloud_cam, const Box3D& gt,
                                double margin) {
  const GridSpec& spec = grid.spec;
  OccupancyLabels out;
  out.spec = spec;
  out.labels.assign(grid.candidates.size(), Occupancy::ignore);

  // Cells occupied by at least one in-RoI point. Points quantize by floor
  // from the grid corner; concurrent writers all store the same value.
  std::vector<std::uint8_t> occupied(grid.candidates.size(), 0);
  const Eigen::Matrix4d inv = grid.homography.inverse();
  const std::int64_t n_points = static_cast<std::int64_t>(cloud_cam.size());

#pragma omp parallel for schedule(static)
  for (std::int64_t p = 0; p < n_points; ++p) {
    const PointCloud::Point& pt = cloud_cam.points[p];
    const Eigen::Vector4d obj = inv * Eigen::Vector4d(pt.x, pt.y, pt.z, 1.0);
    const Eigen::Vector3d coords = grid.lattice_coords(obj.head<3>());
    const int i = static_cast<int>(std::floor(coords.x()));
    const int j = static_cast<int>(std::floor(coords.y()));
    const int k = static_cast<int>(std::floor(coords.z()));
    if (i < 0 || i >= spec.n_h || j < 0 || j >= spec.n_w || k < 0 ||
        k >= spec.n_l) {
      continue;
    }
    std::atomic_ref<std::uint8_t>(occupied[out.index(i, j, k)])
        .store(1, std::memory_order_relaxed);
  }

  const Eigen::Matrix4d gt_inv = homography_of(gt).inverse();
  const std::int64_t total = spec.candidate_count();

#pragma omp parallel for schedule(static)
  for (std::int64_t flat = 0; flat < total; ++flat) {
    if (occupied[flat] != 0) {
      out.labels[flat] = Occupancy::foreground;
    } else {
      const Eigen::Vector4d obj = gt_inv * grid.candidates[flat].homogeneous();
      if (outside_box(obj.head<3>(), gt, margin)) {
        out.labels[flat] = Occupancy::background;
      }
    }
  }
  return out;
}

std::int64_t OccupancyLabels::count(Occupancy value) const {
  std::int64_t n = 0;
  for (Occupancy l : labels) {
    if (l == value) ++n;
  }
  return n;
}

std::int64_t voxel_budget_uniform(double range_l, double range_w,
                                  double range_h, double delta) {
  if (range_l <= 0.0 || range_w <= 0.0 || range_h <= 0.0 || delta <= 0.0) {
    throw DegenerateInputError("voxel budget arguments must be positive");
  }
  return std::llround(range_l * range_w * range_h / (delta * delta * delta));
}

std::int64_t voxel_budget_snvc(const GridSpec& spec, std::int64_t n_proposals,
                               const std::array<double, 3>& global_range,
                               double delta_g) {
  return spec.candidate_count() * n_proposals +
         voxel_budget_uniform(global_range[0], global_range[1],
                              global_range[2], delta_g);
}

}  // namespace snvc
