#include "snvc/ref.hpp"

#include <cmath>

namespace snvc::ref {

VernierGrid build_grid(const Box3D& proposal, const GridSpec& spec) {
  VernierGrid grid;
  grid.roi_pose = proposal;
  grid.roi_pose.l = spec.extent_l();
  grid.roi_pose.h = spec.extent_h();
  grid.roi_pose.w = spec.extent_w();
  grid.spec = spec;
  grid.homography = homography_of(proposal);
  grid.candidates.resize(static_cast<std::size_t>(spec.candidate_count()));

  for (int i = 0; i < spec.n_h; ++i) {
    for (int j = 0; j < spec.n_w; ++j) {
      for (int k = 0; k < spec.n_l; ++k) {
        const Eigen::Vector4d obj(-spec.extent_l() / 2.0 + k * spec.d_l,
                                  -spec.extent_h() / 2.0 + i * spec.d_h,
                                  +spec.extent_w() / 2.0 - j * spec.d_w, 1.0);
        grid.candidates[grid.index(i, j, k)] = (grid.homography * obj).head<3>();
      }
    }
  }
  return grid;
}

OccupancyLabels label_occupancy(const VernierGrid& grid,
                                const PointCloud& cloud_cam, const Box3D& gt,
                                double margin) {
  const GridSpec& spec = grid.spec;
  OccupancyLabels out;
  out.spec = spec;
  out.labels.assign(grid.candidates.size(), Occupancy::ignore);

  std::vector<bool> occupied(grid.candidates.size(), false);
  const Eigen::Matrix4d inv = grid.homography.inverse();
  for (const PointCloud::Point& pt : cloud_cam.points) {
    const Eigen::Vector4d obj = inv * Eigen::Vector4d(pt.x, pt.y, pt.z, 1.0);
    const int k = static_cast<int>(
        std::floor((obj.x() + spec.extent_l() / 2.0) / spec.d_l));
    const int i = static_cast<int>(
        std::floor((obj.y() + spec.extent_h() / 2.0) / spec.d_h));
    const int j = static_cast<int>(
        std::floor((spec.extent_w() / 2.0 - obj.z()) / spec.d_w));
    if (i >= 0 && i < spec.n_h && j >= 0 && j < spec.n_w && k >= 0 &&
        k < spec.n_l) {
      occupied[out.index(i, j, k)] = true;
    }
  }

  const Eigen::Matrix4d gt_inv = homography_of(gt).inverse();
  for (int i = 0; i < spec.n_h; ++i) {
    for (int j = 0; j < spec.n_w; ++j) {
      for (int k = 0; k < spec.n_l; ++k) {
        const std::size_t idx = out.index(i, j, k);
        if (occupied[idx]) {
          out.labels[idx] = Occupancy::foreground;
          continue;
        }
        const Eigen::Vector4d obj = gt_inv * grid.candidates[idx].homogeneous();
        const bool outside = std::abs(obj.x()) > gt.l / 2.0 + margin ||
                             std::abs(obj.y()) > gt.h / 2.0 + margin ||
                             std::abs(obj.z()) > gt.w / 2.0 + margin;
        if (outside) out.labels[idx] = Occupancy::background;
      }
    }
  }
  return out;
}

namespace {

double lerp(double a, double b, double t) { return a + (b - a) * t; }

// One-channel bilinear fetch with sequential lerps.
bool sample_map(const FeatureMap& map, double u, double v, int c, double* out) {
  const double fx = u / map.stride;
  const double fy = v / map.stride;
  *out = 0.0;
  if (fx < 0.0 || fy < 0.0 || fx > map.width - 1 || fy > map.height - 1) {
    return false;
  }
  int x0 = std::min(static_cast<int>(std::floor(fx)), map.width - 2);
  int y0 = std::min(static_cast<int>(std::floor(fy)), map.height - 2);
  x0 = std::max(x0, 0);
  y0 = std::max(y0, 0);
  const int x1 = std::min(x0 + 1, map.width - 1);
  const int y1 = std::min(y0 + 1, map.height - 1);
  const double top = lerp(map.at(y0, x0, c), map.at(y0, x1, c), fx - x0);
  const double bot = lerp(map.at(y1, x0, c), map.at(y1, x1, c), fx - x0);
  *out = lerp(top, bot, fy - y0);
  return true;
}

}  // namespace

ColoredGrid aggregate_stereo(const VernierGrid& grid, const FeatureMap& left,
                             const FeatureMap& right, const CameraRig& rig) {
  ColoredGrid out;
  out.grid = &grid;
  out.channels = 2 * left.channels;
  out.features.assign(grid.candidates.size() * out.channels, 0.0f);
  out.valid.assign(grid.candidates.size(), 0);

  for (std::size_t idx = 0; idx < grid.candidates.size(); ++idx) {
    float* feat = out.features.data() + idx * out.channels;
    bool any = false;
    const Projection pl = project(grid.candidates[idx], rig.p_left);
    if (!pl.behind) {
      bool inside = true;
      for (int c = 0; c < left.channels; ++c) {
        double v = 0.0;
        inside = sample_map(left, pl.u, pl.v, c, &v) && inside;
        feat[c] = static_cast<float>(v);
      }
      any = any || inside;
      if (!inside) {
        for (int c = 0; c < left.channels; ++c) feat[c] = 0.0f;
      }
    }
    const Projection pr = project(grid.candidates[idx], rig.p_right);
    if (!pr.behind) {
      bool inside = true;
      for (int c = 0; c < right.channels; ++c) {
        double v = 0.0;
        inside = sample_map(right, pr.u, pr.v, c, &v) && inside;
        feat[left.channels + c] = static_cast<float>(v);
      }
      any = any || inside;
      if (!inside) {
        for (int c = 0; c < right.channels; ++c) feat[left.channels + c] = 0.0f;
      }
    }
    out.valid[idx] = any ? 1 : 0;
  }
  return out;
}

ColoredGrid aggregate_volume(const VernierGrid& grid,
                             const FeatureVolume& volume) {
  ColoredGrid out;
  out.grid = &grid;
  out.channels = volume.channels;
  out.features.assign(grid.candidates.size() * out.channels, 0.0f);
  out.valid.assign(grid.candidates.size(), 0);

  for (std::size_t idx = 0; idx < grid.candidates.size(); ++idx) {
    const Eigen::Vector3d g =
        (grid.candidates[idx] - volume.origin) / volume.cell_size;
    bool inside = true;
    for (int a = 0; a < 3; ++a) {
      inside = inside && g[a] >= 0.0 && g[a] <= volume.extents[a] - 1;
    }
    if (!inside) continue;
    int i0[3];
    double t[3];
    for (int a = 0; a < 3; ++a) {
      i0[a] = std::clamp(static_cast<int>(std::floor(g[a])), 0,
                         std::max(volume.extents[a] - 2, 0));
      t[a] = g[a] - i0[a];
    }
    float* feat = out.features.data() + idx * out.channels;
    for (int c = 0; c < volume.channels; ++c) {
      double corner[2][2][2];
      for (int dx = 0; dx < 2; ++dx) {
        for (int dy = 0; dy < 2; ++dy) {
          for (int dz = 0; dz < 2; ++dz) {
            const int ix = std::min(i0[0] + dx, volume.extents[0] - 1);
            const int iy = std::min(i0[1] + dy, volume.extents[1] - 1);
            const int iz = std::min(i0[2] + dz, volume.extents[2] - 1);
            corner[dx][dy][dz] = volume.at(ix, iy, iz, c);
          }
        }
      }
      const double z00 = lerp(corner[0][0][0], corner[0][0][1], t[2]);
      const double z01 = lerp(corner[0][1][0], corner[0][1][1], t[2]);
      const double z10 = lerp(corner[1][0][0], corner[1][0][1], t[2]);
      const double z11 = lerp(corner[1][1][0], corner[1][1][1], t[2]);
      const double y0v = lerp(z00, z01, t[1]);
      const double y1v = lerp(z10, z11, t[1]);
      feat[c] = static_cast<float>(lerp(y0v, y1v, t[0]));
    }
    out.valid[idx] = 1;
  }
  return out;
}

PartConfidenceMaps encode(const VernierGrid& grid, const Box3D& gt,
                          double sigma_cells) {
  const GridSpec& spec = grid.spec;
  PartConfidenceMaps maps;
  maps.n_w = spec.n_w;
  maps.n_l = spec.n_l;
  maps.sigma = sigma_cells;
  maps.values.assign(static_cast<std::size_t>(kNumParts) * spec.n_w * spec.n_l,
                     0.0);

  const Eigen::Matrix4d inv = grid.homography.inverse();
  const PartSet parts = parts_of(gt);
  for (int m = 0; m < kNumParts; ++m) {
    const Eigen::Vector4d obj = inv * parts.coords[m].homogeneous();
    const double j_star = (spec.extent_w() / 2.0 - obj.z()) / spec.d_w;
    const double k_star = (obj.x() + spec.extent_l() / 2.0) / spec.d_l;
    for (int j = 0; j < spec.n_w; ++j) {
      for (int k = 0; k < spec.n_l; ++k) {
        const double d2 = (j - j_star) * (j - j_star) + (k - k_star) * (k - k_star);
        maps.at(m, j, k) = std::exp(-d2 / (sigma_cells * sigma_cells));
      }
    }
  }
  return maps;
}

}  // namespace snvc::ref
