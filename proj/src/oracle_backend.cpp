#include "snvc/oracle_backend.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snvc {

CameraRig make_default_rig(int image_width, int image_height) {
  constexpr double kFocal = 720.0;
  constexpr double kBaseline = 0.54;
  CameraRig rig;
  rig.p_left.setZero();
  rig.p_left(0, 0) = kFocal;
  rig.p_left(1, 1) = kFocal;
  rig.p_left(0, 2) = image_width / 2.0;
  rig.p_left(1, 2) = image_height / 2.0;
  rig.p_left(2, 2) = 1.0;
  rig.p_right = rig.p_left;
  rig.p_right(0, 3) = -kFocal * kBaseline;
  return rig;
}

SceneSpec::SceneSpec() : rig(make_default_rig()) {}

PartConfidenceMaps oracle_predict(const VernierGrid& grid, const Box3D& gt,
                                  double sigma_cells, const OracleNoise& noise,
                                  SeededRng& rng) {
  PartConfidenceMaps maps = encode(grid, gt, sigma_cells);
  if (noise.map_noise_std > 0.0) {
    for (double& v : maps.values) {
      v = std::clamp(v + noise.map_noise_std * rng.next_gaussian(), 0.0, 1.0);
    }
  }
  if (noise.dropout_parts > 0.0) {
    for (int m = 0; m < kNumParts; ++m) {
      if (rng.next_uniform() < noise.dropout_parts) {
        for (int j = 0; j < maps.n_w; ++j) {
          for (int k = 0; k < maps.n_l; ++k) maps.at(m, j, k) = 0.0;
        }
      }
    }
  }
  return maps;
}

namespace {

void splat_blob(FeatureMap& map, int channel, double cx, double cy,
                double sigma) {
  const int x_lo = std::max(0, static_cast<int>(std::floor(cx - 4 * sigma)));
  const int x_hi =
      std::min(map.width - 1, static_cast<int>(std::ceil(cx + 4 * sigma)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(cy - 4 * sigma)));
  const int y_hi =
      std::min(map.height - 1, static_cast<int>(std::ceil(cy + 4 * sigma)));
  const double inv_sigma2 = 1.0 / (sigma * sigma);
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
      map.at(y, x, channel) +=
          static_cast<float>(std::exp(-d2 * inv_sigma2));
    }
  }
}

bool in_image(const Projection& p, int width, int height, double margin) {
  return !p.behind && p.u >= margin && p.u <= width - margin && p.v >= margin &&
         p.v <= height - margin;
}

// Uniform point on one face of the box (object frame), axis = fixed
// dimension (0 length, 1 height, 2 width), side = -1 or +1.
Eigen::Vector3d face_point(const Box3D& box, int axis, int side, double u,
                           double v) {
  const double half[3] = {box.l / 2.0, box.h / 2.0, box.w / 2.0};
  Eigen::Vector3d p;
  p[axis] = side * half[axis];
  const int a1 = (axis + 1) % 3;
  const int a2 = (axis + 2) % 3;
  p[a1] = (u - 0.5) * 2.0 * half[a1];
  p[a2] = (v - 0.5) * 2.0 * half[a2];
  return p;
}

}  // namespace

Scene render_scene(const SceneSpec& spec, SeededRng& rng) {
  Scene scene;
  const int feat_w =
      static_cast<int>(std::ceil(spec.image_width / spec.feature_stride));
  const int feat_h =
      static_cast<int>(std::ceil(spec.image_height / spec.feature_stride));
  scene.left = FeatureMap::zeros(feat_h, feat_w, kNumParts, spec.feature_stride);
  scene.right = scene.left;

  const double focal = spec.rig.p_left(0, 0);
  const double cx = spec.rig.p_left(0, 2);

  for (int b = 0; b < spec.n_boxes; ++b) {
    Box3D box;
    bool placed = false;
    for (int attempt = 0; attempt < spec.max_retries; ++attempt) {
      box.z = spec.depth_range[0] +
              (spec.depth_range[1] - spec.depth_range[0]) * rng.next_uniform();
      // Keep the center inside the left view laterally.
      const double x_span = spec.lateral_frac * box.z * cx / focal;
      box.x = (rng.next_uniform() * 2.0 - 1.0) * x_span;
      box.h = std::max(0.5, spec.size_mean[0] + spec.size_std[0] * rng.next_gaussian());
      box.w = std::max(0.5, spec.size_mean[1] + spec.size_std[1] * rng.next_gaussian());
      box.l = std::max(0.5, spec.size_mean[2] + spec.size_std[2] * rng.next_gaussian());
      // Road-level placement: camera sits roughly 1.65 m above ground.
      box.y = 1.65 - box.h / 2.0;
      box.theta = spec.yaw_range[0] +
                  (spec.yaw_range[1] - spec.yaw_range[0]) * rng.next_uniform();

      const Projection pl = project(box.center(), spec.rig.p_left);
      const Projection pr = project(box.center(), spec.rig.p_right);
      if (in_image(pl, spec.image_width, spec.image_height, 8.0) &&
          in_image(pr, spec.image_width, spec.image_height, 8.0)) {
        placed = true;
        break;
      }
    }
    if (!placed) {
      throw std::runtime_error("scene generation failed: no valid placement after " +
                               std::to_string(spec.max_retries) + " retries");
    }
    scene.boxes.push_back(box);
  }

  for (const Box3D& box : scene.boxes) {
    const PartSet parts = parts_of(box);
    for (int m = 0; m < kNumParts; ++m) {
      const Projection pl = project(parts.coords[m], spec.rig.p_left);
      if (!pl.behind) {
        splat_blob(scene.left, m, pl.u / spec.feature_stride,
                   pl.v / spec.feature_stride, spec.blob_sigma_cells);
      }
      const Projection pr = project(parts.coords[m], spec.rig.p_right);
      if (!pr.behind) {
        splat_blob(scene.right, m, pr.u / spec.feature_stride,
                   pr.v / spec.feature_stride, spec.blob_sigma_cells);
      }
    }

    const Eigen::Matrix4d h = homography_of(box);
    const double half[3] = {box.l / 2.0, box.h / 2.0, box.w / 2.0};
    for (int axis = 0; axis < 3; ++axis) {
      const int a1 = (axis + 1) % 3;
      const int a2 = (axis + 2) % 3;
      const double area = 4.0 * half[a1] * half[a2];
      const int n_pts = static_cast<int>(std::llround(area * spec.face_density));
      for (int side = -1; side <= 1; side += 2) {
        for (int p = 0; p < n_pts; ++p) {
          const Eigen::Vector3d obj =
              face_point(box, axis, side, rng.next_uniform(), rng.next_uniform());
          const Eigen::Vector3d cam = (h * obj.homogeneous()).head<3>();
          scene.cloud.points.push_back(
              {cam.x(), cam.y(), cam.z(),
               static_cast<float>(rng.next_uniform())});
        }
      }
    }
  }
  return scene;
}

}  // namespace snvc
