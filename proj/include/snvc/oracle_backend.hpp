#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "snvc/box_geom.hpp"
#include "snvc/confidence_maps.hpp"
#include "snvc/feature_sampling.hpp"
#include "snvc/kitti_io.hpp"
#include "snvc/rng.hpp"
#include "snvc/voxel_grid.hpp"

namespace snvc {

/// Imperfection model for the map oracle: additive Gaussian noise on every
/// cell and a per-part chance of suppressing the peak entirely (simulated
/// occlusion).
struct OracleNoise {
  double map_noise_std = 0.0;
  double dropout_parts = 0.0;
};

/// Ground-truth confidence maps plus optional corruption, standing in for a
/// trained prediction head. Zero noise reproduces encode() bit for bit.
PartConfidenceMaps oracle_predict(const VernierGrid& grid, const Box3D& gt,
                                  double sigma_cells, const OracleNoise& noise,
                                  SeededRng& rng);

/// Synthetic stereo scene parameters. Boxes are drawn in front of both
/// cameras within the depth range and the image frustum; sizes are Gaussian
/// around `size_mean` (h, w, l).
struct SceneSpec {
  int n_boxes = 4;
  std::array<double, 2> depth_range{10.0, 40.0};
  std::array<double, 3> size_mean{1.53, 1.63, 3.88};
  std::array<double, 3> size_std{0.08, 0.07, 0.25};
  std::array<double, 2> yaw_range{-std::numbers::pi, std::numbers::pi};
  CameraRig rig;  // defaults to make_default_rig()
  int image_width = 1242;
  int image_height = 375;
  /// Lateral placement span as a fraction of the view half-width at each
  /// depth; keep small when every part must be visible in both views.
  double lateral_frac = 0.7;
  double feature_stride = 4.0;
  int max_retries = 100;
  double blob_sigma_cells = 3.0;
  double face_density = 200.0;  // cloud points per square meter of box face

  SceneSpec();
};

struct Scene {
  std::vector<Box3D> boxes;
  FeatureMap left;
  FeatureMap right;
  PointCloud cloud;  // camera frame
};

/// Render a scene: per-box Gaussian blobs at each part's stereo projections
/// (one feature channel per part, so kNumParts channels per view) and a
/// point cloud sampled uniformly over the six faces of every box.
Scene render_scene(const SceneSpec& spec, SeededRng& rng);

/// A rectified stereo rig with vehicle-dataset-like intrinsics: focal 720,
/// principal point at the image center, 0.54 m baseline.
CameraRig make_default_rig(int image_width = 1242, int image_height = 375);

}  // namespace snvc
