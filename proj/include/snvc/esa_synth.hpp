#pragma once

#include <numbers>

#include "snvc/box_geom.hpp"
#include "snvc/confidence_maps.hpp"
#include "snvc/rng.hpp"
#include "snvc/voxel_grid.hpp"

namespace snvc {

/// Per-attribute standard deviations for proposal synthesis. The noise is
/// zero-mean diagonal Gaussian: each attribute is perturbed independently.
struct NoiseSpec {
  double sigma_x = 0.3;
  double sigma_y = 0.0;
  double sigma_z = 0.3;
  double sigma_h = 0.05;
  double sigma_w = 0.05;
  double sigma_l = 0.05;
  double sigma_theta = 5.0 * std::numbers::pi / 180.0;
};

/// Simulate a coarse proposal from a ground-truth box. Sizes are clamped to
/// at least 0.1 m and theta is renormalized. Draws exactly seven gaussians
/// per call, so streams stay aligned across noise specs.
Box3D perturb(const Box3D& gt, const NoiseSpec& spec, SeededRng& rng);

struct TrainingPair {
  Box3D proposal;
  PartConfidenceMaps target;  // ground-truth maps in the proposal's RoI frame
};

/// One refinement training pair: a fresh noisy proposal and the ground-truth
/// confidence maps rendered on the proposal-centered grid.
TrainingPair make_training_pair(const Box3D& gt, const NoiseSpec& noise,
                                const GridSpec& grid_spec, double sigma_cells,
                                SeededRng& rng);

}  // namespace snvc
