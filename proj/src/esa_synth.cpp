#include "snvc/esa_synth.hpp"

#include <algorithm>

namespace snvc {

Box3D perturb(const Box3D& gt, const NoiseSpec& spec, SeededRng& rng) {
  constexpr double kMinSize = 0.1;
  Box3D out = gt;
  out.x = gt.x + spec.sigma_x * rng.next_gaussian();
  out.y = gt.y + spec.sigma_y * rng.next_gaussian();
  out.z = gt.z + spec.sigma_z * rng.next_gaussian();
  out.h = std::max(kMinSize, gt.h + spec.sigma_h * rng.next_gaussian());
  out.w = std::max(kMinSize, gt.w + spec.sigma_w * rng.next_gaussian());
  out.l = std::max(kMinSize, gt.l + spec.sigma_l * rng.next_gaussian());
  out.theta = normalize_angle(gt.theta + spec.sigma_theta * rng.next_gaussian());
  return out;
}

TrainingPair make_training_pair(const Box3D& gt, const NoiseSpec& noise,
                                const GridSpec& grid_spec, double sigma_cells,
                                SeededRng& rng) {
  TrainingPair pair;
  pair.proposal = perturb(gt, noise, rng);
  const VernierGrid grid = build_grid(pair.proposal, grid_spec);
  pair.target = encode(grid, gt, sigma_cells);
  return pair;
}

}  // namespace snvc
