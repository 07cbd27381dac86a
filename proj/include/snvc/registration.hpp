#pragma once

#include <Eigen/Dense>
#include <vector>

#include "snvc/box_geom.hpp"
#include "snvc/confidence_maps.hpp"

namespace snvc {

/// Weighted 2D point-set registration: find the rigid motion carrying
/// `source` onto `target` minimizing sum_i w_i * |R s_i + T - t_i|^2.
struct RegistrationProblem {
  std::vector<Eigen::Vector2d> source;
  std::vector<Eigen::Vector2d> target;
  std::vector<double> weights;
};

struct SolveResult {
  Pose2D pose;
  /// Set when the weighted points carry no angular information (all mass at
  /// one location); the pose is then a pure translation.
  bool rank_deficient = false;
};

/// Closed-form global minimizer: both sets are centered at their weighted
/// centroids, and the rotation angle comes from the polar decomposition of
/// the 2x2 weighted cross-covariance (atan2 of its skew and trace parts),
/// which keeps the determinant +1 for any weights. Throws
/// DegenerateInputError when the total weight is not positive.
SolveResult solve(const RegistrationProblem& problem);

struct RefineResult {
  Box3D box;
  /// Set when every part weight is zero; the proposal is returned unchanged.
  bool degenerate = false;
  bool rank_deficient = false;
};

/// Register the proposal's nine ground-plane parts onto the decoded parts
/// (weights = decoded confidences) and apply the recovered motion to the
/// proposal. y, h, w, l pass through.
RefineResult refine(const Box3D& proposal, const DecodedParts& decoded);

}  // namespace snvc
