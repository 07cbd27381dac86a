#include "snvc/registration.hpp"

#include <cmath>

#include "snvc/errors.hpp"

namespace snvc {

SolveResult solve(const RegistrationProblem& problem) {
  const std::size_t n = problem.source.size();
  if (problem.target.size() != n || problem.weights.size() != n) {
    throw DegenerateInputError("registration arrays differ in length");
  }
  double total_weight = 0.0;
  Eigen::Vector2d src_centroid = Eigen::Vector2d::Zero();
  Eigen::Vector2d tgt_centroid = Eigen::Vector2d::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = problem.weights[i];
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DegenerateInputError("registration weights must be finite and >= 0");
    }
    total_weight += w;
    src_centroid += w * problem.source[i];
    tgt_centroid += w * problem.target[i];
  }
  if (total_weight <= 0.0) {
    throw DegenerateInputError("registration total weight must be positive");
  }
  src_centroid /= total_weight;
  tgt_centroid /= total_weight;

  // Cross terms of the centered problem. With the yaw rotation convention
  // R(a) = [[cos, sin], [-sin, cos]], the weighted objective is minimized at
  // angle atan2(skew, trace) of the cross-covariance.
  double trace = 0.0, skew = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = problem.weights[i];
    const Eigen::Vector2d s = problem.source[i] - src_centroid;
    const Eigen::Vector2d t = problem.target[i] - tgt_centroid;
    trace += w * (s.x() * t.x() + s.y() * t.y());
    skew += w * (s.y() * t.x() - s.x() * t.y());
    spread += w * (s.squaredNorm() + t.squaredNorm());
  }

  SolveResult result;
  if (trace * trace + skew * skew <= 1e-30 * std::max(spread * spread, 1e-300)) {
    // All weighted mass is coincident (or source/target spreads are
    // orthogonal in the degenerate sense): no rotation is recoverable.
    result.rank_deficient = true;
    result.pose.rot = Eigen::Matrix2d::Identity();
  } else {
    result.pose = Pose2D::rotation(std::atan2(skew, trace));
  }
  result.pose.trans = tgt_centroid - result.pose.rot * src_centroid;
  return result;
}

RefineResult refine(const Box3D& proposal, const DecodedParts& decoded) {
  RegistrationProblem problem;
  problem.source.reserve(kNumParts);
  problem.target.reserve(kNumParts);
  problem.weights.reserve(kNumParts);
  const PartSet parts = parts_of(proposal);
  double total_weight = 0.0;
  for (int m = 0; m < kNumParts; ++m) {
    problem.source.push_back(parts.xz(m));
    problem.target.push_back(decoded.coords_xz[m]);
    problem.weights.push_back(decoded.weights[m]);
    total_weight += decoded.weights[m];
  }

  RefineResult result;
  if (total_weight <= 0.0) {
    result.box = proposal;
    result.degenerate = true;
    return result;
  }
  const SolveResult solved = solve(problem);
  result.box = apply_pose2d(proposal, solved.pose);
  result.rank_deficient = solved.rank_deficient;
  return result;
}

}  // namespace snvc
