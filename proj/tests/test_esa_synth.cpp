#include "snvc/esa_synth.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "snvc/registration.hpp"

using namespace snvc;

namespace {

Box3D car_gt() {
  Box3D gt;
  gt.x = 2.0;
  gt.y = 0.9;
  gt.z = 18.0;
  gt.h = 1.5;
  gt.w = 1.6;
  gt.l = 3.9;
  gt.theta = 0.6;
  return gt;
}

}  // namespace

TEST_SUITE_BEGIN("esa_synth");

TEST_CASE("all-zero noise returns the box unchanged") {
  NoiseSpec zero;
  zero.sigma_x = zero.sigma_y = zero.sigma_z = 0.0;
  zero.sigma_h = zero.sigma_w = zero.sigma_l = 0.0;
  zero.sigma_theta = 0.0;
  SeededRng rng(1);
  const Box3D gt = car_gt();
  const Box3D p = perturb(gt, zero, rng);
  CHECK(p.x == gt.x);
  CHECK(p.y == gt.y);
  CHECK(p.z == gt.z);
  CHECK(p.h == gt.h);
  CHECK(p.w == gt.w);
  CHECK(p.l == gt.l);
  CHECK(p.theta == gt.theta);
}

TEST_CASE("default spec leaves y exactly untouched") {
  SeededRng rng(2);
  const NoiseSpec spec;
  const Box3D gt = car_gt();
  for (int i = 0; i < 1000; ++i) {
    CHECK(perturb(gt, spec, rng).y == gt.y);
  }
}

TEST_CASE("empirical noise statistics match the spec") {
  SeededRng rng(3);
  const NoiseSpec spec;
  const Box3D gt = car_gt();
  const int n = 100000;
  std::vector<double> dx, dz, dtheta;
  dx.reserve(n);
  dz.reserve(n);
  dtheta.reserve(n);
  double cross_xz = 0.0, cross_xt = 0.0;
  for (int i = 0; i < n; ++i) {
    const Box3D p = perturb(gt, spec, rng);
    dx.push_back(p.x - gt.x);
    dz.push_back(p.z - gt.z);
    dtheta.push_back(normalize_angle(p.theta - gt.theta));
  }
  auto stddev = [](const std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= v.size();
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return std::sqrt(acc / v.size());
  };
  const double sx = stddev(dx);
  const double sz = stddev(dz);
  const double st = stddev(dtheta);
  CHECK(sx > 0.294);
  CHECK(sx < 0.306);
  CHECK(sz > 0.294);
  CHECK(sz < 0.306);
  CHECK(st == doctest::Approx(spec.sigma_theta).epsilon(0.02));

  for (int i = 0; i < n; ++i) {
    cross_xz += dx[i] * dz[i];
    cross_xt += dx[i] * dtheta[i];
  }
  // Attribute independence: normalized cross-correlations stay small.
  CHECK(std::abs(cross_xz / n / (sx * sz)) < 0.02);
  CHECK(std::abs(cross_xt / n / (sx * st)) < 0.02);
}

TEST_CASE("sizes are clamped away from zero") {
  Box3D tiny = car_gt();
  tiny.h = tiny.w = tiny.l = 0.12;
  NoiseSpec wild;
  wild.sigma_h = wild.sigma_w = wild.sigma_l = 1.0;
  SeededRng rng(4);
  for (int i = 0; i < 2000; ++i) {
    const Box3D p = perturb(tiny, wild, rng);
    CHECK(p.h >= 0.1);
    CHECK(p.w >= 0.1);
    CHECK(p.l >= 0.1);
  }
}

TEST_CASE("same seed reproduces the identical stream and pair") {
  const NoiseSpec spec;
  const GridSpec grid_spec{24, 4, 16, 0.12, 0.4, 0.12};
  const Box3D gt = car_gt();

  SeededRng rng_a(77);
  SeededRng rng_b(77);
  const TrainingPair a = make_training_pair(gt, spec, grid_spec, 4.0, rng_a);
  const TrainingPair b = make_training_pair(gt, spec, grid_spec, 4.0, rng_b);
  CHECK(a.proposal.x == b.proposal.x);
  CHECK(a.proposal.theta == b.proposal.theta);
  CHECK(a.target.values == b.target.values);

  SeededRng rng_c(78);
  const TrainingPair c = make_training_pair(gt, spec, grid_spec, 4.0, rng_c);
  CHECK(a.proposal.x != c.proposal.x);
}

TEST_CASE("zero-noise pair peaks at the projected part cells") {
  NoiseSpec zero;
  zero.sigma_x = zero.sigma_y = zero.sigma_z = 0.0;
  zero.sigma_h = zero.sigma_w = zero.sigma_l = 0.0;
  zero.sigma_theta = 0.0;
  const GridSpec grid_spec;  // default
  const Box3D gt = car_gt();
  SeededRng rng(5);
  const TrainingPair pair = make_training_pair(gt, zero, grid_spec, 4.0, rng);

  // With proposal == gt the part cells are exactly known from the extents.
  const VernierGrid grid = build_grid(pair.proposal, grid_spec);
  const PartSet parts = parts_of(gt);
  const Eigen::Matrix4d inv = grid.homography.inverse();
  for (int m = 0; m < kNumParts; ++m) {
    const Eigen::Vector4d obj = inv * parts.coords[m].homogeneous();
    const Eigen::Vector3d cell = grid.lattice_coords(obj.head<3>());
    const int j = static_cast<int>(std::lround(cell.y()));
    const int k = static_cast<int>(std::lround(cell.z()));
    double best = -1.0;
    int best_j = -1, best_k = -1;
    for (int jj = 0; jj < grid_spec.n_w; ++jj) {
      for (int kk = 0; kk < grid_spec.n_l; ++kk) {
        if (pair.target.at(m, jj, kk) > best) {
          best = pair.target.at(m, jj, kk);
          best_j = jj;
          best_k = kk;
        }
      }
    }
    CHECK(best_j == j);
    CHECK(best_k == k);
  }
}

TEST_CASE("gt center stays inside the RoI for nearly all draws") {
  const NoiseSpec spec;
  const GridSpec grid_spec;  // 5.76 x 3.84 m footprint
  const Box3D gt = car_gt();
  SeededRng rng(6);
  int inside = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const Box3D proposal = perturb(gt, spec, rng);
    const VernierGrid grid = build_grid(proposal, grid_spec);
    const Eigen::Vector4d obj =
        grid.homography.inverse() * gt.center().homogeneous();
    if (std::abs(obj.x()) < grid_spec.extent_l() / 2.0 &&
        std::abs(obj.z()) < grid_spec.extent_w() / 2.0) {
      ++inside;
    }
  }
  CHECK(inside >= 990);
}

TEST_CASE("pair target decoded and registered recovers the ground truth") {
  const NoiseSpec spec;
  GridSpec grid_spec;
  grid_spec.n_l = 96;
  grid_spec.n_w = 64;
  grid_spec.n_h = 4;
  grid_spec.d_l = grid_spec.d_w = 0.06;
  grid_spec.d_h = 0.8;
  const Box3D gt = car_gt();
  SeededRng rng(7);
  int recovered = 0;
  for (int i = 0; i < 40; ++i) {
    const TrainingPair pair = make_training_pair(gt, spec, grid_spec, 4.0, rng);
    const VernierGrid grid = build_grid(pair.proposal, grid_spec);
    const DecodedParts decoded = decode(pair.target, grid, 0.1);
    const RefineResult refined = refine(pair.proposal, decoded);
    const double err = std::hypot(refined.box.x - gt.x, refined.box.z - gt.z);
    const double yaw_err =
        std::abs(normalize_angle(refined.box.theta - gt.theta));
    if (err < 0.05 && yaw_err < 0.01) ++recovered;
  }
  CHECK(recovered >= 38);
}

TEST_SUITE_END();
