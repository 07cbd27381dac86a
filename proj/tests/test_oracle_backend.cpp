#include "snvc/oracle_backend.hpp"

#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "snvc/registration.hpp"

using namespace snvc;

TEST_SUITE_BEGIN("oracle_backend");

namespace {

GridSpec test_grid_spec() {
  GridSpec spec;
  spec.n_l = 96;
  spec.n_h = 8;
  spec.n_w = 64;
  spec.d_l = spec.d_w = 0.06;
  spec.d_h = 0.4;
  return spec;
}

}  // namespace

TEST_CASE("zero noise reproduces encode bit for bit") {
  const GridSpec spec = test_grid_spec();
  Box3D gt;
  gt.z = 15.0;
  gt.h = 1.5;
  gt.w = 1.6;
  gt.l = 3.9;
  Box3D proposal = gt;
  proposal.x += 0.2;
  const VernierGrid grid = build_grid(proposal, spec);

  SeededRng rng(1);
  const PartConfidenceMaps oracle =
      oracle_predict(grid, gt, 4.0, OracleNoise{}, rng);
  const PartConfidenceMaps direct = encode(grid, gt, 4.0);
  CHECK(oracle.values == direct.values);
  CHECK(rng.counter() == 0);  // no draws consumed
}

TEST_CASE("full dropout suppresses every map") {
  const GridSpec spec = test_grid_spec();
  Box3D gt;
  gt.z = 15.0;
  const VernierGrid grid = build_grid(gt, spec);
  SeededRng rng(2);
  const PartConfidenceMaps maps =
      oracle_predict(grid, gt, 4.0, OracleNoise{0.0, 1.0}, rng);
  for (double v : maps.values) CHECK(v == 0.0);
}

TEST_CASE("map noise stays clamped and keeps decode close") {
  const GridSpec spec = test_grid_spec();
  Box3D gt;
  gt.z = 15.0;
  gt.h = 1.2;
  gt.w = 1.2;
  gt.l = 2.0;
  const VernierGrid grid = build_grid(gt, spec);
  SeededRng rng(3);

  std::vector<double> errors;
  std::size_t out_of_range = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const PartConfidenceMaps maps =
        oracle_predict(grid, gt, 4.0, OracleNoise{0.05, 0.0}, rng);
    for (double v : maps.values) {
      if (v < 0.0 || v > 1.0) ++out_of_range;
    }
    const DecodedParts decoded = decode(maps, grid, 0.1);
    const PartSet parts = parts_of(gt);
    errors.push_back((decoded.coords_xz[0] - parts.xz(0)).norm());
  }
  CHECK(out_of_range == 0);
  std::sort(errors.begin(), errors.end());
  const double median = errors[errors.size() / 2];
  CHECK(median < spec.d_l);  // under one cell
}

TEST_CASE("render_scene basics: empty, determinism, epipolar blobs") {
  SceneSpec spec;
  spec.n_boxes = 0;
  SeededRng rng(4);
  const Scene empty = render_scene(spec, rng);
  CHECK(empty.boxes.empty());
  CHECK(empty.cloud.size() == 0);

  spec.n_boxes = 3;
  SeededRng rng_a(5);
  SeededRng rng_b(5);
  const Scene a = render_scene(spec, rng_a);
  const Scene b = render_scene(spec, rng_b);
  REQUIRE(a.boxes.size() == 3);
  CHECK(a.left.data == b.left.data);
  CHECK(a.right.data == b.right.data);
  REQUIRE(a.cloud.size() == b.cloud.size());
  for (std::size_t i = 0; i < a.cloud.size(); ++i) {
    CHECK(a.cloud.points[i].x == b.cloud.points[i].x);
  }

  // Stereo projections of every part share the v coordinate.
  for (const Box3D& box : a.boxes) {
    for (const Eigen::Vector3d& part : parts_of(box).coords) {
      const Projection pl = project(part, spec.rig.p_left);
      const Projection pr = project(part, spec.rig.p_right);
      CHECK(std::abs(pl.v - pr.v) < 1e-6);
    }
  }
}

TEST_CASE("scene feature argmax lands near the matching part") {
  // Constructed so the stereo response resolves position at cell scale:
  // cells are image-isotropic (~3 px at z = 9 on all axes) and a wide
  // baseline makes the per-cell disparity shift comparable to the blob
  // width, so depth aliasing along the viewing ray decays fast.
  SceneSpec spec;
  spec.n_boxes = 1;
  spec.depth_range = {9.0, 9.0};
  spec.yaw_range = {0.5, 0.5};
  spec.lateral_frac = 0.15;  // all parts visible in both views
  spec.feature_stride = 1.0;
  spec.blob_sigma_cells = 4.0;
  spec.rig.p_right(0, 3) = -720.0 * 4.0;  // 4 m baseline
  SeededRng rng(8);
  const Scene scene = render_scene(spec, rng);
  REQUIRE(scene.boxes.size() == 1);
  const Box3D gt = scene.boxes[0];

  GridSpec grid_spec;
  grid_spec.n_l = 100;
  grid_spec.n_w = 56;
  grid_spec.n_h = 46;
  grid_spec.d_l = grid_spec.d_w = grid_spec.d_h = 0.04;
  const VernierGrid grid = build_grid(gt, grid_spec);
  const ColoredGrid colored =
      aggregate_stereo(grid, scene.left, scene.right, spec.rig);

  const PartSet parts = parts_of(gt);
  const Eigen::Matrix4d inv = grid.homography.inverse();
  for (int m = 0; m < kNumParts; ++m) {
    // Stereo response for part channel m: left + right.
    std::size_t best = 0;
    float best_val = -1.0f;
    for (std::size_t idx = 0; idx < grid.candidates.size(); ++idx) {
      const float val =
          colored.feature(idx)[m] + colored.feature(idx)[kNumParts + m];
      if (val > best_val) {
        best_val = val;
        best = idx;
      }
    }
    // Compare in lattice units per axis (the cells are anisotropic).
    const Eigen::Vector4d obj = inv * parts.coords[m].homogeneous();
    const Eigen::Vector3d true_cell = grid.lattice_coords(obj.head<3>());
    const int bi = static_cast<int>(best / (grid_spec.n_w * grid_spec.n_l));
    const int bj = static_cast<int>((best / grid_spec.n_l) % grid_spec.n_w);
    const int bk = static_cast<int>(best % grid_spec.n_l);
    CHECK(std::abs(bi - true_cell.x()) <= 2.0);
    CHECK(std::abs(bj - true_cell.y()) <= 2.0);
    CHECK(std::abs(bk - true_cell.z()) <= 2.0);
  }
}

TEST_CASE("scene cloud marks only face-adjacent cells foreground") {
  SceneSpec spec;
  spec.n_boxes = 1;
  spec.depth_range = {18.0, 18.0};
  SeededRng rng(9);
  const Scene scene = render_scene(spec, rng);
  const Box3D gt = scene.boxes[0];

  const GridSpec grid_spec = test_grid_spec();
  const VernierGrid grid = build_grid(gt, grid_spec);
  const OccupancyLabels labels = label_occupancy(grid, scene.cloud, gt);
  CHECK(labels.count(Occupancy::foreground) > 0);

  // Every foreground candidate must be near the box surface. Points quantize
  // by floor to their cell corner, so a candidate sits at most one full cell
  // diagonal from the face point that marked it.
  const Eigen::Matrix4d inv = homography_of(gt).inverse();
  const double slack =
      std::hypot(grid_spec.d_l, grid_spec.d_h, grid_spec.d_w) + 1e-9;
  for (int i = 0; i < grid_spec.n_h; ++i) {
    for (int j = 0; j < grid_spec.n_w; ++j) {
      for (int k = 0; k < grid_spec.n_l; ++k) {
        if (labels.at(i, j, k) != Occupancy::foreground) continue;
        const Eigen::Vector4d obj =
            inv * grid.at(i, j, k).homogeneous();
        const double dist_to_face =
            std::min({std::abs(std::abs(obj.x()) - gt.l / 2),
                      std::abs(std::abs(obj.y()) - gt.h / 2),
                      std::abs(std::abs(obj.z()) - gt.w / 2)});
        CHECK(dist_to_face <= slack);
      }
    }
  }
}

TEST_CASE("oracle + decode + refine is the identity on exact maps") {
  const GridSpec spec = test_grid_spec();
  SeededRng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Box3D gt;
    gt.x = 2.0 * rng.next_gaussian();
    gt.y = 1.0;
    gt.z = 18.0 + 2.0 * rng.next_gaussian();
    gt.h = 1.5;
    gt.w = 1.6;
    gt.l = 3.9;
    gt.theta = 2.0 * rng.next_uniform() - 1.0;
    Box3D proposal = gt;
    proposal.x += 0.2 * rng.next_gaussian();
    proposal.z += 0.2 * rng.next_gaussian();
    proposal.theta = normalize_angle(proposal.theta + 0.05 * rng.next_gaussian());

    const VernierGrid grid = build_grid(proposal, spec);
    SeededRng oracle_rng(100 + trial);
    const PartConfidenceMaps maps =
        oracle_predict(grid, gt, 4.0, OracleNoise{}, oracle_rng);
    const DecodedParts decoded = decode(maps, grid, 0.1);
    const RefineResult refined = refine(proposal, decoded);
    CHECK(std::hypot(refined.box.x - gt.x, refined.box.z - gt.z) < 0.02);
    CHECK(std::abs(normalize_angle(refined.box.theta - gt.theta)) < 0.01);
  }
}

TEST_SUITE_END();
