#include "snvc/evaluation.hpp"

#include <cmath>

#include "doctest.h"
#include "snvc/box_geom.hpp"
#include "snvc/rng.hpp"

using namespace snvc;

namespace {

LabelRecord make_gt(double x, double z, double bbox_height = 60.0,
                    int occlusion = 0, double truncation = 0.0) {
  LabelRecord r;
  r.category = "Car";
  r.truncation = truncation;
  r.occlusion = occlusion;
  r.bbox_left = 100.0;
  r.bbox_top = 100.0;
  r.bbox_right = 180.0;
  r.bbox_bottom = 100.0 + bbox_height;
  r.dim_h = 1.5;
  r.dim_w = 1.6;
  r.dim_l = 3.9;
  r.loc_x = x;
  r.loc_y = 1.65;
  r.loc_z = z;
  r.rotation_y = 0.2;
  return r;
}

LabelRecord make_pred(const LabelRecord& gt, double score) {
  LabelRecord r = gt;
  r.score = score;
  return r;
}

}  // namespace

TEST_SUITE_BEGIN("evaluation");

TEST_CASE("assign_difficulty follows the benchmark gates") {
  const auto all = assign_difficulty(make_gt(0, 10, 50.0, 0, 0.0));
  CHECK(all[0]);
  CHECK(all[1]);
  CHECK(all[2]);

  const auto mid = assign_difficulty(make_gt(0, 10, 30.0, 1, 0.2));
  CHECK(!mid[0]);
  CHECK(mid[1]);
  CHECK(mid[2]);

  const auto none = assign_difficulty(make_gt(0, 10, 10.0, 0, 0.0));
  CHECK(!none[0]);
  CHECK(!none[1]);
  CHECK(!none[2]);

  // Nesting: any easy label is moderate, any moderate label is hard.
  SeededRng rng(1);
  for (int i = 0; i < 200; ++i) {
    const auto d = assign_difficulty(
        make_gt(0, 10, 60.0 * rng.next_uniform(),
                static_cast<int>(rng.next_u64() % 4), rng.next_uniform()));
    if (d[0]) CHECK(d[1]);
    if (d[1]) CHECK(d[2]);
  }
}

TEST_CASE("perfect predictions give AP 1 at every level") {
  std::vector<DetectionFrame> frames;
  SeededRng rng(2);
  for (int f = 0; f < 4; ++f) {
    DetectionFrame frame;
    frame.frame_id = std::to_string(f);
    for (int g = 0; g < 3; ++g) {
      const LabelRecord gt =
          make_gt(6.0 * g - 6.0, 10.0 + 7.0 * g + f, 60.0, 0, 0.0);
      frame.gts.push_back(gt);
      frame.preds.push_back(make_pred(gt, 1.0));
    }
    frames.push_back(frame);
  }
  for (Difficulty level :
       {Difficulty::easy, Difficulty::moderate, Difficulty::hard}) {
    for (IouMetric metric : {IouMetric::iou3d, IouMetric::bev}) {
      const PrCurve curve = compute_ap(frames, metric, 0.7, level);
      REQUIRE(curve.ap_r11.has_value());
      CHECK(*curve.ap_r11 == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(*curve.ap_r40 == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("no predictions gives AP 0; no ground truth gives undefined AP") {
  DetectionFrame frame;
  frame.frame_id = "0";
  frame.gts.push_back(make_gt(0, 15));
  const std::vector<DetectionFrame> frames{frame};
  const PrCurve curve = compute_ap(frames, IouMetric::iou3d, 0.7, Difficulty::easy);
  REQUIRE(curve.ap_r11.has_value());
  CHECK(*curve.ap_r11 == 0.0);
  CHECK(*curve.ap_r40 == 0.0);

  DetectionFrame empty;
  empty.frame_id = "1";
  empty.preds.push_back(make_pred(make_gt(0, 15), 0.9));
  const PrCurve undef =
      compute_ap(std::vector<DetectionFrame>{empty}, IouMetric::iou3d, 0.7,
                 Difficulty::easy);
  CHECK(!undef.ap_r11.has_value());
  CHECK(!undef.ap_r40.has_value());
  CHECK(undef.num_gt == 0);
}

TEST_CASE("two GTs, one hit: AP@R11 is 6/11") {
  DetectionFrame frame;
  frame.frame_id = "0";
  frame.gts.push_back(make_gt(-5, 12));
  frame.gts.push_back(make_gt(5, 25));
  frame.preds.push_back(make_pred(frame.gts[0], 0.9));
  const std::vector<DetectionFrame> frames{frame};
  const PrCurve curve = compute_ap(frames, IouMetric::iou3d, 0.7, Difficulty::hard);
  REQUIRE(curve.ap_r11.has_value());
  CHECK(*curve.ap_r11 == doctest::Approx(6.0 / 11.0).epsilon(1e-12));
  // R40: recall points 1/40..20/40 are reachable (recall 0.5), each with
  // precision 1 -> 20/40.
  CHECK(*curve.ap_r40 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("false positives depress precision; matching is injective") {
  DetectionFrame frame;
  frame.frame_id = "0";
  frame.gts.push_back(make_gt(0, 12));
  // Two predictions on the same GT: one TP, one FP (GT used once).
  frame.preds.push_back(make_pred(frame.gts[0], 0.9));
  frame.preds.push_back(make_pred(frame.gts[0], 0.8));
  const std::vector<DetectionFrame> frames{frame};
  const PrCurve curve = compute_ap(frames, IouMetric::iou3d, 0.7, Difficulty::hard);
  REQUIRE(curve.points.size() == 2);
  CHECK(curve.points[0].precision == doctest::Approx(1.0));
  CHECK(curve.points[0].recall == doctest::Approx(1.0));
  CHECK(curve.points[1].precision == doctest::Approx(0.5));
  // Max precision at recall 1 is still 1.0, so AP stays 1.
  CHECK(*curve.ap_r11 == doctest::Approx(1.0));
}

TEST_CASE("out-of-level GTs and DontCare suppress false positives") {
  DetectionFrame frame;
  frame.frame_id = "0";
  // A hard-only GT (tiny bbox): out of level for easy.
  frame.gts.push_back(make_gt(0, 12, 26.0, 2, 0.4));
  // An easy GT.
  frame.gts.push_back(make_gt(8, 20, 60.0, 0, 0.0));
  // DontCare region.
  LabelRecord dc;
  dc.category = "DontCare";
  dc.bbox_left = 300;
  dc.bbox_top = 50;
  dc.bbox_right = 400;
  dc.bbox_bottom = 120;
  frame.gts.push_back(dc);

  // Prediction matching the hard-only GT: ignored for easy, not an FP.
  frame.preds.push_back(make_pred(frame.gts[0], 0.95));
  // Prediction matching the easy GT.
  frame.preds.push_back(make_pred(frame.gts[1], 0.90));
  // Prediction overlapping only the DontCare region in 2D: ignored.
  LabelRecord dc_pred = make_gt(30, 60);
  dc_pred.bbox_left = 310;
  dc_pred.bbox_top = 55;
  dc_pred.bbox_right = 395;
  dc_pred.bbox_bottom = 118;
  dc_pred.score = 0.85;
  frame.preds.push_back(dc_pred);

  const std::vector<DetectionFrame> frames{frame};
  const PrCurve easy = compute_ap(frames, IouMetric::iou3d, 0.7, Difficulty::easy);
  CHECK(easy.num_gt == 1);
  REQUIRE(easy.ap_r11.has_value());
  CHECK(*easy.ap_r11 == doctest::Approx(1.0).epsilon(1e-12));

  // At the hard level both real GTs count and both real predictions match.
  const PrCurve hard = compute_ap(frames, IouMetric::iou3d, 0.7, Difficulty::hard);
  CHECK(hard.num_gt == 2);
  CHECK(*hard.ap_r11 == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("raising a matched prediction's score never lowers AP") {
  SeededRng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<DetectionFrame> frames;
    DetectionFrame frame;
    frame.frame_id = "0";
    for (int g = 0; g < 5; ++g) {
      const LabelRecord gt = make_gt(7.0 * g - 14.0, 10.0 + 6.0 * g);
      frame.gts.push_back(gt);
      if (rng.next_uniform() < 0.7) {
        LabelRecord pred = make_pred(gt, 0.2 + 0.6 * rng.next_uniform());
        pred.loc_x += 0.2 * rng.next_gaussian();
        frame.preds.push_back(pred);
      }
      if (rng.next_uniform() < 0.4) {
        LabelRecord fp = make_pred(make_gt(40.0 + 9.0 * g, 60.0 + 3.0 * g),
                                   0.2 + 0.6 * rng.next_uniform());
        frame.preds.push_back(fp);
      }
    }
    if (frame.preds.empty()) continue;
    frames.push_back(frame);

    const PrCurve before =
        compute_ap(frames, IouMetric::iou3d, 0.5, Difficulty::hard);
    // Raise the first matched (high-IoU) prediction's score.
    for (LabelRecord& pred : frames[0].preds) {
      bool matched = false;
      for (const LabelRecord& gt : frames[0].gts) {
        if (iou_3d(box_from_label(pred), box_from_label(gt)) > 0.5) {
          matched = true;
          break;
        }
      }
      if (matched) {
        pred.score = *pred.score + 0.5;
        break;
      }
    }
    const PrCurve after =
        compute_ap(frames, IouMetric::iou3d, 0.5, Difficulty::hard);
    if (before.ap_r11.has_value() && after.ap_r11.has_value()) {
      CHECK(*after.ap_r11 >= *before.ap_r11 - 1e-12);
      CHECK(*after.ap_r40 >= *before.ap_r40 - 1e-12);
    }
  }
}

TEST_CASE("R11 and R40 agree on a constant PR curve") {
  // All predictions correct: precision 1 at every recall.
  DetectionFrame frame;
  frame.frame_id = "0";
  for (int g = 0; g < 4; ++g) {
    const LabelRecord gt = make_gt(6.0 * g - 9.0, 11.0 + 5.0 * g);
    frame.gts.push_back(gt);
    frame.preds.push_back(make_pred(gt, 0.9 - 0.1 * g));
  }
  const PrCurve curve = compute_ap(std::vector<DetectionFrame>{frame},
                                   IouMetric::iou3d, 0.7, Difficulty::hard);
  CHECK(*curve.ap_r11 == doctest::Approx(*curve.ap_r40).epsilon(1e-12));
}

TEST_CASE("bin_analysis buckets and means") {
  DetectionFrame frame;
  frame.frame_id = "0";
  frame.gts.push_back(make_gt(0, 10));
  frame.gts.push_back(make_gt(5, 40));
  frame.preds.push_back(make_pred(frame.gts[0], 0.9));
  frame.preds.push_back(make_pred(frame.gts[1], 0.8));
  const std::vector<DetectionFrame> frames{frame};
  const std::vector<double> edges{0.0, 20.0, 60.0};

  SUBCASE("perfect predictions: each depth bin counts one, mean IoU 1") {
    const auto rows = bin_analysis(frames, BinAttribute::depth, edges, 0.3);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].matched == 1);
    CHECK(rows[0].mean_iou == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(rows[1].matched == 1);
    CHECK(rows[1].mean_iou == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("no predictions: all counts zero") {
    std::vector<DetectionFrame> bare = frames;
    bare[0].preds.clear();
    const auto rows = bin_analysis(bare, BinAttribute::depth, edges, 0.3);
    CHECK(rows[0].matched == 0);
    CHECK(rows[1].matched == 0);
    CHECK(rows[0].mean_iou == 0.0);
  }
  SUBCASE("matches below the gate are dropped") {
    std::vector<DetectionFrame> off = frames;
    off[0].preds[0].loc_x += 3.0;  // IoU ~ 0 vs its GT
    const auto rows = bin_analysis(off, BinAttribute::depth, edges, 0.3);
    CHECK(rows[0].matched == 0);
    CHECK(rows[1].matched == 1);
  }
  SUBCASE("occlusion bins use the annotated level") {
    std::vector<DetectionFrame> occ = frames;
    occ[0].gts[1].occlusion = 2;
    const std::vector<double> occ_edges{0, 1, 2, 3};
    const auto rows =
        bin_analysis(occ, BinAttribute::occlusion, occ_edges, 0.3);
    CHECK(rows[0].matched == 1);
    CHECK(rows[1].matched == 0);
    CHECK(rows[2].matched == 1);
  }
}

TEST_CASE("iou_2d_aabb basics") {
  const LabelRecord a = make_gt(0, 10);  // bbox 100..180 x 100..160
  LabelRecord b = a;
  CHECK(iou_2d_aabb(a, b) == doctest::Approx(1.0));
  b.bbox_left = 140.0;
  b.bbox_right = 220.0;
  // Overlap 40x60 over union 2*80*60 - 40*60.
  CHECK(iou_2d_aabb(a, b) == doctest::Approx(2400.0 / 7200.0).epsilon(1e-12));
  b.bbox_left = 400.0;
  b.bbox_right = 500.0;
  CHECK(iou_2d_aabb(a, b) == 0.0);
}

TEST_SUITE_END();
