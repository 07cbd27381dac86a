#include "snvc/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

#include "snvc/box_geom.hpp"
#include "snvc/errors.hpp"
#include "snvc/io_util.hpp"

namespace snvc {

std::array<bool, 3> assign_difficulty(
    const LabelRecord& gt,
    const std::array<DifficultyThresholds, 3>& thresholds) {
  std::array<bool, 3> levels{};
  for (int d = 0; d < 3; ++d) {
    const DifficultyThresholds& t = thresholds[d];
    levels[d] = gt.bbox_height() >= t.min_bbox_height &&
                gt.occlusion <= t.max_occlusion &&
                gt.truncation <= t.max_truncation;
  }
  return levels;
}

double iou_2d_aabb(const LabelRecord& a, const LabelRecord& b) {
  const double iw = std::min(a.bbox_right, b.bbox_right) -
                    std::max(a.bbox_left, b.bbox_left);
  const double ih = std::min(a.bbox_bottom, b.bbox_bottom) -
                    std::max(a.bbox_top, b.bbox_top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a.bbox_right - a.bbox_left) * (a.bbox_bottom - a.bbox_top);
  const double area_b = (b.bbox_right - b.bbox_left) * (b.bbox_bottom - b.bbox_top);
  const double uni = area_a + area_b - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

namespace {

double box_iou(const LabelRecord& a, const LabelRecord& b, IouMetric metric) {
  const Box3D ba = box_from_label(a);
  const Box3D bb = box_from_label(b);
  return metric == IouMetric::iou3d ? iou_3d(ba, bb) : bev_iou(ba, bb);
}

struct MatchOutcome {
  double score = 0.0;
  bool tp = false;
};

// Greedy matching of one frame; appends (score, tp/fp) outcomes for
// predictions that count, and returns the number of level ground truths.
std::int64_t match_frame(const DetectionFrame& frame, IouMetric metric,
                         double iou_threshold, Difficulty level,
                         const EvalConfig& config,
                         std::vector<MatchOutcome>& outcomes) {
  const int level_idx = static_cast<int>(level);
  std::vector<const LabelRecord*> active, ignored, dontcare;
  for (const LabelRecord& gt : frame.gts) {
    if (gt.category == "DontCare") {
      dontcare.push_back(&gt);
    } else if (gt.category == config.category) {
      if (assign_difficulty(gt, config.difficulty)[level_idx]) {
        active.push_back(&gt);
      } else {
        ignored.push_back(&gt);
      }
    }
  }

  std::vector<int> order;
  for (int p = 0; p < static_cast<int>(frame.preds.size()); ++p) {
    if (frame.preds[p].category != config.category) continue;
    if (!frame.preds[p].score.has_value()) {
      throw FormatError("prediction without score in frame " + frame.frame_id);
    }
    order.push_back(p);
  }
  std::sort(order.begin(), order.end(), [&frame](int a, int b) {
    const double sa = *frame.preds[a].score;
    const double sb = *frame.preds[b].score;
    if (sa != sb) return sa > sb;
    return a < b;
  });

  std::vector<bool> gt_matched(active.size(), false);
  for (int p : order) {
    const LabelRecord& pred = frame.preds[p];
    int best = -1;
    double best_iou = 0.0;
    for (std::size_t g = 0; g < active.size(); ++g) {
      if (gt_matched[g]) continue;
      const double iou = box_iou(pred, *active[g], metric);
      if (iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0 && best_iou > iou_threshold) {
      gt_matched[best] = true;
      outcomes.push_back({*pred.score, true});
      continue;
    }
    // Not a true positive: suppress if it only explains an out-of-level
    // ground truth or a DontCare region.
    bool suppressed = false;
    for (const LabelRecord* gt : ignored) {
      if (box_iou(pred, *gt, metric) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) {
      for (const LabelRecord* dc : dontcare) {
        if (iou_2d_aabb(pred, *dc) >= config.dontcare_iou2d) {
          suppressed = true;
          break;
        }
      }
    }
    if (!suppressed) outcomes.push_back({*pred.score, false});
  }
  return static_cast<std::int64_t>(active.size());
}

double interpolated_ap(const std::vector<PrPoint>& points,
                       std::span<const double> recall_samples) {
  double acc = 0.0;
  for (double r : recall_samples) {
    double best = 0.0;
    for (const PrPoint& pt : points) {
      if (pt.recall >= r) best = std::max(best, pt.precision);
    }
    acc += best;
  }
  return acc / static_cast<double>(recall_samples.size());
}

}  // namespace

PrCurve compute_ap(std::span<const DetectionFrame> frames, IouMetric metric,
                   double iou_threshold, Difficulty level,
                   const EvalConfig& config) {
  if (iou_threshold <= 0.0 || iou_threshold >= 1.0) {
    throw DegenerateInputError("iou threshold must lie in (0, 1)");
  }
  std::vector<MatchOutcome> outcomes;
  std::int64_t num_gt = 0;
  for (const DetectionFrame& frame : frames) {
    num_gt += match_frame(frame, metric, iou_threshold, level, config, outcomes);
  }

  PrCurve curve;
  curve.num_gt = num_gt;
  if (num_gt == 0) return curve;  // AP undefined

  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const MatchOutcome& a, const MatchOutcome& b) {
                     return a.score > b.score;
                   });
  std::int64_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].tp) {
      ++tp;
    } else {
      ++fp;
    }
    // Emit one operating point per distinct score threshold.
    if (i + 1 < outcomes.size() && outcomes[i + 1].score == outcomes[i].score) {
      continue;
    }
    PrPoint pt;
    pt.score = outcomes[i].score;
    pt.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    pt.recall = static_cast<double>(tp) / static_cast<double>(num_gt);
    curve.points.push_back(pt);
  }

  std::vector<double> r11(11), r40(40);
  for (int i = 0; i <= 10; ++i) r11[i] = i / 10.0;
  for (int i = 1; i <= 40; ++i) r40[i - 1] = i / 40.0;
  curve.ap_r11 = interpolated_ap(curve.points, r11);
  curve.ap_r40 = interpolated_ap(curve.points, r40);
  return curve;
}

std::vector<BinRow> bin_analysis(std::span<const DetectionFrame> frames,
                                 BinAttribute attribute,
                                 std::span<const double> edges,
                                 double match_iou, const std::string& category) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end())) {
    throw DegenerateInputError("bin edges must be monotone with >= 2 entries");
  }
  std::vector<BinRow> rows(edges.size() - 1);
  std::vector<double> iou_sum(rows.size(), 0.0);
  for (std::size_t b = 0; b < rows.size(); ++b) {
    rows[b].lo = edges[b];
    rows[b].hi = edges[b + 1];
  }

  for (const DetectionFrame& frame : frames) {
    for (const LabelRecord& gt : frame.gts) {
      if (gt.category != category) continue;
      double best = 0.0;
      for (const LabelRecord& pred : frame.preds) {
        if (pred.category != category) continue;
        best = std::max(best, box_iou(pred, gt, IouMetric::iou3d));
      }
      if (best <= match_iou) continue;
      const double value = attribute == BinAttribute::depth ? gt.loc_z
                           : attribute == BinAttribute::occlusion
                               ? static_cast<double>(gt.occlusion)
                               : gt.truncation;
      for (std::size_t b = 0; b < rows.size(); ++b) {
        if (value >= rows[b].lo && value < rows[b].hi) {
          rows[b].matched += 1;
          iou_sum[b] += best;
          break;
        }
      }
    }
  }
  for (std::size_t b = 0; b < rows.size(); ++b) {
    rows[b].mean_iou = rows[b].matched > 0 ? iou_sum[b] / rows[b].matched : 0.0;
  }
  return rows;
}

std::vector<DetectionFrame> load_frames(const std::string& gt_dir,
                                        const std::string& pred_dir) {
  namespace fs = std::filesystem;
  std::vector<std::string> stems;
  for (const fs::directory_entry& entry : fs::directory_iterator(gt_dir)) {
    if (entry.path().extension() == ".txt") {
      stems.push_back(entry.path().stem().string());
    }
  }
  std::sort(stems.begin(), stems.end());

  std::vector<DetectionFrame> frames;
  frames.reserve(stems.size());
  for (const std::string& stem : stems) {
    DetectionFrame frame;
    frame.frame_id = stem;
    frame.gts = parse_labels(read_text_file(gt_dir + "/" + stem + ".txt"));
    const fs::path pred_path = fs::path(pred_dir) / (stem + ".txt");
    if (fs::exists(pred_path)) {
      frame.preds = parse_labels(read_text_file(pred_path.string()));
    }
    frames.push_back(std::move(frame));
  }
  return frames;
}

}  // namespace snvc
