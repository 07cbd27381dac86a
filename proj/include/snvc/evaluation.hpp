#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snvc/kitti_io.hpp"

namespace snvc {

/// Ground truth and scored predictions for one image.
struct DetectionFrame {
  std::string frame_id;
  std::vector<LabelRecord> gts;
  std::vector<LabelRecord> preds;
};

enum class Difficulty : int { easy = 0, moderate = 1, hard = 2 };

struct DifficultyThresholds {
  double min_bbox_height;
  int max_occlusion;
  double max_truncation;
};

/// Benchmark-standard difficulty gates; a label can satisfy several levels
/// (the hard set is the largest).
inline constexpr std::array<DifficultyThresholds, 3> kDefaultDifficulty{{
    {40.0, 0, 0.15},
    {25.0, 1, 0.30},
    {25.0, 2, 0.50},
}};

struct EvalConfig {
  std::string category = "Car";
  std::array<DifficultyThresholds, 3> difficulty = kDefaultDifficulty;
  /// Predictions overlapping a DontCare region by at least this 2D IoU are
  /// neither true nor false positives.
  double dontcare_iou2d = 0.5;
};

/// Which difficulty levels a ground-truth label belongs to, from its 2D box
/// height, occlusion level, and truncation.
std::array<bool, 3> assign_difficulty(
    const LabelRecord& gt,
    const std::array<DifficultyThresholds, 3>& thresholds = kDefaultDifficulty);

enum class IouMetric { iou3d, bev };

struct PrPoint {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct PrCurve {
  std::vector<PrPoint> points;
  std::int64_t num_gt = 0;
  /// Interpolated AP over 11 recall points {0, 0.1, .., 1} and 40 points
  /// {1/40, .., 1}; empty when the level has no ground truth at all.
  std::optional<double> ap_r11;
  std::optional<double> ap_r40;
};

/// Greedy per-frame matching (highest score first, each ground truth used at
/// most once, largest IoU wins) followed by interpolated average precision.
/// Predictions whose only match is a DontCare region or an out-of-level
/// ground truth are excluded from the false positives.
PrCurve compute_ap(std::span<const DetectionFrame> frames, IouMetric metric,
                   double iou_threshold, Difficulty level,
                   const EvalConfig& config = {});

struct BinRow {
  double lo = 0.0;
  double hi = 0.0;
  std::int64_t matched = 0;
  double mean_iou = 0.0;
};

enum class BinAttribute { depth, occlusion, truncation };

/// Detection-quality histogram: each ground truth records its best-3D-IoU
/// prediction when that IoU exceeds `match_iou`, and matched ground truths
/// are bucketed by the attribute (depth buckets use the camera-frame z).
std::vector<BinRow> bin_analysis(std::span<const DetectionFrame> frames,
                                 BinAttribute attribute,
                                 std::span<const double> edges,
                                 double match_iou,
                                 const std::string& category = "Car");

/// Axis-aligned image-plane IoU of two label boxes.
double iou_2d_aabb(const LabelRecord& a, const LabelRecord& b);

/// Pair label files by stem between a ground-truth and a prediction
/// directory; a missing prediction file yields an empty prediction set.
std::vector<DetectionFrame> load_frames(const std::string& gt_dir,
                                        const std::string& pred_dir);

}  // namespace snvc
