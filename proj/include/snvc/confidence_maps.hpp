#pragma once

#include <Eigen/Dense>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "snvc/box_geom.hpp"
#include "snvc/voxel_grid.hpp"

namespace snvc {

inline constexpr int kNumParts = 9;

/// Ground-plane confidence heatmaps, one per part, on the (j, k) =
/// (width, length) lattice of a candidate grid. Cell (j, k) of map m holds
/// exp(-((j - j*)^2 + (k - k*)^2) / sigma^2) for the part's continuous
/// lattice position (j*, k*); sigma is measured in cells.
struct PartConfidenceMaps {
  int n_w = 0;
  int n_l = 0;
  double sigma = 4.0;
  std::vector<double> values;  // kNumParts * n_w * n_l, k fastest

  std::size_t index(int m, int j, int k) const {
    return (static_cast<std::size_t>(m) * n_w + j) * n_l + k;
  }
  double at(int m, int j, int k) const { return values[index(m, j, k)]; }
  double& at(int m, int j, int k) { return values[index(m, j, k)]; }
  std::span<const double> map(int m) const {
    return {values.data() + static_cast<std::size_t>(m) * n_w * n_l,
            static_cast<std::size_t>(n_w) * n_l};
  }
};

/// Ground-plane part estimates read off predicted maps: camera-frame (x, z)
/// per part plus a confidence weight. `degenerate` flags parts decoded from
/// an all-zero map; their coordinate is the lattice center and weight 0.
struct DecodedParts {
  std::array<Eigen::Vector2d, kNumParts> coords_xz;
  std::array<double, kNumParts> weights{};
  std::array<bool, kNumParts> degenerate{};
};

/// Render the ground-truth maps for a grid: each part of `gt` is expressed
/// in the grid's object frame, the height axis is dropped, and the Gaussian
/// is written over the whole lattice. Peaks outside the lattice leave a
/// truncated tail; nothing is clamped inward.
PartConfidenceMaps encode(const VernierGrid& grid, const Box3D& gt,
                          double sigma_cells);

/// Soft-argmax decode. Cell weights are exp(value / temperature) * value,
/// so empty cells carry no mass; the expectation over (j, k) converts back
/// to camera-frame x-z through the grid homography. The part weight is the
/// map maximum.
DecodedParts decode(const PartConfidenceMaps& maps, const VernierGrid& grid,
                    double temperature);

/// Mean squared error over all cells and parts.
double conf_loss(const PartConfidenceMaps& pred, const PartConfidenceMaps& gt);

/// Smooth-L1 (quadratic inside |d| < beta, linear outside), averaged over
/// the 2K coordinates. beta = 1.
double coord_loss(std::span<const Eigen::Vector2d> pred,
                  std::span<const Eigen::Vector2d> gt);

/// Focal loss over candidate foreground probabilities with three-way labels:
/// ignore cells contribute zero and the sum is normalized by the foreground
/// count (at least 1). Probabilities are clamped to [eps, 1-eps], eps=1e-7.
double focal_fg_loss(std::span<const float> pred_prob,
                     const OccupancyLabels& labels, double gamma = 2.0,
                     double alpha = 0.25);

/// Feature-aggregation variants: image_warp projects candidates into stereo
/// image features (and trains an auxiliary foreground head), volume_sample
/// reuses a precomputed scene volume.
enum class Variant { image_warp, volume_sample };

/// Training loss: conf + coord, plus the foreground term for the image_warp
/// variant only.
double total_loss(Variant variant, double conf, double coord, double fg);

/// Containers share the feature-map layout with parts as channels
/// (height = n_w, width = n_l, stride carries sigma for round-tripping).
void write_confidence_maps(const std::string& path,
                           const PartConfidenceMaps& maps);
PartConfidenceMaps read_confidence_maps(const std::string& path);

}  // namespace snvc
