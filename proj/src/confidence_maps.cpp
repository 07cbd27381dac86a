#include "snvc/confidence_maps.hpp"

#include <algorithm>
#include <cmath>

#include "snvc/errors.hpp"
#include "snvc/feature_sampling.hpp"

namespace snvc {

namespace {

// Continuous (j, k) lattice coordinates of each part of `gt` in the grid's
// object frame, height dropped.
std::array<Eigen::Vector2d, kNumParts> part_cells(const VernierGrid& grid,
                                                  const Box3D& gt) {
  const Eigen::Matrix4d inv = grid.homography.inverse();
  const PartSet parts = parts_of(gt);
  std::array<Eigen::Vector2d, kNumParts> cells;
  for (int m = 0; m < kNumParts; ++m) {
    const Eigen::Vector4d obj = inv * parts.coords[m].homogeneous();
    const Eigen::Vector3d coords = grid.lattice_coords(obj.head<3>());
    cells[m] = {coords.y(), coords.z()};  // (j, k)
  }
  return cells;
}

}  // namespace

PartConfidenceMaps encode(const VernierGrid& grid, const Box3D& gt,
                          double sigma_cells) {
  const GridSpec& spec = grid.spec;
  PartConfidenceMaps maps;
  maps.n_w = spec.n_w;
  maps.n_l = spec.n_l;
  maps.sigma = sigma_cells;
  maps.values.assign(static_cast<std::size_t>(kNumParts) * spec.n_w * spec.n_l,
                     0.0);

  const std::array<Eigen::Vector2d, kNumParts> cells = part_cells(grid, gt);
  const double inv_sigma2 = 1.0 / (sigma_cells * sigma_cells);
  const std::int64_t cells_per_map = std::int64_t{spec.n_w} * spec.n_l;
  const std::int64_t total = kNumParts * cells_per_map;

#pragma omp parallel for schedule(static)
  for (std::int64_t flat = 0; flat < total; ++flat) {
    const int m = static_cast<int>(flat / cells_per_map);
    const int j = static_cast<int>((flat / spec.n_l) % spec.n_w);
    const int k = static_cast<int>(flat % spec.n_l);
    const double dj = j - cells[m].x();
    const double dk = k - cells[m].y();
    maps.values[flat] = std::exp(-(dj * dj + dk * dk) * inv_sigma2);
  }
  return maps;
}

DecodedParts decode(const PartConfidenceMaps& maps, const VernierGrid& grid,
                    double temperature) {
  if (temperature <= 0.0) {
    throw DegenerateInputError("decode temperature must be positive");
  }
  const GridSpec& spec = grid.spec;
  DecodedParts out;

  const double inv_temp = 1.0 / temperature;
  for (int m = 0; m < kNumParts; ++m) {
    double mass = 0.0, ej = 0.0, ek = 0.0, peak = 0.0;
    for (int j = 0; j < maps.n_w; ++j) {
      for (int k = 0; k < maps.n_l; ++k) {
        const double c = maps.at(m, j, k);
        peak = std::max(peak, c);
        const double w = std::exp(c * inv_temp) * c;
        mass += w;
        ej += w * j;
        ek += w * k;
      }
    }
    double j_hat, k_hat;
    if (mass <= 0.0) {
      // Empty map: fall back to the lattice center, zero confidence.
      j_hat = (maps.n_w - 1) / 2.0;
      k_hat = (maps.n_l - 1) / 2.0;
      out.degenerate[m] = true;
      out.weights[m] = 0.0;
    } else {
      j_hat = ej / mass;
      k_hat = ek / mass;
      out.weights[m] = peak;
    }
    // Lattice indices back to the object frame, then to camera x-z.
    const double x_obj = -spec.extent_l() / 2.0 + k_hat * spec.d_l;
    const double z_obj = +spec.extent_w() / 2.0 - j_hat * spec.d_w;
    const double c = std::cos(grid.roi_pose.theta);
    const double s = std::sin(grid.roi_pose.theta);
    out.coords_xz[m] = {c * x_obj + s * z_obj + grid.roi_pose.x,
                        -s * x_obj + c * z_obj + grid.roi_pose.z};
  }
  return out;
}

double conf_loss(const PartConfidenceMaps& pred, const PartConfidenceMaps& gt) {
  if (pred.n_w != gt.n_w || pred.n_l != gt.n_l ||
      pred.values.size() != gt.values.size()) {
    throw DegenerateInputError("confidence map shapes differ");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double d = pred.values[i] - gt.values[i];
    acc += d * d;
  }
  return acc / static_cast<double>(pred.values.size());
}

double coord_loss(std::span<const Eigen::Vector2d> pred,
                  std::span<const Eigen::Vector2d> gt) {
  if (pred.size() != gt.size()) {
    throw DegenerateInputError("coordinate sets differ in size");
  }
  constexpr double kBeta = 1.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    for (int a = 0; a < 2; ++a) {
      const double d = std::abs(pred[i][a] - gt[i][a]);
      acc += d < kBeta ? 0.5 * d * d / kBeta : d - 0.5 * kBeta;
    }
  }
  return acc / (2.0 * static_cast<double>(pred.size()));
}

double focal_fg_loss(std::span<const float> pred_prob,
                     const OccupancyLabels& labels, double gamma,
                     double alpha) {
  if (pred_prob.size() != labels.labels.size()) {
    throw DegenerateInputError("probability count does not match label count");
  }
  constexpr double kEps = 1e-7;
  double acc = 0.0;
  std::int64_t n_fg = 0;
  for (std::size_t i = 0; i < pred_prob.size(); ++i) {
    const Occupancy label = labels.labels[i];
    if (label == Occupancy::ignore) continue;
    const double p = std::clamp(static_cast<double>(pred_prob[i]), kEps,
                                1.0 - kEps);
    if (label == Occupancy::foreground) {
      acc += -alpha * std::pow(1.0 - p, gamma) * std::log(p);
      ++n_fg;
    } else {
      acc += -(1.0 - alpha) * std::pow(p, gamma) * std::log(1.0 - p);
    }
  }
  return acc / static_cast<double>(std::max<std::int64_t>(n_fg, 1));
}

double total_loss(Variant variant, double conf, double coord, double fg) {
  return variant == Variant::image_warp ? conf + coord + fg : conf + coord;
}

void write_confidence_maps(const std::string& path,
                           const PartConfidenceMaps& maps) {
  FeatureMap container;
  container.height = maps.n_w;
  container.width = maps.n_l;
  container.channels = kNumParts;
  container.stride = maps.sigma;
  container.data.resize(maps.values.size());
  // Transpose to channel-fastest container order.
  for (int m = 0; m < kNumParts; ++m) {
    for (int j = 0; j < maps.n_w; ++j) {
      for (int k = 0; k < maps.n_l; ++k) {
        container.at(j, k, m) = static_cast<float>(maps.at(m, j, k));
      }
    }
  }
  write_feature_map(path, container);
}

PartConfidenceMaps read_confidence_maps(const std::string& path) {
  const FeatureMap container = read_feature_map(path);
  if (container.channels != kNumParts) {
    throw FormatError("confidence container must have " +
                      std::to_string(kNumParts) + " channels, got " +
                      std::to_string(container.channels) + ": " + path);
  }
  PartConfidenceMaps maps;
  maps.n_w = container.height;
  maps.n_l = container.width;
  maps.sigma = container.stride;
  maps.values.resize(container.data.size());
  for (int m = 0; m < kNumParts; ++m) {
    for (int j = 0; j < maps.n_w; ++j) {
      for (int k = 0; k < maps.n_l; ++k) {
        maps.at(m, j, k) = container.at(j, k, m);
      }
    }
  }
  return maps;
}

}  // namespace snvc
