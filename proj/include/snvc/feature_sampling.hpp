#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "snvc/kitti_io.hpp"
#include "snvc/voxel_grid.hpp"

namespace snvc {

/// Dense 2D feature lattice. `stride` is the number of image pixels per
/// feature cell, so pixel (u, v) lands at lattice coordinates (u, v)/stride.
/// Storage is row-major with channels fastest: ((y*width)+x)*channels + c.
struct FeatureMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  double stride = 4.0;
  std::vector<float> data;

  std::size_t index(int y, int x) const {
    return (static_cast<std::size_t>(y) * width + x) * channels;
  }
  float at(int y, int x, int c) const { return data[index(y, x) + c]; }
  float& at(int y, int x, int c) { return data[index(y, x) + c]; }

  static FeatureMap zeros(int height, int width, int channels,
                          double stride = 4.0);
};

/// Dense 3D feature lattice over an axis-aligned camera-frame region.
/// Lattice point (ix, iy, iz) sits at origin + (ix, iy, iz)*cell_size.
/// Storage: (((ix*ny)+iy)*nz+iz)*channels + c.
struct FeatureVolume {
  std::array<int, 3> extents{0, 0, 0};
  Eigen::Vector3d origin = Eigen::Vector3d::Zero();
  double cell_size = 0.2;
  int channels = 0;
  std::vector<float> data;

  std::size_t index(int ix, int iy, int iz) const {
    return ((static_cast<std::size_t>(ix) * extents[1] + iy) * extents[2] +
            iz) *
           channels;
  }
  float at(int ix, int iy, int iz, int c) const {
    return data[index(ix, iy, iz) + c];
  }
  float& at(int ix, int iy, int iz, int c) {
    return data[index(ix, iy, iz) + c];
  }
};

/// Per-candidate feature vectors for one grid. Invalid candidates (no view
/// of the scene) carry zero vectors.
struct ColoredGrid {
  const VernierGrid* grid = nullptr;  // non-owning
  int channels = 0;
  std::vector<float> features;        // candidate_count * channels
  std::vector<std::uint8_t> valid;    // 1 per candidate

  const float* feature(std::size_t candidate) const {
    return features.data() + candidate * channels;
  }
};

/// Pinhole projection through a 3x4 matrix. `behind` is set when the
/// homogeneous depth is at or below epsilon (1e-6 m) and (u, v) are then
/// unusable.
struct Projection {
  double u = 0.0;
  double v = 0.0;
  bool behind = false;
};

Projection project(const Eigen::Vector3d& point_cam,
                   const Eigen::Matrix<double, 3, 4>& proj);

/// Bilinear sample at pixel coordinates (u, v). Writes `map.channels`
/// values to `out`. Returns false (and zero-fills) when (u, v)/stride falls
/// outside the lattice hull [0, width-1] x [0, height-1].
bool bilinear_sample(const FeatureMap& map, double u, double v, float* out);

/// Trilinear sample of a volume at a camera-frame point. Returns false (and
/// zero-fills) outside the lattice hull.
bool trilinear_sample(const FeatureVolume& volume, const Eigen::Vector3d& p,
                      float* out);

/// Stereo aggregation: each candidate projects into both views and
/// concatenates the left sample followed by the right sample (2*C channels).
/// A candidate is invalid only when neither view yields an in-bounds,
/// in-front sample.
ColoredGrid aggregate_stereo(const VernierGrid& grid, const FeatureMap& left,
                             const FeatureMap& right, const CameraRig& rig);

/// Volume aggregation: trilinear sampling of a precomputed global volume at
/// each candidate (C channels).
ColoredGrid aggregate_volume(const VernierGrid& grid,
                             const FeatureVolume& volume);

// Flat binary container, little-endian.
//   feature map:    int32 height, width, channels; float32 stride;
//                   float32 data[height*width*channels]
//   feature volume: int32 nx, ny, nz, channels; float32 origin[3], cell_size;
//                   float32 data[nx*ny*nz*channels]
void write_feature_map(const std::string& path, const FeatureMap& map);
FeatureMap read_feature_map(const std::string& path);
void write_feature_volume(const std::string& path, const FeatureVolume& volume);
FeatureVolume read_feature_volume(const std::string& path);

}  // namespace snvc
