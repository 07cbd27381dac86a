#include "snvc/feature_sampling.hpp"

#include <cmath>
#include <cstring>

#include "snvc/errors.hpp"
#include "snvc/io_util.hpp"

namespace snvc {

namespace {
constexpr double kBehindEps = 1e-6;
}

FeatureMap FeatureMap::zeros(int height, int width, int channels,
                             double stride) {
  FeatureMap map;
  map.height = height;
  map.width = width;
  map.channels = channels;
  map.stride = stride;
  map.data.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
  return map;
}

Projection project(const Eigen::Vector3d& point_cam,
                   const Eigen::Matrix<double, 3, 4>& proj) {
  const Eigen::Vector3d uvw = proj * point_cam.homogeneous();
  Projection out;
  if (uvw.z() <= kBehindEps) {
    out.behind = true;
    return out;
  }
  out.u = uvw.x() / uvw.z();
  out.v = uvw.y() / uvw.z();
  return out;
}

bool bilinear_sample(const FeatureMap& map, double u, double v, float* out) {
  std::memset(out, 0, sizeof(float) * map.channels);
  const double fx = u / map.stride;
  const double fy = v / map.stride;
  if (fx < 0.0 || fy < 0.0 || fx > map.width - 1 || fy > map.height - 1) {
    return false;
  }
  int x0 = static_cast<int>(std::floor(fx));
  int y0 = static_cast<int>(std::floor(fy));
  // At the far edge the fraction is 0; step back one cell so x0+1 exists.
  if (x0 == map.width - 1) x0 = map.width - 2;
  if (y0 == map.height - 1) y0 = map.height - 2;
  if (map.width == 1) x0 = 0;
  if (map.height == 1) y0 = 0;
  const double ax = fx - x0;
  const double ay = fy - y0;
  const int x1 = std::min(x0 + 1, map.width - 1);
  const int y1 = std::min(y0 + 1, map.height - 1);
  const double w00 = (1.0 - ax) * (1.0 - ay);
  const double w10 = ax * (1.0 - ay);
  const double w01 = (1.0 - ax) * ay;
  const double w11 = ax * ay;
  for (int c = 0; c < map.channels; ++c) {
    out[c] = static_cast<float>(
        w00 * map.at(y0, x0, c) + w10 * map.at(y0, x1, c) +
        w01 * map.at(y1, x0, c) + w11 * map.at(y1, x1, c));
  }
  return true;
}

bool trilinear_sample(const FeatureVolume& volume, const Eigen::Vector3d& p,
                      float* out) {
  std::memset(out, 0, sizeof(float) * volume.channels);
  const Eigen::Vector3d g = (p - volume.origin) / volume.cell_size;
  for (int a = 0; a < 3; ++a) {
    if (g[a] < 0.0 || g[a] > volume.extents[a] - 1) return false;
  }
  int i0[3];
  double frac[3];
  for (int a = 0; a < 3; ++a) {
    i0[a] = static_cast<int>(std::floor(g[a]));
    if (i0[a] >= volume.extents[a] - 1) i0[a] = volume.extents[a] - 2;
    if (volume.extents[a] == 1) i0[a] = 0;
    frac[a] = g[a] - i0[a];
  }
  for (int dx = 0; dx < 2; ++dx) {
    for (int dy = 0; dy < 2; ++dy) {
      for (int dz = 0; dz < 2; ++dz) {
        const int ix = std::min(i0[0] + dx, volume.extents[0] - 1);
        const int iy = std::min(i0[1] + dy, volume.extents[1] - 1);
        const int iz = std::min(i0[2] + dz, volume.extents[2] - 1);
        const double w = (dx ? frac[0] : 1.0 - frac[0]) *
                         (dy ? frac[1] : 1.0 - frac[1]) *
                         (dz ? frac[2] : 1.0 - frac[2]);
        if (w == 0.0) continue;
        const float* cell = volume.data.data() + volume.index(ix, iy, iz);
        for (int c = 0; c < volume.channels; ++c) {
          out[c] += static_cast<float>(w * cell[c]);
        }
      }
    }
  }
  return true;
}

ColoredGrid aggregate_stereo(const VernierGrid& grid, const FeatureMap& left,
                             const FeatureMap& right, const CameraRig& rig) {
  if (left.channels != right.channels) {
    throw DegenerateInputError("stereo feature maps disagree on channels: " +
                               std::to_string(left.channels) + " vs " +
                               std::to_string(right.channels));
  }
  ColoredGrid out;
  out.grid = &grid;
  out.channels = 2 * left.channels;
  const std::size_t n = grid.candidates.size();
  out.features.assign(n * out.channels, 0.0f);
  out.valid.assign(n, 0);

  const std::int64_t total = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const Eigen::Vector3d& cand = grid.candidates[idx];
    float* feat = out.features.data() + idx * out.channels;
    bool ok_left = false, ok_right = false;
    const Projection pl = project(cand, rig.p_left);
    if (!pl.behind) ok_left = bilinear_sample(left, pl.u, pl.v, feat);
    const Projection pr = project(cand, rig.p_right);
    if (!pr.behind) {
      ok_right = bilinear_sample(right, pr.u, pr.v, feat + left.channels);
    }
    out.valid[idx] = (ok_left || ok_right) ? 1 : 0;
  }
  return out;
}

ColoredGrid aggregate_volume(const VernierGrid& grid,
                             const FeatureVolume& volume) {
  ColoredGrid out;
  out.grid = &grid;
  out.channels = volume.channels;
  const std::size_t n = grid.candidates.size();
  out.features.assign(n * out.channels, 0.0f);
  out.valid.assign(n, 0);

  const std::int64_t total = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static)
  for (std::int64_t idx = 0; idx < total; ++idx) {
    float* feat = out.features.data() + idx * out.channels;
    out.valid[idx] =
        trilinear_sample(volume, grid.candidates[idx], feat) ? 1 : 0;
  }
  return out;
}

namespace {

void append_i32(std::vector<std::byte>& bytes, std::int32_t v) {
  std::byte buf[4];
  std::memcpy(buf, &v, 4);
  bytes.insert(bytes.end(), buf, buf + 4);
}

void append_f32(std::vector<std::byte>& bytes, float v) {
  std::byte buf[4];
  std::memcpy(buf, &v, 4);
  bytes.insert(bytes.end(), buf, buf + 4);
}

struct Reader {
  std::span<const std::byte> bytes;
  std::size_t pos = 0;
  std::string path;

  std::int32_t read_i32() {
    if (pos + 4 > bytes.size()) {
      throw FormatError("truncated container: " + path);
    }
    std::int32_t v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  float read_f32() {
    if (pos + 4 > bytes.size()) {
      throw FormatError("truncated container: " + path);
    }
    float v;
    std::memcpy(&v, bytes.data() + pos, 4);
    pos += 4;
    return v;
  }
  void read_floats(std::vector<float>& out, std::size_t count) {
    if (pos + 4 * count > bytes.size()) {
      throw FormatError("truncated container payload: " + path);
    }
    out.resize(count);
    std::memcpy(out.data(), bytes.data() + pos, 4 * count);
    pos += 4 * count;
  }
};

}  // namespace

void write_feature_map(const std::string& path, const FeatureMap& map) {
  std::vector<std::byte> bytes;
  bytes.reserve(16 + map.data.size() * 4);
  append_i32(bytes, map.height);
  append_i32(bytes, map.width);
  append_i32(bytes, map.channels);
  append_f32(bytes, static_cast<float>(map.stride));
  const std::size_t off = bytes.size();
  bytes.resize(off + map.data.size() * 4);
  std::memcpy(bytes.data() + off, map.data.data(), map.data.size() * 4);
  write_binary_file_atomic(path, bytes);
}

FeatureMap read_feature_map(const std::string& path) {
  const std::vector<std::byte> bytes = read_binary_file(path);
  Reader r{bytes, 0, path};
  FeatureMap map;
  map.height = r.read_i32();
  map.width = r.read_i32();
  map.channels = r.read_i32();
  map.stride = r.read_f32();
  if (map.height < 0 || map.width < 0 || map.channels < 0 || map.stride <= 0) {
    throw FormatError("invalid feature map header: " + path);
  }
  r.read_floats(map.data, static_cast<std::size_t>(map.height) * map.width *
                              map.channels);
  if (r.pos != bytes.size()) {
    throw FormatError("trailing bytes in container: " + path);
  }
  return map;
}

void write_feature_volume(const std::string& path,
                          const FeatureVolume& volume) {
  std::vector<std::byte> bytes;
  bytes.reserve(32 + volume.data.size() * 4);
  for (int a = 0; a < 3; ++a) append_i32(bytes, volume.extents[a]);
  append_i32(bytes, volume.channels);
  for (int a = 0; a < 3; ++a) {
    append_f32(bytes, static_cast<float>(volume.origin[a]));
  }
  append_f32(bytes, static_cast<float>(volume.cell_size));
  const std::size_t off = bytes.size();
  bytes.resize(off + volume.data.size() * 4);
  std::memcpy(bytes.data() + off, volume.data.data(), volume.data.size() * 4);
  write_binary_file_atomic(path, bytes);
}

FeatureVolume read_feature_volume(const std::string& path) {
  const std::vector<std::byte> bytes = read_binary_file(path);
  Reader r{bytes, 0, path};
  FeatureVolume volume;
  for (int a = 0; a < 3; ++a) volume.extents[a] = r.read_i32();
  volume.channels = r.read_i32();
  for (int a = 0; a < 3; ++a) volume.origin[a] = r.read_f32();
  volume.cell_size = r.read_f32();
  if (volume.extents[0] < 0 || volume.extents[1] < 0 || volume.extents[2] < 0 ||
      volume.channels < 0 || volume.cell_size <= 0) {
    throw FormatError("invalid feature volume header: " + path);
  }
  r.read_floats(volume.data, static_cast<std::size_t>(volume.extents[0]) *
                                 volume.extents[1] * volume.extents[2] *
                                 volume.channels);
  if (r.pos != bytes.size()) {
    throw FormatError("trailing bytes in container: " + path);
  }
  return volume;
}

}  // namespace snvc
