#include "snvc/kitti_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "snvc/errors.hpp"

namespace snvc {

Eigen::Matrix4d CameraRig::velo_to_rect() const {
  Eigen::Matrix4d rect = Eigen::Matrix4d::Identity();
  rect.block<3, 3>(0, 0) = r_rect;
  return rect * velo_to_cam;
}

namespace {

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

double parse_double(const std::string& tok, const std::string& where) {
  double value = 0.0;
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    throw FormatError("non-numeric token '" + tok + "' in " + where);
  }
  return value;
}

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

// Parses "KEY: n numbers" lines into the map of raw value rows.
struct CalibLine {
  std::string key;
  std::vector<double> values;
};

std::vector<CalibLine> parse_calib_lines(const std::string& text) {
  std::vector<CalibLine> lines;
  std::istringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string::npos) {
      throw FormatError("calib line " + std::to_string(line_no) +
                        " has no key: '" + line + "'");
    }
    CalibLine cl;
    cl.key = line.substr(0, colon);
    const std::string where = "calib line " + std::to_string(line_no) +
                              " (key " + cl.key + ")";
    for (const std::string& tok : split_ws(line.substr(colon + 1))) {
      cl.values.push_back(parse_double(tok, where));
    }
    lines.push_back(std::move(cl));
  }
  return lines;
}

const CalibLine* find_key(const std::vector<CalibLine>& lines,
                          const std::string& key) {
  for (const CalibLine& cl : lines) {
    if (cl.key == key) return &cl;
  }
  return nullptr;
}

Eigen::Matrix<double, 3, 4> row_major_3x4(const std::vector<double>& v,
                                          const std::string& key) {
  if (v.size() != 12) {
    throw FormatError(key + " expects 12 values, got " +
                      std::to_string(v.size()));
  }
  Eigen::Matrix<double, 3, 4> m;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 4; ++c) m(r, c) = v[r * 4 + c];
  }
  return m;
}

}  // namespace

CameraRig parse_calib(const std::string& text) {
  const std::vector<CalibLine> lines = parse_calib_lines(text);
  const CalibLine* p2 = find_key(lines, "P2");
  const CalibLine* p3 = find_key(lines, "P3");
  if (p2 == nullptr) throw FormatError("missing P2 in calib text");
  if (p3 == nullptr) throw FormatError("missing P3 in calib text");

  CameraRig rig;
  rig.p_left = row_major_3x4(p2->values, "P2");
  rig.p_right = row_major_3x4(p3->values, "P3");

  if (const CalibLine* r0 = find_key(lines, "R0_rect")) {
    if (r0->values.size() != 9) {
      throw FormatError("R0_rect expects 9 values, got " +
                        std::to_string(r0->values.size()));
    }
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) rig.r_rect(r, c) = r0->values[r * 3 + c];
    }
  }
  if (const CalibLine* tr = find_key(lines, "Tr_velo_to_cam")) {
    rig.velo_to_cam.block<3, 4>(0, 0) = row_major_3x4(tr->values, "Tr_velo_to_cam");
  }
  return rig;
}

std::string serialize_calib(const CameraRig& rig) {
  std::string out;
  auto emit_3x4 = [&out](const char* key, const Eigen::Matrix<double, 3, 4>& m) {
    out += key;
    out += ':';
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 4; ++c) {
        out += ' ';
        out += format_double(m(r, c));
      }
    }
    out += '\n';
  };
  emit_3x4("P2", rig.p_left);
  emit_3x4("P3", rig.p_right);
  out += "R0_rect:";
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      out += ' ';
      out += format_double(rig.r_rect(r, c));
    }
  }
  out += '\n';
  emit_3x4("Tr_velo_to_cam",
           Eigen::Matrix<double, 3, 4>(rig.velo_to_cam.block<3, 4>(0, 0)));
  return out;
}

std::vector<LabelRecord> parse_labels(const std::string& text) {
  std::vector<LabelRecord> records;
  std::istringstream ss(text);
  std::string line;
  int line_no = 0;
  while (std::getline(ss, line)) {
    ++line_no;
    const std::vector<std::string> tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok.size() != 15 && tok.size() != 16) {
      throw FormatError("label line " + std::to_string(line_no) + " has " +
                        std::to_string(tok.size()) + " fields, expected 15 or 16");
    }
    const std::string where = "label line " + std::to_string(line_no);
    LabelRecord r;
    r.category = tok[0];
    r.truncation = parse_double(tok[1], where);
    r.occlusion = static_cast<int>(std::lround(parse_double(tok[2], where)));
    r.alpha = parse_double(tok[3], where);
    r.bbox_left = parse_double(tok[4], where);
    r.bbox_top = parse_double(tok[5], where);
    r.bbox_right = parse_double(tok[6], where);
    r.bbox_bottom = parse_double(tok[7], where);
    r.dim_h = parse_double(tok[8], where);
    r.dim_w = parse_double(tok[9], where);
    r.dim_l = parse_double(tok[10], where);
    r.loc_x = parse_double(tok[11], where);
    r.loc_y = parse_double(tok[12], where);
    r.loc_z = parse_double(tok[13], where);
    r.rotation_y = parse_double(tok[14], where);
    if (tok.size() == 16) r.score = parse_double(tok[15], where);
    records.push_back(std::move(r));
  }
  return records;
}

std::string serialize_label(const LabelRecord& r) {
  std::string out = r.category;
  out += ' ' + format_double(r.truncation);
  out += ' ' + std::to_string(r.occlusion);
  for (double v : {r.alpha, r.bbox_left, r.bbox_top, r.bbox_right,
                   r.bbox_bottom, r.dim_h, r.dim_w, r.dim_l, r.loc_x, r.loc_y,
                   r.loc_z, r.rotation_y}) {
    out += ' ' + format_double(v);
  }
  if (r.score.has_value()) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), " %.6f", *r.score);
    out += buf;
  }
  return out;
}

std::string serialize_labels(std::span<const LabelRecord> records) {
  std::string out;
  for (const LabelRecord& r : records) {
    out += serialize_label(r);
    out += '\n';
  }
  return out;
}

PointCloud read_point_cloud(std::span<const std::byte> bytes) {
  if (bytes.size() % 16 != 0) {
    throw FormatError("point cloud byte length " + std::to_string(bytes.size()) +
                      " is not a multiple of 16");
  }
  PointCloud cloud;
  const std::size_t n = bytes.size() / 16;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    float f[4];
    std::memcpy(f, bytes.data() + i * 16, 16);
    cloud.points[i] = {static_cast<double>(f[0]), static_cast<double>(f[1]),
                       static_cast<double>(f[2]), f[3]};
  }
  return cloud;
}

std::vector<std::byte> write_point_cloud(const PointCloud& cloud) {
  std::vector<std::byte> bytes(cloud.points.size() * 16);
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const PointCloud::Point& p = cloud.points[i];
    const float f[4] = {static_cast<float>(p.x), static_cast<float>(p.y),
                        static_cast<float>(p.z), p.reflectance};
    std::memcpy(bytes.data() + i * 16, f, 16);
  }
  return bytes;
}

PointCloud transform_cloud_to_camera(const PointCloud& cloud,
                                     const Eigen::Matrix4d& extrinsics) {
  PointCloud out;
  out.points.resize(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const PointCloud::Point& p = cloud.points[i];
    const Eigen::Vector4d mapped = extrinsics * Eigen::Vector4d(p.x, p.y, p.z, 1.0);
    out.points[i] = {mapped.x(), mapped.y(), mapped.z(), p.reflectance};
  }
  return out;
}

Box3D box_from_label(const LabelRecord& r) {
  Box3D box;
  box.x = r.loc_x;
  box.y = r.loc_y - r.dim_h / 2.0;
  box.z = r.loc_z;
  box.h = r.dim_h;
  box.w = r.dim_w;
  box.l = r.dim_l;
  box.theta = normalize_angle(r.rotation_y);
  return box;
}

LabelRecord label_from_box(const Box3D& box, const LabelRecord& base) {
  LabelRecord r = base;
  r.dim_h = box.h;
  r.dim_w = box.w;
  r.dim_l = box.l;
  r.loc_x = box.x;
  r.loc_y = box.y + box.h / 2.0;
  r.loc_z = box.z;
  r.rotation_y = box.theta;
  return r;
}

}  // namespace snvc
