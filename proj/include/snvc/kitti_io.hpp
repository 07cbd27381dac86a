#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "snvc/box_geom.hpp"

namespace snvc {

/// Rectified stereo projection matrices from an object-detection calibration
/// file. p_left/p_right come from the P2/P3 rows; r_rect and velo_to_cam are
/// parsed when present and default to identity, so clouds recorded directly
/// in the rectified camera frame pass through untouched.
struct CameraRig {
  Eigen::Matrix<double, 3, 4> p_left = Eigen::Matrix<double, 3, 4>::Identity();
  Eigen::Matrix<double, 3, 4> p_right = Eigen::Matrix<double, 3, 4>::Identity();
  Eigen::Matrix3d r_rect = Eigen::Matrix3d::Identity();
  Eigen::Matrix4d velo_to_cam = Eigen::Matrix4d::Identity();

  /// Sensor-to-rectified-camera transform: rectification applied after the
  /// extrinsic mounting transform.
  Eigen::Matrix4d velo_to_rect() const;
};

/// One line of an object label file, fields exactly as stored on disk.
/// `location` is the bottom-face center in the camera frame (the on-disk
/// convention); see box_from_label for the geometric-center view.
struct LabelRecord {
  std::string category;
  double truncation = 0.0;
  int occlusion = 0;
  double alpha = 0.0;
  double bbox_left = 0.0, bbox_top = 0.0, bbox_right = 0.0, bbox_bottom = 0.0;
  double dim_h = 0.0, dim_w = 0.0, dim_l = 0.0;
  double loc_x = 0.0, loc_y = 0.0, loc_z = 0.0;
  double rotation_y = 0.0;
  std::optional<double> score;

  double bbox_height() const { return bbox_bottom - bbox_top; }
};

struct PointCloud {
  struct Point {
    double x = 0.0, y = 0.0, z = 0.0;
    float reflectance = 0.0f;
  };
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
};

/// Parse a calibration file. Requires P2 and P3 rows of 12 numbers each;
/// R0_rect (9 numbers) and Tr_velo_to_cam (12 numbers) are optional.
CameraRig parse_calib(const std::string& text);
std::string serialize_calib(const CameraRig& rig);

/// Parse a label file: one record per nonempty line, 15 or 16
/// whitespace-separated fields. The category is preserved verbatim,
/// including DontCare.
std::vector<LabelRecord> parse_labels(const std::string& text);

/// Serialize label records. Numeric fields use the shortest representation
/// that parses back to the identical value; scores are fixed at 6 decimals.
std::string serialize_labels(std::span<const LabelRecord> records);
std::string serialize_label(const LabelRecord& record);

/// Decode a packed point-cloud binary: little-endian float32 quadruplets
/// (x, y, z, reflectance). The byte count must be a multiple of 16.
PointCloud read_point_cloud(std::span<const std::byte> bytes);
std::vector<std::byte> write_point_cloud(const PointCloud& cloud);

/// Map every point by a rigid transform; reflectance is preserved.
PointCloud transform_cloud_to_camera(const PointCloud& cloud,
                                     const Eigen::Matrix4d& extrinsics);

/// Geometric-center box view of a label (shifts the bottom-face anchor up by
/// half the height; camera y points down).
Box3D box_from_label(const LabelRecord& record);

/// Inverse of box_from_label; fields other than dims/location/rotation are
/// taken from `base`.
LabelRecord label_from_box(const Box3D& box, const LabelRecord& base);

}  // namespace snvc
