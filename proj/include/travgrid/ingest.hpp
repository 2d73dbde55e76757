// Copyright 2026 The travgrid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace travgrid {

struct LabeledPoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  float reflectance = 0.0f;
  std::uint16_t semantic_class = 0;  // 0 = unlabeled
  std::uint16_t instance_id = 0;

  Eigen::Vector3d position() const { return {x, y, z}; }
};

enum class Frame { kLidar, kWorld };

struct PointCloud {
  std::vector<LabeledPoint> points;
  Frame frame = Frame::kLidar;
  int scan_index = 0;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }
};

/// Rigid transform. `rotation` is kept orthonormal with det = +1.
struct Pose {
  Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  static Pose FromMatrix(const Eigen::Matrix4d& m);
  Eigen::Matrix4d matrix() const;
  Pose inverse() const;
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
  Pose operator*(const Pose& rhs) const;
};

/// Left color camera: `projection` is KITTI P2 (rectified camera -> pixels),
/// `lidar_to_cam` is Tr extended to 4x4.
struct CameraModel {
  Eigen::Matrix<double, 3, 4> projection = Eigen::Matrix<double, 3, 4>::Zero();
  Eigen::Matrix4d lidar_to_cam = Eigen::Matrix4d::Identity();
  int width = 0;
  int height = 0;
};

// Scans: little-endian float32 (x, y, z, reflectance) per point.
PointCloud read_scan(const std::filesystem::path& path);
PointCloud decode_scan(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_scan(const PointCloud& cloud);
void write_scan(const std::filesystem::path& path, const PointCloud& cloud);

// Labels: little-endian uint32 per point, low 16 bits class, high 16 bits instance.
PointCloud read_labels(const std::filesystem::path& path, PointCloud cloud);
void write_labels(const std::filesystem::path& path, const PointCloud& cloud);

/// One pose per line, 12 decimals (row-major 3x4). Rotations drifting from
/// orthonormal by less than 1e-3 are projected onto the nearest rotation.
std::vector<Pose> read_poses(const std::filesystem::path& path);
std::vector<Pose> parse_poses(std::string_view text);
void write_poses(const std::filesystem::path& path, std::span<const Pose> poses);

/// Reads "P2:" and "Tr:" rows of a KITTI calib.txt; other keys are ignored.
/// Image size is not part of calib.txt and is left at 0 until an image is seen.
CameraModel read_calibration(const std::filesystem::path& path);
CameraModel parse_calibration(std::string_view text);
void write_calibration(const std::filesystem::path& path, const CameraModel& cam);

/// Nearest rotation matrix in the Frobenius sense (SVD projection).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);
/// max |R R^T - I|.
double orthonormality_drift(const Eigen::Matrix3d& r);

PointCloud transform_to_world(PointCloud cloud, const Pose& lidar_to_world);

/// LiDAR->world pose for a KITTI camera-frame odometry pose. With
/// `compose_calib`, returns Tr^-1 * cam_pose * Tr; otherwise the pose as-is.
Pose lidar_pose_from_odometry(const Pose& cam_pose, const CameraModel& cam, bool compose_calib);

}  // namespace travgrid
