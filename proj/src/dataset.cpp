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

#include "travgrid/dataset.hpp"

#include <cstdio>

#include "travgrid/error.hpp"

namespace travgrid {

namespace fs = std::filesystem;

std::string frame_stem(int frame) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%06d", frame);
  return buf;
}

KittiSequence::KittiSequence(const fs::path& root, const std::string& sequence, bool compose_calib)
    : dir_(root / "sequences" / sequence) {
  std::vector<std::string> missing;
  const fs::path calib = dir_ / "calib.txt";
  fs::path poses = dir_ / "poses.txt";
  if (!fs::exists(poses)) poses = root / "poses" / (sequence + ".txt");
  if (!fs::is_directory(dir_ / "velodyne")) missing.push_back((dir_ / "velodyne").string());
  if (!fs::exists(calib)) missing.push_back(calib.string());
  if (!fs::exists(poses)) missing.push_back((dir_ / "poses.txt").string());
  if (!missing.empty()) {
    std::string msg = "missing dataset files:";
    for (const auto& m : missing) msg += "\n  " + m;
    throw DataError(msg);
  }
  camera_ = read_calibration(calib);
  const auto cam_poses = read_poses(poses);
  while (fs::exists(scan_path(frame_count_))) ++frame_count_;
  if (static_cast<int>(cam_poses.size()) < frame_count_)
    throw DataError(poses.string() + " has " + std::to_string(cam_poses.size()) + " poses for " +
                    std::to_string(frame_count_) + " scans");
  lidar_poses_.reserve(cam_poses.size());
  for (const Pose& p : cam_poses) lidar_poses_.push_back(lidar_pose_from_odometry(p, camera_, compose_calib));
}

const Pose& KittiSequence::lidar_pose(int frame) const {
  if (frame < 0 || frame >= static_cast<int>(lidar_poses_.size()))
    throw DataError("no pose for frame " + std::to_string(frame));
  return lidar_poses_[static_cast<std::size_t>(frame)];
}

fs::path KittiSequence::scan_path(int frame) const { return dir_ / "velodyne" / (frame_stem(frame) + ".bin"); }
fs::path KittiSequence::label_path(int frame) const { return dir_ / "labels" / (frame_stem(frame) + ".label"); }

fs::path KittiSequence::image_path(int frame) const {
  const fs::path png = dir_ / "image_2" / (frame_stem(frame) + ".png");
  if (fs::exists(png)) return png;
  return dir_ / "image_2" / (frame_stem(frame) + ".ppm");
}

bool KittiSequence::has_labels(int frame) const { return fs::exists(label_path(frame)); }

PointCloud KittiSequence::load_scan(int frame) const {
  if (frame < 0 || frame >= frame_count_) throw DataError("frame " + std::to_string(frame) + " out of range");
  PointCloud cloud = read_scan(scan_path(frame));
  cloud.scan_index = frame;
  if (has_labels(frame)) cloud = read_labels(label_path(frame), std::move(cloud));
  return cloud;
}

RgbImage KittiSequence::load_image(int frame) const {
  const fs::path p = image_path(frame);
  if (!fs::exists(p)) throw DataError("missing image for frame " + std::to_string(frame) + ": " + p.string());
  return read_image(p);
}

}  // namespace travgrid
