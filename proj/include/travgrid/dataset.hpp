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

#include <filesystem>
#include <string>
#include <vector>

#include "travgrid/image.hpp"
#include "travgrid/ingest.hpp"

namespace travgrid {

/// One (Semantic)KITTI odometry sequence on disk:
///   <root>/sequences/<seq>/{velodyne/%06d.bin, labels/%06d.label,
///   image_2/%06d.png|.ppm, calib.txt, poses.txt}
/// poses.txt may also live at <root>/poses/<seq>.txt.
class KittiSequence {
 public:
  /// Throws DataError listing every missing required path.
  KittiSequence(const std::filesystem::path& root, const std::string& sequence, bool compose_calib);

  int frame_count() const { return frame_count_; }
  const CameraModel& camera() const { return camera_; }
  /// LiDAR->world pose of a frame.
  const Pose& lidar_pose(int frame) const;
  /// LiDAR-frame scan with semantic labels attached when a label file exists.
  PointCloud load_scan(int frame) const;
  bool has_labels(int frame) const;
  RgbImage load_image(int frame) const;

  std::filesystem::path scan_path(int frame) const;
  std::filesystem::path label_path(int frame) const;
  std::filesystem::path image_path(int frame) const;

  const std::filesystem::path& directory() const { return dir_; }

 private:
  std::filesystem::path dir_;
  int frame_count_ = 0;
  CameraModel camera_;
  std::vector<Pose> lidar_poses_;
};

std::string frame_stem(int frame);

}  // namespace travgrid
