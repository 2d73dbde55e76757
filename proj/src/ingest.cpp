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

#include "travgrid/ingest.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "travgrid/error.hpp"
#include "travgrid/log.hpp"

namespace travgrid {

namespace {

static_assert(std::endian::native == std::endian::little,
              "scan/label codecs assume a little-endian host");

constexpr std::size_t kScanRecord = 16;

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

LogSink& log_sink() {
  static LogSink sink = [](LogLevel level, const std::string& msg) {
    if (level == LogLevel::kInfo) return;
    std::fprintf(stderr, "[travgrid] %s: %s\n", level == LogLevel::kWarning ? "warning" : "error",
                 msg.c_str());
  };
  return sink;
}

std::vector<std::uint8_t> read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  if (size > 0 && !in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size)))
    throw DataError("short read on " + path.string());
  return bytes;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

// Parses every whitespace-separated decimal in `line`.
std::vector<double> parse_numbers(std::string_view line, bool* ok) {
  std::vector<double> out;
  *ok = true;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
    double v = 0.0;
    const char* first = line.data() + i;
    const char* last = line.data() + j;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
      *ok = false;
      return out;
    }
    out.push_back(v);
    i = j;
  }
  return out;
}

Pose pose_from_row_major(const std::vector<double>& v) {
  Pose p;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) p.rotation(r, c) = v[static_cast<std::size_t>(r * 4 + c)];
    p.translation(r) = v[static_cast<std::size_t>(r * 4 + 3)];
  }
  return p;
}

std::string format_row_major(const Eigen::Matrix<double, 3, 4>& m) {
  std::ostringstream ss;
  ss << std::setprecision(17);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) ss << (r || c ? " " : "") << m(r, c);
  return ss.str();
}

}  // namespace

LogSink set_log_sink(LogSink sink) {
  std::lock_guard lock(log_mutex());
  LogSink prev = std::move(log_sink());
  log_sink() = std::move(sink);
  return prev;
}

void log_message(LogLevel level, const std::string& message) {
  std::lock_guard lock(log_mutex());
  if (log_sink()) log_sink()(level, message);
}

Pose Pose::FromMatrix(const Eigen::Matrix4d& m) {
  Pose p;
  p.rotation = m.topLeftCorner<3, 3>();
  p.translation = m.topRightCorner<3, 1>();
  return p;
}

Eigen::Matrix4d Pose::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation;
  m.topRightCorner<3, 1>() = translation;
  return m;
}

Pose Pose::inverse() const {
  Pose p;
  p.rotation = rotation.transpose();
  p.translation = -(p.rotation * translation);
  return p;
}

Pose Pose::operator*(const Pose& rhs) const {
  Pose p;
  p.rotation = rotation * rhs.rotation;
  p.translation = rotation * rhs.translation + translation;
  return p;
}

PointCloud decode_scan(std::span<const std::uint8_t> bytes) {
  if (bytes.size() % kScanRecord != 0) {
    const std::size_t offset = bytes.size() - bytes.size() % kScanRecord;
    throw FormatError("scan truncated: trailing " + std::to_string(bytes.size() % kScanRecord) +
                      " bytes at byte offset " + std::to_string(offset));
  }
  PointCloud cloud;
  cloud.frame = Frame::kLidar;
  const std::size_t n = bytes.size() / kScanRecord;
  cloud.points.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::array<float, 4> rec;
    std::memcpy(rec.data(), bytes.data() + i * kScanRecord, kScanRecord);
    LabeledPoint& p = cloud.points[i];
    p.x = rec[0];
    p.y = rec[1];
    p.z = rec[2];
    p.reflectance = rec[3];
  }
  return cloud;
}

std::vector<std::uint8_t> encode_scan(const PointCloud& cloud) {
  std::vector<std::uint8_t> bytes(cloud.size() * kScanRecord);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const LabeledPoint& p = cloud.points[i];
    const std::array<float, 4> rec{static_cast<float>(p.x), static_cast<float>(p.y),
                                   static_cast<float>(p.z), p.reflectance};
    std::memcpy(bytes.data() + i * kScanRecord, rec.data(), kScanRecord);
  }
  return bytes;
}

PointCloud read_scan(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  PointCloud cloud;
  try {
    cloud = decode_scan(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  if (cloud.empty()) log_warn("empty scan " + path.string());
  return cloud;
}

void write_scan(const std::filesystem::path& path, const PointCloud& cloud) {
  write_bytes(path, encode_scan(cloud));
}

PointCloud read_labels(const std::filesystem::path& path, PointCloud cloud) {
  const auto bytes = read_bytes(path);
  if (bytes.size() % 4 != 0)
    throw FormatError(path.string() + ": label file size " + std::to_string(bytes.size()) +
                      " is not a multiple of 4");
  const std::size_t n = bytes.size() / 4;
  if (n != cloud.size())
    throw FormatError(path.string() + ": " + std::to_string(n) + " labels for " +
                      std::to_string(cloud.size()) + " points");
  for (std::size_t i = 0; i < n; ++i) {
    std::uint32_t word;
    std::memcpy(&word, bytes.data() + 4 * i, 4);
    cloud.points[i].semantic_class = static_cast<std::uint16_t>(word & 0xFFFFu);
    cloud.points[i].instance_id = static_cast<std::uint16_t>(word >> 16);
  }
  return cloud;
}

void write_labels(const std::filesystem::path& path, const PointCloud& cloud) {
  std::vector<std::uint8_t> bytes(cloud.size() * 4);
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const std::uint32_t word = static_cast<std::uint32_t>(cloud.points[i].semantic_class) |
                               (static_cast<std::uint32_t>(cloud.points[i].instance_id) << 16);
    std::memcpy(bytes.data() + 4 * i, &word, 4);
  }
  write_bytes(path, bytes);
}

double orthonormality_drift(const Eigen::Matrix3d& r) {
  return (r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  d(2, 2) = (svd.matrixU() * svd.matrixV().transpose()).determinant() < 0 ? -1.0 : 1.0;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

std::vector<Pose> parse_poses(std::string_view text) {
  std::vector<Pose> poses;
  std::istringstream in{std::string(text)};
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    bool ok = false;
    const auto v = parse_numbers(line, &ok);
    if (!ok || v.size() != 12)
      throw FormatError("poses line " + std::to_string(line_no) + ": expected 12 decimals, got " +
                        (ok ? std::to_string(v.size()) : std::string("unparsable text")));
    Pose p = pose_from_row_major(v);
    const double drift = orthonormality_drift(p.rotation);
    if (drift >= 1e-3 || p.rotation.determinant() < 0)
      throw FormatError("poses line " + std::to_string(line_no) + ": rotation not orthonormal (drift " +
                        std::to_string(drift) + ")");
    if (drift > 1e-12) p.rotation = nearest_rotation(p.rotation);
    poses.push_back(p);
  }
  return poses;
}

std::vector<Pose> read_poses(const std::filesystem::path& path) {
  try {
    return parse_poses(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_poses(const std::filesystem::path& path, std::span<const Pose> poses) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  for (const Pose& p : poses) out << format_row_major(p.matrix().topRows<3>()) << '\n';
}

CameraModel parse_calibration(std::string_view text) {
  std::vector<double> p2, tr;
  std::istringstream in{std::string(text)};
  std::string line_buf;
  while (std::getline(in, line_buf)) {
    const std::string_view line = line_buf;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) continue;
    std::string_view key = line.substr(0, colon);
    while (!key.empty() && std::isspace(static_cast<unsigned char>(key.front()))) key.remove_prefix(1);
    std::vector<double>* dst = key == "P2" ? &p2 : key == "Tr" ? &tr : nullptr;
    if (!dst) continue;
    bool ok = false;
    *dst = parse_numbers(line.substr(colon + 1), &ok);
    if (!ok || dst->size() != 12)
      throw FormatError("calibration key \"" + std::string(key) + "\" must have 12 decimals");
  }
  if (p2.empty()) throw FormatError("calibration missing key \"P2\"");
  if (tr.empty()) throw FormatError("calibration missing key \"Tr\"");
  CameraModel cam;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 4; ++c) {
      cam.projection(r, c) = p2[static_cast<std::size_t>(r * 4 + c)];
      cam.lidar_to_cam(r, c) = tr[static_cast<std::size_t>(r * 4 + c)];
    }
  cam.lidar_to_cam.row(3) << 0, 0, 0, 1;
  Eigen::FullPivLU<Eigen::Matrix<double, 3, 4>> lu(cam.projection);
  if (lu.rank() != 3) throw FormatError("calibration P2 must have rank 3");
  return cam;
}

CameraModel read_calibration(const std::filesystem::path& path) {
  try {
    return parse_calibration(read_text(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_calibration(const std::filesystem::path& path, const CameraModel& cam) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P2: " << format_row_major(cam.projection) << '\n';
  out << "Tr: " << format_row_major(cam.lidar_to_cam.topRows<3>()) << '\n';
}

PointCloud transform_to_world(PointCloud cloud, const Pose& lidar_to_world) {
  if (cloud.frame != Frame::kLidar)
    throw PreconditionError("transform_to_world: cloud is already in the world frame");
  for (LabeledPoint& p : cloud.points) {
    const Eigen::Vector3d w = lidar_to_world.apply(p.position());
    p.x = w.x();
    p.y = w.y();
    p.z = w.z();
  }
  cloud.frame = Frame::kWorld;
  return cloud;
}

Pose lidar_pose_from_odometry(const Pose& cam_pose, const CameraModel& cam, bool compose_calib) {
  if (!compose_calib) return cam_pose;
  Pose tr = Pose::FromMatrix(cam.lidar_to_cam);
  tr.rotation = nearest_rotation(tr.rotation);
  return tr.inverse() * cam_pose * tr;
}

}  // namespace travgrid
