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

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace travgrid {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major RGB8 raster.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;  // 3 * width * height

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill = {});

  bool valid() const {
    return width > 0 && height > 0 &&
           pixels.size() == 3u * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  Rgb at(int x, int y) const {
    const std::size_t i = 3u * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                static_cast<std::size_t>(x));
    return {pixels[i], pixels[i + 1], pixels[i + 2]};
  }
  void set(int x, int y, Rgb c) {
    const std::size_t i = 3u * (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                                static_cast<std::size_t>(x));
    pixels[i] = c.r;
    pixels[i + 1] = c.g;
    pixels[i + 2] = c.b;
  }
};

RgbImage read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const RgbImage& img);
RgbImage read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const RgbImage& img);

/// Dispatches on extension: ".png" or ".ppm".
RgbImage read_image(const std::filesystem::path& path);
void write_image(const std::filesystem::path& path, const RgbImage& img);

}  // namespace travgrid
