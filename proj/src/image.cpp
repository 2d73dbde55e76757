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

#include "travgrid/image.hpp"

#include <fstream>
#include <string>

#include <png.h>

#include "travgrid/error.hpp"

namespace travgrid {

RgbImage::RgbImage(int w, int h, Rgb fill) : width(w), height(h) {
  pixels.resize(3u * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
  for (std::size_t i = 0; i < pixels.size(); i += 3) {
    pixels[i] = fill.r;
    pixels[i + 1] = fill.g;
    pixels[i + 2] = fill.b;
  }
}

namespace {

// Reads the next PPM header token, skipping whitespace and '#' comments.
std::string ppm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

}  // namespace

RgbImage read_ppm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  if (ppm_token(in) != "P6") throw FormatError(path.string() + ": not a binary PPM (P6)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(ppm_token(in));
    h = std::stoi(ppm_token(in));
    maxval = std::stoi(ppm_token(in));
  } catch (const std::exception&) {
    throw FormatError(path.string() + ": malformed PPM header");
  }
  if (w <= 0 || h <= 0 || maxval != 255)
    throw FormatError(path.string() + ": unsupported PPM geometry or maxval");
  RgbImage img(w, h);
  if (!in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size())))
    throw FormatError(path.string() + ": truncated PPM raster");
  return img;
}

void write_ppm(const std::filesystem::path& path, const RgbImage& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
}

RgbImage read_png(const std::filesystem::path& path) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw FormatError(path.string() + ": " + image.message);
  image.format = PNG_FORMAT_RGB;
  RgbImage img(static_cast<int>(image.width), static_cast<int>(image.height));
  if (!png_image_finish_read(&image, nullptr, img.pixels.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw FormatError(path.string() + ": " + msg);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const RgbImage& img) {
  png_image image{};
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr))
    throw DataError(path.string() + ": " + image.message);
}

RgbImage read_image(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return read_png(path);
  if (ext == ".ppm" || ext == ".PPM") return read_ppm(path);
  throw FormatError(path.string() + ": unsupported image extension");
}

void write_image(const std::filesystem::path& path, const RgbImage& img) {
  const auto ext = path.extension().string();
  if (ext == ".png" || ext == ".PNG") return write_png(path, img);
  if (ext == ".ppm" || ext == ".PPM") return write_ppm(path, img);
  throw FormatError(path.string() + ": unsupported image extension");
}

}  // namespace travgrid
