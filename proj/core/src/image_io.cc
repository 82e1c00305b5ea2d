// Copyright 2026 The msfdpm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "msfdpm/image_io.h"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "msfdpm/error.h"

namespace msfdpm {
namespace {

std::string lower_ext(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext;
}

std::uint8_t to_byte(double v) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

FeatureMap load_png(const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.string().c_str())) {
    throw InvalidInputError("cannot read PNG " + path.string() + ": " + image.message);
  }
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buffer.data(), 0, nullptr)) {
    png_image_free(&image);
    throw InvalidInputError("cannot decode PNG " + path.string() + ": " + image.message);
  }
  FeatureMap out(static_cast<int>(image.height), static_cast<int>(image.width), 3);
  auto values = out.values();
  for (std::size_t t = 0; t < values.size(); ++t) values[t] = buffer[t] / 255.0;
  return out;
}

void save_png(const std::filesystem::path& path, const FeatureMap& map) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(map.width());
  image.height = static_cast<png_uint_32>(map.height());
  image.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(map.size());
  auto values = map.values();
  for (std::size_t t = 0; t < values.size(); ++t) buffer[t] = to_byte(values[t]);
  if (!png_image_write_to_file(&image, path.string().c_str(), 0, buffer.data(), 0, nullptr)) {
    throw InvalidInputError("cannot write PNG " + path.string() + ": " + image.message);
  }
}

// Reads the next whitespace-separated header token, skipping # comments.
int pnm_token(std::istream& in) {
  int c = in.get();
  for (;;) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c != '#') break;
    while (c != EOF && c != '\n') c = in.get();
  }
  std::string token;
  while (c != EOF && !std::isspace(c)) {
    token.push_back(static_cast<char>(c));
    c = in.get();
  }
  if (token.empty() || !std::all_of(token.begin(), token.end(), ::isdigit)) {
    throw InvalidInputError("malformed PNM header");
  }
  return std::stoi(token);
}

FeatureMap load_pnm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInputError("cannot open " + path.string());
  char magic[2] = {};
  in.read(magic, 2);
  if (magic[0] != 'P' || (magic[1] != '6' && magic[1] != '5')) {
    throw InvalidInputError(path.string() + " is not a binary PPM/PGM");
  }
  const int planes = magic[1] == '6' ? 3 : 1;
  const int width = pnm_token(in);
  const int height = pnm_token(in);
  const int maxval = pnm_token(in);
  if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 65535) {
    throw InvalidInputError("bad PNM dimensions in " + path.string());
  }
  const int bytes_per_sample = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height * planes *
                                 bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw InvalidInputError("truncated PNM payload in " + path.string());
  }
  FeatureMap out(height, width, 3);
  for (std::size_t px = 0; px < static_cast<std::size_t>(width) * height; ++px) {
    for (int c = 0; c < 3; ++c) {
      const std::size_t s = px * planes + (planes == 3 ? c : 0);
      const int v = bytes_per_sample == 2 ? (raw[2 * s] << 8) | raw[2 * s + 1] : raw[s];
      out.values()[px * 3 + c] = static_cast<double>(v) / maxval;
    }
  }
  return out;
}

void save_ppm(const std::filesystem::path& path, const FeatureMap& map) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInputError("cannot write " + path.string());
  out << "P6\n" << map.width() << " " << map.height() << "\n255\n";
  std::vector<char> buffer(map.size());
  auto values = map.values();
  for (std::size_t t = 0; t < values.size(); ++t) buffer[t] = static_cast<char>(to_byte(values[t]));
  out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
}

}  // namespace

FeatureMap load_image(const std::filesystem::path& path) {
  const std::string ext = lower_ext(path);
  if (ext == ".png") return load_png(path);
  if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return load_pnm(path);
  throw InvalidInputError("unsupported image type " + path.string() + " (use .png or .ppm)");
}

void save_image(const std::filesystem::path& path, const FeatureMap& image) {
  if (image.channels() != 3) throw InvalidInputError("only 3-channel images can be saved");
  const std::string ext = lower_ext(path);
  if (ext == ".png") return save_png(path, image);
  if (ext == ".ppm") return save_ppm(path, image);
  throw InvalidInputError("unsupported output image type " + path.string());
}

FeatureMap center_crop_to_multiple(const FeatureMap& image, int multiple, CropInfo* info) {
  if (multiple <= 0) throw ConfigError("crop multiple must be positive");
  const int h = image.height() / multiple * multiple;
  const int w = image.width() / multiple * multiple;
  if (h == 0 || w == 0) {
    throw GeometryError("image " + std::to_string(image.height()) + "x" +
                        std::to_string(image.width()) + " is smaller than " +
                        std::to_string(multiple) + " pixels");
  }
  const int top = (image.height() - h) / 2;
  const int left = (image.width() - w) / 2;
  FeatureMap out(h, w, image.channels());
  const std::size_t row_len = static_cast<std::size_t>(w) * image.channels();
  for (int y = 0; y < h; ++y) {
    std::copy_n(image.row(top + y) + static_cast<std::size_t>(left) * image.channels(), row_len,
                out.row(y));
  }
  if (info) *info = CropInfo{image.height(), image.width(), h, w, top, left};
  return out;
}

}  // namespace msfdpm
