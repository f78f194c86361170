// Copyright 2026 The spba Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "spba/image_io.hpp"

#include <png.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "spba/fsio.hpp"

namespace spba {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

[[noreturn]] void fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

}  // namespace

void write_png(const std::string& path, const ImageRGB& image) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) fail("cannot open for writing", path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    fail("libpng write error", path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);

  std::vector<std::uint8_t> row(image.width * 3);
  for (int y = 0; y < image.height; ++y) {
    const float* src = image.data.data() + 3 * static_cast<std::size_t>(y) *
                                               image.width;
    for (int i = 0; i < image.width * 3; ++i) {
      const float v = std::min(1.0f, std::max(0.0f, src[i]));
      row[i] = static_cast<std::uint8_t>(std::lround(v * 255.0f));
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

ImageRGB read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) fail("cannot open", path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png_create_info_struct(png);
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    fail("libpng read error", path);
  }
  png_init_io(png, fp.get());
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const int w = static_cast<int>(png_get_image_width(png, info));
  const int h = static_cast<int>(png_get_image_height(png, info));
  ImageRGB image(h, w);
  std::vector<std::uint8_t> row(w * 3);
  for (int y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    float* dst = image.data.data() + 3 * static_cast<std::size_t>(y) * w;
    for (int i = 0; i < w * 3; ++i) dst[i] = row[i] / 255.0f;
  }
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return image;
}

namespace {

std::string npy_header(int h, int w) {
  std::ostringstream dict;
  dict << "{'descr': '<f4', 'fortran_order': False, 'shape': (" << h << ", "
       << w << ", 3), }";
  std::string d = dict.str();
  // Pad with spaces so that magic + header length is a multiple of 64.
  const std::size_t base = 10 + d.size() + 1;  // magic(8) + len(2) + dict + \n
  const std::size_t pad = (64 - base % 64) % 64;
  d.append(pad, ' ');
  d.push_back('\n');
  std::string out("\x93NUMPY\x01\x00", 8);
  const std::uint16_t len = static_cast<std::uint16_t>(d.size());
  out.push_back(static_cast<char>(len & 0xff));
  out.push_back(static_cast<char>(len >> 8));
  out += d;
  return out;
}

}  // namespace

void write_image_raw(const std::string& path, const ImageRGB& image) {
  std::string bytes = npy_header(image.height, image.width);
  const std::size_t n = image.data.size() * sizeof(float);
  const std::size_t off = bytes.size();
  bytes.resize(off + n);
  std::memcpy(bytes.data() + off, image.data.data(), n);
  write_file_atomic(path, bytes);
}

ImageRGB read_image_raw(const std::string& path) {
  const std::string bytes = read_file(path);
  if (bytes.size() < 10 || bytes.compare(0, 6, "\x93NUMPY") != 0) {
    fail("not an NPY file", path);
  }
  const std::uint16_t len =
      static_cast<std::uint8_t>(bytes[8]) |
      (static_cast<std::uint16_t>(static_cast<std::uint8_t>(bytes[9])) << 8);
  const std::string header = bytes.substr(10, len);
  if (header.find("'<f4'") == std::string::npos) {
    fail("unsupported NPY dtype (expected <f4)", path);
  }
  const auto shape_pos = header.find("'shape': (");
  if (shape_pos == std::string::npos) fail("malformed NPY header", path);
  int h = 0, w = 0, c = 0;
  if (std::sscanf(header.c_str() + shape_pos, "'shape': (%d, %d, %d)", &h, &w,
                  &c) != 3 ||
      c != 3) {
    fail("unsupported NPY shape (expected H, W, 3)", path);
  }
  ImageRGB image(h, w);
  const std::size_t expected = image.data.size() * sizeof(float);
  if (bytes.size() != 10 + len + expected) fail("truncated NPY payload", path);
  std::memcpy(image.data.data(), bytes.data() + 10 + len, expected);
  return image;
}

void write_pgm(const std::string& path, const SilhouetteMask& mask) {
  std::string bytes = "P5\n" + std::to_string(mask.width) + " " +
                      std::to_string(mask.height) + "\n255\n";
  const std::size_t off = bytes.size();
  bytes.resize(off + mask.data.size());
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    bytes[off + i] = mask.data[i] ? static_cast<char>(255) : 0;
  }
  write_file_atomic(path, bytes);
}

SilhouetteMask read_pgm(const std::string& path) {
  const std::string bytes = read_file(path);
  std::istringstream in(bytes);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (magic != "P5" || w <= 0 || h <= 0) fail("not a binary PGM", path);
  in.get();  // single whitespace after maxval
  SilhouetteMask mask(h, w);
  const std::size_t off = static_cast<std::size_t>(in.tellg());
  if (bytes.size() < off + mask.data.size()) fail("truncated PGM", path);
  for (std::size_t i = 0; i < mask.data.size(); ++i) {
    mask.data[i] = bytes[off + i] ? 1 : 0;
  }
  return mask;
}

}  // namespace spba
