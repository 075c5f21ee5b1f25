#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace homecore::img {

struct Gray8 {
  int width = 0, height = 0;
  std::vector<std::uint8_t> pixels;  // row-major

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

struct Gray16 {
  int width = 0, height = 0;
  std::vector<std::uint16_t> pixels;

  std::uint16_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

using Rgb = std::array<std::uint8_t, 3>;

struct RgbImage {
  int width = 0, height = 0;
  std::vector<Rgb> pixels;

  RgbImage() = default;
  RgbImage(int w, int h, Rgb fill) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {}

  Rgb& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  const Rgb& at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

// Binary PGM (P5). 8-bit for masks and occupancy, 16-bit big-endian for depth.
Gray8 read_pgm8(const std::string& path);
Gray16 read_pgm16(const std::string& path);
void write_pgm8(const std::string& path, const Gray8& image);
void write_pgm16(const std::string& path, const Gray16& image);

// Binary PPM (P6).
RgbImage read_ppm(const std::string& path);
void write_ppm(const std::string& path, const RgbImage& image);
std::string encode_ppm(const RgbImage& image);

}  // namespace homecore::img
