#include "homecore/image.hpp"

#include <fstream>
#include <sstream>

#include "homecore/error.hpp"

namespace homecore::img {

namespace {

// Reads magic + dimensions + maxval, skipping whitespace and '#' comments.
struct PnmHeader {
  std::string magic;
  int width = 0, height = 0, maxval = 0;
};

int read_pnm_token(std::istream& in, const std::string& path) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) raise(ErrorCode::parse_error, path + ": truncated header");
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) raise(ErrorCode::parse_error, path + ": expected integer in header");
  return value;
}

PnmHeader read_pnm_header(std::istream& in, const std::string& path,
                          const std::string& expected_magic) {
  PnmHeader h;
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  h.magic = std::string() + m0 + m1;
  if (h.magic != expected_magic)
    raise(ErrorCode::parse_error,
          path + ": expected " + expected_magic + " file, found '" + h.magic + "'");
  h.width = read_pnm_token(in, path);
  h.height = read_pnm_token(in, path);
  h.maxval = read_pnm_token(in, path);
  if (h.width <= 0 || h.height <= 0)
    raise(ErrorCode::parse_error, path + ": non-positive dimensions");
  return h;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io_error, "cannot open " + path + " for reading");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(ErrorCode::io_error, "cannot open " + path + " for writing");
  return out;
}

}  // namespace

Gray8 read_pgm8(const std::string& path) {
  std::ifstream in = open_input(path);
  const PnmHeader h = read_pnm_header(in, path, "P5");
  if (h.maxval > 255)
    raise(ErrorCode::parse_error, path + ": expected 8-bit PGM, maxval > 255");
  Gray8 image;
  image.width = h.width;
  image.height = h.height;
  image.pixels.resize(static_cast<std::size_t>(h.width) * h.height);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(image.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(image.pixels.size()))
    raise(ErrorCode::parse_error, path + ": truncated pixel data");
  return image;
}

Gray16 read_pgm16(const std::string& path) {
  std::ifstream in = open_input(path);
  const PnmHeader h = read_pnm_header(in, path, "P5");
  if (h.maxval <= 255 || h.maxval > 65535)
    raise(ErrorCode::parse_error, path + ": expected 16-bit PGM maxval in (255, 65535]");
  Gray16 image;
  image.width = h.width;
  image.height = h.height;
  const std::size_t count = static_cast<std::size_t>(h.width) * h.height;
  std::vector<std::uint8_t> raw(count * 2);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    raise(ErrorCode::parse_error, path + ": truncated pixel data");
  image.pixels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    // PGM stores the most significant byte first.
    image.pixels[i] = static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
  }
  return image;
}

void write_pgm8(const std::string& path, const Gray8& image) {
  std::ofstream out = open_output(path);
  out << "P5\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size()));
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

void write_pgm16(const std::string& path, const Gray16& image) {
  std::ofstream out = open_output(path);
  out << "P5\n" << image.width << " " << image.height << "\n65535\n";
  std::vector<std::uint8_t> raw(image.pixels.size() * 2);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) {
    raw[2 * i] = static_cast<std::uint8_t>(image.pixels[i] >> 8);
    raw[2 * i + 1] = static_cast<std::uint8_t>(image.pixels[i] & 0xff);
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

RgbImage read_ppm(const std::string& path) {
  std::ifstream in = open_input(path);
  const PnmHeader h = read_pnm_header(in, path, "P6");
  if (h.maxval != 255)
    raise(ErrorCode::parse_error, path + ": expected maxval 255");
  RgbImage image;
  image.width = h.width;
  image.height = h.height;
  const std::size_t count = static_cast<std::size_t>(h.width) * h.height;
  image.pixels.resize(count);
  in.read(reinterpret_cast<char*>(image.pixels.data()),
          static_cast<std::streamsize>(count * 3));
  if (in.gcount() != static_cast<std::streamsize>(count * 3))
    raise(ErrorCode::parse_error, path + ": truncated pixel data");
  return image;
}

std::string encode_ppm(const RgbImage& image) {
  std::ostringstream out;
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels.data()),
            static_cast<std::streamsize>(image.pixels.size() * 3));
  return out.str();
}

void write_ppm(const std::string& path, const RgbImage& image) {
  std::ofstream out = open_output(path);
  const std::string bytes = encode_ppm(image);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) raise(ErrorCode::io_error, "write failed: " + path);
}

}  // namespace homecore::img
