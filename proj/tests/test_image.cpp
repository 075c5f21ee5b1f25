#include <doctest.h>

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "homecore/error.hpp"
#include "homecore/image.hpp"
#include "support/oracles.hpp"

using namespace homecore;

TEST_SUITE_BEGIN("image");

TEST_CASE("8-bit pgm round trip") {
  oracles::TempDir dir("pgm8");
  img::Gray8 image{3, 2, {0, 10, 20, 200, 254, 255}};
  const std::string path = dir.file("a.pgm");
  img::write_pgm8(path, image);

  const img::Gray8 back = img::read_pgm8(path);
  CHECK(back.width == 3);
  CHECK(back.height == 2);
  CHECK(back.pixels == image.pixels);

  std::ifstream in(path, std::ios::binary);
  std::string header;
  in >> header;
  CHECK(header == "P5");
}

TEST_CASE("16-bit pgm stores big-endian samples") {
  oracles::TempDir dir("pgm16");
  img::Gray16 image{2, 2, {0x0102, 0xfffe, 0, 65535}};
  const std::string path = dir.file("d.pgm");
  img::write_pgm16(path, image);

  const img::Gray16 back = img::read_pgm16(path);
  CHECK(back.pixels == image.pixels);

  // Inspect the raw payload: most significant byte first.
  std::ifstream in(path, std::ios::binary);
  std::string all((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  REQUIRE(all.size() > 8);
  const auto* bytes = reinterpret_cast<const unsigned char*>(all.data() + all.size() - 8);
  CHECK(bytes[0] == 0x01);
  CHECK(bytes[1] == 0x02);
  CHECK(bytes[2] == 0xff);
  CHECK(bytes[3] == 0xfe);
}

TEST_CASE("ppm round trip and in-memory encoding") {
  oracles::TempDir dir("ppm");
  img::RgbImage image(2, 1, {0, 0, 0});
  image.at(0, 0) = {1, 2, 3};
  image.at(1, 0) = {250, 120, 7};
  const std::string path = dir.file("c.ppm");
  img::write_ppm(path, image);

  const img::RgbImage back = img::read_ppm(path);
  CHECK(back.width == 2);
  CHECK(back.height == 1);
  CHECK(back.pixels == image.pixels);

  const std::string encoded = img::encode_ppm(image);
  std::ifstream in(path, std::ios::binary);
  std::string file_bytes((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
  CHECK(encoded == file_bytes);
  CHECK(encoded.substr(0, 2) == "P6");
}

TEST_CASE("reader errors") {
  oracles::TempDir dir("bad");
  CHECK_THROWS_AS((void)img::read_pgm8(dir.file("missing.pgm")), Error);

  {
    std::ofstream out(dir.file("truncated.pgm"), std::ios::binary);
    out << "P5\n4 4\n255\nxx";
  }
  CHECK_THROWS_AS((void)img::read_pgm8(dir.file("truncated.pgm")), Error);

  {
    std::ofstream out(dir.file("wrongmagic.pgm"), std::ios::binary);
    out << "P2\n1 1\n255\n0";
  }
  CHECK_THROWS_AS((void)img::read_pgm8(dir.file("wrongmagic.pgm")), Error);

  try {
    (void)img::read_pgm8(dir.file("missing.pgm"));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
}

TEST_SUITE_END();
