#include "lqglab/png_io.hpp"

#include <array>

#include "lqglab/io_util.hpp"

namespace lqglab {

namespace {

std::uint32_t crc32_update(std::uint32_t crc, const unsigned char* p, std::size_t len) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ p[i]) & 0xff] ^ (crc >> 8);
  return crc;
}

void put_u32_be(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x >> 24));
  v.push_back(static_cast<unsigned char>(x >> 16));
  v.push_back(static_cast<unsigned char>(x >> 8));
  v.push_back(static_cast<unsigned char>(x));
}

void write_chunk(FileWriter& out, const char type[4], const std::vector<unsigned char>& data) {
  std::vector<unsigned char> head;
  put_u32_be(head, static_cast<std::uint32_t>(data.size()));
  out.write_bytes(reinterpret_cast<const char*>(head.data()), head.size());
  out.write_bytes(type, 4);
  if (!data.empty()) out.write_bytes(reinterpret_cast<const char*>(data.data()), data.size());
  std::uint32_t crc = crc32_update(0xffffffffu, reinterpret_cast<const unsigned char*>(type), 4);
  if (!data.empty()) crc = crc32_update(crc, data.data(), data.size());
  crc ^= 0xffffffffu;
  std::vector<unsigned char> tail;
  put_u32_be(tail, crc);
  out.write_bytes(reinterpret_cast<const char*>(tail.data()), tail.size());
}

}  // namespace

void write_png(const Image& img, const std::string& path) {
  FileWriter out(path);
  const unsigned char sig[8] = {0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  out.write_bytes(reinterpret_cast<const char*>(sig), 8);

  std::vector<unsigned char> ihdr;
  put_u32_be(ihdr, static_cast<std::uint32_t>(img.width));
  put_u32_be(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr.push_back(8);   // bit depth
  ihdr.push_back(2);   // color type: truecolor
  ihdr.push_back(0);   // compression
  ihdr.push_back(0);   // filter
  ihdr.push_back(0);   // interlace
  write_chunk(out, "IHDR", ihdr);

  // Raw scanlines, each prefixed with filter byte 0.
  std::vector<unsigned char> raw;
  raw.reserve(static_cast<std::size_t>(img.height) * (1 + 3 * img.width));
  for (int y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const std::size_t o = static_cast<std::size_t>(y) * img.width * 3;
    raw.insert(raw.end(), img.rgb.begin() + o, img.rgb.begin() + o + 3 * img.width);
  }

  // zlib stream of stored deflate blocks.
  std::vector<unsigned char> idat;
  idat.push_back(0x78);
  idat.push_back(0x01);
  std::size_t pos = 0;
  while (pos < raw.size() || raw.empty()) {
    const std::size_t len = std::min<std::size_t>(65535, raw.size() - pos);
    const bool final_block = pos + len == raw.size();
    idat.push_back(final_block ? 1 : 0);
    idat.push_back(static_cast<unsigned char>(len & 0xff));
    idat.push_back(static_cast<unsigned char>(len >> 8));
    idat.push_back(static_cast<unsigned char>(~len & 0xff));
    idat.push_back(static_cast<unsigned char>((~len >> 8) & 0xff));
    idat.insert(idat.end(), raw.begin() + pos, raw.begin() + pos + len);
    pos += len;
    if (raw.empty()) break;
  }
  std::uint32_t a = 1, b = 0;
  for (unsigned char c : raw) {
    a = (a + c) % 65521;
    b = (b + a) % 65521;
  }
  put_u32_be(idat, (b << 16) | a);
  write_chunk(out, "IDAT", idat);
  write_chunk(out, "IEND", {});
}

}  // namespace lqglab
