#include "bsgd/raw_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace bsgd {

namespace {

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) return __builtin_bswap32(v);
  return v;
}

}  // namespace

void write_raw(const std::filesystem::path& path, const Vec& values, const std::vector<Index>& dims) {
  if (dims.empty() || dims.size() > 3) throw Error("write_raw: expected 1 to 3 dimensions");
  Index count = 1;
  for (Index d : dims) count *= d;
  if (count != values.size()) throw DimensionError("write_raw: dims do not match value count");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("write_raw: cannot open " + path.string());
  out << "dims:";
  for (Index d : dims) out << ' ' << d;
  out << '\n';
  for (Index k = 0; k < values.size(); ++k) {
    const auto f = static_cast<float>(values[k]);
    const std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(f));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw Error("write_raw: write failed for " + path.string());
}

RawImage read_raw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("read_raw: cannot open " + path.string());
  std::string header;
  if (!std::getline(in, header)) throw ParseError("read_raw: missing header");
  std::istringstream hs(header);
  std::string tag;
  hs >> tag;
  if (tag != "dims:") throw ParseError("read_raw: header must start with 'dims:'");
  RawImage img;
  Index d = 0;
  while (hs >> d) {
    if (d < 1) throw ParseError("read_raw: dimensions must be positive");
    img.dims.push_back(d);
  }
  if (!hs.eof() || img.dims.empty() || img.dims.size() > 3)
    throw ParseError("read_raw: malformed dims header '" + header + "'");
  Index count = 1;
  for (Index v : img.dims) count *= v;
  std::vector<char> payload((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (static_cast<Index>(payload.size()) != count * 4)
    throw ParseError("read_raw: payload holds " + std::to_string(payload.size()) + " bytes, expected " +
                     std::to_string(count * 4));
  img.values.resize(count);
  for (Index k = 0; k < count; ++k) {
    std::uint32_t bits;
    std::memcpy(&bits, payload.data() + 4 * k, 4);
    img.values[k] = static_cast<double>(std::bit_cast<float>(to_le(bits)));
  }
  return img;
}

}  // namespace bsgd
