#pragma once

#include "bsgd/common.hpp"

#include <filesystem>
#include <vector>

namespace bsgd {

struct RawImage {
  std::vector<Index> dims;  // K per axis
  Vec values;
};

/// Writes a one-line text header "dims: K [K [K]]" followed by the values
/// as little-endian 32-bit floats.
void write_raw(const std::filesystem::path& path, const Vec& values, const std::vector<Index>& dims);

/// Reads a file produced by write_raw. Throws ParseError on a malformed
/// header or a payload whose size does not match the header.
RawImage read_raw(const std::filesystem::path& path);

}  // namespace bsgd
