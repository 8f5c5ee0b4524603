#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "pulse/errors.hpp"

namespace pulse {

/// Row-major matrix of doubles; rows = waveforms. 1-D files read as 1xN.
struct NpyMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // rows * cols

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

  std::vector<double> row(std::size_t r) const {
    return {data.begin() + static_cast<std::ptrdiff_t>(r * cols),
            data.begin() + static_cast<std::ptrdiff_t>((r + 1) * cols)};
  }
};

namespace detail {

inline std::string npy_header_value(const std::string& header, const std::string& key) {
  const auto kpos = header.find("'" + key + "'");
  if (kpos == std::string::npos)
    throw FormatError("npy header missing key '" + key + "'");
  auto pos = header.find(':', kpos);
  if (pos == std::string::npos) throw FormatError("malformed npy header");
  ++pos;
  while (pos < header.size() && (header[pos] == ' ')) ++pos;
  std::size_t end = pos;
  if (header[pos] == '\'') {
    end = header.find('\'', pos + 1);
    if (end == std::string::npos) throw FormatError("malformed npy header");
    return header.substr(pos + 1, end - pos - 1);
  }
  if (header[pos] == '(') {
    end = header.find(')', pos);
    if (end == std::string::npos) throw FormatError("malformed npy header");
    return header.substr(pos, end - pos + 1);
  }
  while (end < header.size() && header[end] != ',' && header[end] != '}') ++end;
  return header.substr(pos, end - pos);
}

}  // namespace detail

inline NpyMatrix read_npy_matrix(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");

  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "\x93NUMPY", 6) != 0)
    throw FormatError("'" + path + "' is not an NPY file (bad magic)");
  const int major = static_cast<unsigned char>(magic[6]);
  if (major != 1 && major != 2)
    throw FormatError("unsupported NPY version " + std::to_string(major));

  std::uint32_t header_len = 0;
  if (major == 1) {
    std::uint8_t buf[2];
    f.read(reinterpret_cast<char*>(buf), 2);
    header_len = buf[0] | (std::uint32_t(buf[1]) << 8);
  } else {
    std::uint8_t buf[4];
    f.read(reinterpret_cast<char*>(buf), 4);
    header_len = buf[0] | (std::uint32_t(buf[1]) << 8) |
                 (std::uint32_t(buf[2]) << 16) | (std::uint32_t(buf[3]) << 24);
  }
  if (!f) throw FormatError("truncated NPY header in '" + path + "'");

  std::string header(header_len, '\0');
  f.read(header.data(), header_len);
  if (!f) throw FormatError("truncated NPY header in '" + path + "'");

  const std::string descr = detail::npy_header_value(header, "descr");
  const std::string fortran = detail::npy_header_value(header, "fortran_order");
  const std::string shape_str = detail::npy_header_value(header, "shape");

  if (fortran.find("True") != std::string::npos)
    throw UnsupportedLayoutError("fortran-order NPY not supported");

  std::size_t item_size = 0;
  if (descr == "<f8") item_size = 8;
  else if (descr == "<f4") item_size = 4;
  else throw UnsupportedLayoutError("dtype '" + descr + "' not supported (need <f4 or <f8)");

  // Parse "(n,)" or "(n, m)".
  std::vector<std::size_t> dims;
  std::string num;
  for (char c : shape_str) {
    if (c >= '0' && c <= '9') num += c;
    else if (!num.empty()) {
      dims.push_back(std::stoull(num));
      num.clear();
    }
  }
  if (dims.empty() || dims.size() > 2)
    throw UnsupportedLayoutError("only 1-D or 2-D NPY supported");

  NpyMatrix m;
  m.rows = dims.size() == 2 ? dims[0] : 1;
  m.cols = dims.size() == 2 ? dims[1] : dims[0];
  const std::size_t count = m.rows * m.cols;

  std::vector<char> raw(count * item_size);
  f.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (!f) throw FormatError("truncated NPY payload in '" + path + "'");

  m.data.resize(count);
  if (item_size == 8) {
    std::memcpy(m.data.data(), raw.data(), raw.size());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      float v;
      std::memcpy(&v, raw.data() + i * 4, 4);
      m.data[i] = static_cast<double>(v);
    }
  }
  return m;
}

/// Writes NPY v1.0, little-endian float64, C-order. 1-row matrices are
/// written as 1-D when as_1d is set.
inline void write_npy_matrix(const std::string& path, const NpyMatrix& m,
                             bool as_1d = false) {
  if (m.data.size() != m.rows * m.cols)
    throw DimensionError("npy matrix data size does not match shape");
  std::string shape;
  if (as_1d && m.rows == 1)
    shape = "(" + std::to_string(m.cols) + ",)";
  else
    shape = "(" + std::to_string(m.rows) + ", " + std::to_string(m.cols) + ")";
  std::string header =
      "{'descr': '<f8', 'fortran_order': False, 'shape': " + shape + ", }";
  // Pad with spaces so magic+len+header is a multiple of 64, newline-terminated.
  const std::size_t base = 10 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header += '\n';

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot write '" + path + "'");
  f.write("\x93NUMPY\x01\x00", 8);
  const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  const std::uint8_t lenbuf[2] = {static_cast<std::uint8_t>(hlen & 0xff),
                                  static_cast<std::uint8_t>(hlen >> 8)};
  f.write(reinterpret_cast<const char*>(lenbuf), 2);
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  f.write(reinterpret_cast<const char*>(m.data.data()),
          static_cast<std::streamsize>(m.data.size() * sizeof(double)));
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace pulse
