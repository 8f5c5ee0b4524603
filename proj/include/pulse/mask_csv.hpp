#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

/// Parses one CSV row of "(flag,length)" tuples into a normalized mask.
inline MissingnessMask parse_mask_row(const std::string& line) {
  MissingnessMask mask;
  std::size_t pos = 0;
  bool saw_tuple = false;
  while (pos < line.size()) {
    const char c = line[pos];
    if (c == '(') {
      const auto close = line.find(')', pos);
      if (close == std::string::npos)
        throw FormatError("unterminated tuple in mask row: " + line);
      const std::string body = line.substr(pos + 1, close - pos - 1);
      const auto comma = body.find(',');
      if (comma == std::string::npos)
        throw FormatError("mask tuple needs two fields: (" + body + ")");
      long flag = 0;
      long long length = 0;
      try {
        flag = std::stol(body.substr(0, comma));
        length = std::stoll(body.substr(comma + 1));
      } catch (const std::exception&) {
        throw FormatError("non-numeric mask tuple: (" + body + ")");
      }
      if (flag != 0 && flag != 1)
        throw FormatError("mask flag must be 0 or 1, got " + std::to_string(flag));
      if (length <= 0)
        throw FormatError("mask run length must be positive, got " +
                          std::to_string(length));
      mask.append(static_cast<int>(flag), static_cast<std::size_t>(length));
      saw_tuple = true;
      pos = close + 1;
    } else if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '"') {
      ++pos;
    } else {
      throw FormatError("unexpected character '" + std::string(1, c) +
                        "' in mask row");
    }
  }
  if (!saw_tuple) throw FormatError("empty mask row");
  return mask;
}

inline std::vector<MissingnessMask> read_mask_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open '" + path + "'");
  std::vector<MissingnessMask> masks;
  std::string line;
  while (std::getline(f, line)) {
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') { blank = false; break; }
    if (blank) continue;
    masks.push_back(parse_mask_row(line));
  }
  return masks;
}

inline std::string format_mask_row(const MissingnessMask& mask) {
  std::ostringstream out;
  bool first = true;
  for (const auto& r : mask.runs()) {
    if (!first) out << ',';
    out << '(' << r.flag << ',' << r.length << ')';
    first = false;
  }
  return out.str();
}

inline void write_mask_csv(const std::string& path,
                           const std::vector<MissingnessMask>& masks) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write '" + path + "'");
  for (const auto& m : masks) f << format_mask_row(m) << '\n';
  if (!f) throw IoError("failed writing '" + path + "'");
}

}  // namespace pulse
