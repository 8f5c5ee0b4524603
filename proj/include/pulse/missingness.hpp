#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

inline constexpr double kDefaultBlockMs = 50.0;

/// Extended loss: one random contiguous gap of exactly ceil(p*T) samples,
/// start index uniform on [0, T - gap].
inline MissingnessMask extended_mask(std::size_t length, double p,
                                     std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw ParameterError("missingness fraction must be in [0,1]");
  if (length == 0) throw ParameterError("length must be positive");
  const std::size_t gap =
      static_cast<std::size_t>(std::ceil(p * static_cast<double>(length)));
  MissingnessMask m;
  if (gap == 0) {
    m.append(1, length);
    return m;
  }
  Rng rng(seed);
  const std::size_t start = rng.uniform_index(length - gap + 1);
  m.append(1, start);
  m.append(0, gap);
  m.append(1, length - start - gap);
  return m;
}

/// Transient loss: disjoint fixed-size blocks ablated independently with
/// probability p. The trailing partial block participates like any other.
inline MissingnessMask transient_mask(std::size_t length, double p,
                                      double block_ms, std::uint64_t seed) {
  if (p < 0.0 || p > 1.0) throw ParameterError("missingness fraction must be in [0,1]");
  if (length == 0) throw ParameterError("length must be positive");
  const std::size_t block = static_cast<std::size_t>(
      std::llround(block_ms / 1000.0 * kSampleRateHz));
  if (block == 0) throw ParameterError("block size must be >= 1 sample");
  Rng rng(seed);
  MissingnessMask m;
  for (std::size_t start = 0; start < length; start += block) {
    const std::size_t len = std::min(block, length - start);
    m.append(rng.bernoulli(p) ? 0 : 1, len);
  }
  return m;
}

/// Samples a pattern uniformly from a library of extracted masks and crops
/// it to the target length (from index 0 by default; random offset behind
/// a flag since the paper does not say).
inline MissingnessMask sample_extracted(const std::vector<MissingnessMask>& library,
                                        std::size_t length, std::uint64_t seed,
                                        bool random_offset = false) {
  if (library.empty()) throw ConfigError("extracted-mask library is empty");
  Rng rng(seed);
  const auto& pattern = library[rng.uniform_index(library.size())];
  if (pattern.total_length() < length)
    throw DimensionError("extracted pattern shorter than target length");
  if (!random_offset) return pattern.cropped(length);
  const std::size_t slack = pattern.total_length() - length;
  const std::size_t offset = slack == 0 ? 0 : rng.uniform_index(slack + 1);
  // Crop [offset, offset+length) by walking the runs.
  MissingnessMask out;
  std::size_t pos = 0;
  for (const auto& r : pattern.runs()) {
    const std::size_t run_end = pos + r.length;
    const std::size_t lo = std::max(pos, offset);
    const std::size_t hi = std::min(run_end, offset + length);
    if (hi > lo) out.append(r.flag, hi - lo);
    pos = run_end;
    if (pos >= offset + length) break;
  }
  return out;
}

/// Beat-quality missingness extraction: beats with quality < 0.5 are marked
/// missing; quality exactly 0.5 stays present.
inline MissingnessMask extract_missingness_from_quality(
    const std::vector<std::pair<std::size_t, std::size_t>>& beat_bounds,
    const std::vector<double>& qualities, std::size_t length) {
  if (beat_bounds.size() != qualities.size())
    throw DimensionError("beat bounds and qualities must align");
  std::size_t expected = 0;
  for (const auto& [lo, hi] : beat_bounds) {
    if (lo != expected || hi <= lo)
      throw FormatError("beat bounds must tile [0,T) without overlap or gaps");
    expected = hi;
  }
  if (expected != length)
    throw DimensionError("beat bounds do not cover the full length");
  MissingnessMask m;
  for (std::size_t i = 0; i < beat_bounds.size(); ++i) {
    const auto& [lo, hi] = beat_bounds[i];
    m.append(qualities[i] < 0.5 ? 0 : 1, hi - lo);
  }
  return m;
}

}  // namespace pulse
