#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pulse/errors.hpp"

namespace pulse {

inline constexpr int kSampleRateHz = 100;

/// Fixed-rate univariate sample sequence; the unit of everything.
struct Waveform {
  std::vector<double> samples;
  int sample_rate_hz = kSampleRateHz;
  std::string id;
  std::optional<std::string> lead_label;

  std::size_t size() const { return samples.size(); }

  void validate() const {
    if (samples.empty()) throw DimensionError("waveform '" + id + "' is empty");
    for (double s : samples)
      if (!std::isfinite(s))
        throw FormatError("waveform '" + id + "' contains non-finite sample");
    if (sample_rate_hz <= 0)
      throw ParameterError("sample rate must be positive");
  }
};

struct MaskRun {
  int flag;            // 1 = present, 0 = missing
  std::size_t length;  // > 0

  bool operator==(const MaskRun&) const = default;
};

/// Run-length-encoded present/absent segments aligned to a waveform.
/// Always kept normalized: runs alternate flags, no zero-length runs.
class MissingnessMask {
public:
  MissingnessMask() = default;

  explicit MissingnessMask(std::vector<MaskRun> runs) {
    for (const auto& r : runs) {
      if (r.flag != 0 && r.flag != 1)
        throw FormatError("mask flag must be 0 or 1");
      if (r.length == 0) throw FormatError("mask run length must be positive");
      append(r.flag, r.length);
    }
  }

  static MissingnessMask from_dense(const std::vector<bool>& present) {
    MissingnessMask m;
    for (bool p : present) m.append(p ? 1 : 0, 1);
    return m;
  }

  std::vector<bool> to_dense() const {
    std::vector<bool> out;
    out.reserve(total_length());
    for (const auto& r : runs_)
      out.insert(out.end(), r.length, r.flag == 1);
    return out;
  }

  void append(int flag, std::size_t length) {
    if (length == 0) return;
    if (!runs_.empty() && runs_.back().flag == flag)
      runs_.back().length += length;
    else
      runs_.push_back({flag, length});
  }

  const std::vector<MaskRun>& runs() const { return runs_; }

  std::size_t total_length() const {
    std::size_t n = 0;
    for (const auto& r : runs_) n += r.length;
    return n;
  }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (const auto& r : runs_)
      if (r.flag == 0) n += r.length;
    return n;
  }

  std::size_t present_count() const { return total_length() - missing_count(); }

  double missing_fraction() const {
    const std::size_t t = total_length();
    return t == 0 ? 0.0 : static_cast<double>(missing_count()) / static_cast<double>(t);
  }

  MissingnessMask cropped(std::size_t length) const {
    if (length > total_length())
      throw DimensionError("cannot crop mask beyond its length");
    MissingnessMask out;
    std::size_t remaining = length;
    for (const auto& r : runs_) {
      if (remaining == 0) break;
      const std::size_t take = std::min(r.length, remaining);
      out.append(r.flag, take);
      remaining -= take;
    }
    return out;
  }

  /// Lengths of the missing gaps, in order.
  std::vector<std::size_t> gap_lengths() const {
    std::vector<std::size_t> out;
    for (const auto& r : runs_)
      if (r.flag == 0) out.push_back(r.length);
    return out;
  }

  bool operator==(const MissingnessMask&) const = default;

private:
  std::vector<MaskRun> runs_;
};

/// Ground truth + mask + the ablated view fed to imputers. Missing sample
/// values are set to 0 for model input; the mask is authoritative.
struct AblationCase {
  Waveform ground_truth;
  MissingnessMask mask;
  Waveform ablated;
};

inline AblationCase apply_mask(const Waveform& w, const MissingnessMask& m) {
  if (m.total_length() != w.size())
    throw DimensionError("mask length " + std::to_string(m.total_length()) +
                         " != waveform length " + std::to_string(w.size()));
  if (m.missing_count() == 0)
    throw ParameterError("mask has no missing positions; evaluation would be vacuous");
  AblationCase out{w, m, w};
  const auto dense = m.to_dense();
  for (std::size_t i = 0; i < dense.size(); ++i)
    if (!dense[i]) out.ablated.samples[i] = 0.0;
  return out;
}

enum class NormalizationMethod { kMinMax, kZScore, kNone };

struct NormalizationRecord {
  NormalizationMethod method = NormalizationMethod::kNone;
  double offset = 0.0;
  double scale = 1.0;  // positive

  double apply(double x) const { return (x - offset) / scale; }
  double invert(double y) const { return y * scale + offset; }
};

inline std::pair<Waveform, NormalizationRecord> normalize(const Waveform& w,
                                                          NormalizationMethod method) {
  NormalizationRecord rec{method, 0.0, 1.0};
  switch (method) {
    case NormalizationMethod::kNone:
      break;
    case NormalizationMethod::kMinMax: {
      const auto [lo, hi] = std::minmax_element(w.samples.begin(), w.samples.end());
      rec.offset = *lo;
      rec.scale = (*hi > *lo) ? (*hi - *lo) : 1.0;  // constant signal maps to 0
      break;
    }
    case NormalizationMethod::kZScore: {
      const double n = static_cast<double>(w.size());
      const double mean =
          std::accumulate(w.samples.begin(), w.samples.end(), 0.0) / n;
      double var = 0.0;
      for (double s : w.samples) var += (s - mean) * (s - mean);
      var /= n;
      rec.offset = mean;
      rec.scale = var > 0.0 ? std::sqrt(var) : 1.0;
      break;
    }
  }
  Waveform out = w;
  for (double& s : out.samples) s = rec.apply(s);
  return {std::move(out), rec};
}

inline Waveform denormalize(const Waveform& w, const NormalizationRecord& rec) {
  Waveform out = w;
  for (double& s : out.samples) s = rec.invert(s);
  return out;
}

}  // namespace pulse
