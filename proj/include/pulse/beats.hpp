#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/peaks.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

using BeatBounds = std::vector<std::pair<std::size_t, std::size_t>>;

/// Ensemble-average beat template at the record's median beat length,
/// peak-normalized to max |sample| = 1.
struct BeatTemplate {
  std::vector<double> samples;
  std::size_t beat_count_used = 0;
};

struct BeatQuality {
  std::vector<double> per_beat;  // each in [0,1]
};

/// Beat boundaries from detected peaks: bounds at midpoints between
/// successive peaks, extended by half the median interval at the ends and
/// clipped to the signal extent. Beats tile the detected span contiguously.
inline BeatBounds segment_beats_from_peaks(const PeakSet& peaks, std::size_t length) {
  if (peaks.size() < 3)
    throw InsufficientDataError("need at least 3 detected pulses to segment beats");
  std::vector<std::size_t> intervals;
  for (std::size_t i = 1; i < peaks.size(); ++i)
    intervals.push_back(peaks.indices[i] - peaks.indices[i - 1]);
  std::vector<std::size_t> sorted = intervals;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t median_interval = sorted[sorted.size() / 2];

  std::vector<std::size_t> bounds;
  const std::size_t first = peaks.indices.front();
  bounds.push_back(first >= median_interval / 2 ? first - median_interval / 2 : 0);
  for (std::size_t i = 1; i < peaks.size(); ++i)
    bounds.push_back((peaks.indices[i - 1] + peaks.indices[i]) / 2);
  bounds.push_back(std::min(length, peaks.indices.back() + median_interval / 2 + 1));

  BeatBounds out;
  for (std::size_t i = 1; i < bounds.size(); ++i)
    if (bounds[i] > bounds[i - 1]) out.push_back({bounds[i - 1], bounds[i]});
  return out;
}

inline BeatBounds segment_beats(const Waveform& w) {
  return segment_beats_from_peaks(detect_peaks_ppg(w), w.size());
}

namespace detail {

inline std::vector<double> resample_linear(const std::vector<double>& x,
                                           std::size_t target_len) {
  if (x.empty() || target_len == 0) return {};
  if (x.size() == 1) return std::vector<double>(target_len, x[0]);
  std::vector<double> out(target_len);
  const double scale = static_cast<double>(x.size() - 1) /
                       static_cast<double>(target_len > 1 ? target_len - 1 : 1);
  for (std::size_t i = 0; i < target_len; ++i) {
    const double pos = static_cast<double>(i) * scale;
    const std::size_t lo = std::min(static_cast<std::size_t>(pos), x.size() - 2);
    const double frac = pos - static_cast<double>(lo);
    out[i] = x[lo] * (1.0 - frac) + x[lo + 1] * frac;
  }
  return out;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  double ma = 0.0, mb = 0.0;
  for (std::size_t i = 0; i < n; ++i) { ma += a[i]; mb += b[i]; }
  ma /= static_cast<double>(n);
  mb /= static_cast<double>(n);
  double num = 0.0, da = 0.0, db = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  if (da <= 0.0 || db <= 0.0) return 0.0;  // zero variance: quality 0
  return num / std::sqrt(da * db);
}

}  // namespace detail

/// Each beat is linearly resampled to the median beat length, pointwise
/// averaged, and peak-normalized.
inline BeatTemplate build_template(const std::vector<std::vector<double>>& beats) {
  if (beats.size() < 3)
    throw InsufficientDataError("need at least 3 beats for a template");
  std::vector<std::size_t> lengths;
  for (const auto& b : beats) {
    if (b.empty()) throw DimensionError("empty beat");
    lengths.push_back(b.size());
  }
  std::sort(lengths.begin(), lengths.end());
  const std::size_t target = lengths[lengths.size() / 2];

  std::vector<double> avg(target, 0.0);
  for (const auto& b : beats) {
    const auto r = detail::resample_linear(b, target);
    for (std::size_t i = 0; i < target; ++i) avg[i] += r[i];
  }
  for (double& v : avg) v /= static_cast<double>(beats.size());

  double peak = 0.0;
  for (double v : avg) peak = std::max(peak, std::abs(v));
  const auto [mn, mx] = std::minmax_element(avg.begin(), avg.end());
  if (peak <= 0.0 || *mx - *mn <= 0.0)
    throw InsufficientDataError("flat template: beats have no variance");
  for (double& v : avg) v /= peak;
  return {std::move(avg), beats.size()};
}

/// DTW alignment of a beat onto the template length (warping-path
/// projection onto template indices, averaging many-to-one matches),
/// followed by Pearson correlation clamped to [0,1]. The warping path is
/// confined to a band around the diagonal and may not take two
/// consecutive non-diagonal steps (local slope between 1/2 and 2) — an
/// unconstrained path lets arbitrary noise mimic any smooth template.
inline double dtw_quality(const std::vector<double>& beat,
                          const std::vector<double>& tmpl,
                          double band_frac = 0.12) {
  if (beat.empty() || tmpl.empty())
    throw DimensionError("dtw_quality requires non-empty inputs");
  const std::size_t n = beat.size();
  const std::size_t m = tmpl.size();
  const double inf = 1e300;
  const double band =
      std::max(2.0, band_frac * static_cast<double>(std::max(n, m)));

  // dp[i][j][s]: best cost reaching (i,j) where s is the arriving step
  // (0=diag, 1=up/beat advance, 2=left/template advance). Up and left may
  // only follow a diagonal step.
  std::vector<std::vector<std::array<double, 3>>> dp(
      n + 1, std::vector<std::array<double, 3>>(m + 1, {inf, inf, inf}));
  dp[1][1] = {(beat[0] - tmpl[0]) * (beat[0] - tmpl[0]), inf, inf};
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      if (i == 1 && j == 1) continue;
      const double center = static_cast<double>(i) * static_cast<double>(m) /
                            static_cast<double>(n);
      if (std::abs(static_cast<double>(j) - center) > band) continue;
      const double d = beat[i - 1] - tmpl[j - 1];
      const double c = d * d;
      const auto& diag = dp[i - 1][j - 1];
      dp[i][j][0] = c + std::min({diag[0], diag[1], diag[2]});
      dp[i][j][1] = c + dp[i - 1][j][0];
      dp[i][j][2] = c + dp[i][j - 1][0];
    }
  }
  const auto& end = dp[n][m];
  if (std::min({end[0], end[1], end[2]}) >= inf) {
    // No admissible warp (extreme length mismatch): fall back to a plain
    // linear resample.
    return std::clamp(detail::pearson(detail::resample_linear(beat, m), tmpl),
                      0.0, 1.0);
  }

  // Backtrack, accumulating beat samples per template index.
  std::vector<double> sum(m, 0.0);
  std::vector<std::size_t> count(m, 0);
  std::size_t i = n, j = m;
  std::size_t s = 0;
  for (std::size_t k = 1; k < 3; ++k)
    if (end[k] < end[s]) s = k;
  while (i > 0 && j > 0) {
    sum[j - 1] += beat[i - 1];
    ++count[j - 1];
    const std::size_t arrived = s;
    if (arrived == 0) {
      const auto& prev = dp[i - 1][j - 1];
      s = 0;
      for (std::size_t k = 1; k < 3; ++k)
        if (prev[k] < prev[s]) s = k;
      --i; --j;
    } else if (arrived == 1) {
      s = 0;
      --i;
    } else {
      s = 0;
      --j;
    }
  }
  std::vector<double> aligned(m);
  for (std::size_t k = 0; k < m; ++k)
    aligned[k] = count[k] > 0 ? sum[k] / static_cast<double>(count[k]) : 0.0;

  const double r = detail::pearson(aligned, tmpl);
  return std::clamp(r, 0.0, 1.0);
}

struct PpgAcceptResult {
  bool accepted = false;
  BeatQuality quality;
  std::size_t beat_count = 0;
};

/// Threshold arithmetic shared with ppg_accept: accepted iff the number of
/// beats with quality strictly above the threshold is at least
/// good_fraction * beat count.
inline bool accept_by_quality(const std::vector<double>& qualities,
                              double good_fraction = 0.95,
                              double quality_threshold = 0.5) {
  if (qualities.empty()) throw InsufficientDataError("no beat qualities");
  std::size_t good = 0;
  for (double q : qualities)
    if (q > quality_threshold) ++good;
  return static_cast<double>(good) >=
         good_fraction * static_cast<double>(qualities.size());
}

/// Accepted iff at least 95% of beats have quality > 0.5.
inline PpgAcceptResult ppg_accept(const Waveform& w,
                                  double good_fraction = 0.95,
                                  double quality_threshold = 0.5) {
  const BeatBounds bounds = segment_beats(w);
  std::vector<std::vector<double>> beats;
  for (const auto& [lo, hi] : bounds)
    beats.emplace_back(w.samples.begin() + static_cast<std::ptrdiff_t>(lo),
                       w.samples.begin() + static_cast<std::ptrdiff_t>(hi));
  const BeatTemplate tmpl = build_template(beats);

  PpgAcceptResult out;
  out.beat_count = beats.size();
  for (const auto& b : beats)
    out.quality.per_beat.push_back(dtw_quality(b, tmpl.samples));
  out.accepted = accept_by_quality(out.quality.per_beat, good_fraction,
                                   quality_threshold);
  return out;
}

}  // namespace pulse
