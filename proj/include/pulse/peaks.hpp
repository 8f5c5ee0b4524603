#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

/// Strictly increasing heartbeat sample indices.
struct PeakSet {
  std::vector<std::size_t> indices;

  std::size_t size() const { return indices.size(); }
  bool empty() const { return indices.empty(); }
};

namespace detail {

inline double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

// Strict-left / plateau-tolerant local maxima.
inline std::vector<std::size_t> local_maxima(const std::vector<double>& y) {
  std::vector<std::size_t> out;
  const std::size_t n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (y[i] > y[i - 1]) {
      std::size_t j = i;
      while (j + 1 < n && y[j + 1] == y[i]) ++j;
      if (j + 1 < n && y[j + 1] < y[i]) out.push_back((i + j) / 2);
      i = j;
    }
  }
  return out;
}

// Topographic prominence of peak `p`: height above the higher of the two
// lowest valleys separating it from higher terrain (or the record edge).
inline double prominence(const std::vector<double>& y, std::size_t p) {
  double left_min = y[p];
  for (std::size_t i = p; i-- > 0;) {
    left_min = std::min(left_min, y[i]);
    if (y[i] > y[p]) break;
  }
  double right_min = y[p];
  for (std::size_t i = p + 1; i < y.size(); ++i) {
    right_min = std::min(right_min, y[i]);
    if (y[i] > y[p]) break;
  }
  return y[p] - std::max(left_min, right_min);
}

// Enforces a minimum spacing, keeping the stronger of two close peaks.
inline std::vector<std::size_t> enforce_refractory(
    const std::vector<std::size_t>& peaks, const std::vector<double>& score,
    std::size_t min_gap) {
  std::vector<std::size_t> out;
  for (std::size_t p : peaks) {
    if (!out.empty() && p - out.back() < min_gap) {
      if (score[p] > score[out.back()]) out.back() = p;
    } else {
      out.push_back(p);
    }
  }
  return out;
}

}  // namespace detail

struct EcgDetectorConfig {
  double integration_ms = 150.0;
  double refractory_ms = 200.0;
  double init_window_s = 2.0;
  double threshold_coef = 0.25;  // fraction of (signal - noise) estimate
};

/// QRS-style detector: band-emphasis differencing, squaring, moving-window
/// integration, adaptive threshold with refractory period. Peak locations
/// are refined to the local maximum of the raw signal.
inline PeakSet detect_peaks_ecg(const Waveform& w,
                                const EcgDetectorConfig& cfg = {}) {
  const std::size_t n = w.size();
  const double fs = static_cast<double>(w.sample_rate_hz);
  if (static_cast<double>(n) < 2.0 * fs)
    throw ParameterError("ecg detector needs at least 2 s of signal");

  // Central difference, squared.
  std::vector<double> energy(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double d = w.samples[i + 1] - w.samples[i - 1];
    energy[i] = d * d;
  }

  // Moving-window integration.
  const std::size_t win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.integration_ms / 1000.0 * fs)));
  std::vector<double> integ(n, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += energy[i];
    if (i >= win) acc -= energy[i - win];
    integ[i] = acc / static_cast<double>(win);
  }

  const double peak_max = *std::max_element(integ.begin(), integ.end());
  if (peak_max <= 0.0) return {};

  const std::size_t refractory =
      static_cast<std::size_t>(std::llround(cfg.refractory_ms / 1000.0 * fs));
  auto candidates = detail::local_maxima(integ);
  candidates = detail::enforce_refractory(candidates, integ, refractory);

  // Adaptive running estimates of signal and noise peak levels.
  const std::size_t init_n =
      std::min(n, static_cast<std::size_t>(cfg.init_window_s * fs));
  double spki =
      0.25 * *std::max_element(integ.begin(), integ.begin() + static_cast<std::ptrdiff_t>(init_n));
  double npki = 0.0;
  std::vector<std::size_t> events;
  for (std::size_t c : candidates) {
    const double v = integ[c];
    const double thr = npki + cfg.threshold_coef * (spki - npki);
    if (v > thr && v > 1e-12) {
      spki = 0.125 * v + 0.875 * spki;
      events.push_back(c);
    } else {
      npki = 0.125 * v + 0.875 * npki;
    }
  }

  // Refine each event to the raw-signal maximum inside the integration span.
  PeakSet out;
  for (std::size_t e : events) {
    const std::size_t lo = e >= win ? e - win : 0;
    const std::size_t hi = std::min(n - 1, e + win / 4);
    std::size_t best = lo;
    for (std::size_t i = lo; i <= hi; ++i)
      if (w.samples[i] > w.samples[best]) best = i;
    if (out.indices.empty() || best - out.indices.back() >= refractory)
      out.indices.push_back(best);
    else if (w.samples[best] > w.samples[out.indices.back()])
      out.indices.back() = best;
  }
  return out;
}

struct PpgDetectorConfig {
  double smooth_ms = 150.0;
  double refractory_ms = 300.0;
  double height_iqr_frac = 0.75;     // height above median, in IQR units
  double prominence_iqr_frac = 0.3;  // prominence floor, in IQR units
};

/// Smooth-pulse detector: neighbor comparison on a moving-average-smoothed
/// signal with height and prominence filters relative to the raw signal's
/// interquartile range.
inline PeakSet detect_peaks_ppg(const Waveform& w,
                                const PpgDetectorConfig& cfg = {}) {
  const std::size_t n = w.size();
  const double fs = static_cast<double>(w.sample_rate_hz);
  if (static_cast<double>(n) < 2.0 * fs)
    throw ParameterError("ppg detector needs at least 2 s of signal");

  const std::size_t win = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg.smooth_ms / 1000.0 * fs)) | 1);
  const std::size_t half = win / 2;
  std::vector<double> smooth(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += w.samples[j];
    smooth[i] = s / static_cast<double>(hi - lo + 1);
  }

  const double q25 = detail::quantile(w.samples, 0.25);
  const double q50 = detail::quantile(w.samples, 0.50);
  const double q75 = detail::quantile(w.samples, 0.75);
  const double iqr = q75 - q25;
  const double height_thr = q50 + cfg.height_iqr_frac * iqr;
  const double prom_thr = cfg.prominence_iqr_frac * iqr;

  const std::size_t refractory =
      static_cast<std::size_t>(std::llround(cfg.refractory_ms / 1000.0 * fs));
  auto candidates = detail::local_maxima(smooth);
  std::vector<std::size_t> kept;
  for (std::size_t c : candidates) {
    if (smooth[c] < height_thr) continue;
    if (detail::prominence(smooth, c) < prom_thr) continue;
    kept.push_back(c);
  }
  kept = detail::enforce_refractory(kept, smooth, refractory);

  PeakSet out;
  for (std::size_t c : kept) {
    const std::size_t lo = c >= half ? c - half : 0;
    const std::size_t hi = std::min(n - 1, c + half);
    std::size_t best = lo;
    for (std::size_t i = lo; i <= hi; ++i)
      if (w.samples[i] > w.samples[best]) best = i;
    if (out.indices.empty() || best - out.indices.back() >= refractory)
      out.indices.push_back(best);
    else if (w.samples[best] > w.samples[out.indices.back()])
      out.indices.back() = best;
  }
  return out;
}

}  // namespace pulse
