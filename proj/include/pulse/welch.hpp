#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/fft.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

enum class SpectralWindow { kHann, kRectangular };

struct Spectrum {
  std::vector<double> freqs;  // Hz
  std::vector<double> power;  // one-sided PSD
};

/// Welch's averaged periodogram. Segments are windowed, overlapped, and
/// their one-sided PSDs averaged with density scaling 1/(fs * sum(w^2)),
/// which keeps the estimate Parseval-consistent.
inline Spectrum welch_periodogram(const Waveform& w, std::size_t segment_len = 2048,
                                  double overlap_frac = 0.5,
                                  SpectralWindow window = SpectralWindow::kHann) {
  const std::size_t n = w.size();
  if (segment_len == 0 || segment_len > n)
    throw ParameterError("welch segment length must be in [1, signal length]");
  if (overlap_frac < 0.0 || overlap_frac >= 1.0)
    throw ParameterError("welch overlap must be in [0, 1)");

  const double fs = static_cast<double>(w.sample_rate_hz);
  const double pi = 3.14159265358979323846;
  std::vector<double> win(segment_len);
  double win_power = 0.0;
  for (std::size_t i = 0; i < segment_len; ++i) {
    win[i] = window == SpectralWindow::kHann
                 ? 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) /
                                         static_cast<double>(segment_len)))
                 : 1.0;
    win_power += win[i] * win[i];
  }

  std::size_t hop = static_cast<std::size_t>(
      std::llround(static_cast<double>(segment_len) * (1.0 - overlap_frac)));
  if (hop == 0) hop = 1;

  const std::size_t n_bins = segment_len / 2 + 1;
  std::vector<double> acc(n_bins, 0.0);
  std::size_t n_segments = 0;
  std::vector<std::complex<double>> buf(segment_len);
  for (std::size_t start = 0; start + segment_len <= n; start += hop) {
    for (std::size_t i = 0; i < segment_len; ++i)
      buf[i] = {w.samples[start + i] * win[i], 0.0};
    auto spec = fft(buf);
    for (std::size_t k = 0; k < n_bins; ++k) {
      double p = std::norm(spec[k]) / (fs * win_power);
      if (k != 0 && !(segment_len % 2 == 0 && k == n_bins - 1)) p *= 2.0;
      acc[k] += p;
    }
    ++n_segments;
  }
  if (n_segments == 0) {
    // segment_len == n is always reachable given the precondition
    throw ParameterError("no complete welch segment fits the signal");
  }

  Spectrum out;
  out.freqs.resize(n_bins);
  out.power.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    out.freqs[k] = fs * static_cast<double>(k) / static_cast<double>(segment_len);
    out.power[k] = acc[k] / static_cast<double>(n_segments);
  }
  return out;
}

}  // namespace pulse
