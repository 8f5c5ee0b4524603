#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/peaks.hpp"
#include "pulse/welch.hpp"

namespace pulse {

enum class ScreenVerdict { kClean, kRescued, kRejected };

struct EcgScreenConfig {
  // Short enough that a 30 s record still averages ~4 segments; with a
  // single segment the periodogram noise floor drowns the peak test.
  std::size_t welch_segment = 1024;
  double welch_overlap = 0.5;
  double min_freq_hz = 0.3;          // ignore DC / baseline drift region
  double strict_min_dist_hz = 0.6;
  double relaxed_min_dist_hz = 0.3;
  double power_rel_floor = 1e-3;     // candidate power vs max power
  double power_median_mult = 5.0;    // candidate power vs median power
  double spacing_cv_max = 0.15;      // "regularly spaced"
  double harmonic_freq_hz = 10.0;    // need a peak above this
  double rescue_new_frac = 0.5;      // relaxed adds at most 50% more peaks
  double rescue_far_hz = 1.0;        // ...or new peaks are at least this far
  double hr_min_bpm = 30.0;
  double hr_max_bpm = 180.0;
};

struct PeriodogramReport {
  std::vector<double> freqs;
  std::vector<double> power;
  std::vector<double> strict_peaks;   // Hz
  std::vector<double> relaxed_peaks;  // Hz
  double spacing_cv = 0.0;
  bool has_peak_above_10hz = false;
  ScreenVerdict verdict = ScreenVerdict::kRejected;
};

namespace detail {

// Peak detection on the periodogram: local maxima above a power floor,
// greedily thinned by minimum frequency distance (strongest first).
inline std::vector<double> periodogram_peaks(const Spectrum& spec,
                                             double min_dist_hz,
                                             const EcgScreenConfig& cfg) {
  std::vector<double> band_power;
  for (std::size_t i = 0; i < spec.freqs.size(); ++i)
    if (spec.freqs[i] >= cfg.min_freq_hz) band_power.push_back(spec.power[i]);
  if (band_power.empty()) return {};
  const double max_p = *std::max_element(band_power.begin(), band_power.end());
  const double med_p = quantile(band_power, 0.5);
  const double floor =
      std::max(cfg.power_rel_floor * max_p, cfg.power_median_mult * med_p);

  std::vector<std::size_t> cands;
  for (std::size_t i = 1; i + 1 < spec.power.size(); ++i) {
    if (spec.freqs[i] < cfg.min_freq_hz) continue;
    if (spec.power[i] > spec.power[i - 1] && spec.power[i] >= spec.power[i + 1] &&
        spec.power[i] >= floor)
      cands.push_back(i);
  }
  std::sort(cands.begin(), cands.end(), [&](std::size_t a, std::size_t b) {
    return spec.power[a] > spec.power[b];
  });
  std::vector<double> accepted;
  for (std::size_t c : cands) {
    const double f = spec.freqs[c];
    bool ok = true;
    for (double g : accepted)
      if (std::abs(f - g) < min_dist_hz) { ok = false; break; }
    if (ok) accepted.push_back(f);
  }
  std::sort(accepted.begin(), accepted.end());
  return accepted;
}

// Drops interior peaks that split one harmonic gap in two: if a peak's
// adjacent gaps sum to roughly the median gap, the peak is a sideband
// artifact, not part of the harmonic comb.
inline std::vector<double> harmonic_cleanup(std::vector<double> freqs) {
  bool changed = true;
  while (changed && freqs.size() >= 4) {
    changed = false;
    std::vector<double> gaps;
    for (std::size_t i = 1; i < freqs.size(); ++i)
      gaps.push_back(freqs[i] - freqs[i - 1]);
    std::vector<double> sorted = gaps;
    std::sort(sorted.begin(), sorted.end());
    const double med = sorted[sorted.size() / 2];
    for (std::size_t i = 1; i + 1 < freqs.size(); ++i) {
      const double merged = gaps[i - 1] + gaps[i];
      if (gaps[i - 1] < 0.75 * med && gaps[i] < 0.75 * med &&
          std::abs(merged - med) < 0.3 * med) {
        freqs.erase(freqs.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
        break;
      }
    }
  }
  return freqs;
}

// Regularity of the peak comb: every gap should sit near an integer
// multiple of a common unit spacing (a missing comb tooth doubles a gap
// without making the comb irregular). Returns the rms deviation from the
// fitted comb, relative to the unit.
inline double spacing_cv(const std::vector<double>& freqs) {
  if (freqs.size() < 3) return 1e9;
  std::vector<double> gaps;
  for (std::size_t i = 1; i < freqs.size(); ++i)
    gaps.push_back(freqs[i] - freqs[i - 1]);
  std::vector<double> sorted = gaps;
  std::sort(sorted.begin(), sorted.end());
  double unit = sorted[sorted.size() / 2];
  if (unit <= 0.0) return 1e9;
  // One least-squares refinement of the unit given the multiplicities.
  for (int pass = 0; pass < 2; ++pass) {
    double num = 0.0, den = 0.0;
    for (double g : gaps) {
      const double k = std::max(1.0, std::round(g / unit));
      num += k * g;
      den += k * k;
    }
    unit = num / den;
  }
  double ss = 0.0;
  for (double g : gaps) {
    const double k = std::max(1.0, std::round(g / unit));
    const double r = g - k * unit;
    ss += r * r;
  }
  return std::sqrt(ss / static_cast<double>(gaps.size())) / unit;
}

}  // namespace detail

/// Periodogram test battery for ECG cleanliness: strict pass on regularly
/// spaced harmonic peaks reaching past 10 Hz, rescue pass with a relaxed
/// minimum peak distance, and a final time-domain heart-rate range check.
inline PeriodogramReport ecg_quality_screen(const Waveform& w,
                                            const EcgScreenConfig& cfg = {}) {
  const double fs = static_cast<double>(w.sample_rate_hz);
  if (static_cast<double>(w.size()) < 30.0 * fs)
    throw ParameterError("ecg screen needs at least 30 s of signal");

  const std::size_t seg = std::min(cfg.welch_segment, w.size());
  const Spectrum spec = welch_periodogram(w, seg, cfg.welch_overlap);

  PeriodogramReport report;
  report.freqs = spec.freqs;
  report.power = spec.power;
  report.strict_peaks = detail::harmonic_cleanup(
      detail::periodogram_peaks(spec, cfg.strict_min_dist_hz, cfg));
  report.relaxed_peaks = detail::periodogram_peaks(spec, cfg.relaxed_min_dist_hz, cfg);
  report.spacing_cv = detail::spacing_cv(report.strict_peaks);
  for (double f : report.relaxed_peaks)
    if (f > cfg.harmonic_freq_hz) report.has_peak_above_10hz = true;

  const bool strict_high = std::any_of(
      report.strict_peaks.begin(), report.strict_peaks.end(),
      [&](double f) { return f > cfg.harmonic_freq_hz; });

  bool passed = false;
  if (report.strict_peaks.size() >= 3 && report.spacing_cv < cfg.spacing_cv_max &&
      strict_high) {
    report.verdict = ScreenVerdict::kClean;
    passed = true;
  } else if (report.strict_peaks.size() >= 3 && report.has_peak_above_10hz) {
    // Rescue pass: compare relaxed peaks to strict ones.
    std::vector<double> new_peaks;
    for (double f : report.relaxed_peaks) {
      bool is_old = false;
      for (double g : report.strict_peaks)
        if (std::abs(f - g) < 1e-9) { is_old = true; break; }
      if (!is_old) new_peaks.push_back(f);
    }
    const bool few = static_cast<double>(new_peaks.size()) <=
                     cfg.rescue_new_frac *
                         static_cast<double>(report.strict_peaks.size());
    bool far = !new_peaks.empty();
    for (double f : new_peaks) {
      double d = 1e18;
      for (double g : report.strict_peaks) d = std::min(d, std::abs(f - g));
      if (d < cfg.rescue_far_hz) far = false;
    }
    if (few || far) {
      report.verdict = ScreenVerdict::kRescued;
      passed = true;
    }
  }

  if (passed) {
    // Physiological heart-rate check on the time-domain signal.
    const PeakSet peaks = detect_peaks_ecg(w);
    const double duration_s = static_cast<double>(w.size()) / fs;
    const double hr = static_cast<double>(peaks.size()) / duration_s * 60.0;
    if (hr < cfg.hr_min_bpm || hr > cfg.hr_max_bpm)
      report.verdict = ScreenVerdict::kRejected;
  } else {
    report.verdict = ScreenVerdict::kRejected;
  }
  return report;
}

}  // namespace pulse
