#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

enum class Morphology {
  kGaussSpike,     // ECG-like: sharp main bump + smaller trailing bump
  kRaisedCosine,   // PPG-like: smooth pulse
};

struct SynthConfig {
  double duration_s = 10.0;
  int rate_hz = kSampleRateHz;
  double beat_rate_bpm = 60.0;
  double hrv_jitter_frac = 0.0;  // in [0, 0.3], per-beat period jitter
  Morphology morphology = Morphology::kGaussSpike;
  double noise_sd = 0.0;
  std::uint64_t seed = 0;
};

struct SynthResult {
  Waveform waveform;
  std::vector<std::size_t> true_peaks;  // sorted sample indices
};

// Deterministic quasiperiodic pulse train. Peak placement uses the
// xoshiro256++ stream from rng.hpp so peak sequences reproduce across
// implementations given the seed. Beat periods are rounded to integer
// sample counts; with zero jitter the output is exactly periodic away
// from the record boundaries.
inline SynthResult generate(const SynthConfig& cfg) {
  if (cfg.beat_rate_bpm <= 0.0) throw ParameterError("beat rate must be positive");
  if (cfg.hrv_jitter_frac < 0.0 || cfg.hrv_jitter_frac > 0.3)
    throw ParameterError("hrv_jitter_frac must be in [0, 0.3]");
  if (cfg.noise_sd < 0.0) throw ParameterError("noise_sd must be nonnegative");
  // Checked before the sample-count cast: a negative duration would wrap
  // around to an enormous unsigned length.
  if (cfg.duration_s <= 0.0) throw ParameterError("duration must be positive");
  const double rate = static_cast<double>(cfg.rate_hz);
  const double nominal_period = rate * 60.0 / cfg.beat_rate_bpm;
  const std::size_t n =
      static_cast<std::size_t>(std::llround(cfg.duration_s * rate));
  if (static_cast<double>(n) < 2.0 * nominal_period)
    throw ParameterError("duration must cover at least 2 nominal beat periods");

  Rng rng(cfg.seed);

  std::vector<std::size_t> peaks;
  double pos = std::round(nominal_period / 2.0);
  while (pos < static_cast<double>(n)) {
    peaks.push_back(static_cast<std::size_t>(pos));
    const double jitter =
        cfg.hrv_jitter_frac > 0.0
            ? rng.uniform(-cfg.hrv_jitter_frac, cfg.hrv_jitter_frac)
            : 0.0;
    pos += std::round(nominal_period * (1.0 + jitter));
  }

  Waveform w;
  w.sample_rate_hz = cfg.rate_hz;
  w.id = "synth-" + std::to_string(cfg.seed);
  w.samples.assign(n, 0.0);

  if (cfg.morphology == Morphology::kGaussSpike) {
    // Main bump sigma 20 ms amp 1.0; secondary bump sigma 40 ms amp 0.2
    // trailing by 200 ms. Sharp enough that periodogram harmonics extend
    // past 10 Hz.
    const double sigma_main = 0.020 * rate;
    const double sigma_sec = 0.040 * rate;
    const double lag_sec = 0.200 * rate;
    const int reach = static_cast<int>(std::ceil(lag_sec + 8.0 * sigma_sec));
    for (std::size_t p : peaks) {
      const int c = static_cast<int>(p);
      for (int t = c - reach; t <= c + reach; ++t) {
        if (t < 0 || t >= static_cast<int>(n)) continue;
        const double d = static_cast<double>(t - c);
        const double ds = d - lag_sec;
        w.samples[static_cast<std::size_t>(t)] +=
            std::exp(-0.5 * d * d / (sigma_main * sigma_main)) +
            0.2 * std::exp(-0.5 * ds * ds / (sigma_sec * sigma_sec));
      }
    }
  } else {
    // Raised cosine pulse spanning 60% of the nominal period.
    const double width = 0.6 * nominal_period;
    const int half = static_cast<int>(std::floor(width / 2.0));
    for (std::size_t p : peaks) {
      const int c = static_cast<int>(p);
      for (int t = c - half; t <= c + half; ++t) {
        if (t < 0 || t >= static_cast<int>(n)) continue;
        const double phase = static_cast<double>(t - c) / (width / 2.0);
        w.samples[static_cast<std::size_t>(t)] +=
            0.5 * (1.0 + std::cos(3.14159265358979323846 * phase));
      }
    }
  }

  if (cfg.noise_sd > 0.0)
    for (double& s : w.samples) s += rng.normal(0.0, cfg.noise_sd);

  return {std::move(w), std::move(peaks)};
}

}  // namespace pulse
