#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pulse/beats.hpp"
#include "pulse/ecg_screen.hpp"
#include "pulse/rng.hpp"
#include "pulse/synth.hpp"

using namespace pulse;

namespace {

Waveform white_noise(std::size_t n, double sd, std::uint64_t seed) {
  Waveform w;
  w.id = "noise";
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) w.samples.push_back(rng.normal(0.0, sd));
  return w;
}

}  // namespace

TEST_CASE("ecg screen accepts clean spike trains") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SynthConfig cfg;
    cfg.duration_s = 30.0;
    cfg.beat_rate_bpm = 60.0 + static_cast<double>(seed % 5) * 10.0;
    cfg.hrv_jitter_frac = 0.02;
    cfg.noise_sd = 0.01;
    cfg.seed = seed;
    const auto r = ecg_quality_screen(generate(cfg).waveform);
    INFO("seed " << seed);
    REQUIRE(r.verdict != ScreenVerdict::kRejected);
  }
}

TEST_CASE("ecg screen rejects white noise") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = ecg_quality_screen(white_noise(3000, 1.0, seed));
    INFO("seed " << seed);
    REQUIRE(r.verdict == ScreenVerdict::kRejected);
  }
}

TEST_CASE("ecg screen requires 30 seconds of signal") {
  SynthConfig cfg;
  cfg.duration_s = 10.0;
  REQUIRE_THROWS_AS(ecg_quality_screen(generate(cfg).waveform), ParameterError);
}

TEST_CASE("ecg screen reports harmonic structure for clean signals") {
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.beat_rate_bpm = 72.0;
  const auto r = ecg_quality_screen(generate(cfg).waveform);
  REQUIRE(r.strict_peaks.size() >= 3);
  REQUIRE(r.spacing_cv < 0.15);
  REQUIRE(r.has_peak_above_10hz);
  // Harmonic spacing tracks the beat frequency (1.2 Hz).
  std::vector<double> gaps;
  for (std::size_t i = 1; i < r.strict_peaks.size(); ++i)
    gaps.push_back(r.strict_peaks[i] - r.strict_peaks[i - 1]);
  double mean = 0.0;
  for (double g : gaps) mean += g;
  mean /= static_cast<double>(gaps.size());
  REQUIRE(mean == Catch::Approx(1.2).margin(0.1));
}

TEST_CASE("ecg screen rejects out-of-range heart rates") {
  // 20 bpm has harmonic structure but fails the physiological check.
  SynthConfig cfg;
  cfg.duration_s = 60.0;
  cfg.beat_rate_bpm = 20.0;
  const auto r = ecg_quality_screen(generate(cfg).waveform);
  REQUIRE(r.verdict == ScreenVerdict::kRejected);
}

TEST_CASE("beat segmentation tiles the detected span") {
  SynthConfig cfg;
  cfg.morphology = Morphology::kRaisedCosine;
  cfg.duration_s = 30.0;
  const auto wave = generate(cfg).waveform;
  const auto bounds = segment_beats(wave);
  REQUIRE(bounds.size() >= 25);
  for (std::size_t i = 1; i < bounds.size(); ++i)
    REQUIRE(bounds[i].first == bounds[i - 1].second);
  for (const auto& [lo, hi] : bounds) REQUIRE(hi > lo);
  REQUIRE(bounds.back().second <= wave.size());
}

TEST_CASE("beat segmentation needs at least 3 pulses") {
  PeakSet p;
  p.indices = {100, 200};
  REQUIRE_THROWS_AS(segment_beats_from_peaks(p, 1000), InsufficientDataError);
}

TEST_CASE("template building averages to the median length") {
  std::vector<std::vector<double>> beats;
  for (int k = 0; k < 5; ++k) {
    std::vector<double> b;
    const std::size_t len = 90 + static_cast<std::size_t>(k) * 5;  // median 100
    for (std::size_t i = 0; i < len; ++i)
      b.push_back(std::sin(3.14159265358979323846 * static_cast<double>(i) /
                           static_cast<double>(len - 1)));
    beats.push_back(std::move(b));
  }
  const auto tmpl = build_template(beats);
  REQUIRE(tmpl.samples.size() == 100);
  REQUIRE(tmpl.beat_count_used == 5);
  double peak = 0.0;
  for (double v : tmpl.samples) peak = std::max(peak, std::abs(v));
  REQUIRE(peak == Catch::Approx(1.0).margin(1e-12));
  REQUIRE_THROWS_AS(build_template({beats[0], beats[1]}), InsufficientDataError);
  std::vector<std::vector<double>> flat(3, std::vector<double>(50, 1.0));
  REQUIRE_THROWS_AS(build_template(flat), InsufficientDataError);
}

TEST_CASE("dtw quality of a beat against itself is 1") {
  std::vector<double> beat;
  for (int i = 0; i < 80; ++i) beat.push_back(std::sin(0.1 * i));
  REQUIRE(dtw_quality(beat, beat) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("dtw quality survives time warping") {
  std::vector<double> tmpl, warped;
  for (int i = 0; i < 100; ++i)
    tmpl.push_back(std::exp(-0.5 * std::pow((i - 50.0) / 8.0, 2)));
  // Nonlinearly resampled copy (compressed first half, stretched second).
  for (int i = 0; i < 120; ++i) {
    const double u = static_cast<double>(i) / 119.0;
    const double pos = 99.0 * u * u * (3 - 2 * u);  // smoothstep warp
    const int lo = std::min(98, static_cast<int>(pos));
    const double frac = pos - lo;
    warped.push_back(tmpl[lo] * (1 - frac) + tmpl[lo + 1] * frac);
  }
  REQUIRE(dtw_quality(warped, tmpl) > 0.99);
}

TEST_CASE("dtw quality of the negated template clamps to zero") {
  std::vector<double> tmpl;
  for (int i = 0; i < 100; ++i)
    tmpl.push_back(std::exp(-0.5 * std::pow((i - 50.0) / 8.0, 2)));
  std::vector<double> neg = tmpl;
  for (double& v : neg) v = -v;
  REQUIRE(dtw_quality(neg, tmpl) == 0.0);
}

TEST_CASE("dtw quality is invariant to positive affine rescaling") {
  std::vector<double> tmpl, scaled;
  for (int i = 0; i < 100; ++i)
    tmpl.push_back(std::exp(-0.5 * std::pow((i - 50.0) / 8.0, 2)));
  for (double v : tmpl) scaled.push_back(3.0 * v + 7.0);
  REQUIRE(dtw_quality(scaled, tmpl) == Catch::Approx(dtw_quality(tmpl, tmpl)).margin(1e-9));
}

TEST_CASE("dtw quality rejects empty inputs") {
  REQUIRE_THROWS_AS(dtw_quality({}, {1.0}), DimensionError);
  REQUIRE_THROWS_AS(dtw_quality({1.0}, {}), DimensionError);
}

TEST_CASE("acceptance threshold arithmetic: 19/20 passes, 9/10 fails") {
  std::vector<double> q19(20, 0.9);
  q19[7] = 0.1;
  REQUIRE(accept_by_quality(q19));  // 19 >= ceil(0.95*20)=19
  std::vector<double> q9(10, 0.9);
  q9[3] = 0.1;
  REQUIRE_FALSE(accept_by_quality(q9));  // 9 < 0.95*10=9.5
  // Threshold is strict: quality exactly 0.5 does not count as good.
  std::vector<double> border(20, 0.5);
  REQUIRE_FALSE(accept_by_quality(border));
  REQUIRE_THROWS_AS(accept_by_quality({}), InsufficientDataError);
}

TEST_CASE("ppg acceptance passes clean pulse trains") {
  SynthConfig cfg;
  cfg.morphology = Morphology::kRaisedCosine;
  cfg.duration_s = 30.0;
  cfg.hrv_jitter_frac = 0.05;
  cfg.seed = 9;
  const auto r = ppg_accept(generate(cfg).waveform);
  REQUIRE(r.accepted);
  for (double q : r.quality.per_beat) {
    REQUIRE(q >= 0.0);
    REQUIRE(q <= 1.0);
  }
}

TEST_CASE("ppg acceptance fails when many beats are corrupted") {
  SynthConfig cfg;
  cfg.morphology = Morphology::kRaisedCosine;
  cfg.duration_s = 30.0;
  cfg.seed = 10;
  Waveform w = generate(cfg).waveform;
  // Invert every third beat region: those beats decorrelate from the template.
  Rng rng(1);
  for (std::size_t i = 0; i < w.size(); ++i)
    if ((i / 80) % 3 == 0) w.samples[i] = rng.uniform(0.0, 1.0);
  bool rejected = false;
  try {
    rejected = !ppg_accept(w).accepted;
  } catch (const InsufficientDataError&) {
    rejected = true;  // too corrupted to even segment
  }
  REQUIRE(rejected);
}
