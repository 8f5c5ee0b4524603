#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/peaks.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

struct MatchResult {
  std::size_t tp = 0, fp = 0, fn = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (true_idx, det_idx)
};

/// One-to-one tolerance-window matching: a pair is allowed iff
/// |delta| <= tol_ms/2 (window centered on the detected peak). Both index
/// lists are sorted and every window has the same width, so a left-to-right
/// sweep that pairs the current truth/detection whenever they are within
/// tolerance yields a maximum matching (standard exchange argument).
inline MatchResult match_peaks(const PeakSet& truth, const PeakSet& detected,
                               double tol_ms = 50.0,
                               int sample_rate_hz = kSampleRateHz) {
  const long long tol_samples = static_cast<long long>(
      std::floor(tol_ms / 2.0 / 1000.0 * sample_rate_hz));

  MatchResult out;
  std::size_t ti = 0, di = 0;
  while (ti < truth.size() && di < detected.size()) {
    const long long t = static_cast<long long>(truth.indices[ti]);
    const long long d = static_cast<long long>(detected.indices[di]);
    if (std::llabs(t - d) <= tol_samples) {
      out.pairs.push_back({truth.indices[ti], detected.indices[di]});
      ++ti;
      ++di;
    } else if (t < d) {
      ++ti;
    } else {
      ++di;
    }
  }
  out.tp = out.pairs.size();
  out.fn = truth.size() - out.tp;
  out.fp = detected.size() - out.tp;
  return out;
}

struct Metrics {
  double precision = 0.0;
  double sensitivity = 0.0;
  double f1 = 0.0;
};

/// 0/0 is reported as NaN, matching degenerate-detector conventions.
inline Metrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Metrics m;
  m.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : nan;
  m.sensitivity = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : nan;
  if (std::isnan(m.precision) || std::isnan(m.sensitivity) ||
      m.precision + m.sensitivity == 0.0)
    m.f1 = nan;
  else
    m.f1 = 2.0 * m.precision * m.sensitivity / (m.precision + m.sensitivity);
  return m;
}

/// Mean squared error over missing positions only.
inline double mse_missing(const AblationCase& c, const Waveform& imputed) {
  if (imputed.size() != c.ground_truth.size())
    throw DimensionError("imputed/ground-truth length mismatch");
  const auto dense = c.mask.to_dense();
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < dense.size(); ++i) {
    if (dense[i]) continue;
    const double d = imputed.samples[i] - c.ground_truth.samples[i];
    sum += d * d;
    ++count;
  }
  if (count == 0) throw ParameterError("mse_missing undefined with zero missing positions");
  return sum / static_cast<double>(count);
}

struct ConfidenceInterval {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap over waveforms: resample with replacement,
/// recompute the aggregate, take the (1-level)/2 tails.
inline ConfidenceInterval bootstrap_ci(
    std::size_t n_waveforms,
    const std::function<double(const std::vector<std::size_t>&)>& aggregate,
    std::size_t n_iter = 1000, double level = 0.95, std::uint64_t seed = 0) {
  if (n_waveforms == 0) throw ParameterError("bootstrap needs at least one waveform");
  std::vector<std::size_t> all(n_waveforms);
  for (std::size_t i = 0; i < n_waveforms; ++i) all[i] = i;
  ConfidenceInterval ci;
  ci.point = aggregate(all);

  std::vector<double> stats(n_iter);
  std::vector<std::size_t> resample(n_waveforms);
  for (std::size_t it = 0; it < n_iter; ++it) {
    Rng rng(derive_seed(seed, it));
    for (std::size_t i = 0; i < n_waveforms; ++i)
      resample[i] = rng.uniform_index(n_waveforms);
    stats[it] = aggregate(resample);
  }
  // Degenerate resamples can produce NaN aggregates (0/0 metrics); they
  // are dropped from the percentile computation.
  std::erase_if(stats, [](double v) { return std::isnan(v); });
  if (stats.empty()) {
    ci.lo = ci.hi = std::numeric_limits<double>::quiet_NaN();
    return ci;
  }
  std::sort(stats.begin(), stats.end());
  const double alpha = (1.0 - level) / 2.0;
  auto pick = [&](double q) {
    const double pos = q * static_cast<double>(stats.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, stats.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return stats[lo] * (1.0 - frac) + stats[hi] * frac;
  };
  ci.lo = pick(alpha);
  ci.hi = pick(1.0 - alpha);
  return ci;
}

enum class EvalTask { kEcgBeats, kPpgBeats, kMseOnly };

struct PerWaveformStats {
  std::string id;
  double mse_missing = 0.0;
  std::size_t tp = 0, fp = 0, fn = 0;
};

struct EvalReport {
  EvalTask task = EvalTask::kMseOnly;
  std::vector<PerWaveformStats> per_waveform;
  ConfidenceInterval mse, f1, precision, sensitivity;
  std::size_t total_tp = 0, total_fp = 0, total_fn = 0;
};

using ImputerFn = std::function<Waveform(const AblationCase&)>;

namespace detail {

inline PeakSet restrict_to_missing(const PeakSet& peaks,
                                   const std::vector<bool>& present) {
  PeakSet out;
  for (std::size_t p : peaks.indices)
    if (p < present.size() && !present[p]) out.indices.push_back(p);
  return out;
}

}  // namespace detail

/// Full evaluation protocol: the same detector defines truth (on the
/// non-ablated signal) and prediction (on the imputed signal); matching is
/// restricted to peaks inside the ablated regions, since observed spans
/// pass through imputation unchanged. Aggregates are micro-averaged
/// (pooled tp/fp/fn) with bootstrap confidence intervals over waveforms.
inline EvalReport evaluate_pipeline(const std::vector<AblationCase>& cases,
                                    const ImputerFn& imputer, EvalTask task,
                                    std::size_t bootstrap_iters = 1000,
                                    std::uint64_t seed = 0) {
  if (cases.empty()) throw ParameterError("no cases to evaluate");

  EvalReport report;
  report.task = task;
  for (const auto& c : cases) {
    const Waveform imputed = imputer(c);
    PerWaveformStats s;
    s.id = c.ground_truth.id;
    s.mse_missing = mse_missing(c, imputed);
    if (task != EvalTask::kMseOnly) {
      const PeakSet truth = task == EvalTask::kEcgBeats
                                ? detect_peaks_ecg(c.ground_truth)
                                : detect_peaks_ppg(c.ground_truth);
      const PeakSet det = task == EvalTask::kEcgBeats ? detect_peaks_ecg(imputed)
                                                      : detect_peaks_ppg(imputed);
      const auto present = c.mask.to_dense();
      const MatchResult m = match_peaks(detail::restrict_to_missing(truth, present),
                                        detail::restrict_to_missing(det, present),
                                        50.0, c.ground_truth.sample_rate_hz);
      s.tp = m.tp;
      s.fp = m.fp;
      s.fn = m.fn;
    }
    report.per_waveform.push_back(std::move(s));
  }
  for (const auto& s : report.per_waveform) {
    report.total_tp += s.tp;
    report.total_fp += s.fp;
    report.total_fn += s.fn;
  }

  const auto& pw = report.per_waveform;
  auto agg_mse = [&pw](const std::vector<std::size_t>& idx) {
    double sum = 0.0;
    for (std::size_t i : idx) sum += pw[i].mse_missing;
    return sum / static_cast<double>(idx.size());
  };
  auto agg_counts = [&pw](const std::vector<std::size_t>& idx, int which) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i : idx) { tp += pw[i].tp; fp += pw[i].fp; fn += pw[i].fn; }
    const Metrics m = compute_metrics(tp, fp, fn);
    return which == 0 ? m.f1 : which == 1 ? m.precision : m.sensitivity;
  };

  report.mse = bootstrap_ci(pw.size(), agg_mse, bootstrap_iters, 0.95, derive_seed(seed, 1));
  if (task != EvalTask::kMseOnly) {
    report.f1 = bootstrap_ci(
        pw.size(), [&](const std::vector<std::size_t>& i) { return agg_counts(i, 0); },
        bootstrap_iters, 0.95, derive_seed(seed, 2));
    report.precision = bootstrap_ci(
        pw.size(), [&](const std::vector<std::size_t>& i) { return agg_counts(i, 1); },
        bootstrap_iters, 0.95, derive_seed(seed, 3));
    report.sensitivity = bootstrap_ci(
        pw.size(), [&](const std::vector<std::size_t>& i) { return agg_counts(i, 2); },
        bootstrap_iters, 0.95, derive_seed(seed, 4));
  }
  return report;
}

}  // namespace pulse
