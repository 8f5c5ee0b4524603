#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/fft.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

enum class SampleProvenance { kObserved, kImputed };

struct ImputerOutput {
  Waveform imputed;
  std::vector<SampleProvenance> provenance;
  bool converged = true;  // only meaningful for iterative imputers
};

namespace detail {

inline std::vector<bool> observed_or_throw(const AblationCase& c) {
  const auto dense = c.mask.to_dense();
  if (dense.size() != c.ground_truth.size())
    throw DimensionError("mask/waveform length mismatch");
  if (c.mask.present_count() == 0)
    throw InsufficientDataError("no observed samples to impute from");
  return dense;
}

inline ImputerOutput make_output(const AblationCase& c, std::vector<double> samples,
                                 const std::vector<bool>& observed) {
  ImputerOutput out;
  out.imputed = c.ablated;
  out.imputed.samples = std::move(samples);
  out.provenance.resize(observed.size());
  for (std::size_t i = 0; i < observed.size(); ++i) {
    out.provenance[i] = observed[i] ? SampleProvenance::kObserved
                                    : SampleProvenance::kImputed;
    // Observed positions always pass through untouched.
    if (observed[i]) out.imputed.samples[i] = c.ablated.samples[i];
  }
  return out;
}

inline double observed_mean(const AblationCase& c, const std::vector<bool>& observed) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (observed[i]) { sum += c.ablated.samples[i]; ++count; }
  return sum / static_cast<double>(count);
}

}  // namespace detail

inline ImputerOutput mean_fill(const AblationCase& c) {
  const auto observed = detail::observed_or_throw(c);
  const double mean = detail::observed_mean(c, observed);
  std::vector<double> samples = c.ablated.samples;
  for (std::size_t i = 0; i < samples.size(); ++i)
    if (!observed[i]) samples[i] = mean;
  return detail::make_output(c, std::move(samples), observed);
}

/// Interior gaps linearly bridged; leading/trailing gaps use constant
/// extension of the nearest observed value.
inline ImputerOutput linear_interp(const AblationCase& c) {
  const auto observed = detail::observed_or_throw(c);
  const std::size_t n = observed.size();
  std::vector<double> samples = c.ablated.samples;

  std::vector<std::size_t> obs_idx;
  for (std::size_t i = 0; i < n; ++i)
    if (observed[i]) obs_idx.push_back(i);

  for (std::size_t i = 0; i < n; ++i) {
    if (observed[i]) continue;
    const auto right = std::lower_bound(obs_idx.begin(), obs_idx.end(), i);
    if (right == obs_idx.begin()) {
      samples[i] = samples[obs_idx.front()];
    } else if (right == obs_idx.end()) {
      samples[i] = samples[obs_idx.back()];
    } else {
      const std::size_t hi = *right;
      const std::size_t lo = *(right - 1);
      const double frac = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
      samples[i] = samples[lo] * (1.0 - frac) + samples[hi] * frac;
    }
  }
  return detail::make_output(c, std::move(samples), observed);
}

struct FftImputerConfig {
  std::size_t k_harmonics = 32;  // kept frequency components (conjugate sets)
  std::size_t n_iters = 500;
  double tol = 1e-6;
};

/// Iterative spectral projection: initialize the gap with the observed
/// mean, then alternate between keeping the k largest-magnitude frequency
/// components and restoring observed samples, overwriting only missing
/// positions, until the missing values settle.
inline ImputerOutput fft_impute(const AblationCase& c,
                                const FftImputerConfig& cfg = {}) {
  const auto observed = detail::observed_or_throw(c);
  const std::size_t n = observed.size();
  if (n < 2 * cfg.k_harmonics)
    throw ParameterError("signal shorter than 2 * k_harmonics");

  std::vector<double> samples = c.ablated.samples;
  const double mean = detail::observed_mean(c, observed);
  for (std::size_t i = 0; i < n; ++i)
    if (!observed[i]) samples[i] = mean;

  bool converged = false;
  for (std::size_t iter = 0; iter < cfg.n_iters && !converged; ++iter) {
    auto spectrum = fft_real(samples);
    // Select the k largest-magnitude bins in [0, n/2] and keep them with
    // their conjugate partners; zero the rest.
    std::vector<std::size_t> half_bins(n / 2 + 1);
    for (std::size_t i = 0; i < half_bins.size(); ++i) half_bins[i] = i;
    std::sort(half_bins.begin(), half_bins.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(spectrum[a]) > std::abs(spectrum[b]);
    });
    std::vector<bool> keep(n, false);
    const std::size_t k = std::min(cfg.k_harmonics, half_bins.size());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t b = half_bins[i];
      keep[b] = true;
      if (b != 0) keep[n - b] = true;
    }
    for (std::size_t i = 0; i < n; ++i)
      if (!keep[i]) spectrum[i] = {0.0, 0.0};

    const auto projected = ifft_real(spectrum);
    double max_change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (observed[i]) continue;
      max_change = std::max(max_change, std::abs(projected[i] - samples[i]));
      samples[i] = projected[i];
    }
    converged = max_change < cfg.tol;
  }

  auto out = detail::make_output(c, std::move(samples), observed);
  out.converged = converged;
  return out;
}

}  // namespace pulse
