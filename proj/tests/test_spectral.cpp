#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "pulse/fft.hpp"
#include "pulse/rng.hpp"
#include "pulse/welch.hpp"

using namespace pulse;

namespace {

// O(n^2) reference DFT.
std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  const double pi = 3.14159265358979323846;
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> s = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * pi * static_cast<double>(k * t) / static_cast<double>(n);
      s += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = s;
  }
  return out;
}

}  // namespace

TEST_CASE("fft matches the naive DFT for power-of-two and arbitrary sizes") {
  Rng rng(1);
  for (std::size_t n : {1u, 2u, 8u, 16u, 15u, 17u, 100u, 243u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto fast = fft(x);
    const auto slow = naive_dft(x);
    for (std::size_t k = 0; k < n; ++k)
      REQUIRE(std::abs(fast[k] - slow[k]) < 1e-9 * (1.0 + std::abs(slow[k])));
  }
}

TEST_CASE("inverse fft round-trips") {
  Rng rng(2);
  for (std::size_t n : {8u, 30u, 101u}) {
    std::vector<double> x(n);
    for (auto& v : x) v = rng.uniform(-1, 1);
    const auto back = ifft_real(fft_real(x));
    for (std::size_t i = 0; i < n; ++i)
      REQUIRE(back[i] == Catch::Approx(x[i]).margin(1e-10));
  }
}

TEST_CASE("fft of empty sequence throws") {
  REQUIRE_THROWS_AS(fft({}), ParameterError);
}

TEST_CASE("welch peak lands on a 1.2 Hz sinusoid") {
  Waveform w;
  w.id = "sine";
  const double f0 = 1.2;
  for (int i = 0; i < 6000; ++i)
    w.samples.push_back(std::sin(2.0 * 3.14159265358979323846 * f0 * i / 100.0));
  const auto spec = welch_periodogram(w, 2048, 0.5);
  std::size_t argmax = 0;
  for (std::size_t k = 1; k < spec.power.size(); ++k)
    if (spec.power[k] > spec.power[argmax]) argmax = k;
  REQUIRE(spec.freqs[argmax] == Catch::Approx(f0).margin(100.0 / 2048.0));
}

TEST_CASE("welch white-noise spectrum is flat") {
  Waveform w;
  w.id = "noise";
  Rng rng(3);
  for (int i = 0; i < 60000; ++i) w.samples.push_back(rng.normal());
  const auto spec = welch_periodogram(w, 1024, 0.5);
  // Exclude DC/Nyquist, compare each band average to the global mean.
  double mean = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 1; k + 1 < spec.power.size(); ++k) {
    mean += spec.power[k];
    ++count;
  }
  mean /= static_cast<double>(count);
  for (std::size_t k = 1; k + 1 < spec.power.size(); ++k)
    REQUIRE(spec.power[k] / mean == Catch::Approx(1.0).margin(0.5));
  // Parseval: integrated PSD approximates the variance (sd=1).
  double total = 0.0;
  const double df = spec.freqs[1] - spec.freqs[0];
  for (double p : spec.power) total += p * df;
  REQUIRE(total == Catch::Approx(1.0).margin(0.05));
}

TEST_CASE("welch DC offset concentrates in bin zero") {
  Waveform w;
  w.id = "dc";
  w.samples.assign(4096, 2.5);
  const auto spec = welch_periodogram(w, 1024, 0.5);
  for (std::size_t k = 3; k < spec.power.size(); ++k)
    REQUIRE(spec.power[k] < 1e-12 * spec.power[0]);
}

TEST_CASE("welch parameter validation") {
  Waveform w;
  w.samples.assign(100, 0.0);
  REQUIRE_THROWS_AS(welch_periodogram(w, 0), ParameterError);
  REQUIRE_THROWS_AS(welch_periodogram(w, 200), ParameterError);
  REQUIRE_THROWS_AS(welch_periodogram(w, 50, 1.0), ParameterError);
}
