#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pulse/missingness.hpp"
#include "pulse/model/train.hpp"
#include "pulse/synth.hpp"

using namespace pulse;

namespace {

std::vector<AblationCase> toy_dataset(int n, std::size_t len, double frac) {
  std::vector<AblationCase> out;
  for (int i = 0; i < n; ++i) {
    SynthConfig cfg;
    cfg.duration_s = static_cast<double>(len) / 100.0;
    cfg.beat_rate_bpm = 75.0;
    cfg.seed = static_cast<std::uint64_t>(i);
    auto w = generate(cfg).waveform;
    w.samples.resize(len);
    out.push_back(apply_mask(w, extended_mask(len, frac, static_cast<std::uint64_t>(50 + i))));
  }
  return out;
}

AttentionStackConfig toy_model_cfg() {
  AttentionStackConfig cfg;
  cfg.d_x = 8;
  cfg.d = 8;
  cfg.qk_kind = QkKind::kBdc;
  cfg.dilations = {1, 2};
  cfg.bottleneck_dim = 2;
  cfg.ffn_dim = 16;
  cfg.filter_size = 5;
  return cfg;
}

}  // namespace

TEST_CASE("block treatment frequencies match the 80/10/10 policy") {
  MPCMaskPolicy policy;
  std::vector<double> gt(100, 0.5);
  // 10 missing blocks per call, many seeds -> >= 10k draws.
  MissingnessMask mask({{0, 5},  {1, 5}, {0, 5}, {1, 5}, {0, 5}, {1, 5}, {0, 5},
                        {1, 5},  {0, 5}, {1, 5}, {0, 5}, {1, 5}, {0, 5}, {1, 5},
                        {0, 5},  {1, 5}, {0, 5}, {1, 5}, {0, 5}, {1, 5}});
  std::size_t n_zero = 0, n_sin = 0, n_keep = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 1200; ++seed) {
    const auto r = mpc_ablate(gt, mask, policy, seed);
    for (auto t : r.treatments) {
      ++total;
      if (t == MpcTreatment::kZero) ++n_zero;
      if (t == MpcTreatment::kSinusoid) ++n_sin;
      if (t == MpcTreatment::kKeep) ++n_keep;
    }
  }
  REQUIRE(total >= 10000);
  const double n = static_cast<double>(total);
  REQUIRE(static_cast<double>(n_zero) / n == Catch::Approx(0.8).margin(0.01));
  REQUIRE(static_cast<double>(n_sin) / n == Catch::Approx(0.1).margin(0.01));
  REQUIRE(static_cast<double>(n_keep) / n == Catch::Approx(0.1).margin(0.01));
}

TEST_CASE("zeroed blocks are zero, kept blocks untouched, observed never changes") {
  MPCMaskPolicy policy;
  std::vector<double> gt;
  for (int i = 0; i < 300; ++i) gt.push_back(0.5 + 0.4 * std::sin(0.1 * i));
  MissingnessMask mask({{1, 100}, {0, 100}, {1, 100}});
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto r = mpc_ablate(gt, mask, policy, seed);
    REQUIRE(r.treatments.size() == 1);
    for (std::size_t i = 0; i < 100; ++i) REQUIRE(r.input[i] == gt[i]);
    for (std::size_t i = 200; i < 300; ++i) REQUIRE(r.input[i] == gt[i]);
    switch (r.treatments[0]) {
      case MpcTreatment::kZero:
        for (std::size_t i = 100; i < 200; ++i) REQUIRE(r.input[i] == 0.0);
        break;
      case MpcTreatment::kKeep:
        for (std::size_t i = 100; i < 200; ++i) REQUIRE(r.input[i] == gt[i]);
        break;
      case MpcTreatment::kSinusoid: {
        // Additive perturbation bounded by half the configured range fraction.
        double range = 0.0;
        double lo = gt[0], hi = gt[0];
        for (double v : gt) { lo = std::min(lo, v); hi = std::max(hi, v); }
        range = hi - lo;
        for (std::size_t i = 100; i < 200; ++i)
          REQUIRE(std::abs(r.input[i] - gt[i]) <= 0.5 * range + 1e-12);
        break;
      }
    }
  }
}

TEST_CASE("mpc validation") {
  MPCMaskPolicy bad;
  bad.p_zero = 0.9;  // sums to 1.1
  std::vector<double> gt(10, 0.0);
  REQUIRE_THROWS_AS(mpc_ablate(gt, MissingnessMask({{0, 10}}), bad, 0), ConfigError);
  MPCMaskPolicy ok;
  REQUIRE_THROWS_AS(mpc_ablate(gt, MissingnessMask({{0, 5}}), ok, 0), DimensionError);
}

TEST_CASE("masked loss counts only missing positions") {
  Mat out(4, 1);
  out(0, 0) = 1.0; out(1, 0) = 5.0; out(2, 0) = 2.0; out(3, 0) = 0.0;
  const std::vector<double> target = {1.0, 2.0, 4.0, 9.0};
  const std::vector<bool> present = {true, false, false, true};
  Mat d;
  const double loss = masked_l2_loss(out, target, present, d);
  REQUIRE(loss == Catch::Approx((9.0 + 4.0) / 2.0));
  REQUIRE(d(0, 0) == 0.0);
  REQUIRE(d(1, 0) == Catch::Approx(2.0 * 3.0 / 2.0));
  REQUIRE(d(2, 0) == Catch::Approx(2.0 * -2.0 / 2.0));
  REQUIRE(d(3, 0) == 0.0);
  REQUIRE_THROWS_AS(
      masked_l2_loss(out, target, std::vector<bool>(4, true), d), ParameterError);
}

TEST_CASE("adam minimizes a quadratic") {
  ParamSet p;
  auto& t = p.add("x", {2});
  t.data = {5.0, -3.0};
  AdamConfig cfg;
  cfg.lr = 0.1;
  Adam opt(p, cfg);
  for (int i = 0; i < 500; ++i) {
    t.grad[0] = 2.0 * t.data[0];
    t.grad[1] = 2.0 * t.data[1];
    opt.step();
  }
  REQUIRE(std::abs(t.data[0]) < 1e-2);
  REQUIRE(std::abs(t.data[1]) < 1e-2);
}

TEST_CASE("training is deterministic per seed") {
  const auto data = toy_dataset(4, 200, 0.3);
  TrainConfig tc;
  tc.steps = 10;
  tc.batch_size = 2;
  tc.seed = 42;
  Model a(toy_model_cfg()), b(toy_model_cfg());
  const auto ta = train(a, data, tc);
  const auto tb = train(b, data, tc);
  REQUIRE(ta.loss == tb.loss);
  for (std::size_t i = 0; i < a.params().tensors.size(); ++i)
    REQUIRE(a.params().tensors[i].data == b.params().tensors[i].data);
  tc.seed = 43;
  Model c(toy_model_cfg());
  REQUIRE(train(c, data, tc).loss != ta.loss);
}

TEST_CASE("training reduces the loss on a small dataset") {
  const auto data = toy_dataset(4, 200, 0.3);
  TrainConfig tc;
  tc.steps = 150;
  tc.batch_size = 2;
  tc.seed = 1;
  tc.adam.lr = 3e-3;
  Model m(toy_model_cfg());
  const auto trace = train(m, data, tc);
  REQUIRE(trace.loss.size() == 150);
  double early = 0.0, late = 0.0;
  for (int i = 0; i < 10; ++i) early += trace.loss[static_cast<std::size_t>(i)];
  for (int i = 140; i < 150; ++i) late += trace.loss[static_cast<std::size_t>(i)];
  REQUIRE(late < 0.5 * early);
}

TEST_CASE("divergent training aborts") {
  const auto data = toy_dataset(2, 200, 0.3);
  TrainConfig tc;
  tc.steps = 400;
  tc.batch_size = 2;
  tc.seed = 2;
  tc.adam.lr = 5.0;  // absurd step size
  tc.divergence_factor = 2.0;
  Model m(toy_model_cfg());
  REQUIRE_THROWS_AS(train(m, data, tc), Error);
}

TEST_CASE("training rejects an empty dataset") {
  Model m(toy_model_cfg());
  REQUIRE_THROWS_AS(train(m, {}, TrainConfig{}), ParameterError);
}
