#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/model/checkpoint.hpp"
#include "pulse/model/model.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

// ---------------------------------------------------------------------------
// Adaptive-moment gradient descent.
// ---------------------------------------------------------------------------

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

class Adam {
public:
  Adam(ParamSet& params, AdamConfig cfg) : params_(params), cfg_(cfg) {
    for (const auto& t : params.tensors) {
      m_.emplace_back(t.size(), 0.0);
      v_.emplace_back(t.size(), 0.0);
    }
  }

  void step() {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg_.beta2, t_);
    for (std::size_t i = 0; i < params_.tensors.size(); ++i) {
      Tensor& p = params_.tensors[i];
      for (std::size_t j = 0; j < p.data.size(); ++j) {
        const double g = p.grad[j];
        m_[i][j] = cfg_.beta1 * m_[i][j] + (1.0 - cfg_.beta1) * g;
        v_[i][j] = cfg_.beta2 * v_[i][j] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m_[i][j] / bc1;
        const double vhat = v_[i][j] / bc2;
        p.data[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
      }
    }
  }

private:
  ParamSet& params_;
  AdamConfig cfg_;
  std::vector<std::vector<double>> m_, v_;
  double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Masked predictive coding: each missing block is independently zeroed,
// perturbed with an additive sinusoid, or kept.
// ---------------------------------------------------------------------------

enum class MpcTreatment { kZero, kSinusoid, kKeep };

struct MPCMaskPolicy {
  double p_zero = 0.8;
  double p_noise = 0.1;
  double p_keep = 0.1;
  double noise_amp_lo = 0.1;  // fraction of signal range
  double noise_amp_hi = 0.5;
  double noise_freq_lo_hz = 0.5;
  double noise_freq_hi_hz = 5.0;

  void validate() const {
    if (std::abs(p_zero + p_noise + p_keep - 1.0) > 1e-12)
      throw ConfigError("mpc probabilities must sum to 1");
  }
};

struct MpcResult {
  std::vector<double> input;           // training input sequence
  std::vector<MpcTreatment> treatments;  // one per missing block
};

inline MpcResult mpc_ablate(const std::vector<double>& ground_truth,
                            const MissingnessMask& mask, const MPCMaskPolicy& policy,
                            std::uint64_t seed, int sample_rate_hz = kSampleRateHz) {
  policy.validate();
  if (mask.total_length() != ground_truth.size())
    throw DimensionError("mpc mask/sequence length mismatch");
  Rng rng(seed);
  double lo = ground_truth[0], hi = ground_truth[0];
  for (double v : ground_truth) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  const double range = hi > lo ? hi - lo : 1.0;

  MpcResult out;
  out.input = ground_truth;
  std::size_t pos = 0;
  const double pi = 3.14159265358979323846;
  for (const auto& run : mask.runs()) {
    if (run.flag == 1) {
      pos += run.length;
      continue;
    }
    const double u = rng.uniform();
    MpcTreatment treat = u < policy.p_zero ? MpcTreatment::kZero
                         : u < policy.p_zero + policy.p_noise ? MpcTreatment::kSinusoid
                                                              : MpcTreatment::kKeep;
    switch (treat) {
      case MpcTreatment::kZero:
        for (std::size_t i = 0; i < run.length; ++i) out.input[pos + i] = 0.0;
        break;
      case MpcTreatment::kSinusoid: {
        const double amp = range * rng.uniform(policy.noise_amp_lo, policy.noise_amp_hi);
        const double freq = rng.uniform(policy.noise_freq_lo_hz, policy.noise_freq_hi_hz);
        const double phase = rng.uniform(0.0, 2.0 * pi);
        for (std::size_t i = 0; i < run.length; ++i) {
          const double t = static_cast<double>(pos + i) /
                           static_cast<double>(sample_rate_hz);
          out.input[pos + i] += amp * std::sin(2.0 * pi * freq * t + phase);
        }
        break;
      }
      case MpcTreatment::kKeep:
        break;
    }
    out.treatments.push_back(treat);
    pos += run.length;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training loop: L2 loss over designated-missing positions only.
// ---------------------------------------------------------------------------

struct TrainConfig {
  std::size_t steps = 2000;
  std::size_t batch_size = 4;
  AdamConfig adam;
  MPCMaskPolicy mpc;
  std::uint64_t seed = 0;
  double divergence_factor = 10.0;
  std::size_t checkpoint_every = 0;  // 0 = no periodic checkpoints
  std::string checkpoint_dir;
};

struct TrainTrace {
  std::vector<double> loss;  // one entry per step
};

inline double masked_l2_loss(const Mat& output, const std::vector<double>& target,
                             const std::vector<bool>& present, Mat& d_output) {
  d_output = Mat(output.rows, 1);
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t t = 0; t < output.rows; ++t)
    if (!present[t]) ++count;
  if (count == 0) throw ParameterError("no loss positions");
  for (std::size_t t = 0; t < output.rows; ++t) {
    if (present[t]) continue;
    const double diff = output(t, 0) - target[t];
    sum += diff * diff;
    d_output(t, 0) = 2.0 * diff / static_cast<double>(count);
  }
  return sum / static_cast<double>(count);
}

inline TrainTrace train(Model& model, const std::vector<AblationCase>& dataset,
                        const TrainConfig& cfg) {
  if (dataset.empty()) throw ParameterError("empty training dataset");
  cfg.mpc.validate();
  model.init(derive_seed(cfg.seed, 0));
  Adam opt(model.params(), cfg.adam);
  Rng sampler(derive_seed(cfg.seed, 1));

  TrainTrace trace;
  double initial_loss = -1.0;
  ModelCache cache;
  Mat d_out;
  for (std::size_t step = 0; step < cfg.steps; ++step) {
    model.params().zero_grad();
    double loss = 0.0;
    for (std::size_t b = 0; b < cfg.batch_size; ++b) {
      const auto& c = dataset[sampler.uniform_index(dataset.size())];
      const auto mpc = mpc_ablate(c.ground_truth.samples, c.mask, cfg.mpc,
                                  derive_seed(cfg.seed, 1000 + step * cfg.batch_size + b),
                                  c.ground_truth.sample_rate_hz);
      const Mat out = model.forward(mpc.input, cache);
      loss += masked_l2_loss(out, c.ground_truth.samples, c.mask.to_dense(), d_out);
      // Average the batch gradient.
      for (auto& v : d_out.v) v /= static_cast<double>(cfg.batch_size);
      model.backward(cache, d_out);
    }
    loss /= static_cast<double>(cfg.batch_size);
    trace.loss.push_back(loss);
    if (initial_loss < 0.0) initial_loss = loss;
    if (loss > cfg.divergence_factor * initial_loss && step > 10)
      throw Error("training diverged at step " + std::to_string(step) +
                  " (loss " + std::to_string(loss) + ")");
    opt.step();
    if (cfg.checkpoint_every > 0 && !cfg.checkpoint_dir.empty() &&
        (step + 1) % cfg.checkpoint_every == 0)
      save_checkpoint(cfg.checkpoint_dir + "/step" + std::to_string(step + 1) + ".ckpt",
                      model.config(), model.params());
  }
  return trace;
}

}  // namespace pulse
