#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/model/config.hpp"
#include "pulse/model/net.hpp"
#include "pulse/model/tensor.hpp"
#include "pulse/rng.hpp"
#include "pulse/waveform.hpp"

namespace pulse {

namespace detail {

struct ShapeSpec {
  std::string name;
  std::vector<std::size_t> shape;
};

inline void qk_shapes(const AttentionStackConfig& cfg, const std::string& prefix,
                      std::vector<ShapeSpec>& out) {
  const auto dx = static_cast<std::size_t>(cfg.d_x);
  const auto d = static_cast<std::size_t>(cfg.d);
  const auto f = static_cast<std::size_t>(cfg.filter_size);
  const auto b = static_cast<std::size_t>(cfg.bottleneck_dim);
  switch (cfg.qk_kind) {
    case QkKind::kVanilla:
      out.push_back({prefix + ".w", {dx, d}});
      break;
    case QkKind::kConv:
      out.push_back({prefix + ".w", {f, dx, d}});
      break;
    case QkKind::kBdc: {
      std::size_t cin = dx;
      for (std::size_t s = 0; s < cfg.dilations.size(); ++s) {
        const std::string blk = prefix + ".blk" + std::to_string(s);
        out.push_back({blk + ".down.w", {1, cin, b}});
        out.push_back({blk + ".down.b", {b}});
        out.push_back({blk + ".conv.w", {f, b, b}});
        out.push_back({blk + ".conv.b", {b}});
        cin = b;
      }
      out.push_back({prefix + ".out.w", {1, b, d}});
      out.push_back({prefix + ".out.b", {d}});
      break;
    }
  }
}

inline std::vector<ShapeSpec> attention_shapes(const AttentionStackConfig& cfg) {
  std::vector<ShapeSpec> out;
  qk_shapes(cfg, "q", out);
  qk_shapes(cfg, "k", out);
  out.push_back({"v.w", {static_cast<std::size_t>(cfg.d_x),
                         static_cast<std::size_t>(cfg.d)}});
  return out;
}

inline std::vector<ShapeSpec> model_shapes(const AttentionStackConfig& cfg) {
  cfg.validate();
  const auto dx = static_cast<std::size_t>(cfg.d_x);
  const auto d = static_cast<std::size_t>(cfg.d);
  const auto ffn = static_cast<std::size_t>(cfg.ffn_dim);
  std::vector<ShapeSpec> out;
  out.push_back({"embed.w", {static_cast<std::size_t>(cfg.embed_filter), 1, dx}});
  out.push_back({"embed.b", {dx}});
  for (int l = 0; l < cfg.n_encoder_layers; ++l) {
    const std::string p = "layer" + std::to_string(l);
    qk_shapes(cfg, p + ".q", out);
    qk_shapes(cfg, p + ".k", out);
    out.push_back({p + ".v.w", {dx, d}});
    out.push_back({p + ".ln1.gamma", {d}});
    out.push_back({p + ".ln1.beta", {d}});
    out.push_back({p + ".ffn.w1", {d, ffn}});
    out.push_back({p + ".ffn.b1", {ffn}});
    out.push_back({p + ".ffn.w2", {ffn, d}});
    out.push_back({p + ".ffn.b2", {d}});
    out.push_back({p + ".ln2.gamma", {d}});
    out.push_back({p + ".ln2.beta", {d}});
  }
  out.push_back({"out.w", {static_cast<std::size_t>(cfg.output_filter), d, 1}});
  out.push_back({"out.b", {1}});
  return out;
}

inline void init_tensor(Tensor& t, Rng& rng) {
  const bool is_gain = t.name.ends_with("gamma");
  const bool is_bias = t.name.ends_with(".b") || t.name.ends_with("beta") ||
                       t.name.ends_with(".b1") || t.name.ends_with(".b2");
  if (is_gain) {
    std::fill(t.data.begin(), t.data.end(), 1.0);
    return;
  }
  if (is_bias) {
    std::fill(t.data.begin(), t.data.end(), 0.0);
    return;
  }
  std::size_t fan_in = 1, fan_out = 1;
  if (t.shape.size() == 2) {
    fan_in = t.shape[0];
    fan_out = t.shape[1];
  } else if (t.shape.size() == 3) {
    fan_in = t.shape[0] * t.shape[1];
    fan_out = t.shape[0] * t.shape[2];
  }
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.data) v = rng.uniform(-limit, limit);
}

}  // namespace detail

/// Closed-form learnable-parameter count for a config; matches the
/// allocated tensor sizes exactly by construction.
inline std::size_t param_count(const AttentionStackConfig& cfg) {
  std::size_t n = 0;
  for (const auto& s : detail::model_shapes(cfg)) {
    std::size_t sz = 1;
    for (std::size_t dim : s.shape) sz *= dim;
    n += sz;
  }
  return n;
}

struct BdcBlockCache {
  Mat input, down_out, conv_out;  // relu output feeds the next block
};

struct QkCache {
  std::vector<BdcBlockCache> blocks;  // bdc only
  Mat stack_out;                      // bdc: relu output of last block
  Mat out;                            // final q or k, T x d
};

/// Query/key transform f_q / f_k: pointwise projection (vanilla), single
/// centered convolution (conv), or a stack of bottlenecked dilated
/// convolutions with rectified-linear nonlinearities (bdc).
inline Mat qk_forward(const AttentionStackConfig& cfg, const ParamSet& params,
                      const std::string& prefix, const Mat& x, QkCache& qc) {
  switch (cfg.qk_kind) {
    case QkKind::kVanilla:
      qc.out = net::linear_forward(x, params.find(prefix + ".w"), nullptr);
      return qc.out;
    case QkKind::kConv:
      qc.out = net::conv1d_forward(x, params.find(prefix + ".w"), nullptr, 1);
      return qc.out;
    case QkKind::kBdc: {
      Mat h = x;
      qc.blocks.assign(cfg.dilations.size(), {});
      for (std::size_t s = 0; s < cfg.dilations.size(); ++s) {
        const std::string blk = prefix + ".blk" + std::to_string(s);
        BdcBlockCache& bc = qc.blocks[s];
        bc.input = h;
        bc.down_out = net::conv1d_forward(h, params.find(blk + ".down.w"),
                                          &params.find(blk + ".down.b"), 1);
        bc.conv_out = net::conv1d_forward(bc.down_out, params.find(blk + ".conv.w"),
                                          &params.find(blk + ".conv.b"),
                                          cfg.dilations[s]);
        h = net::relu_forward(bc.conv_out);
      }
      qc.stack_out = h;
      qc.out = net::conv1d_forward(h, params.find(prefix + ".out.w"),
                                   &params.find(prefix + ".out.b"), 1);
      return qc.out;
    }
  }
  throw ConfigError("unknown qk kind");
}

inline Mat qk_backward(const AttentionStackConfig& cfg, ParamSet& params,
                       const std::string& prefix, const QkCache& qc, const Mat& x,
                       const Mat& dout) {
  switch (cfg.qk_kind) {
    case QkKind::kVanilla:
      return net::linear_backward(x, params.find(prefix + ".w"), nullptr, dout);
    case QkKind::kConv:
      return net::conv1d_backward(x, params.find(prefix + ".w"), nullptr, 1, dout);
    case QkKind::kBdc: {
      Mat dh = net::conv1d_backward(qc.stack_out, params.find(prefix + ".out.w"),
                                    &params.find(prefix + ".out.b"), 1, dout);
      for (std::size_t s = cfg.dilations.size(); s-- > 0;) {
        const std::string blk = prefix + ".blk" + std::to_string(s);
        const BdcBlockCache& bc = qc.blocks[s];
        dh = net::relu_backward(bc.conv_out, dh);
        dh = net::conv1d_backward(bc.down_out, params.find(blk + ".conv.w"),
                                  &params.find(blk + ".conv.b"), cfg.dilations[s], dh);
        dh = net::conv1d_backward(bc.input, params.find(blk + ".down.w"),
                                  &params.find(blk + ".down.b"), 1, dh);
      }
      return dh;
    }
  }
  throw ConfigError("unknown qk kind");
}

// ---------------------------------------------------------------------------
// Standalone attention surface over an already-embedded sequence x (T x D_x):
// q/k per config, pointwise value projection, softmax over the admissible
// key set with 1/sqrt(D) scaling.
// ---------------------------------------------------------------------------

struct AttentionParams {
  ParamSet set;
};

inline AttentionParams make_attention_params(const AttentionStackConfig& cfg,
                                             std::uint64_t seed) {
  cfg.validate();
  AttentionParams p;
  for (auto& s : detail::attention_shapes(cfg)) p.set.add(s.name, s.shape);
  Rng rng(seed);
  for (auto& t : p.set.tensors) detail::init_tensor(t, rng);
  return p;
}

struct AttentionForwardResult {
  Mat output;                       // T x D
  net::AttentionCache weights;      // per-query admissible keys + weights
};

inline AttentionForwardResult attention_forward(
    const AttentionStackConfig& cfg, const AttentionParams& params, const Mat& x,
    const std::vector<bool>* key_mask = nullptr) {
  cfg.validate();
  if (x.rows == 0) throw DimensionError("empty attention input");
  if (x.cols != static_cast<std::size_t>(cfg.d_x))
    throw DimensionError("attention input dim mismatch");
  Mat input = x;
  if (cfg.use_positional_encoding) net::add_positional_encoding(input);
  QkCache qc, kc;
  const Mat q = qk_forward(cfg, params.set, "q", input, qc);
  const Mat k = qk_forward(cfg, params.set, "k", input, kc);
  const Mat v = net::linear_forward(input, params.set.find("v.w"), nullptr);
  AttentionForwardResult out;
  out.output = net::attention_core_forward(q, k, v, cfg.key_range, key_mask,
                                           out.weights);
  return out;
}

// ---------------------------------------------------------------------------
// Full imputation model: embedding conv, n encoder layers
// (attention + feed-forward, residual connections, layer norm), output conv.
// ---------------------------------------------------------------------------

struct LayerCache {
  Mat input;
  QkCache q, k;
  Mat v;
  net::AttentionCache attn;
  Mat attn_out;
  Mat res1;
  net::LayerNormCache ln1;
  Mat ln1_out;
  Mat ffn_pre, ffn_relu, ffn_out;
  Mat res2;
  net::LayerNormCache ln2;
  Mat out;
};

struct ModelCache {
  Mat input;      // T x 1
  Mat embed_out;  // T x d_x, positional encoding already added
  std::vector<LayerCache> layers;
  Mat output;     // T x 1
};

class Model {
public:
  explicit Model(AttentionStackConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    if (cfg_.d != cfg_.d_x)
      throw ConfigError("full model requires d == d_x for residual connections");
    for (auto& s : detail::model_shapes(cfg_)) params_.add(s.name, s.shape);
  }

  const AttentionStackConfig& config() const { return cfg_; }
  ParamSet& params() { return params_; }
  const ParamSet& params() const { return params_; }

  void init(std::uint64_t seed) {
    Rng rng(seed);
    for (auto& t : params_.tensors) detail::init_tensor(t, rng);
  }

  Mat forward(const std::vector<double>& input, ModelCache& cache,
              const std::vector<bool>* key_mask = nullptr) const {
    const std::size_t T = input.size();
    if (T == 0) throw DimensionError("empty model input");
    cache.input = Mat(T, 1);
    for (std::size_t t = 0; t < T; ++t) cache.input(t, 0) = input[t];

    cache.embed_out = net::conv1d_forward(cache.input, params_.find("embed.w"),
                                          &params_.find("embed.b"), 1);
    if (cfg_.use_positional_encoding) net::add_positional_encoding(cache.embed_out);

    cache.layers.assign(static_cast<std::size_t>(cfg_.n_encoder_layers), {});
    Mat x = cache.embed_out;
    for (int l = 0; l < cfg_.n_encoder_layers; ++l) {
      LayerCache& lc = cache.layers[static_cast<std::size_t>(l)];
      lc.input = x;
      x = layer_forward(l, lc, key_mask);
    }
    cache.output = net::conv1d_forward(x, params_.find("out.w"),
                                       &params_.find("out.b"), 1);
    return cache.output;
  }

  /// Accumulates parameter gradients from d(loss)/d(output); returns
  /// d(loss)/d(input).
  Mat backward(const ModelCache& cache, const Mat& d_output) {
    const int L = cfg_.n_encoder_layers;
    Mat dx = net::conv1d_backward(cache.layers[static_cast<std::size_t>(L - 1)].out,
                                  params_.find("out.w"), &params_.find("out.b"), 1,
                                  d_output);
    for (int l = L - 1; l >= 0; --l)
      dx = layer_backward(l, cache.layers[static_cast<std::size_t>(l)], dx);
    // Positional encoding is additive: gradient passes through unchanged.
    return net::conv1d_backward(cache.input, params_.find("embed.w"),
                                &params_.find("embed.b"), 1, dx);
  }

  /// Imputer contract: model output is spliced in only at missing
  /// positions; observed positions pass through.
  Waveform impute(const AblationCase& c) const {
    ModelCache cache;
    const Mat out = forward(c.ablated.samples, cache);
    Waveform result = c.ablated;
    const auto present = c.mask.to_dense();
    for (std::size_t i = 0; i < present.size(); ++i)
      if (!present[i]) result.samples[i] = out(i, 0);
    return result;
  }

  static const net::AttentionCache& attention_of(const ModelCache& cache,
                                                 std::size_t layer) {
    return cache.layers.at(layer).attn;
  }

private:
  Mat layer_forward(int l, LayerCache& lc, const std::vector<bool>* key_mask) const {
    const std::string p = "layer" + std::to_string(l);
    const Mat& x = lc.input;
    const Mat q = qk_forward(cfg_, params_, p + ".q", x, lc.q);
    const Mat k = qk_forward(cfg_, params_, p + ".k", x, lc.k);
    lc.v = net::linear_forward(x, params_.find(p + ".v.w"), nullptr);
    lc.attn_out =
        net::attention_core_forward(q, k, lc.v, cfg_.key_range, key_mask, lc.attn);

    lc.res1 = x;
    for (std::size_t i = 0; i < lc.res1.v.size(); ++i) lc.res1.v[i] += lc.attn_out.v[i];
    lc.ln1_out = net::layernorm_forward(lc.res1, params_.find(p + ".ln1.gamma"),
                                        params_.find(p + ".ln1.beta"), lc.ln1);

    lc.ffn_pre = net::linear_forward(lc.ln1_out, params_.find(p + ".ffn.w1"),
                                     &params_.find(p + ".ffn.b1"));
    lc.ffn_relu = net::relu_forward(lc.ffn_pre);
    lc.ffn_out = net::linear_forward(lc.ffn_relu, params_.find(p + ".ffn.w2"),
                                     &params_.find(p + ".ffn.b2"));

    lc.res2 = lc.ln1_out;
    for (std::size_t i = 0; i < lc.res2.v.size(); ++i) lc.res2.v[i] += lc.ffn_out.v[i];
    lc.out = net::layernorm_forward(lc.res2, params_.find(p + ".ln2.gamma"),
                                    params_.find(p + ".ln2.beta"), lc.ln2);
    return lc.out;
  }

  Mat layer_backward(int l, const LayerCache& lc, const Mat& dout) {
    const std::string p = "layer" + std::to_string(l);
    Mat d_res2 = net::layernorm_backward(lc.ln2, params_.find(p + ".ln2.gamma"),
                                         params_.find(p + ".ln2.beta"), dout);
    // res2 = ln1_out + ffn_out
    Mat d_ffn_relu = net::linear_backward(lc.ffn_relu, params_.find(p + ".ffn.w2"),
                                          &params_.find(p + ".ffn.b2"), d_res2);
    Mat d_ffn_pre = net::relu_backward(lc.ffn_pre, d_ffn_relu);
    Mat d_ln1_out = net::linear_backward(lc.ln1_out, params_.find(p + ".ffn.w1"),
                                         &params_.find(p + ".ffn.b1"), d_ffn_pre);
    for (std::size_t i = 0; i < d_ln1_out.v.size(); ++i) d_ln1_out.v[i] += d_res2.v[i];

    Mat d_res1 = net::layernorm_backward(lc.ln1, params_.find(p + ".ln1.gamma"),
                                         params_.find(p + ".ln1.beta"), d_ln1_out);
    // res1 = x + attn_out
    const auto g = net::attention_core_backward(lc.q.out, lc.k.out, lc.v, lc.attn,
                                                d_res1);
    Mat dx = net::linear_backward(lc.input, params_.find(p + ".v.w"), nullptr, g.dv);
    Mat dxq = qk_backward(cfg_, params_, p + ".q", lc.q, lc.input, g.dq);
    Mat dxk = qk_backward(cfg_, params_, p + ".k", lc.k, lc.input, g.dk);
    for (std::size_t i = 0; i < dx.v.size(); ++i)
      dx.v[i] += dxq.v[i] + dxk.v[i] + d_res1.v[i];
    return dx;
  }

  AttentionStackConfig cfg_;
  ParamSet params_;
};

}  // namespace pulse
