#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"
#include "pulse/model/config.hpp"
#include "pulse/model/tensor.hpp"

namespace pulse::net {

// ---------------------------------------------------------------------------
// 1D convolution over time, centered, zero-padded, with dilation.
// Weight shape [k, c_in, c_out]; optional bias [c_out].
// ---------------------------------------------------------------------------

inline Mat conv1d_forward(const Mat& x, const Tensor& w, const Tensor* bias,
                          int dilation) {
  const std::size_t k = w.shape[0], cin = w.shape[1], cout = w.shape[2];
  if (x.cols != cin) throw DimensionError("conv1d input channel mismatch");
  const int half = static_cast<int>(k - 1) / 2;
  Mat y(x.rows, cout);
  for (std::size_t t = 0; t < x.rows; ++t) {
    for (std::size_t u = 0; u < k; ++u) {
      const long long src = static_cast<long long>(t) +
                            (static_cast<long long>(u) - half) * dilation;
      if (src < 0 || src >= static_cast<long long>(x.rows)) continue;
      const double* xrow = &x.v[static_cast<std::size_t>(src) * cin];
      const double* wrow = &w.data[u * cin * cout];
      double* yrow = &y.v[t * cout];
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double xv = xrow[ci];
        if (xv == 0.0) continue;
        const double* wc = wrow + ci * cout;
        for (std::size_t co = 0; co < cout; ++co) yrow[co] += xv * wc[co];
      }
    }
    if (bias) {
      double* yrow = &y.v[t * cout];
      for (std::size_t co = 0; co < cout; ++co) yrow[co] += bias->data[co];
    }
  }
  return y;
}

inline Mat conv1d_backward(const Mat& x, Tensor& w, Tensor* bias, int dilation,
                           const Mat& dy) {
  const std::size_t k = w.shape[0], cin = w.shape[1], cout = w.shape[2];
  const int half = static_cast<int>(k - 1) / 2;
  Mat dx(x.rows, cin);
  for (std::size_t t = 0; t < x.rows; ++t) {
    const double* dyrow = &dy.v[t * cout];
    for (std::size_t u = 0; u < k; ++u) {
      const long long src = static_cast<long long>(t) +
                            (static_cast<long long>(u) - half) * dilation;
      if (src < 0 || src >= static_cast<long long>(x.rows)) continue;
      const double* xrow = &x.v[static_cast<std::size_t>(src) * cin];
      double* dxrow = &dx.v[static_cast<std::size_t>(src) * cin];
      double* dwrow = &w.grad[u * cin * cout];
      const double* wrow = &w.data[u * cin * cout];
      for (std::size_t ci = 0; ci < cin; ++ci) {
        const double* wc = wrow + ci * cout;
        double* dwc = dwrow + ci * cout;
        double acc = 0.0;
        for (std::size_t co = 0; co < cout; ++co) {
          dwc[co] += xrow[ci] * dyrow[co];
          acc += wc[co] * dyrow[co];
        }
        dxrow[ci] += acc;
      }
    }
    if (bias)
      for (std::size_t co = 0; co < cout; ++co) bias->grad[co] += dyrow[co];
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Pointwise linear: y = x * W (+ b). W shape [c_in, c_out].
// ---------------------------------------------------------------------------

inline Mat linear_forward(const Mat& x, const Tensor& w, const Tensor* bias) {
  const std::size_t cin = w.shape[0], cout = w.shape[1];
  if (x.cols != cin) throw DimensionError("linear input mismatch");
  Mat y(x.rows, cout);
  for (std::size_t t = 0; t < x.rows; ++t) {
    const double* xrow = &x.v[t * cin];
    double* yrow = &y.v[t * cout];
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double xv = xrow[ci];
      const double* wc = &w.data[ci * cout];
      for (std::size_t co = 0; co < cout; ++co) yrow[co] += xv * wc[co];
    }
    if (bias)
      for (std::size_t co = 0; co < cout; ++co) yrow[co] += bias->data[co];
  }
  return y;
}

inline Mat linear_backward(const Mat& x, Tensor& w, Tensor* bias, const Mat& dy) {
  const std::size_t cin = w.shape[0], cout = w.shape[1];
  Mat dx(x.rows, cin);
  for (std::size_t t = 0; t < x.rows; ++t) {
    const double* xrow = &x.v[t * cin];
    const double* dyrow = &dy.v[t * cout];
    double* dxrow = &dx.v[t * cin];
    for (std::size_t ci = 0; ci < cin; ++ci) {
      const double* wc = &w.data[ci * cout];
      double* dwc = &w.grad[ci * cout];
      double acc = 0.0;
      for (std::size_t co = 0; co < cout; ++co) {
        dwc[co] += xrow[ci] * dyrow[co];
        acc += wc[co] * dyrow[co];
      }
      dxrow[ci] += acc;
    }
    if (bias)
      for (std::size_t co = 0; co < cout; ++co) bias->grad[co] += dyrow[co];
  }
  return dx;
}

// ---------------------------------------------------------------------------
// ReLU.
// ---------------------------------------------------------------------------

inline Mat relu_forward(const Mat& x) {
  Mat y = x;
  for (double& v : y.v) v = v > 0.0 ? v : 0.0;
  return y;
}

inline Mat relu_backward(const Mat& x, const Mat& dy) {
  Mat dx = dy;
  for (std::size_t i = 0; i < x.v.size(); ++i)
    if (x.v[i] <= 0.0) dx.v[i] = 0.0;
  return dx;
}

// ---------------------------------------------------------------------------
// LayerNorm over the feature dimension per time step.
// gamma/beta shape [c].
// ---------------------------------------------------------------------------

inline constexpr double kLayerNormEps = 1e-5;

struct LayerNormCache {
  Mat normalized;          // (x - mu) / sigma
  std::vector<double> inv_sigma;
};

inline Mat layernorm_forward(const Mat& x, const Tensor& gamma, const Tensor& beta,
                             LayerNormCache& cache) {
  const std::size_t c = x.cols;
  Mat y(x.rows, c);
  cache.normalized = Mat(x.rows, c);
  cache.inv_sigma.assign(x.rows, 0.0);
  for (std::size_t t = 0; t < x.rows; ++t) {
    const double* xrow = &x.v[t * c];
    double mu = 0.0;
    for (std::size_t i = 0; i < c; ++i) mu += xrow[i];
    mu /= static_cast<double>(c);
    double var = 0.0;
    for (std::size_t i = 0; i < c; ++i) var += (xrow[i] - mu) * (xrow[i] - mu);
    var /= static_cast<double>(c);
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.inv_sigma[t] = inv;
    for (std::size_t i = 0; i < c; ++i) {
      const double nrm = (xrow[i] - mu) * inv;
      cache.normalized(t, i) = nrm;
      y(t, i) = gamma.data[i] * nrm + beta.data[i];
    }
  }
  return y;
}

inline Mat layernorm_backward(const LayerNormCache& cache, Tensor& gamma,
                              Tensor& beta, const Mat& dy) {
  const std::size_t c = dy.cols;
  Mat dx(dy.rows, c);
  for (std::size_t t = 0; t < dy.rows; ++t) {
    const double inv = cache.inv_sigma[t];
    double sum_dn = 0.0, sum_dn_n = 0.0;
    for (std::size_t i = 0; i < c; ++i) {
      const double dn = dy(t, i) * gamma.data[i];
      const double n = cache.normalized(t, i);
      gamma.grad[i] += dy(t, i) * n;
      beta.grad[i] += dy(t, i);
      sum_dn += dn;
      sum_dn_n += dn * n;
    }
    const double cd = static_cast<double>(c);
    for (std::size_t i = 0; i < c; ++i) {
      const double dn = dy(t, i) * gamma.data[i];
      const double n = cache.normalized(t, i);
      dx(t, i) = inv * (dn - sum_dn / cd - n * sum_dn_n / cd);
    }
  }
  return dx;
}

// ---------------------------------------------------------------------------
// Scaled dot-product attention core over precomputed Q, K, V with an
// admissible key set per query (full range or dilated sliding window) and
// an optional key mask. A query whose admissible set is fully masked out
// falls back to uniform weights over its window.
// ---------------------------------------------------------------------------

struct AttentionCache {
  // Per query: admissible key indices and softmax weights.
  std::vector<std::vector<std::size_t>> keys;
  std::vector<std::vector<double>> weights;
  std::vector<bool> uniform_fallback;  // per query
};

inline std::vector<std::size_t> admissible_keys(std::size_t t, std::size_t T,
                                                const KeyRange& kr) {
  if (kr.full) {
    std::vector<std::size_t> all(T);
    for (std::size_t i = 0; i < T; ++i) all[i] = i;
    return all;
  }
  return sliding_window_keys(t, T, kr.window_w, kr.dilation_g);
}

inline Mat attention_core_forward(const Mat& q, const Mat& k, const Mat& v,
                                  const KeyRange& kr,
                                  const std::vector<bool>* key_mask,
                                  AttentionCache& cache) {
  const std::size_t T = q.rows;
  const std::size_t d = q.cols;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  Mat out(T, v.cols);
  cache.keys.assign(T, {});
  cache.weights.assign(T, {});
  cache.uniform_fallback.assign(T, false);
  for (std::size_t t = 0; t < T; ++t) {
    auto window = admissible_keys(t, T, kr);
    std::vector<std::size_t> keys;
    for (std::size_t j : window)
      if (!key_mask || (*key_mask)[j]) keys.push_back(j);
    bool uniform = false;
    if (keys.empty()) {
      keys = window;  // uniform fallback over the (clipped) window
      uniform = true;
    }
    std::vector<double> w(keys.size());
    if (uniform) {
      std::fill(w.begin(), w.end(), 1.0 / static_cast<double>(keys.size()));
    } else {
      double max_s = -1e300;
      for (std::size_t a = 0; a < keys.size(); ++a) {
        double s = 0.0;
        const double* qr = &q.v[t * d];
        const double* kr_row = &k.v[keys[a] * d];
        for (std::size_t i = 0; i < d; ++i) s += qr[i] * kr_row[i];
        w[a] = s * scale;
        max_s = std::max(max_s, w[a]);
      }
      double sum = 0.0;
      for (double& s : w) { s = std::exp(s - max_s); sum += s; }
      for (double& s : w) s /= sum;
    }
    double* orow = &out.v[t * v.cols];
    for (std::size_t a = 0; a < keys.size(); ++a) {
      const double* vrow = &v.v[keys[a] * v.cols];
      for (std::size_t i = 0; i < v.cols; ++i) orow[i] += w[a] * vrow[i];
    }
    cache.keys[t] = std::move(keys);
    cache.weights[t] = std::move(w);
    cache.uniform_fallback[t] = uniform;
  }
  return out;
}

struct AttentionCoreGrads {
  Mat dq, dk, dv;
};

inline AttentionCoreGrads attention_core_backward(const Mat& q, const Mat& k,
                                                  const Mat& v,
                                                  const AttentionCache& cache,
                                                  const Mat& dout) {
  const std::size_t T = q.rows;
  const std::size_t d = q.cols;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  AttentionCoreGrads g{Mat(T, d), Mat(T, d), Mat(v.rows, v.cols)};
  std::vector<double> dw;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& keys = cache.keys[t];
    const auto& w = cache.weights[t];
    const double* dorow = &dout.v[t * v.cols];
    dw.assign(keys.size(), 0.0);
    for (std::size_t a = 0; a < keys.size(); ++a) {
      double* dvrow = &g.dv.v[keys[a] * v.cols];
      const double* vrow = &v.v[keys[a] * v.cols];
      double acc = 0.0;
      for (std::size_t i = 0; i < v.cols; ++i) {
        dvrow[i] += w[a] * dorow[i];
        acc += vrow[i] * dorow[i];
      }
      dw[a] = acc;
    }
    if (cache.uniform_fallback[t]) continue;  // weights constant in fallback
    double wdw = 0.0;
    for (std::size_t a = 0; a < keys.size(); ++a) wdw += w[a] * dw[a];
    const double* qrow = &q.v[t * d];
    double* dqrow = &g.dq.v[t * d];
    for (std::size_t a = 0; a < keys.size(); ++a) {
      const double ds = w[a] * (dw[a] - wdw) * scale;
      const double* krow = &k.v[keys[a] * d];
      double* dkrow = &g.dk.v[keys[a] * d];
      for (std::size_t i = 0; i < d; ++i) {
        dqrow[i] += ds * krow[i];
        dkrow[i] += ds * qrow[i];
      }
    }
  }
  return g;
}

// Sinusoidal additive positional encoding.
inline void add_positional_encoding(Mat& x) {
  const std::size_t T = x.rows, d = x.cols;
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t i = 0; i < d; ++i) {
      const double exponent = static_cast<double>(2 * (i / 2)) / static_cast<double>(d);
      const double angle =
          static_cast<double>(t) / std::pow(10000.0, exponent);
      x(t, i) += (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
}

}  // namespace pulse::net
