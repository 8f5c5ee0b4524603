#pragma once

#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"

namespace pulse {

enum class QkKind { kVanilla, kConv, kBdc };

struct KeyRange {
  bool full = true;
  int window_w = 0;   // sliding window size (key count ~ window_w + 1)
  int dilation_g = 1;
};

struct AttentionStackConfig {
  int d_x = 16;  // embedding dim fed into attention
  int d = 16;    // attention dim (must equal d_x inside the full model)
  QkKind qk_kind = QkKind::kVanilla;
  int filter_size = 15;                       // conv/bdc
  std::vector<int> dilations = {1, 2, 4, 8, 16, 32};  // bdc
  int bottleneck_dim = 4;                     // bdc, default d/4
  bool use_positional_encoding = false;
  KeyRange key_range;
  int n_encoder_layers = 2;
  int embed_filter = 9;   // embedding conv kernel
  int output_filter = 9;  // output projection conv kernel
  int ffn_dim = 32;

  void validate() const {
    if (d_x <= 0 || d <= 0) throw ConfigError("dims must be positive");
    if (qk_kind != QkKind::kVanilla) {
      if (filter_size <= 1 || filter_size % 2 == 0)
        throw ConfigError("conv/bdc filter size must be odd and > 1");
    }
    if (qk_kind == QkKind::kBdc) {
      if (dilations.empty()) throw ConfigError("bdc needs at least one dilation");
      for (std::size_t i = 1; i < dilations.size(); ++i)
        if (dilations[i] <= dilations[i - 1])
          throw ConfigError("dilations must be strictly increasing");
      if (bottleneck_dim <= 0) throw ConfigError("bottleneck dim must be positive");
    }
    if (!key_range.full && (key_range.window_w < 1 || key_range.dilation_g < 1))
      throw ConfigError("sliding window needs w >= 1, g >= 1");
    if (n_encoder_layers < 1) throw ConfigError("need at least one encoder layer");
    if (embed_filter % 2 == 0 || output_filter % 2 == 0)
      throw ConfigError("embedding/output conv kernels must be odd");
  }
};

/// Receptive field of the query/key transform: 1 for vanilla, filter size
/// for a single convolution, 1 + sum (filter-1)*dilation for a dilated stack.
inline int receptive_field(const AttentionStackConfig& cfg) {
  cfg.validate();
  switch (cfg.qk_kind) {
    case QkKind::kVanilla:
      return 1;
    case QkKind::kConv:
      return cfg.filter_size;
    case QkKind::kBdc: {
      int rf = 1;
      for (int d : cfg.dilations) rf += (cfg.filter_size - 1) * d;
      return rf;
    }
  }
  return 1;
}

/// Admissible key indices for a query: {t_q + j*g : |j| <= w/2} clipped
/// to [0, T). Full-range configs admit every index.
inline std::vector<std::size_t> sliding_window_keys(std::size_t t_q, std::size_t T,
                                                    int window_w, int dilation_g) {
  if (window_w < 1 || dilation_g < 1)
    throw ParameterError("sliding window needs w >= 1, g >= 1");
  std::vector<std::size_t> keys;
  const int half = window_w / 2;
  for (int j = -half; j <= half; ++j) {
    const long long idx = static_cast<long long>(t_q) +
                          static_cast<long long>(j) * dilation_g;
    if (idx >= 0 && idx < static_cast<long long>(T))
      keys.push_back(static_cast<std::size_t>(idx));
  }
  return keys;
}

}  // namespace pulse
