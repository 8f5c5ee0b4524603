#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/errors.hpp"
#include "pulse/model/config.hpp"
#include "pulse/model/model.hpp"
#include "pulse/model/net.hpp"

namespace pulse {

// ---------------------------------------------------------------------------
// Config <-> JSON.
// ---------------------------------------------------------------------------

inline std::string qk_kind_name(QkKind k) {
  switch (k) {
    case QkKind::kVanilla: return "vanilla";
    case QkKind::kConv: return "conv";
    case QkKind::kBdc: return "bdc";
  }
  throw ConfigError("unknown qk kind");
}

inline QkKind qk_kind_from_name(const std::string& s) {
  if (s == "vanilla") return QkKind::kVanilla;
  if (s == "conv") return QkKind::kConv;
  if (s == "bdc") return QkKind::kBdc;
  throw ConfigError("unknown qk kind '" + s + "'");
}

inline nlohmann::json config_to_json(const AttentionStackConfig& cfg) {
  return nlohmann::json{
      {"d_x", cfg.d_x},
      {"d", cfg.d},
      {"qk_kind", qk_kind_name(cfg.qk_kind)},
      {"filter_size", cfg.filter_size},
      {"dilations", cfg.dilations},
      {"bottleneck_dim", cfg.bottleneck_dim},
      {"use_positional_encoding", cfg.use_positional_encoding},
      {"key_range",
       {{"full", cfg.key_range.full},
        {"window_w", cfg.key_range.window_w},
        {"dilation_g", cfg.key_range.dilation_g}}},
      {"n_encoder_layers", cfg.n_encoder_layers},
      {"embed_filter", cfg.embed_filter},
      {"output_filter", cfg.output_filter},
      {"ffn_dim", cfg.ffn_dim},
  };
}

inline AttentionStackConfig config_from_json(const nlohmann::json& j) {
  AttentionStackConfig cfg;
  try {
    cfg.d_x = j.at("d_x").get<int>();
    cfg.d = j.at("d").get<int>();
    cfg.qk_kind = qk_kind_from_name(j.at("qk_kind").get<std::string>());
    cfg.filter_size = j.at("filter_size").get<int>();
    cfg.dilations = j.at("dilations").get<std::vector<int>>();
    cfg.bottleneck_dim = j.at("bottleneck_dim").get<int>();
    cfg.use_positional_encoding = j.at("use_positional_encoding").get<bool>();
    const auto& kr = j.at("key_range");
    cfg.key_range.full = kr.at("full").get<bool>();
    cfg.key_range.window_w = kr.at("window_w").get<int>();
    cfg.key_range.dilation_g = kr.at("dilation_g").get<int>();
    cfg.n_encoder_layers = j.at("n_encoder_layers").get<int>();
    cfg.embed_filter = j.at("embed_filter").get<int>();
    cfg.output_filter = j.at("output_filter").get<int>();
    cfg.ffn_dim = j.at("ffn_dim").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad model config json: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

// ---------------------------------------------------------------------------
// Checkpoint container: magic, 8-byte little-endian JSON header length,
// JSON header (format version, config, tensor names/shapes), then the raw
// tensor payload as little-endian float64 in header order.
// ---------------------------------------------------------------------------

namespace detail {

constexpr char kCkptMagic[8] = {'P', 'L', 'S', 'C', 'K', 'P', 'T', '1'};

inline bool host_is_little_endian() {
  const std::uint16_t probe = 1;
  unsigned char byte;
  std::memcpy(&byte, &probe, 1);
  return byte == 1;
}

inline void write_f64_le(std::ostream& os, const std::vector<double>& v) {
  if (host_is_little_endian()) {
    os.write(reinterpret_cast<const char*>(v.data()),
             static_cast<std::streamsize>(v.size() * sizeof(double)));
    return;
  }
  for (double d : v) {
    char buf[8];
    std::memcpy(buf, &d, 8);
    std::swap(buf[0], buf[7]);
    std::swap(buf[1], buf[6]);
    std::swap(buf[2], buf[5]);
    std::swap(buf[3], buf[4]);
    os.write(buf, 8);
  }
}

inline void read_f64_le(std::istream& is, std::vector<double>& v) {
  is.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(v.size() * sizeof(double)));
  if (!is) throw FormatError("checkpoint payload truncated");
  if (!host_is_little_endian()) {
    for (double& d : v) {
      char buf[8];
      std::memcpy(buf, &d, 8);
      std::swap(buf[0], buf[7]);
      std::swap(buf[1], buf[6]);
      std::swap(buf[2], buf[5]);
      std::swap(buf[3], buf[4]);
      std::memcpy(&d, buf, 8);
    }
  }
}

}  // namespace detail

inline void save_checkpoint(const std::string& path, const AttentionStackConfig& cfg,
                            const ParamSet& params) {
  nlohmann::json header;
  header["format_version"] = 1;
  header["config"] = config_to_json(cfg);
  nlohmann::json tensors = nlohmann::json::array();
  for (const auto& t : params.tensors)
    tensors.push_back({{"name", t.name}, {"shape", t.shape}});
  header["tensors"] = tensors;
  const std::string hs = header.dump();

  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(detail::kCkptMagic, 8);
  std::uint64_t hlen = hs.size();
  char lenbuf[8];
  for (int i = 0; i < 8; ++i) lenbuf[i] = static_cast<char>((hlen >> (8 * i)) & 0xff);
  os.write(lenbuf, 8);
  os.write(hs.data(), static_cast<std::streamsize>(hs.size()));
  for (const auto& t : params.tensors) detail::write_f64_le(os, t.data);
  if (!os) throw IoError("write failed for '" + path + "'");
}

struct Checkpoint {
  AttentionStackConfig config;
  ParamSet params;
};

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, detail::kCkptMagic, 8) != 0)
    throw FormatError("not a checkpoint file: '" + path + "'");
  char lenbuf[8];
  is.read(lenbuf, 8);
  if (!is) throw FormatError("checkpoint header truncated");
  std::uint64_t hlen = 0;
  for (int i = 0; i < 8; ++i)
    hlen |= static_cast<std::uint64_t>(static_cast<unsigned char>(lenbuf[i])) << (8 * i);
  std::string hs(hlen, '\0');
  is.read(hs.data(), static_cast<std::streamsize>(hlen));
  if (!is) throw FormatError("checkpoint header truncated");

  nlohmann::json header;
  try {
    header = nlohmann::json::parse(hs);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("bad checkpoint header: ") + e.what());
  }
  if (header.value("format_version", 0) != 1)
    throw FormatError("unsupported checkpoint format version");

  Checkpoint ck;
  ck.config = config_from_json(header.at("config"));
  for (const auto& tj : header.at("tensors")) {
    auto& t = ck.params.add(tj.at("name").get<std::string>(),
                            tj.at("shape").get<std::vector<std::size_t>>());
    detail::read_f64_le(is, t.data);
  }
  return ck;
}

/// Restores a full model from a checkpoint (tensor layout must match the
/// stored config exactly).
inline Model load_model(const std::string& path) {
  Checkpoint ck = load_checkpoint(path);
  Model model(ck.config);
  for (auto& t : model.params().tensors) {
    const Tensor& src = ck.params.find(t.name);
    if (src.shape != t.shape)
      throw FormatError("checkpoint tensor '" + t.name + "' shape mismatch");
    t.data = src.data;
  }
  return model;
}

// ---------------------------------------------------------------------------
// Attention-weight export: one CSV row per admissible key of one query.
// ---------------------------------------------------------------------------

inline void export_attention(const net::AttentionCache& attn, std::size_t query_index,
                             const std::string& path) {
  if (query_index >= attn.keys.size())
    throw ParameterError("query index out of range");
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os << "key_index,weight\n";
  const auto& keys = attn.keys[query_index];
  const auto& weights = attn.weights[query_index];
  os.precision(17);
  for (std::size_t i = 0; i < keys.size(); ++i)
    os << keys[i] << "," << weights[i] << "\n";
  if (!os) throw IoError("write failed for '" + path + "'");
}

}  // namespace pulse
