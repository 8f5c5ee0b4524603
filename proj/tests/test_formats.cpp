#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "pulse/mask_csv.hpp"
#include "pulse/model/checkpoint.hpp"
#include "pulse/model/model.hpp"
#include "pulse/npy.hpp"
#include "pulse/report.hpp"

using namespace pulse;

namespace {

std::string tmp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

// Minimal NPY writer used as an independent oracle for the reader.
void write_raw_npy(const std::string& path, const std::string& descr,
                   const std::string& shape, const void* payload,
                   std::size_t payload_bytes, bool fortran = false) {
  std::string header = "{'descr': '" + descr +
                       "', 'fortran_order': " + (fortran ? "True" : "False") +
                       ", 'shape': " + shape + ", }";
  const std::size_t base = 10 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header += '\n';
  std::ofstream f(path, std::ios::binary);
  f.write("\x93NUMPY\x01\x00", 8);
  const std::uint16_t hlen = static_cast<std::uint16_t>(header.size());
  f.put(static_cast<char>(hlen & 0xff));
  f.put(static_cast<char>(hlen >> 8));
  f.write(header.data(), static_cast<std::streamsize>(header.size()));
  f.write(static_cast<const char*>(payload), static_cast<std::streamsize>(payload_bytes));
}

}  // namespace

TEST_CASE("npy f8 round-trip is bit-exact") {
  NpyMatrix m;
  m.rows = 2;
  m.cols = 3;
  m.data = {1.5, -2.25, 3.125, 0.1, 1e-300, -0.0};
  const auto path = tmp_path("roundtrip.npy");
  write_npy_matrix(path, m);
  const auto back = read_npy_matrix(path);
  REQUIRE(back.rows == 2);
  REQUIRE(back.cols == 3);
  for (std::size_t i = 0; i < m.data.size(); ++i) {
    std::uint64_t a, b;
    std::memcpy(&a, &m.data[i], 8);
    std::memcpy(&b, &back.data[i], 8);
    REQUIRE(a == b);
  }
  std::filesystem::remove(path);
}

TEST_CASE("npy 1-D files read as a single row") {
  const double payload[4] = {1, 2, 3, 4};
  const auto path = tmp_path("one_d.npy");
  write_raw_npy(path, "<f8", "(4,)", payload, sizeof(payload));
  const auto m = read_npy_matrix(path);
  REQUIRE(m.rows == 1);
  REQUIRE(m.cols == 4);
  REQUIRE(m.row(0) == std::vector<double>{1, 2, 3, 4});
  std::filesystem::remove(path);
}

TEST_CASE("npy reads little-endian float32 with exact widening") {
  const float payload[3] = {1.5f, -0.25f, 1024.0f};
  const auto path = tmp_path("f32.npy");
  write_raw_npy(path, "<f4", "(3,)", payload, sizeof(payload));
  const auto m = read_npy_matrix(path);
  REQUIRE(m.data == std::vector<double>{1.5, -0.25, 1024.0});
  std::filesystem::remove(path);
}

TEST_CASE("npy rejects fortran order, bad dtype, bad magic, truncation") {
  const double payload[2] = {1, 2};
  const auto p1 = tmp_path("fortran.npy");
  write_raw_npy(p1, "<f8", "(2,)", payload, sizeof(payload), /*fortran=*/true);
  REQUIRE_THROWS_AS(read_npy_matrix(p1), UnsupportedLayoutError);

  const auto p2 = tmp_path("baddtype.npy");
  write_raw_npy(p2, "<i4", "(2,)", payload, sizeof(payload));
  REQUIRE_THROWS_AS(read_npy_matrix(p2), UnsupportedLayoutError);

  const auto p3 = tmp_path("badmagic.npy");
  {
    std::ofstream f(p3, std::ios::binary);
    f << "NOTANPYFILE.....";
  }
  REQUIRE_THROWS_AS(read_npy_matrix(p3), FormatError);

  const auto p4 = tmp_path("trunc.npy");
  write_raw_npy(p4, "<f8", "(100,)", payload, sizeof(payload));
  REQUIRE_THROWS_AS(read_npy_matrix(p4), FormatError);

  REQUIRE_THROWS_AS(read_npy_matrix(tmp_path("does-not-exist.npy")), IoError);

  for (const auto& p : {p1, p2, p3, p4}) std::filesystem::remove(p);
}

TEST_CASE("npy v2 header length is honored") {
  // Hand-build a v2.0 file: 4-byte little-endian header length.
  const double payload[2] = {7.5, -1.0};
  std::string header = "{'descr': '<f8', 'fortran_order': False, 'shape': (2,), }";
  const std::size_t base = 12 + header.size() + 1;
  const std::size_t padded = (base + 63) / 64 * 64;
  header.append(padded - base, ' ');
  header += '\n';
  const auto path = tmp_path("v2.npy");
  {
    std::ofstream f(path, std::ios::binary);
    f.write("\x93NUMPY\x02\x00", 8);
    const std::uint32_t hlen = static_cast<std::uint32_t>(header.size());
    for (int i = 0; i < 4; ++i) f.put(static_cast<char>((hlen >> (8 * i)) & 0xff));
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    f.write(reinterpret_cast<const char*>(payload), sizeof(payload));
  }
  const auto m = read_npy_matrix(path);
  REQUIRE(m.data == std::vector<double>{7.5, -1.0});
  std::filesystem::remove(path);
}

TEST_CASE("mask csv row format") {
  MissingnessMask m({{1, 120}, {0, 35}, {1, 845}});
  REQUIRE(format_mask_row(m) == "(1,120),(0,35),(1,845)");
  REQUIRE(parse_mask_row("(1,120),(0,35),(1,845)") == m);
  // whitespace and quoting tolerated
  REQUIRE(parse_mask_row(" \"(1,120)\", (0,35) ,(1,845)") == m);
}

TEST_CASE("mask csv rejects malformed rows") {
  REQUIRE_THROWS_AS(parse_mask_row("(2,5)"), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row("(1,0)"), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row("(1,-3)"), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row("(1,abc)"), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row("(1,5"), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row(""), FormatError);
  REQUIRE_THROWS_AS(parse_mask_row("x(1,5)"), FormatError);
}

TEST_CASE("mask csv file round-trip merges fragmented runs") {
  std::vector<MissingnessMask> masks = {
      MissingnessMask({{1, 10}, {0, 5}, {1, 3}}),
      MissingnessMask({{0, 7}, {1, 2}}),
  };
  const auto path = tmp_path("masks.csv");
  write_mask_csv(path, masks);
  const auto back = read_mask_csv(path);
  REQUIRE(back == masks);
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint round-trip preserves config and every tensor bit") {
  AttentionStackConfig cfg;
  cfg.d_x = cfg.d = 8;
  cfg.qk_kind = QkKind::kBdc;
  cfg.bottleneck_dim = 2;
  cfg.dilations = {1, 2, 4};
  cfg.ffn_dim = 16;
  Model model(cfg);
  model.init(99);
  const auto path = tmp_path("model_roundtrip.ckpt");
  save_checkpoint(path, cfg, model.params());
  const Model back = load_model(path);
  REQUIRE(back.config().qk_kind == QkKind::kBdc);
  REQUIRE(back.config().dilations == cfg.dilations);
  REQUIRE(back.params().tensors.size() == model.params().tensors.size());
  for (std::size_t i = 0; i < model.params().tensors.size(); ++i) {
    const auto& a = model.params().tensors[i];
    const auto& b = back.params().tensors[i];
    REQUIRE(a.name == b.name);
    REQUIRE(a.data == b.data);
  }
  std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects non-checkpoint files") {
  const auto path = tmp_path("not_a_ckpt.bin");
  {
    std::ofstream f(path, std::ios::binary);
    f << "garbage bytes here, long enough to read a magic from";
  }
  REQUIRE_THROWS_AS(load_checkpoint(path), FormatError);
  std::filesystem::remove(path);
}

TEST_CASE("model config json round-trip") {
  AttentionStackConfig cfg;
  cfg.qk_kind = QkKind::kConv;
  cfg.filter_size = 9;
  cfg.key_range.full = false;
  cfg.key_range.window_w = 64;
  cfg.key_range.dilation_g = 3;
  cfg.use_positional_encoding = true;
  const auto back = config_from_json(config_to_json(cfg));
  REQUIRE(back.qk_kind == QkKind::kConv);
  REQUIRE(back.filter_size == 9);
  REQUIRE(back.key_range.full == false);
  REQUIRE(back.key_range.window_w == 64);
  REQUIRE(back.key_range.dilation_g == 3);
  REQUIRE(back.use_positional_encoding == true);
}

TEST_CASE("eval report json round-trips including NaN as null") {
  EvalReport r;
  r.task = EvalTask::kPpgBeats;
  r.per_waveform.push_back({"w0", 0.25, 3, 1, 2});
  r.total_tp = 3;
  r.total_fp = 1;
  r.total_fn = 2;
  r.mse = {0.25, 0.2, 0.3};
  r.f1 = {std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN(),
          std::numeric_limits<double>::quiet_NaN()};
  r.precision = {0.75, 0.5, 1.0};
  r.sensitivity = {0.6, 0.4, 0.8};
  const auto back = eval_report_from_json(eval_report_to_json(r));
  REQUIRE(back.task == EvalTask::kPpgBeats);
  REQUIRE(back.per_waveform.size() == 1);
  REQUIRE(back.per_waveform[0].mse_missing == 0.25);
  REQUIRE(std::isnan(back.f1.point));
  REQUIRE(back.precision.point == 0.75);
  REQUIRE(back.total_fn == 2);
}

TEST_CASE("metric cell formatting drops the leading zero") {
  REQUIRE(format_metric_cell(0.64, 0.003) == ".64 ± .003");
  REQUIRE(format_metric_cell(std::numeric_limits<double>::quiet_NaN(), 0.1) == "NaN");
  REQUIRE(format_metric_cell(0.0278, 0.0001) == ".0278 ± .0001");
  REQUIRE(format_metric_cell(1.0, 0.0) == "1 ± 0");
}

TEST_CASE("comparison table rejects mixed tasks") {
  EvalReport a, b;
  a.task = EvalTask::kEcgBeats;
  b.task = EvalTask::kPpgBeats;
  REQUIRE_THROWS_AS(comparison_table({{"a", a}, {"b", b}}), ParameterError);
  REQUIRE_THROWS_AS(comparison_table({}), ParameterError);
}

TEST_CASE("one report yields a one-row table") {
  EvalReport a;
  a.task = EvalTask::kEcgBeats;
  a.mse = {0.64, 0.637, 0.643};
  a.f1 = {0.9, 0.9, 0.9};
  a.precision = {0.9, 0.9, 0.9};
  a.sensitivity = {0.9, 0.9, 0.9};
  const auto table = comparison_table({{"linear", a}});
  // header + 1 data row
  REQUIRE(std::count(table.csv.begin(), table.csv.end(), '\n') == 2);
  REQUIRE(table.csv.find(".64 ± .003") != std::string::npos);
  REQUIRE(table.text.find("linear") != std::string::npos);
}

TEST_CASE("attention export sums to one") {
  net::AttentionCache cache;
  cache.keys = {{0, 1, 2}};
  cache.weights = {{0.2, 0.3, 0.5}};
  cache.uniform_fallback = {false};
  const auto path = tmp_path("attn.csv");
  export_attention(cache, 0, path);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  REQUIRE(header == "key_index,weight");
  double sum = 0.0;
  std::string line;
  while (std::getline(f, line)) {
    const auto comma = line.find(',');
    sum += std::stod(line.substr(comma + 1));
  }
  REQUIRE(sum == Catch::Approx(1.0).margin(1e-6));
  REQUIRE_THROWS_AS(export_attention(cache, 5, path), ParameterError);
  std::filesystem::remove(path);
}
