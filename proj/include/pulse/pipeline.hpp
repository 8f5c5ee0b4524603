#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pulse/beats.hpp"
#include "pulse/ecg_screen.hpp"
#include "pulse/errors.hpp"
#include "pulse/eval.hpp"
#include "pulse/imputers.hpp"
#include "pulse/mask_csv.hpp"
#include "pulse/missingness.hpp"
#include "pulse/model/checkpoint.hpp"
#include "pulse/model/train.hpp"
#include "pulse/npy.hpp"
#include "pulse/report.hpp"
#include "pulse/synth.hpp"

namespace pulse {

inline constexpr const char* kArtifactVersion = "0.1.0";

// ---------------------------------------------------------------------------
// Worker fan-out with deterministic result ordering: every index writes its
// own slot, so the outcome is independent of scheduling.
// ---------------------------------------------------------------------------

template <typename Fn>
inline void parallel_for(std::size_t n, int workers, Fn&& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  const std::size_t nw = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> threads;
  std::exception_ptr first_error;
  std::mutex err_mutex;
  for (std::size_t w = 0; w < nw; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += nw) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------
// Content hashing for manifests (FNV-1a 64).
// ---------------------------------------------------------------------------

inline std::string file_content_hash(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot hash '" + path + "'");
  std::uint64_t h = 0xcbf29ce484222325ull;
  char buf[65536];
  while (f.read(buf, sizeof(buf)) || f.gcount() > 0) {
    const std::streamsize got = f.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ull;
    }
    if (!f) break;
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return out;
}

// ---------------------------------------------------------------------------
// Run configuration.
// ---------------------------------------------------------------------------

struct RunConfig {
  int schema_version = 1;
  std::vector<std::string> stages;
  std::uint64_t seed = 0;
  int workers = 1;
  std::string output_dir;
  nlohmann::json params;  // per-stage parameter blocks

  static RunConfig from_json(const nlohmann::json& j) {
    RunConfig cfg;
    try {
      cfg.schema_version = j.value("schema_version", 1);
      if (cfg.schema_version != 1)
        throw ConfigError("unsupported config schema version");
      cfg.stages = j.at("stages").get<std::vector<std::string>>();
      cfg.seed = j.value("seed", std::uint64_t{0});
      cfg.workers = j.value("workers", 1);
      cfg.output_dir = j.at("output_dir").get<std::string>();
      cfg.params = j.value("params", nlohmann::json::object());
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("bad run config: ") + e.what());
    }
    return cfg;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config '" + path + "'");
    nlohmann::json j;
    try {
      is >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("config is not valid json: ") + e.what());
    }
    return from_json(j);
  }

  nlohmann::json stage_params(const std::string& stage) const {
    if (params.contains(stage)) return params.at(stage);
    return nlohmann::json::object();
  }
};

namespace detail {

inline const std::vector<std::string>& known_stages() {
  static const std::vector<std::string> s = {"synth",  "curate", "ablate", "train",
                                             "impute", "detect", "evaluate", "report"};
  return s;
}

/// Missingness percentages for the ablate/impute/evaluate stages: either a
/// single "percent" or a sweep block {"from", "to", "step"} in percent.
inline std::vector<int> resolve_percents(const nlohmann::json& ablate_params) {
  std::vector<int> percents;
  if (ablate_params.contains("sweep")) {
    const auto& s = ablate_params.at("sweep");
    const int from = s.at("from").get<int>();
    const int to = s.at("to").get<int>();
    const int step = s.at("step").get<int>();
    if (step <= 0 || from <= 0 || to < from)
      throw ConfigError("sweep needs 0 < from <= to and step > 0");
    for (int p = from; p <= to; p += step) percents.push_back(p);
  } else {
    percents.push_back(ablate_params.value("percent", 30));
  }
  for (int p : percents)
    if (p <= 0 || p > 100) throw ConfigError("missingness percent must be in (0,100]");
  return percents;
}

inline Waveform row_waveform(const NpyMatrix& m, std::size_t r, const std::string& tag) {
  Waveform w;
  w.samples = m.row(r);
  w.id = tag + "-" + std::to_string(r);
  return w;
}

inline Morphology morphology_from_name(const std::string& s) {
  if (s == "gauss_spike") return Morphology::kGaussSpike;
  if (s == "raised_cosine") return Morphology::kRaisedCosine;
  throw ConfigError("unknown morphology '" + s + "'");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pipeline runner. Every stage reads files, writes files, and records a
// manifest (config block, seed, version, input content hashes, outputs);
// nothing is mutated in place, so a rerun with the same config and seed
// reproduces every artifact byte for byte.
// ---------------------------------------------------------------------------

class PipelineRunner {
public:
  explicit PipelineRunner(RunConfig cfg) : cfg_(std::move(cfg)) { validate(); }

  /// Runs all stages in order. Throws on failure after writing a manifest
  /// that marks the failed stage; earlier outputs stay on disk.
  void run() {
    namespace fs = std::filesystem;
    fs::create_directories(cfg_.output_dir);
    for (const auto& stage : cfg_.stages) {
      inputs_.clear();
      outputs_.clear();
      try {
        if (stage == "synth") run_synth();
        else if (stage == "curate") run_curate();
        else if (stage == "ablate") run_ablate();
        else if (stage == "train") run_train();
        else if (stage == "impute") run_impute();
        else if (stage == "detect") run_detect();
        else if (stage == "evaluate") run_evaluate();
        else if (stage == "report") run_report();
        write_manifest(stage, true, "");
      } catch (const std::exception& e) {
        write_manifest(stage, false, e.what());
        throw;
      }
    }
  }

  std::string out_path(const std::string& name) const {
    return (std::filesystem::path(cfg_.output_dir) / name).string();
  }

private:
  void validate() {
    if (cfg_.stages.empty()) throw ConfigError("config has no stages");
    const auto& known = detail::known_stages();
    std::size_t prev_rank = 0;
    std::set<std::string> produced;
    for (const auto& s : cfg_.stages) {
      const auto it = std::find(known.begin(), known.end(), s);
      if (it == known.end()) throw ConfigError("unknown stage '" + s + "'");
      const std::size_t rank = static_cast<std::size_t>(it - known.begin());
      if (rank < prev_rank)
        throw ConfigError("stage '" + s + "' out of dependency order");
      prev_rank = rank;
      // Every externally supplied input must exist before anything runs;
      // inputs produced by an earlier stage in this run are exempt.
      for (const auto& path : declared_inputs(s)) {
        if (produced.count(path)) continue;
        if (!std::filesystem::exists(path))
          throw ConfigError("stage '" + s + "' input missing: '" + path + "'");
      }
      for (const auto& path : declared_outputs(s)) produced.insert(path);
    }
    if (cfg_.workers < 1) throw ConfigError("workers must be >= 1");
  }

  std::string resolved_input(const std::string& stage,
                             const std::string& fallback) const {
    const auto p = cfg_.stage_params(stage);
    if (p.contains("input")) return p.at("input").get<std::string>();
    return out_path(fallback);
  }

  std::vector<std::string> declared_inputs(const std::string& stage) const {
    if (stage == "synth") return {};
    if (stage == "curate") return {resolved_input("curate", "clean.npy")};
    if (stage == "ablate") return {resolved_input("ablate", default_clean())};
    if (stage == "train") return {resolved_input("train", default_clean())};
    if (stage == "impute" || stage == "detect" || stage == "evaluate") {
      std::vector<std::string> in = {out_path("normalized.npy")};
      for (int p : detail::resolve_percents(cfg_.stage_params("ablate")))
        in.push_back(out_path("masks_p" + std::to_string(p) + ".csv"));
      return in;
    }
    return {};  // report consumes evaluate outputs, declared below
  }

  std::vector<std::string> declared_outputs(const std::string& stage) const {
    std::vector<std::string> out;
    if (stage == "synth") out.push_back(out_path("clean.npy"));
    if (stage == "curate") out.push_back(out_path("curated.npy"));
    if (stage == "ablate") {
      out.push_back(out_path("normalized.npy"));
      for (int p : detail::resolve_percents(cfg_.stage_params("ablate"))) {
        out.push_back(out_path("ablated_p" + std::to_string(p) + ".npy"));
        out.push_back(out_path("masks_p" + std::to_string(p) + ".csv"));
      }
    }
    if (stage == "train") out.push_back(out_path("model.ckpt"));
    if (stage == "impute")
      for (const auto& m : impute_methods())
        for (int p : detail::resolve_percents(cfg_.stage_params("ablate")))
          out.push_back(out_path("imputed_" + m + "_p" + std::to_string(p) + ".npy"));
    if (stage == "evaluate")
      for (const auto& m : impute_methods())
        for (int p : detail::resolve_percents(cfg_.stage_params("ablate")))
          out.push_back(out_path("report_" + m + "_p" + std::to_string(p) + ".json"));
    return out;
  }

  std::string default_clean() const {
    // ablate/train read the curated set when curation ran, else raw synth.
    for (const auto& s : cfg_.stages)
      if (s == "curate") return "curated.npy";
    return "clean.npy";
  }

  std::vector<std::string> impute_methods() const {
    const auto p = cfg_.stage_params("impute");
    auto methods = p.value("methods", std::vector<std::string>{"mean", "linear", "fft"});
    for (const auto& m : methods)
      if (m != "mean" && m != "linear" && m != "fft" && m != "bdc")
        throw ConfigError("unknown imputation method '" + m + "'");
    return methods;
  }

  void track_input(const std::string& path) {
    inputs_.push_back({path, file_content_hash(path)});
  }
  void track_output(const std::string& path) { outputs_.push_back(path); }

  void write_manifest(const std::string& stage, bool ok, const std::string& error) {
    nlohmann::json inputs = nlohmann::json::object();
    for (const auto& [path, hash] : inputs_) inputs[path] = hash;
    nlohmann::json m = {{"stage", stage},
                        {"status", ok ? "ok" : "failed"},
                        {"seed", cfg_.seed},
                        {"version", kArtifactVersion},
                        {"config", cfg_.stage_params(stage)},
                        {"inputs", inputs},
                        {"outputs", outputs_}};
    if (!ok) m["error"] = error;
    std::ofstream os(out_path("manifest_" + stage + ".json"));
    if (!os) throw IoError("cannot write manifest for stage '" + stage + "'");
    os << m.dump(2) << "\n";
  }

  // --- stages -------------------------------------------------------------

  void run_synth() {
    const auto p = cfg_.stage_params("synth");
    const std::size_t count = p.value("count", 20);
    if (count == 0) throw ConfigError("synth count must be positive");
    SynthConfig base;
    base.duration_s = p.value("duration_s", 30.0);
    base.hrv_jitter_frac = p.value("jitter", 0.0);
    base.noise_sd = p.value("noise_sd", 0.0);
    base.morphology =
        detail::morphology_from_name(p.value("morphology", std::string("gauss_spike")));
    const auto bpms = p.value("bpm_values", std::vector<double>{60.0, 75.0, 100.0});
    if (bpms.empty()) throw ConfigError("bpm_values must be non-empty");

    NpyMatrix out;
    out.rows = count;
    std::vector<std::vector<double>> rows(count);
    parallel_for(count, cfg_.workers, [&](std::size_t i) {
      SynthConfig c = base;
      c.beat_rate_bpm = bpms[i % bpms.size()];
      c.seed = derive_seed(cfg_.seed, i);
      rows[i] = generate(c).waveform.samples;
    });
    out.cols = rows[0].size();
    for (const auto& r : rows) {
      if (r.size() != out.cols) throw DimensionError("inconsistent synth lengths");
      out.data.insert(out.data.end(), r.begin(), r.end());
    }
    write_npy_matrix(out_path("clean.npy"), out);
    track_output(out_path("clean.npy"));
  }

  void run_curate() {
    const auto p = cfg_.stage_params("curate");
    const std::string input = resolved_input("curate", "clean.npy");
    track_input(input);
    const NpyMatrix in = read_npy_matrix(input);
    const std::string screen = p.value("screen", std::string("none"));

    std::vector<int> accepted(in.rows, 0);
    std::vector<std::string> verdicts(in.rows);
    parallel_for(in.rows, cfg_.workers, [&](std::size_t r) {
      Waveform w = detail::row_waveform(in, r, "wave");
      if (screen == "none") {
        accepted[r] = 1;
        verdicts[r] = "accepted";
      } else if (screen == "ecg") {
        const auto report = ecg_quality_screen(w);
        accepted[r] = report.verdict != ScreenVerdict::kRejected ? 1 : 0;
        verdicts[r] = report.verdict == ScreenVerdict::kClean     ? "clean"
                      : report.verdict == ScreenVerdict::kRescued ? "rescued"
                                                                  : "rejected";
      } else if (screen == "ppg") {
        bool ok = false;
        try {
          ok = ppg_accept(w).accepted;
        } catch (const InsufficientDataError&) {
          ok = false;
        }
        accepted[r] = ok ? 1 : 0;
        verdicts[r] = ok ? "accepted" : "rejected";
      } else {
        throw ConfigError("unknown screen '" + screen + "'");
      }
    });

    NpyMatrix out;
    out.cols = in.cols;
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t r = 0; r < in.rows; ++r) {
      per.push_back({{"row", r}, {"verdict", verdicts[r]}});
      if (accepted[r]) {
        const auto row = in.row(r);
        out.data.insert(out.data.end(), row.begin(), row.end());
        ++out.rows;
      }
    }
    if (out.rows == 0) throw InsufficientDataError("curation rejected every waveform");
    write_npy_matrix(out_path("curated.npy"), out);
    track_output(out_path("curated.npy"));
    std::ofstream os(out_path("curation.json"));
    os << nlohmann::json{{"screen", screen},
                         {"accepted", out.rows},
                         {"total", in.rows},
                         {"per_waveform", per}}
              .dump(2)
       << "\n";
    track_output(out_path("curation.json"));
  }

  void run_ablate() {
    const auto p = cfg_.stage_params("ablate");
    const std::string input = resolved_input("ablate", default_clean());
    track_input(input);
    const NpyMatrix in = read_npy_matrix(input);
    const std::string pattern = p.value("pattern", std::string("extended"));
    if (pattern != "extended" && pattern != "transient")
      throw ConfigError("unknown missingness pattern '" + pattern + "'");

    // Per-waveform min-max normalization to [0,1]; imputation and MSE run
    // on this scale.
    NpyMatrix norm;
    norm.rows = in.rows;
    norm.cols = in.cols;
    norm.data.resize(in.data.size());
    for (std::size_t r = 0; r < in.rows; ++r) {
      Waveform w = detail::row_waveform(in, r, "wave");
      const auto [nw, rec] = normalize(w, NormalizationMethod::kMinMax);
      for (std::size_t c = 0; c < in.cols; ++c) norm.at(r, c) = nw.samples[c];
    }
    write_npy_matrix(out_path("normalized.npy"), norm);
    track_output(out_path("normalized.npy"));

    for (int percent : detail::resolve_percents(p)) {
      const double frac = static_cast<double>(percent) / 100.0;
      NpyMatrix ablated = norm;
      std::vector<MissingnessMask> masks;
      for (std::size_t r = 0; r < norm.rows; ++r) {
        const std::uint64_t s =
            derive_seed(cfg_.seed, 10000 + static_cast<std::uint64_t>(percent) * 100000 + r);
        MissingnessMask m = pattern == "extended"
                                ? extended_mask(norm.cols, frac, s)
                                : transient_mask(norm.cols, frac, kDefaultBlockMs, s);
        const auto dense = m.to_dense();
        for (std::size_t c = 0; c < norm.cols; ++c)
          if (!dense[c]) ablated.at(r, c) = 0.0;
        masks.push_back(std::move(m));
      }
      const std::string suffix = "_p" + std::to_string(percent);
      write_npy_matrix(out_path("ablated" + suffix + ".npy"), ablated);
      write_mask_csv(out_path("masks" + suffix + ".csv"), masks);
      track_output(out_path("ablated" + suffix + ".npy"));
      track_output(out_path("masks" + suffix + ".csv"));
    }
  }

  void run_train() {
    const auto p = cfg_.stage_params("train");
    const std::string input = resolved_input("train", default_clean());
    track_input(input);
    const NpyMatrix in = read_npy_matrix(input);

    AttentionStackConfig mc;
    mc.qk_kind = p.value("qk_kind", std::string("bdc")) == "bdc"
                     ? QkKind::kBdc
                     : p.value("qk_kind", std::string("bdc")) == "conv" ? QkKind::kConv
                                                                        : QkKind::kVanilla;
    mc.d_x = mc.d = p.value("d", 8);
    mc.bottleneck_dim = p.value("bottleneck_dim", std::max(1, mc.d / 4));
    mc.ffn_dim = p.value("ffn_dim", 2 * mc.d);
    if (p.contains("dilations")) mc.dilations = p.at("dilations").get<std::vector<int>>();
    mc.filter_size = p.value("filter_size", 15);
    mc.validate();

    std::vector<AblationCase> dataset;
    const double train_frac = p.value("missing_fraction", 0.3);
    for (std::size_t r = 0; r < in.rows; ++r) {
      Waveform w = detail::row_waveform(in, r, "train");
      auto [nw, rec] = normalize(w, NormalizationMethod::kMinMax);
      dataset.push_back(apply_mask(
          nw, extended_mask(nw.size(), train_frac, derive_seed(cfg_.seed, 20000 + r))));
    }

    Model model(mc);
    TrainConfig tc;
    tc.steps = p.value("steps", 500);
    tc.batch_size = p.value("batch", 2);
    tc.adam.lr = p.value("lr", 1e-3);
    tc.seed = derive_seed(cfg_.seed, 21000);
    train(model, dataset, tc);
    save_checkpoint(out_path("model.ckpt"), mc, model.params());
    track_output(out_path("model.ckpt"));
  }

  void run_impute() {
    const auto clean_path = out_path("normalized.npy");
    track_input(clean_path);
    const NpyMatrix clean = read_npy_matrix(clean_path);
    const auto methods = impute_methods();

    std::unique_ptr<Model> model;
    for (const auto& m : methods)
      if (m == "bdc" && !model) {
        const std::string ckpt =
            cfg_.stage_params("impute").value("checkpoint", out_path("model.ckpt"));
        track_input(ckpt);
        model = std::make_unique<Model>(load_model(ckpt));
      }

    for (int percent : detail::resolve_percents(cfg_.stage_params("ablate"))) {
      const std::string suffix = "_p" + std::to_string(percent);
      const std::string mask_path = out_path("masks" + suffix + ".csv");
      track_input(mask_path);
      const auto masks = read_mask_csv(mask_path);
      if (masks.size() != clean.rows)
        throw DimensionError("mask row count does not match waveform count");

      for (const auto& method : methods) {
        NpyMatrix out;
        out.rows = clean.rows;
        out.cols = clean.cols;
        out.data.resize(clean.data.size());
        std::vector<std::vector<double>> rows(clean.rows);
        parallel_for(clean.rows, cfg_.workers, [&](std::size_t r) {
          const AblationCase c =
              apply_mask(detail::row_waveform(clean, r, "wave"), masks[r]);
          Waveform imputed;
          if (method == "mean") imputed = mean_fill(c).imputed;
          else if (method == "linear") imputed = linear_interp(c).imputed;
          else if (method == "fft") imputed = fft_impute(c).imputed;
          else imputed = model->impute(c);
          rows[r] = std::move(imputed.samples);
        });
        for (std::size_t r = 0; r < clean.rows; ++r)
          for (std::size_t c = 0; c < clean.cols; ++c) out.at(r, c) = rows[r][c];
        const std::string path = out_path("imputed_" + method + suffix + ".npy");
        write_npy_matrix(path, out);
        track_output(path);
      }
    }
  }

  void run_detect() {
    const auto p = cfg_.stage_params("detect");
    const std::string input = p.value("input", out_path("normalized.npy"));
    track_input(input);
    const NpyMatrix in = read_npy_matrix(input);
    const std::string detector = p.value("detector", std::string("ecg"));
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < in.rows; ++r) {
      const Waveform w = detail::row_waveform(in, r, "wave");
      const PeakSet peaks =
          detector == "ppg" ? detect_peaks_ppg(w) : detect_peaks_ecg(w);
      rows.push_back({{"row", r}, {"peaks", peaks.indices}});
    }
    std::ofstream os(out_path("peaks.json"));
    os << nlohmann::json{{"detector", detector}, {"per_waveform", rows}}.dump(2) << "\n";
    track_output(out_path("peaks.json"));
  }

  void run_evaluate() {
    const auto p = cfg_.stage_params("evaluate");
    const EvalTask task = eval_task_from_name(p.value("task", std::string("ecg_beats")));
    const std::size_t iters = p.value("bootstrap_iters", 1000);
    const auto clean_path = out_path("normalized.npy");
    track_input(clean_path);
    const NpyMatrix clean = read_npy_matrix(clean_path);

    for (int percent : detail::resolve_percents(cfg_.stage_params("ablate"))) {
      const std::string suffix = "_p" + std::to_string(percent);
      const std::string mask_path = out_path("masks" + suffix + ".csv");
      track_input(mask_path);
      const auto masks = read_mask_csv(mask_path);

      for (const auto& method : impute_methods()) {
        const std::string imp_path = out_path("imputed_" + method + suffix + ".npy");
        track_input(imp_path);
        const NpyMatrix imputed = read_npy_matrix(imp_path);
        if (imputed.rows != clean.rows || imputed.cols != clean.cols)
          throw DimensionError("imputed matrix shape does not match clean matrix");

        std::vector<AblationCase> cases;
        for (std::size_t r = 0; r < clean.rows; ++r)
          cases.push_back(apply_mask(detail::row_waveform(clean, r, "wave"), masks[r]));
        auto imputer = [&](const AblationCase& c) {
          // Row index recovered from the id assigned above.
          const std::size_t r = std::stoull(c.ground_truth.id.substr(5));
          Waveform w = c.ablated;
          w.samples = imputed.row(r);
          return w;
        };
        const EvalReport report =
            evaluate_pipeline(cases, imputer, task, iters, derive_seed(cfg_.seed, 30000));
        write_eval_report(report, out_path("report_" + method + suffix + ".json"));
        write_per_waveform_csv(report, out_path("per_waveform_" + method + suffix + ".csv"));
        track_output(out_path("report_" + method + suffix + ".json"));
        track_output(out_path("per_waveform_" + method + suffix + ".csv"));
      }
    }
  }

  void run_report() {
    const auto percents = detail::resolve_percents(cfg_.stage_params("ablate"));
    std::vector<std::pair<std::string, EvalReport>> reports;
    for (const auto& method : impute_methods()) {
      for (int percent : percents) {
        const std::string suffix = "_p" + std::to_string(percent);
        const std::string path = out_path("report_" + method + suffix + ".json");
        track_input(path);
        const std::string label =
            percents.size() == 1 ? method : method + " @" + std::to_string(percent) + "%";
        reports.push_back({label, read_eval_report(path)});
      }
    }
    const ComparisonTable table = comparison_table(reports);
    {
      std::ofstream os(out_path("report_table.csv"));
      os << table.csv;
    }
    {
      std::ofstream os(out_path("report_table.txt"));
      os << table.text;
    }
    track_output(out_path("report_table.csv"));
    track_output(out_path("report_table.txt"));
  }

  RunConfig cfg_;
  std::vector<std::pair<std::string, std::string>> inputs_;  // (path, hash)
  std::vector<std::string> outputs_;
};

inline void run_pipeline(const RunConfig& cfg) { PipelineRunner(cfg).run(); }

}  // namespace pulse
