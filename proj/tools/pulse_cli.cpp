// Command-line front end: file-based subcommands for each pipeline stage
// plus `run` for config-driven end-to-end execution.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pulse/pulse.hpp"

namespace {

pulse::NpyMatrix waveforms_to_matrix(const std::vector<std::vector<double>>& rows) {
  pulse::NpyMatrix m;
  m.rows = rows.size();
  m.cols = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != m.cols) throw pulse::DimensionError("inconsistent waveform lengths");
    m.data.insert(m.data.end(), r.begin(), r.end());
  }
  return m;
}

pulse::Waveform row_waveform(const pulse::NpyMatrix& m, std::size_t r) {
  pulse::Waveform w;
  w.samples = m.row(r);
  w.id = "wave-" + std::to_string(r);
  return w;
}

struct CommonOpts {
  std::uint64_t seed = 0;
  int workers = 1;
  std::string config;
};

void add_synth(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("synth", "Generate synthetic pulsative waveforms");
  struct SynthOpts {
    std::string out = "clean.npy";
    std::size_t count = 20;
    double duration_s = 30.0;
    std::vector<double> bpm = {60.0, 75.0, 100.0};
    double jitter = 0.0;
    double noise_sd = 0.0;
    std::string morphology = "gauss_spike";
  };
  auto opts = std::make_shared<SynthOpts>();
  cmd->add_option("--out", opts->out, "Output NPY path");
  cmd->add_option("--count", opts->count, "Number of waveforms");
  cmd->add_option("--duration-s", opts->duration_s, "Duration in seconds");
  cmd->add_option("--bpm", opts->bpm, "Beat rates, cycled across waveforms");
  cmd->add_option("--jitter", opts->jitter, "Per-beat period jitter fraction");
  cmd->add_option("--noise-sd", opts->noise_sd, "Additive Gaussian noise SD");
  cmd->add_option("--morphology", opts->morphology, "gauss_spike | raised_cosine")
      ->check(CLI::IsMember({"gauss_spike", "raised_cosine"}));
  cmd->callback([opts, &common] {
    std::vector<std::vector<double>> rows(opts->count);
    for (std::size_t i = 0; i < opts->count; ++i) {
      pulse::SynthConfig c;
      c.duration_s = opts->duration_s;
      c.beat_rate_bpm = opts->bpm[i % opts->bpm.size()];
      c.hrv_jitter_frac = opts->jitter;
      c.noise_sd = opts->noise_sd;
      c.morphology = opts->morphology == "raised_cosine"
                         ? pulse::Morphology::kRaisedCosine
                         : pulse::Morphology::kGaussSpike;
      c.seed = pulse::derive_seed(common.seed, i);
      rows[i] = pulse::generate(c).waveform.samples;
    }
    pulse::write_npy_matrix(opts->out, waveforms_to_matrix(rows));
  });
}

void add_curate(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("curate", "Signal-quality screening");
  struct CurateOpts {
    std::string input;
    std::string screen = "ecg";
    std::string out_accepted = "curated.npy";
    std::string out_report = "curation.json";
  };
  auto opts = std::make_shared<CurateOpts>();
  cmd->add_option("--input", opts->input, "Input NPY")->required();
  cmd->add_option("--screen", opts->screen, "ecg | ppg")
      ->check(CLI::IsMember({"ecg", "ppg"}));
  cmd->add_option("--out-accepted", opts->out_accepted, "Accepted waveforms NPY");
  cmd->add_option("--out-report", opts->out_report, "Per-waveform verdict JSON");
  cmd->callback([opts, &common] {
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->input);
    std::vector<int> accepted(in.rows, 0);
    std::vector<std::string> verdicts(in.rows);
    pulse::parallel_for(in.rows, common.workers, [&](std::size_t r) {
      const pulse::Waveform w = row_waveform(in, r);
      if (opts->screen == "ecg") {
        const auto rep = pulse::ecg_quality_screen(w);
        accepted[r] = rep.verdict != pulse::ScreenVerdict::kRejected;
        verdicts[r] = rep.verdict == pulse::ScreenVerdict::kClean     ? "clean"
                      : rep.verdict == pulse::ScreenVerdict::kRescued ? "rescued"
                                                                      : "rejected";
      } else {
        bool ok = false;
        try {
          ok = pulse::ppg_accept(w).accepted;
        } catch (const pulse::InsufficientDataError&) {
        }
        accepted[r] = ok;
        verdicts[r] = ok ? "accepted" : "rejected";
      }
    });
    std::vector<std::vector<double>> keep;
    nlohmann::json per = nlohmann::json::array();
    for (std::size_t r = 0; r < in.rows; ++r) {
      per.push_back({{"row", r}, {"verdict", verdicts[r]}});
      if (accepted[r]) keep.push_back(in.row(r));
    }
    if (keep.empty())
      throw pulse::InsufficientDataError("curation rejected every waveform");
    pulse::write_npy_matrix(opts->out_accepted, waveforms_to_matrix(keep));
    std::ofstream os(opts->out_report);
    os << nlohmann::json{{"screen", opts->screen},
                         {"accepted", keep.size()},
                         {"total", in.rows},
                         {"per_waveform", per}}
              .dump(2)
       << "\n";
  });
}

void add_ablate(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("ablate", "Apply realistic missingness");
  struct AblateOpts {
    std::string input;
    std::string pattern = "extended";
    double percent = 30.0;
    std::string out_ablated = "ablated.npy";
    std::string out_masks = "masks.csv";
    std::string out_normalized;
    bool no_normalize = false;
  };
  auto opts = std::make_shared<AblateOpts>();
  cmd->add_option("--input", opts->input, "Clean NPY")->required();
  cmd->add_option("--pattern", opts->pattern, "extended | transient")
      ->check(CLI::IsMember({"extended", "transient"}));
  cmd->add_option("--percent", opts->percent, "Missing percentage");
  cmd->add_option("--out-ablated", opts->out_ablated, "Ablated NPY");
  cmd->add_option("--out-masks", opts->out_masks, "Mask CSV");
  cmd->add_option("--out-normalized", opts->out_normalized,
                  "Min-max-normalized ground truth NPY (for evaluation)");
  cmd->add_flag("--no-normalize", opts->no_normalize,
                "Skip per-waveform min-max normalization");
  cmd->callback([opts, &common] {
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->input);
    const double frac = opts->percent / 100.0;
    if (frac <= 0.0 || frac > 1.0)
      throw pulse::ParameterError("percent must be in (0,100]");
    pulse::NpyMatrix norm = in;
    if (!opts->no_normalize) {
      for (std::size_t r = 0; r < in.rows; ++r) {
        const auto [nw, rec] =
            pulse::normalize(row_waveform(in, r), pulse::NormalizationMethod::kMinMax);
        for (std::size_t c = 0; c < in.cols; ++c) norm.at(r, c) = nw.samples[c];
      }
    }
    pulse::NpyMatrix ablated = norm;
    std::vector<pulse::MissingnessMask> masks;
    for (std::size_t r = 0; r < norm.rows; ++r) {
      const std::uint64_t s = pulse::derive_seed(common.seed, r);
      pulse::MissingnessMask m =
          opts->pattern == "extended"
              ? pulse::extended_mask(norm.cols, frac, s)
              : pulse::transient_mask(norm.cols, frac, pulse::kDefaultBlockMs, s);
      const auto dense = m.to_dense();
      for (std::size_t c = 0; c < norm.cols; ++c)
        if (!dense[c]) ablated.at(r, c) = 0.0;
      masks.push_back(std::move(m));
    }
    pulse::write_npy_matrix(opts->out_ablated, ablated);
    pulse::write_mask_csv(opts->out_masks, masks);
    if (!opts->out_normalized.empty())
      pulse::write_npy_matrix(opts->out_normalized, norm);
  });
}

void add_train(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("train", "Train an attention imputer");
  struct TrainOpts {
    std::string input;
    std::string out = "model.ckpt";
    std::string qk = "bdc";
    int d = 8;
    int filter_size = 15;
    std::vector<int> dilations = {1, 2, 4, 8, 16, 32};
    std::size_t steps = 500;
    std::size_t batch = 2;
    double lr = 1e-3;
    double missing_fraction = 0.3;
  };
  auto opts = std::make_shared<TrainOpts>();
  cmd->add_option("--input", opts->input, "Training waveforms NPY")->required();
  cmd->add_option("--out", opts->out, "Checkpoint path");
  cmd->add_option("--qk", opts->qk, "vanilla | conv | bdc")
      ->check(CLI::IsMember({"vanilla", "conv", "bdc"}));
  cmd->add_option("--d", opts->d, "Model width");
  cmd->add_option("--filter-size", opts->filter_size, "Conv/BDC filter size");
  cmd->add_option("--dilations", opts->dilations, "BDC dilation schedule");
  cmd->add_option("--steps", opts->steps, "Training steps");
  cmd->add_option("--batch", opts->batch, "Batch size");
  cmd->add_option("--lr", opts->lr, "Learning rate");
  cmd->add_option("--missing-fraction", opts->missing_fraction,
                  "Extended-gap fraction used for training ablation");
  cmd->callback([opts, &common] {
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->input);
    pulse::AttentionStackConfig mc;
    mc.qk_kind = opts->qk == "bdc"    ? pulse::QkKind::kBdc
                 : opts->qk == "conv" ? pulse::QkKind::kConv
                                      : pulse::QkKind::kVanilla;
    mc.d_x = mc.d = opts->d;
    mc.bottleneck_dim = std::max(1, opts->d / 4);
    mc.ffn_dim = 2 * opts->d;
    mc.filter_size = opts->filter_size;
    mc.dilations = opts->dilations;
    std::vector<pulse::AblationCase> dataset;
    for (std::size_t r = 0; r < in.rows; ++r) {
      auto [nw, rec] =
          pulse::normalize(row_waveform(in, r), pulse::NormalizationMethod::kMinMax);
      dataset.push_back(pulse::apply_mask(
          nw, pulse::extended_mask(nw.size(), opts->missing_fraction,
                                   pulse::derive_seed(common.seed, 20000 + r))));
    }
    pulse::Model model(mc);
    pulse::TrainConfig tc;
    tc.steps = opts->steps;
    tc.batch_size = opts->batch;
    tc.adam.lr = opts->lr;
    tc.seed = common.seed;
    pulse::train(model, dataset, tc);
    pulse::save_checkpoint(opts->out, mc, model.params());
  });
}

void add_impute(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("impute", "Fill missing regions");
  struct ImputeOpts {
    std::string clean;
    std::string masks;
    std::string method = "linear";
    std::string checkpoint;
    std::string out = "imputed.npy";
  };
  auto opts = std::make_shared<ImputeOpts>();
  cmd->add_option("--input", opts->clean, "Waveforms NPY (observed values)")->required();
  cmd->add_option("--masks", opts->masks, "Mask CSV, one row per waveform")->required();
  cmd->add_option("--method", opts->method, "mean | linear | fft | bdc")
      ->check(CLI::IsMember({"mean", "linear", "fft", "bdc"}));
  cmd->add_option("--checkpoint", opts->checkpoint, "Model checkpoint (bdc)");
  cmd->add_option("--out", opts->out, "Imputed NPY");
  cmd->callback([opts, &common] {
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->clean);
    const auto masks = pulse::read_mask_csv(opts->masks);
    if (masks.size() != in.rows)
      throw pulse::DimensionError("mask row count does not match waveform count");
    std::unique_ptr<pulse::Model> model;
    if (opts->method == "bdc") {
      if (opts->checkpoint.empty())
        throw pulse::ConfigError("--checkpoint is required for method bdc");
      model = std::make_unique<pulse::Model>(pulse::load_model(opts->checkpoint));
    }
    std::vector<std::vector<double>> rows(in.rows);
    pulse::parallel_for(in.rows, common.workers, [&](std::size_t r) {
      const pulse::AblationCase c = pulse::apply_mask(row_waveform(in, r), masks[r]);
      pulse::Waveform imputed;
      if (opts->method == "mean") imputed = pulse::mean_fill(c).imputed;
      else if (opts->method == "linear") imputed = pulse::linear_interp(c).imputed;
      else if (opts->method == "fft") imputed = pulse::fft_impute(c).imputed;
      else imputed = model->impute(c);
      rows[r] = std::move(imputed.samples);
    });
    pulse::write_npy_matrix(opts->out, waveforms_to_matrix(rows));
  });
}

void add_detect(CLI::App& app, const CommonOpts&) {
  auto* cmd = app.add_subcommand("detect", "Heartbeat peak detection");
  struct DetectOpts {
    std::string input;
    std::string detector = "ecg";
    std::string out = "peaks.json";
  };
  auto opts = std::make_shared<DetectOpts>();
  cmd->add_option("--input", opts->input, "Waveforms NPY")->required();
  cmd->add_option("--detector", opts->detector, "ecg | ppg")
      ->check(CLI::IsMember({"ecg", "ppg"}));
  cmd->add_option("--out", opts->out, "Peak indices JSON");
  cmd->callback([opts] {
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->input);
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t r = 0; r < in.rows; ++r) {
      const pulse::Waveform w = row_waveform(in, r);
      const pulse::PeakSet peaks = opts->detector == "ppg"
                                       ? pulse::detect_peaks_ppg(w)
                                       : pulse::detect_peaks_ecg(w);
      rows.push_back({{"row", r}, {"peaks", peaks.indices}});
    }
    std::ofstream os(opts->out);
    if (!os) throw pulse::IoError("cannot write '" + opts->out + "'");
    os << nlohmann::json{{"detector", opts->detector}, {"per_waveform", rows}}.dump(2)
       << "\n";
  });
}

void add_evaluate(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("evaluate", "Score imputation quality");
  struct EvaluateOpts {
    std::string clean;
    std::string imputed;
    std::string masks;
    std::string task = "ecg_beats";
    std::size_t bootstrap_iters = 1000;
    std::string out = "report.json";
    std::string out_per_waveform;
  };
  auto opts = std::make_shared<EvaluateOpts>();
  cmd->add_option("--clean", opts->clean, "Ground-truth NPY")->required();
  cmd->add_option("--imputed", opts->imputed, "Imputed NPY")->required();
  cmd->add_option("--masks", opts->masks, "Mask CSV")->required();
  cmd->add_option("--task", opts->task, "ecg_beats | ppg_beats | mse_only")
      ->check(CLI::IsMember({"ecg_beats", "ppg_beats", "mse_only"}));
  cmd->add_option("--bootstrap-iters", opts->bootstrap_iters, "Bootstrap iterations");
  cmd->add_option("--out", opts->out, "Report JSON");
  cmd->add_option("--out-per-waveform", opts->out_per_waveform, "Per-waveform CSV");
  cmd->callback([opts, &common] {
    const pulse::NpyMatrix clean = pulse::read_npy_matrix(opts->clean);
    const pulse::NpyMatrix imputed = pulse::read_npy_matrix(opts->imputed);
    if (imputed.rows != clean.rows || imputed.cols != clean.cols)
      throw pulse::DimensionError("imputed matrix shape does not match clean matrix");
    const auto masks = pulse::read_mask_csv(opts->masks);
    if (masks.size() != clean.rows)
      throw pulse::DimensionError("mask row count does not match waveform count");
    std::vector<pulse::AblationCase> cases;
    for (std::size_t r = 0; r < clean.rows; ++r)
      cases.push_back(pulse::apply_mask(row_waveform(clean, r), masks[r]));
    auto imputer = [&](const pulse::AblationCase& c) {
      const std::size_t r = std::stoull(c.ground_truth.id.substr(5));
      pulse::Waveform w = c.ablated;
      w.samples = imputed.row(r);
      return w;
    };
    const pulse::EvalReport report =
        pulse::evaluate_pipeline(cases, imputer, pulse::eval_task_from_name(opts->task),
                                 opts->bootstrap_iters, common.seed);
    pulse::write_eval_report(report, opts->out);
    if (!opts->out_per_waveform.empty())
      pulse::write_per_waveform_csv(report, opts->out_per_waveform);
  });
}

void add_report(CLI::App& app, const CommonOpts&) {
  auto* cmd = app.add_subcommand("report", "Method-comparison table from reports");
  struct ReportOpts {
    std::vector<std::string> reports;
    std::string out_csv = "report_table.csv";
    std::string out_text = "report_table.txt";
  };
  auto opts = std::make_shared<ReportOpts>();
  cmd->add_option("reports", opts->reports, "label=report.json entries (or bare paths)")
      ->required();
  cmd->add_option("--out-csv", opts->out_csv, "Table CSV path");
  cmd->add_option("--out-text", opts->out_text, "Table text path");
  cmd->callback([opts] {
    std::vector<std::pair<std::string, pulse::EvalReport>> reports;
    for (const auto& entry : opts->reports) {
      const auto eq = entry.find('=');
      std::string label = eq == std::string::npos ? entry : entry.substr(0, eq);
      const std::string path = eq == std::string::npos ? entry : entry.substr(eq + 1);
      reports.push_back({label, pulse::read_eval_report(path)});
    }
    const pulse::ComparisonTable table = pulse::comparison_table(reports);
    {
      std::ofstream os(opts->out_csv);
      if (!os) throw pulse::IoError("cannot write '" + opts->out_csv + "'");
      os << table.csv;
    }
    {
      std::ofstream os(opts->out_text);
      if (!os) throw pulse::IoError("cannot write '" + opts->out_text + "'");
      os << table.text;
    }
    std::cout << table.text;
  });
}

void add_run(CLI::App& app, const CommonOpts& common) {
  auto* cmd = app.add_subcommand("run", "Execute a config-driven pipeline");
  cmd->callback([&common] {
    if (common.config.empty())
      throw pulse::ConfigError("run requires --config");
    pulse::RunConfig cfg = pulse::RunConfig::from_file(common.config);
    pulse::run_pipeline(cfg);
  });
}

void add_inspect_attn(CLI::App& app, const CommonOpts&) {
  auto* cmd = app.add_subcommand("inspect-attn", "Export attention weights for one query");
  struct AttnOpts {
    std::string checkpoint;
    std::string input;
    std::size_t row = 0;
    std::size_t layer = 0;
    std::size_t query = 0;
    std::string out = "attention.csv";
  };
  auto opts = std::make_shared<AttnOpts>();
  cmd->add_option("--checkpoint", opts->checkpoint, "Model checkpoint")->required();
  cmd->add_option("--input", opts->input, "Waveforms NPY")->required();
  cmd->add_option("--row", opts->row, "Waveform row");
  cmd->add_option("--layer", opts->layer, "Encoder layer index");
  cmd->add_option("--query", opts->query, "Query time index");
  cmd->add_option("--out", opts->out, "CSV path (key_index,weight)");
  cmd->callback([opts] {
    pulse::Model model = pulse::load_model(opts->checkpoint);
    const pulse::NpyMatrix in = pulse::read_npy_matrix(opts->input);
    if (opts->row >= in.rows) throw pulse::ParameterError("row out of range");
    pulse::ModelCache cache;
    model.forward(in.row(opts->row), cache);
    pulse::export_attention(pulse::Model::attention_of(cache, opts->layer), opts->query,
                            opts->out);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulsative-signal imputation benchmark toolkit"};
  app.require_subcommand(1);
  CommonOpts common;
  app.add_option("--seed", common.seed, "Global random seed");
  app.add_option("--workers", common.workers, "Worker thread count")
      ->check(CLI::PositiveNumber);
  app.add_option("--config", common.config, "Pipeline config JSON (for `run`)");

  add_synth(app, common);
  add_curate(app, common);
  add_ablate(app, common);
  add_train(app, common);
  add_impute(app, common);
  add_detect(app, common);
  add_evaluate(app, common);
  add_report(app, common);
  add_run(app, common);
  add_inspect_attn(app, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // usage problems are user errors
  } catch (const pulse::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
