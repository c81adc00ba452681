// specfp: deconvolution artifact analysis for audio.
//
// Subcommands cover the full pipeline: predicting artifact peak locations
// from stride schedules, simulating deconvolution stacks, extracting
// artifact fingerprints from WAV files, training/evaluating the linear
// detector, and generating the synthetic desk-scale dataset.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage or input error.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "specfp/audio_io.hpp"
#include "specfp/deconv.hpp"
#include "specfp/detector.hpp"
#include "specfp/errors.hpp"
#include "specfp/fingerprint.hpp"
#include "specfp/rng.hpp"
#include "specfp/signal.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace specfp;

namespace {

unsigned resolve_threads(int requested) {
  if (requested < 0) throw InvalidParameter("--threads must be >= 0");
  if (requested > 0) return static_cast<unsigned>(requested);
  if (const char* env = std::getenv("SPECFP_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::ostream& open_output(std::ofstream& file, const std::string& path) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path);
  if (!file) throw Error("cannot open output file " + path);
  return file;
}

// ------------------------------------------------------------ configs ----

// FingerprintConfig file with every field optional; the band defaults are
// resolved against the audio's sample rate when absent.
struct PartialFingerprintConfig {
  std::optional<std::size_t> frame_len;
  std::optional<double> band_low, band_high, epsilon, overlap;
  std::optional<std::size_t> min_window;
  std::optional<std::string> window;

  FingerprintConfig resolve(double sample_rate) const {
    FingerprintConfig cfg = FingerprintConfig::for_rate(sample_rate);
    if (frame_len) cfg.frame_len = *frame_len;
    if (band_low) cfg.band_low = *band_low;
    if (band_high) cfg.band_high = *band_high;
    if (min_window) cfg.min_window = *min_window;
    if (epsilon) cfg.epsilon = *epsilon;
    if (overlap) cfg.overlap = *overlap;
    if (window) {
      if (*window == "hann") {
        cfg.window = FrameWindow::hann;
      } else if (*window == "rectangular") {
        cfg.window = FrameWindow::rectangular;
      } else {
        throw InvalidParameter("unknown window '" + *window + "'");
      }
    }
    return cfg;
  }
};

PartialFingerprintConfig load_partial_config(const std::string& path) {
  PartialFingerprintConfig out;
  if (path.empty()) return out;
  std::ifstream is(path);
  if (!is) throw Error("cannot open config file " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw CorruptFile("config " + path + ": " + e.what());
  }
  if (j.contains("frame_len")) out.frame_len = j["frame_len"].get<std::size_t>();
  if (j.contains("band_low")) out.band_low = j["band_low"].get<double>();
  if (j.contains("band_high")) out.band_high = j["band_high"].get<double>();
  if (j.contains("min_window")) out.min_window = j["min_window"].get<std::size_t>();
  if (j.contains("epsilon")) out.epsilon = j["epsilon"].get<double>();
  if (j.contains("overlap")) out.overlap = j["overlap"].get<double>();
  if (j.contains("window")) out.window = j["window"].get<std::string>();
  return out;
}

struct StackConfig {
  double input_rate = 0.0;
  Activation activation = Activation::leaky_relu;
  struct Layer {
    std::size_t stride = 1;
    std::size_t kernel_len = 0;  // 0 -> 2*stride+1
    UpsampleMode mode = UpsampleMode::zero_insert;
    std::uint64_t seed = 1;
  };
  std::vector<Layer> layers;
};

StackConfig load_stack_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open stack config " + path);
  json j;
  try {
    is >> j;
  } catch (const json::exception& e) {
    throw CorruptFile("stack config " + path + ": " + e.what());
  }
  StackConfig cfg;
  try {
    cfg.input_rate = j.at("input_rate").get<double>();
    const std::string act = j.value("activation", "leaky_relu");
    if (act == "none") {
      cfg.activation = Activation::none;
    } else if (act == "relu") {
      cfg.activation = Activation::relu;
    } else if (act == "leaky_relu") {
      cfg.activation = Activation::leaky_relu;
    } else {
      throw InvalidParameter("unknown activation '" + act + "'");
    }
    for (const auto& jl : j.at("layers")) {
      StackConfig::Layer l;
      l.stride = jl.at("stride").get<std::size_t>();
      l.kernel_len = jl.value("kernel_len", std::size_t{0});
      l.seed = jl.value("seed", std::uint64_t{1});
      const std::string mode = jl.value("upsample_mode", "zero_insert");
      if (mode == "zero_insert") {
        l.mode = UpsampleMode::zero_insert;
      } else if (mode == "linear_interp") {
        l.mode = UpsampleMode::linear_interp;
      } else {
        throw InvalidParameter("unknown upsample_mode '" + mode + "'");
      }
      cfg.layers.push_back(l);
    }
  } catch (const json::exception& e) {
    throw CorruptFile("stack config " + path + ": " + e.what());
  }
  if (cfg.layers.empty()) throw InvalidParameter("stack config has no layers");
  return cfg;
}

DeconvStack build_stack(const StackConfig& cfg) {
  DeconvStack stack;
  stack.activation = cfg.activation;
  stack.input_rate = cfg.input_rate;
  for (const auto& lc : cfg.layers) {
    if (lc.stride == 0) throw InvalidParameter("stride must be >= 1");
    DeconvLayer layer;
    layer.stride = lc.stride;
    layer.upsample_mode = lc.mode;
    const std::size_t len = lc.kernel_len == 0 ? 2 * lc.stride + 1 : lc.kernel_len;
    Rng rng(lc.seed);
    layer.kernel.taps.resize(len);
    const double s = 1.0 / std::sqrt(static_cast<double>(len));
    for (double& t : layer.kernel.taps) t = rng.uniform(-1.0, 1.0) * s;
    layer.bias = rng.uniform(0.01, 0.1);
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

// --------------------------------------------------------- fingerprints ----

json fingerprint_record(const std::string& path, const std::string& label,
                        const Fingerprint& fp) {
  return json{{"path", path},
              {"label", label},
              {"sample_rate", fp.source_rate},
              {"values", fp.values}};
}

struct BatchRecord {
  std::string path;
  std::string label;
  double sample_rate = 0.0;
  std::vector<double> values;
};

std::vector<BatchRecord> read_fingerprint_jsonl(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open " + path);
  std::vector<BatchRecord> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      BatchRecord r;
      r.path = j.value("path", "");
      r.label = j.at("label").get<std::string>();
      r.sample_rate = j.at("sample_rate").get<double>();
      r.values = j.at("values").get<std::vector<double>>();
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw CorruptFile(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_fingerprint_csv(const Fingerprint& fp, std::ostream& os) {
  os << "frequency_hz,value\n";
  char buf[80];
  for (std::size_t i = 0; i < fp.values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", fp.bin_frequencies[i], fp.values[i]);
    os << buf;
  }
}

// Resolves (path,label) work items from a WAV file, a manifest, or a
// directory of WAV files.
std::vector<std::pair<fs::path, std::string>> collect_inputs(const std::string& in,
                                                             const std::string& label) {
  std::vector<std::pair<fs::path, std::string>> items;
  const fs::path p(in);
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      if (e.path().extension() == ".wav") items.push_back({e.path(), label});
    }
    std::sort(items.begin(), items.end());
    if (items.empty()) throw InvalidParameter("no .wav files in " + in);
  } else if (p.extension() == ".jsonl") {
    for (const auto& e : read_manifest(p)) {
      items.push_back({p.parent_path() / e.path, e.label});
    }
    if (items.empty()) throw InvalidParameter("empty manifest " + in);
  } else {
    items.push_back({p, label});
  }
  return items;
}

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex err_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < std::min<unsigned>(threads, static_cast<unsigned>(count)); ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

// ------------------------------------------------------------- commands ----

int cmd_predict_peaks(const std::vector<std::size_t>& strides, std::optional<double> rate,
                      const std::string& format, const std::string& out_path) {
  const PeakPrediction pp = predict_peaks(strides, rate);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  if (format == "csv") {
    os << (rate ? "index,normalized_frequency,frequency_hz\n" : "index,normalized_frequency\n");
    char buf[96];
    for (std::size_t i = 0; i < pp.normalized_frequencies.size(); ++i) {
      if (rate) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, pp.normalized_frequencies[i],
                      pp.absolute_frequencies_hz[i]);
      } else {
        std::snprintf(buf, sizeof buf, "%zu,%.17g\n", i, pp.normalized_frequencies[i]);
      }
      os << buf;
    }
  } else {
    json j;
    j["strides"] = strides;
    std::size_t product = 1;
    for (std::size_t k : strides) product *= k;
    j["product"] = product;
    j["peak_count"] = pp.peak_count;
    json per_layer = json::array();
    for (const auto& [layer, pmax] : pp.per_layer_counts)
      per_layer.push_back({{"layer", layer}, {"p_max", pmax}});
    j["per_layer_p_max"] = per_layer;
    j["normalized_frequencies"] = pp.normalized_frequencies;
    if (rate) j["absolute_frequencies_hz"] = pp.absolute_frequencies_hz;
    os << j.dump(2) << "\n";
  }
  return 0;
}

int cmd_simulate(const std::string& config_path, const std::string& preset,
                 std::size_t frames, std::size_t frame_len, std::uint64_t seed,
                 const std::string& out_dir) {
  StackConfig cfg;
  if (!config_path.empty()) {
    cfg = load_stack_config(config_path);
  } else {
    const auto strides = preset_strides(preset);
    if (!strides) throw InvalidParameter("unknown preset '" + preset + "'");
    const auto product = std::accumulate(strides->begin(), strides->end(), std::size_t{1},
                                         std::multiplies<>());
    cfg.input_rate = 48000.0 / static_cast<double>(product);
    for (std::size_t i = 0; i < strides->size(); ++i) {
      StackConfig::Layer l;
      l.stride = (*strides)[i];
      l.seed = derive_seed(seed, i);
      cfg.layers.push_back(l);
    }
  }
  const DeconvStack stack = build_stack(cfg);
  const std::size_t product = stack.total_upsampling();

  // positive-mean noise latent: the DC component seeds the replication grid
  Rng rng(derive_seed(seed, 0xFACADE));
  Signal latent;
  latent.sample_rate = stack.input_rate;
  latent.samples.resize(std::max<std::size_t>(1, frames * frame_len / product) + 1);
  for (double& v : latent.samples) v = rng.uniform(0.0, 1.0);

  const StackRun run = run_stack_recorded(latent, stack);
  fs::create_directories(out_dir);
  char buf[96];
  for (std::size_t stage = 0; stage < run.stages.size(); ++stage) {
    const Signal& sig = run.stages[stage];
    std::size_t fl = std::min<std::size_t>(frame_len, sig.samples.size());
    while (fl & (fl - 1)) fl &= fl - 1;  // largest power of two that fits
    if (fl == 0) throw InsufficientData("stage " + std::to_string(stage) + " too short");
    const auto avg = average_frame_spectrum(sig, fl);
    const auto logmag = log_magnitude(avg);
    std::snprintf(buf, sizeof buf, "layer_%zu.csv", stage);
    std::ofstream os(fs::path(out_dir) / buf);
    if (!os) throw Error("cannot write " + std::string(buf));
    os << "bin_hz,log_magnitude,layer_index\n";
    const double hz_per_bin = sig.sample_rate / static_cast<double>(fl);
    for (std::size_t m = 0; m < logmag.size(); ++m) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu\n",
                    static_cast<double>(m) * hz_per_bin, logmag[m], stage);
      os << buf;
    }
  }
  return 0;
}

int cmd_gen_data(const std::string& spec_path, const std::string& out_dir, unsigned threads,
                 bool quiet) {
  const SynthSpec spec = load_synth_spec(spec_path);
  const auto entries = generate_synth_dataset(spec, out_dir, threads);
  if (!quiet)
    std::cout << "wrote " << entries.size() << " files + manifest.jsonl to " << out_dir << "\n";
  return 0;
}

int cmd_fingerprint(const std::string& in, const std::string& config_path,
                    const std::string& out_path, const std::string& label, unsigned threads) {
  const PartialFingerprintConfig partial = load_partial_config(config_path);
  const fs::path in_path(in);
  const bool single_wav = !fs::is_directory(in_path) && in_path.extension() != ".jsonl";

  if (single_wav) {
    const Signal audio = read_wav(in_path);
    const Fingerprint fp = extract_fingerprint(audio, partial.resolve(audio.sample_rate));
    std::ofstream file;
    std::ostream& os = open_output(file, out_path);
    if (!out_path.empty() && fs::path(out_path).extension() == ".jsonl") {
      os << fingerprint_record(in, label, fp).dump() << "\n";
    } else {
      write_fingerprint_csv(fp, os);
    }
    return 0;
  }

  const auto items = collect_inputs(in, label);
  std::vector<json> records(items.size());
  parallel_for(items.size(), threads, [&](std::size_t i) {
    const Signal audio = read_wav(items[i].first);
    const Fingerprint fp = extract_fingerprint(audio, partial.resolve(audio.sample_rate));
    records[i] = fingerprint_record(items[i].first.filename().string(), items[i].second, fp);
  });
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  for (const auto& r : records) os << r.dump() << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, const std::string& config_path,
              const std::string& out_path, const TrainConfig& tc, bool quiet) {
  const auto records = read_fingerprint_jsonl(data_path);
  if (records.empty()) throw InvalidInput("no fingerprint records in " + data_path);
  const double rate = records.front().sample_rate;
  for (const auto& r : records) {
    if (r.sample_rate != rate)
      throw InvalidInput("mixed sample rates in training data; resample first");
  }

  const PartialFingerprintConfig partial = load_partial_config(config_path);
  FeatureMeta meta;
  meta.config = partial.resolve(rate);
  meta.sample_rate = rate;
  // recover bin frequencies from the band layout
  const std::vector<double> dummy(meta.config.frame_len / 2 + 1, 0.0);
  const BandSelection sel =
      band_select(dummy, rate, meta.config.band_low, meta.config.band_high);
  meta.bin_frequencies = sel.frequencies;
  if (meta.bin_frequencies.size() != records.front().values.size())
    throw InvalidInput(
        "config does not match the data: expected " +
        std::to_string(meta.bin_frequencies.size()) + " bins, records have " +
        std::to_string(records.front().values.size()));

  LabeledDataset data;
  for (const auto& r : records) data.samples.push_back({r.values, r.label, r.path});
  const LinearModel model = train(data, meta, tc);
  save_model(model, out_path);

  std::vector<std::vector<double>> x;
  std::vector<int> y;
  for (const auto& s : data.samples) {
    x.push_back(s.values);
    y.push_back(s.synthetic() ? 1 : 0);
  }
  if (!quiet) {
    const double final_loss = loss_and_gradient(model, x, y, tc.l2_lambda).loss;
    std::cout << "trained on " << data.samples.size() << " fingerprints ("
              << meta.bin_frequencies.size() << " bins), final loss " << final_loss
              << ", model -> " << out_path << "\n";
  }
  return 0;
}

int cmd_classify(const std::string& model_path, const std::string& in,
                 const std::string& out_path, double threshold, bool allow_resample,
                 unsigned threads) {
  const LinearModel model = load_model(model_path);
  json items = json::array();

  const fs::path in_path(in);
  if (in_path.extension() == ".jsonl" && !fs::is_directory(in_path)) {
    for (const auto& r : read_fingerprint_jsonl(in)) {
      const double p = predict_values(model, r.values);
      items.push_back({{"path", r.path},
                       {"probability", p},
                       {"predicted_label", p >= threshold ? "synthetic" : "real"}});
    }
  } else {
    const auto inputs = collect_inputs(in, "");
    std::vector<json> rows(inputs.size());
    parallel_for(inputs.size(), threads, [&](std::size_t i) {
      Signal audio = read_wav(inputs[i].first);
      if (model.sample_rate > 0.0 && audio.sample_rate != model.sample_rate) {
        if (!allow_resample)
          throw IncompatibleFingerprint("sample rate " + std::to_string(audio.sample_rate) +
                                        " differs from the model's; resampling disabled");
        audio = resample(audio, model.sample_rate);
      }
      const Fingerprint fp = extract_fingerprint(audio, model.config);
      const double p = predict(model, fp);
      rows[i] = {{"path", inputs[i].first.string()},
                 {"probability", p},
                 {"predicted_label", p >= threshold ? "synthetic" : "real"}};
    });
    for (auto& r : rows) items.push_back(std::move(r));
  }

  json out{{"threshold", threshold}, {"items", items}};
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  os << out.dump(2) << "\n";
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path,
             const std::string& out_path, double threshold) {
  const LinearModel model = load_model(model_path);
  LabeledDataset data;
  for (const auto& r : read_fingerprint_jsonl(data_path))
    data.samples.push_back({r.values, r.label, r.path});
  const EvalReport rep = evaluate(model, data, threshold);
  json j;
  j["overall_accuracy"] = rep.overall_accuracy;
  j["per_class_accuracy"] = rep.per_class_accuracy;
  j["confusion"] = {{"true_positive", rep.true_positive},
                    {"true_negative", rep.true_negative},
                    {"false_positive", rep.false_positive},
                    {"false_negative", rep.false_negative}};
  j["threshold"] = rep.threshold;
  j["count"] = rep.count;
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  os << j.dump(2) << "\n";
  return 0;
}

int cmd_export_weights(const std::string& model_path, const std::string& out_path) {
  const LinearModel model = load_model(model_path);
  std::ofstream file;
  std::ostream& os = open_output(file, out_path);
  export_weights(model, os);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deconvolution artifact analysis for audio"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may follow the subcommand
  int threads_flag = 0;
  bool quiet = false;
  app.add_option("--threads", threads_flag,
                 "worker threads for batch commands (0 = auto, or SPECFP_THREADS)");
  app.add_flag("--quiet", quiet, "suppress informational notes on stdout");

  // predict-peaks
  auto* pp = app.add_subcommand("predict-peaks",
                                "closed-form artifact peak locations for a stride schedule");
  std::vector<std::size_t> pp_strides;
  double pp_rate = 0.0;
  std::string pp_format = "json", pp_out;
  pp->add_option("strides", pp_strides, "per-layer strides, e.g. 8 5 4 2")->required();
  pp->add_option("--rate", pp_rate, "output sample rate in Hz for absolute frequencies");
  pp->add_option("--format", pp_format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  pp->add_option("--out", pp_out, "output file (default stdout)");

  // simulate
  auto* sim = app.add_subcommand("simulate",
                                 "run a random-weight stack over a noise latent and dump "
                                 "per-stage averaged spectra as CSV");
  std::string sim_config, sim_preset = "encodec48k", sim_out;
  std::size_t sim_frames = 64, sim_frame_len = 8192;
  std::uint64_t sim_seed = 1;
  sim->add_option("--config", sim_config, "stack configuration JSON");
  sim->add_option("--preset", sim_preset, "named stride schedule (encodec48k)");
  sim->add_option("--frames", sim_frames, "output frames to average")->check(CLI::PositiveNumber);
  sim->add_option("--frame-len", sim_frame_len, "analysis frame length (power of two)");
  sim->add_option("--seed", sim_seed, "seed for kernels, biases and the latent");
  sim->add_option("--out", sim_out, "output directory")->required();

  // gen-data
  auto* gen = app.add_subcommand("gen-data", "generate the synthetic desk-scale dataset");
  std::string gen_spec, gen_out;
  gen->add_option("--spec", gen_spec, "dataset spec JSON")->required();
  gen->add_option("--out", gen_out, "output directory")->required();

  // fingerprint
  auto* fp =
      app.add_subcommand("fingerprint", "extract artifact fingerprints from WAV files");
  std::string fp_in, fp_config, fp_out, fp_label = "unknown";
  fp->add_option("--in", fp_in, "WAV file, directory of WAVs, or manifest.jsonl")->required();
  fp->add_option("--config", fp_config, "fingerprint configuration JSON");
  fp->add_option("--out", fp_out, "CSV (single file) or JSONL (batch) output");
  fp->add_option("--label", fp_label, "label for unlabeled inputs");

  // train
  auto* tr = app.add_subcommand("train", "train the logistic-regression detector");
  std::string tr_data, tr_config, tr_out;
  TrainConfig tr_cfg;
  tr->add_option("--data", tr_data, "fingerprint JSONL with labels")->required();
  tr->add_option("--config", tr_config, "fingerprint configuration JSON (must match the data)");
  tr->add_option("--out", tr_out, "model JSON output path")->required();
  tr->add_option("--lr", tr_cfg.learning_rate, "learning rate");
  tr->add_option("--epochs", tr_cfg.max_epochs, "maximum epochs");
  tr->add_option("--l2", tr_cfg.l2_lambda, "L2 penalty weight");
  tr->add_option("--tol", tr_cfg.tolerance, "early-stopping loss tolerance");
  tr->add_option("--seed", tr_cfg.seed, "seed recorded in the model file");

  // classify
  auto* cl = app.add_subcommand("classify", "score WAV files or fingerprint records");
  std::string cl_model, cl_in, cl_out;
  double cl_threshold = 0.5;
  bool cl_no_resample = false;
  cl->add_option("--model", cl_model, "model JSON")->required();
  cl->add_option("--in", cl_in, "WAV file, directory, manifest.jsonl or fingerprint JSONL")
      ->required();
  cl->add_option("--out", cl_out, "report JSON (default stdout)");
  cl->add_option("--threshold", cl_threshold, "decision threshold");
  cl->add_flag("--no-resample", cl_no_resample,
               "fail instead of resampling rate-mismatched audio");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a model on labeled fingerprints");
  std::string ev_model, ev_data, ev_out, ev_breakdown = "label";
  double ev_threshold = 0.5;
  ev->add_option("--model", ev_model, "model JSON")->required();
  ev->add_option("--data", ev_data, "fingerprint JSONL with labels")->required();
  ev->add_option("--out", ev_out, "report JSON (default stdout)");
  ev->add_option("--threshold", ev_threshold, "decision threshold");
  ev->add_option("--breakdown-by", ev_breakdown, "per-class breakdown field")
      ->check(CLI::IsMember({"label"}));

  // export-weights
  auto* ex =
      app.add_subcommand("export-weights", "dump model weights as (frequency_hz, weight)");
  std::string ex_model, ex_out;
  ex->add_option("--model", ex_model, "model JSON")->required();
  ex->add_option("--out", ex_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    const unsigned threads = resolve_threads(threads_flag);
    if (pp->parsed()) {
      return cmd_predict_peaks(
          pp_strides, pp->count("--rate") ? std::optional<double>(pp_rate) : std::nullopt,
          pp_format, pp_out);
    }
    if (sim->parsed()) {
      return cmd_simulate(sim_config, sim_preset, sim_frames, sim_frame_len, sim_seed, sim_out);
    }
    if (gen->parsed()) return cmd_gen_data(gen_spec, gen_out, threads, quiet);
    if (fp->parsed()) return cmd_fingerprint(fp_in, fp_config, fp_out, fp_label, threads);
    if (tr->parsed()) return cmd_train(tr_data, tr_config, tr_out, tr_cfg, quiet);
    if (cl->parsed())
      return cmd_classify(cl_model, cl_in, cl_out, cl_threshold, !cl_no_resample, threads);
    if (ev->parsed()) return cmd_eval(ev_model, ev_data, ev_out, ev_threshold);
    if (ex->parsed()) return cmd_export_weights(ex_model, ex_out);
    std::cerr << "no subcommand given\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
