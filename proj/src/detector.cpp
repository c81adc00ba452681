#include "specfp/detector.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "specfp/errors.hpp"
#include "specfp/kernels.hpp"

namespace specfp {

namespace {

constexpr double kProbFloor = 1e-15;

double sigmoid(double z) {
  double p;
  if (z >= 0.0) {
    p = 1.0 / (1.0 + std::exp(-z));
  } else {
    const double e = std::exp(z);
    p = e / (1.0 + e);
  }
  return std::clamp(p, kProbFloor, 1.0 - kProbFloor);
}

// log(1 + exp(-|z|)) + max(0,z) - z*y, the stable per-sample BCE.
double bce_term(double z, int y) {
  return std::log1p(std::exp(-std::fabs(z))) + std::max(z, 0.0) - z * static_cast<double>(y);
}

std::vector<double> standardize(const LinearModel& model, std::span<const double> values) {
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i)
    out[i] = (values[i] - model.feature_means[i]) / model.feature_stds[i];
  return out;
}

}  // namespace

FeatureMeta FeatureMeta::from_fingerprint(const Fingerprint& fp) {
  FeatureMeta meta;
  meta.config = fp.config;
  meta.bin_frequencies = fp.bin_frequencies;
  meta.sample_rate = fp.source_rate;
  return meta;
}

LossGrad loss_and_gradient(const LinearModel& model,
                           const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, double l2_lambda) {
  if (features.empty()) throw InvalidInput("loss_and_gradient: empty batch");
  if (features.size() != labels.size())
    throw InvalidInput("loss_and_gradient: feature/label count mismatch");
  const std::size_t dim = model.weights.size();
  for (const auto& f : features)
    if (f.size() != dim) throw InvalidInput("loss_and_gradient: dimension mismatch");

  LossGrad out;
  out.grad_weights.assign(dim, 0.0);
  const double inv_b = 1.0 / static_cast<double>(features.size());
  for (std::size_t r = 0; r < features.size(); ++r) {
    const std::vector<double> x = standardize(model, features[r]);
    const double z = kernels::dot(model.weights, x) + model.bias;
    out.loss += bce_term(z, labels[r]);
    const double resid = (sigmoid(z) - static_cast<double>(labels[r])) * inv_b;
    kernels::axpy(resid, x, out.grad_weights);
    out.grad_bias += resid;
  }
  out.loss *= inv_b;
  if (l2_lambda != 0.0) {
    out.loss += l2_lambda * kernels::dot(model.weights, model.weights);
    kernels::axpy(2.0 * l2_lambda, model.weights, out.grad_weights);
  }
  return out;
}

LinearModel train(const LabeledDataset& data, const FeatureMeta& meta, const TrainConfig& tc) {
  if (data.samples.empty()) throw InvalidInput("train: empty dataset");
  if (!(tc.learning_rate > 0.0)) throw InvalidParameter("train: learning_rate must be > 0");
  if (!(tc.tolerance > 0.0)) throw InvalidParameter("train: tolerance must be > 0");
  if (tc.l2_lambda < 0.0) throw InvalidParameter("train: l2_lambda must be >= 0");

  const std::size_t dim = data.samples.front().values.size();
  bool has_real = false, has_synth = false;
  for (const auto& s : data.samples) {
    if (s.values.size() != dim) throw InvalidInput("train: inconsistent fingerprint dimensions");
    (s.synthetic() ? has_synth : has_real) = true;
  }
  if (!has_real || !has_synth) throw InvalidInput("train: both classes must be present");
  if (!meta.bin_frequencies.empty() && meta.bin_frequencies.size() != dim)
    throw InvalidInput("train: bin_frequencies/feature dimension mismatch");

  LinearModel model;
  model.config = meta.config;
  model.bin_frequencies = meta.bin_frequencies;
  model.sample_rate = meta.sample_rate;
  model.train_seed = tc.seed;
  model.weights.assign(dim, 0.0);
  model.bias = 0.0;

  // Per-bin z-score statistics, fit on this (training) data only.
  model.feature_means.assign(dim, 0.0);
  model.feature_stds.assign(dim, 0.0);
  const double inv_n = 1.0 / static_cast<double>(data.samples.size());
  for (const auto& s : data.samples) kernels::axpy(inv_n, s.values, model.feature_means);
  for (const auto& s : data.samples) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = s.values[i] - model.feature_means[i];
      model.feature_stds[i] += d * d * inv_n;
    }
  }
  for (double& sd : model.feature_stds) {
    sd = std::sqrt(sd);
    if (!(sd > 0.0)) sd = 1.0;  // constant bin: leave it centered but unscaled
  }

  // Standardize once; GD then works on plain rows.
  std::vector<std::vector<double>> x(data.samples.size());
  std::vector<int> y(data.samples.size());
  for (std::size_t r = 0; r < data.samples.size(); ++r) {
    x[r] = standardize(model, data.samples[r].values);
    y[r] = data.samples[r].synthetic() ? 1 : 0;
  }

  auto eval = [&](const std::vector<double>& w, double b, std::vector<double>& gw,
                  double& gb) {
    std::fill(gw.begin(), gw.end(), 0.0);
    gb = 0.0;
    double loss = 0.0;
    for (std::size_t r = 0; r < x.size(); ++r) {
      const double z = kernels::dot(w, x[r]) + b;
      loss += bce_term(z, y[r]);
      const double resid = (sigmoid(z) - static_cast<double>(y[r])) * inv_n;
      kernels::axpy(resid, x[r], gw);
      gb += resid;
    }
    loss *= inv_n;
    if (tc.l2_lambda != 0.0) {
      loss += tc.l2_lambda * kernels::dot(w, w);
      kernels::axpy(2.0 * tc.l2_lambda, w, gw);
    }
    return loss;
  };

  // Full-batch descent; an overshooting step is rejected and the rate halved,
  // which keeps the fixed-rate scheme stable at these dimensions.
  std::vector<double> gw(dim), gw_next(dim);
  double gb = 0.0, gb_next = 0.0;
  double lr = tc.learning_rate;
  double loss = eval(model.weights, model.bias, gw, gb);
  std::vector<double> trial(dim);
  for (std::size_t epoch = 0; epoch < tc.max_epochs && lr > 1e-14; ++epoch) {
    trial = model.weights;
    kernels::axpy(-lr, gw, trial);
    const double trial_bias = model.bias - lr * gb;
    const double trial_loss = eval(trial, trial_bias, gw_next, gb_next);
    if (trial_loss > loss) {
      lr *= 0.5;
      continue;
    }
    model.weights.swap(trial);
    model.bias = trial_bias;
    gw.swap(gw_next);
    gb = gb_next;
    const double gain = loss - trial_loss;
    loss = trial_loss;
    if (gain < tc.tolerance) break;
  }
  return model;
}

double predict_values(const LinearModel& model, std::span<const double> values) {
  if (values.size() != model.weights.size())
    throw IncompatibleFingerprint("predict: dimension mismatch");
  const std::vector<double> x = standardize(model, values);
  return sigmoid(kernels::dot(model.weights, x) + model.bias);
}

double predict(const LinearModel& model, const Fingerprint& fp) {
  if (!(fp.config == model.config))
    throw IncompatibleFingerprint("predict: fingerprint config differs from the model's");
  if (model.sample_rate > 0.0 && fp.source_rate > 0.0 &&
      std::fabs(model.sample_rate - fp.source_rate) > 1e-6)
    throw IncompatibleFingerprint("predict: sample rate differs from the model's");
  return predict_values(model, fp.values);
}

EvalReport evaluate(const LinearModel& model, const LabeledDataset& data, double threshold) {
  if (data.samples.empty()) throw InvalidInput("evaluate: empty dataset");
  EvalReport rep;
  rep.threshold = threshold;
  rep.count = data.samples.size();
  std::map<std::string, std::pair<std::size_t, std::size_t>> per_class;  // correct, total
  std::size_t correct_total = 0;
  for (const auto& s : data.samples) {
    const bool pred_synth = predict_values(model, s.values) >= threshold;
    const bool is_synth = s.synthetic();
    const bool correct = pred_synth == is_synth;
    if (is_synth) {
      (pred_synth ? rep.true_positive : rep.false_negative)++;
    } else {
      (pred_synth ? rep.false_positive : rep.true_negative)++;
    }
    auto& pc = per_class[s.label];
    pc.second++;
    if (correct) {
      pc.first++;
      ++correct_total;
    }
  }
  for (const auto& [label, counts] : per_class)
    rep.per_class_accuracy[label] =
        static_cast<double>(counts.first) / static_cast<double>(counts.second);
  rep.overall_accuracy = static_cast<double>(correct_total) / static_cast<double>(rep.count);
  return rep;
}

void export_weights(const LinearModel& model, std::ostream& os) {
  os << "frequency_hz,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < model.weights.size(); ++i) {
    const double f = i < model.bin_frequencies.size() ? model.bin_frequencies[i]
                                                      : static_cast<double>(i);
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", f, model.weights[i]);
    os << buf;
  }
}

namespace {

nlohmann::json config_to_json(const FingerprintConfig& cfg) {
  return {{"frame_len", cfg.frame_len},
          {"band_low", cfg.band_low},
          {"band_high", cfg.band_high},
          {"min_window", cfg.min_window},
          {"epsilon", cfg.epsilon},
          {"window", cfg.window == FrameWindow::hann ? "hann" : "rectangular"},
          {"overlap", cfg.overlap}};
}

FingerprintConfig config_from_json(const nlohmann::json& j) {
  FingerprintConfig cfg;
  cfg.frame_len = j.at("frame_len").get<std::size_t>();
  cfg.band_low = j.at("band_low").get<double>();
  cfg.band_high = j.at("band_high").get<double>();
  cfg.min_window = j.at("min_window").get<std::size_t>();
  cfg.epsilon = j.at("epsilon").get<double>();
  cfg.window = j.value("window", "rectangular") == std::string("hann") ? FrameWindow::hann
                                                                       : FrameWindow::rectangular;
  cfg.overlap = j.value("overlap", 0.0);
  return cfg;
}

}  // namespace

void save_model(const LinearModel& model, const std::filesystem::path& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["config"] = config_to_json(model.config);
  j["sample_rate"] = model.sample_rate;
  j["bin_frequencies"] = model.bin_frequencies;
  j["normalization"] = {{"means", model.feature_means}, {"stds", model.feature_stds}};
  j["weights"] = model.weights;
  j["bias"] = model.bias;
  j["train_seed"] = model.train_seed;
  std::ofstream os(path);
  if (!os) throw Error("save_model: cannot open " + path.string());
  os << j.dump(2) << "\n";
}

LinearModel load_model(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("load_model: cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile("load_model: " + std::string(e.what()));
  }
  LinearModel model;
  try {
    if (j.at("version").get<int>() != 1) throw UnsupportedFormat("load_model: unknown version");
    model.config = config_from_json(j.at("config"));
    model.sample_rate = j.value("sample_rate", 0.0);
    model.bin_frequencies = j.value("bin_frequencies", std::vector<double>{});
    model.feature_means = j.at("normalization").at("means").get<std::vector<double>>();
    model.feature_stds = j.at("normalization").at("stds").get<std::vector<double>>();
    model.weights = j.at("weights").get<std::vector<double>>();
    model.bias = j.at("bias").get<double>();
    model.train_seed = j.value("train_seed", std::uint64_t{0});
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile("load_model: " + std::string(e.what()));
  }
  if (model.weights.size() != model.feature_means.size() ||
      model.weights.size() != model.feature_stds.size())
    throw CorruptFile("load_model: inconsistent dimensions");
  for (double sd : model.feature_stds)
    if (!(sd > 0.0)) throw CorruptFile("load_model: non-positive std entry");
  return model;
}

}  // namespace specfp
