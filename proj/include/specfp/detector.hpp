#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "specfp/fingerprint.hpp"

namespace specfp {

// The label that marks the non-synthetic class in labeled datasets; every
// other label is treated as a synthetic generator tag.
inline constexpr const char* kRealLabel = "real";

struct TrainConfig {
  double learning_rate = 0.5;  // starting rate; halved whenever a step overshoots
  std::size_t max_epochs = 4000;
  double l2_lambda = 1e-2;
  double tolerance = 1e-9;  // stop when the loss decrease falls below this
  std::uint64_t seed = 0;
};

// Logistic regression over fingerprint bins with per-bin standardization
// baked in at training time.
struct LinearModel {
  std::vector<double> weights;
  double bias = 0.0;
  FingerprintConfig config;
  std::vector<double> feature_means;
  std::vector<double> feature_stds;     // all > 0
  std::vector<double> bin_frequencies;  // Hz, one per weight
  double sample_rate = 0.0;             // rate the fingerprints were extracted at
  std::uint64_t train_seed = 0;
};

struct LabeledSample {
  std::vector<double> values;
  std::string label;  // kRealLabel or a generator tag
  std::string path;   // optional provenance

  bool synthetic() const { return label != kRealLabel; }
};

struct LabeledDataset {
  std::vector<LabeledSample> samples;
};

// Metadata bound into a model at training time.
struct FeatureMeta {
  FingerprintConfig config;
  std::vector<double> bin_frequencies;
  double sample_rate = 0.0;

  static FeatureMeta from_fingerprint(const Fingerprint& fp);
};

struct LossGrad {
  double loss = 0.0;
  std::vector<double> grad_weights;
  double grad_bias = 0.0;
};

// Mean binary cross-entropy plus l2_lambda * ||w||^2 and its exact gradient.
// Features are standardized with the model's per-bin statistics first.
LossGrad loss_and_gradient(const LinearModel& model,
                           const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels, double l2_lambda);

// Full-batch gradient descent with early stopping on a loss plateau.
// Deterministic: weights start at zero and the data order is fixed.
LinearModel train(const LabeledDataset& data, const FeatureMeta& meta, const TrainConfig& tc);

double predict(const LinearModel& model, const Fingerprint& fp);
// For rows that skipped Fingerprint (e.g. JSONL batches); dimension-checked.
double predict_values(const LinearModel& model, std::span<const double> values);

struct EvalReport {
  std::map<std::string, double> per_class_accuracy;
  double overall_accuracy = 0.0;
  // positive class = synthetic
  std::size_t true_positive = 0;
  std::size_t true_negative = 0;
  std::size_t false_positive = 0;
  std::size_t false_negative = 0;
  double threshold = 0.5;
  std::size_t count = 0;
};

EvalReport evaluate(const LinearModel& model, const LabeledDataset& data, double threshold = 0.5);

// CSV (frequency_hz, weight), one row per bin in frequency order, printed
// with round-trip precision.
void export_weights(const LinearModel& model, std::ostream& os);

void save_model(const LinearModel& model, const std::filesystem::path& path);
LinearModel load_model(const std::filesystem::path& path);

}  // namespace specfp
