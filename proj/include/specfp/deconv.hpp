#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "specfp/signal.hpp"

namespace specfp {

enum class UpsampleMode { zero_insert, linear_interp };
enum class Activation { none, relu, leaky_relu };

struct DeconvLayer {
  std::size_t stride = 1;
  Kernel kernel;
  double bias = 0.0;
  UpsampleMode upsample_mode = UpsampleMode::zero_insert;
};

struct DeconvStack {
  std::vector<DeconvLayer> layers;
  Activation activation = Activation::leaky_relu;
  double leaky_slope = 0.2;
  double input_rate = 1.0;  // Hz of the latent signal

  std::size_t total_upsampling() const;
};

// Reduced fraction of a normalized frequency (cycles per output sample).
// Kept exact so coincident replication frequencies from different layers
// deduplicate by equality instead of float comparison.
struct RationalFreq {
  std::uint64_t num = 0;
  std::uint64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const RationalFreq&, const RationalFreq&) = default;
  friend bool operator<(const RationalFreq& a, const RationalFreq& b) {
    return static_cast<unsigned __int128>(a.num) * b.den <
           static_cast<unsigned __int128>(b.num) * a.den;
  }
};

struct PeakPrediction {
  std::vector<RationalFreq> normalized_exact;   // sorted, deduplicated
  std::vector<double> normalized_frequencies;   // in [0, 0.5]
  std::vector<double> absolute_frequencies_hz;  // empty when the rate is unknown
  std::size_t peak_count = 0;
  // (layer index, floor(stride/2)) per layer
  std::vector<std::pair<std::size_t, std::size_t>> per_layer_counts;
};

// Small dense row-major matrix; only used for the explicit deconvolution
// operator and its verification.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::vector<double> apply(std::span<const double> x) const;
  Matrix transposed() const;
};

// Boundary handling for the transposed convolution. Circular indexing keeps
// the frequency-domain identities exact and is the default everywhere;
// zero_pad drops contributions past the end instead of wrapping them (the
// behavior of real CNN layers) and is offered for qualitative comparison.
enum class Boundary { circular, zero_pad };

// Transposed convolution:
// out[(stride*i + t) mod (stride*n)] += in[i] * kernel[t], plus bias.
// Layers in linear_interp mode are computed as interpolating upsample
// followed by the kernel convolution (the two entry points agree bit for bit).
Signal deconv_direct(const Signal& input, const DeconvLayer& layer,
                     Boundary boundary = Boundary::circular);

// Same contract, computed as upsample (per layer mode) -> circular
// convolution -> bias.
Signal deconv_as_upsample_conv(const Signal& input, const DeconvLayer& layer);

// (stride*input_len) x input_len operator such that
// matrix * input + bias == deconv_direct(input).
Matrix deconv_matrix(const DeconvLayer& layer, std::size_t input_len);

Signal run_stack(const Signal& latent, const DeconvStack& stack);

// stages[0] is the latent (re-rated to stack.input_rate), stages[i] the
// output of layer i-1.
struct StackRun {
  std::vector<Signal> stages;
  const Signal& output() const { return stages.back(); }
};
StackRun run_stack_recorded(const Signal& latent, const DeconvStack& stack);

// Closed-form artifact peak locations for a stride schedule. With P the
// product of strides there are floor(P/2)+1 peaks at n/P cycles per output
// sample, n = 0..floor(P/2).
PeakPrediction predict_peaks(const std::vector<std::size_t>& strides,
                             std::optional<double> output_rate = std::nullopt);

// Indices of local maxima whose height above the larger of the two
// neighboring local minima exceeds min_prominence. A boundary bin counts as
// a maximum only when its one-sided descent turns back up before the other
// boundary (so a monotone vector has no peaks).
std::vector<std::size_t> measure_peaks(const std::vector<double>& avg_log_spectrum,
                                       double min_prominence);

// Random stack for experiments: kernel taps ~ U(-1,1)/sqrt(len), biases
// ~ U(0.01, 0.1) (strictly positive so the DC peak exists).
// kernel_len 0 selects the default 2*stride+1.
DeconvStack random_stack(const std::vector<std::size_t>& strides, std::uint64_t seed,
                         double input_rate, std::size_t kernel_len = 0,
                         UpsampleMode mode = UpsampleMode::zero_insert,
                         Activation act = Activation::leaky_relu);

// Named stride schedules ("encodec48k" -> {8, 5, 4, 2}).
std::optional<std::vector<std::size_t>> preset_strides(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace specfp
