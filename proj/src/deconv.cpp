#include "specfp/deconv.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "specfp/errors.hpp"
#include "specfp/rng.hpp"

namespace specfp {

namespace {

void require_layer(const DeconvLayer& layer, const char* who) {
  if (layer.stride == 0) throw InvalidParameter(std::string(who) + ": stride must be >= 1");
  if (layer.kernel.taps.empty()) throw InvalidInput(std::string(who) + ": empty kernel");
}

void apply_activation(Signal& s, Activation act, double slope) {
  switch (act) {
    case Activation::none:
      break;
    case Activation::relu:
      for (double& v : s.samples) v = v > 0.0 ? v : 0.0;
      break;
    case Activation::leaky_relu:
      for (double& v : s.samples) v = v > 0.0 ? v : slope * v;
      break;
  }
}

}  // namespace

std::size_t DeconvStack::total_upsampling() const {
  std::size_t p = 1;
  for (const auto& l : layers) p *= l.stride;
  return p;
}

std::vector<double> Matrix::apply(std::span<const double> x) const {
  if (x.size() != cols) throw InvalidInput("Matrix::apply: size mismatch");
  std::vector<double> out(rows, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += at(r, c) * x[c];
    out[r] = acc;
  }
  return out;
}

Matrix Matrix::transposed() const {
  Matrix t(cols, rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) t.at(c, r) = at(r, c);
  return t;
}

Signal deconv_direct(const Signal& input, const DeconvLayer& layer, Boundary boundary) {
  require_layer(layer, "deconv_direct");
  if (input.samples.empty()) throw InvalidInput("deconv_direct: empty input");
  if (layer.upsample_mode == UpsampleMode::linear_interp)
    return deconv_as_upsample_conv(input, layer);

  const std::size_t n = input.size();
  const std::size_t k = layer.stride;
  const std::size_t out_len = n * k;
  const std::size_t m = layer.kernel.taps.size();
  Signal out;
  out.samples.assign(out_len, layer.bias);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t base = k * i;
    if (boundary == Boundary::circular) {
      for (std::size_t t = 0; t < m; ++t) {
        out.samples[(base + t) % out_len] += input.samples[i] * layer.kernel.taps[t];
      }
    } else {
      const std::size_t t_end = std::min(m, out_len - base);
      for (std::size_t t = 0; t < t_end; ++t) {
        out.samples[base + t] += input.samples[i] * layer.kernel.taps[t];
      }
    }
  }
  out.sample_rate = input.sample_rate * static_cast<double>(k);
  return out;
}

Signal deconv_as_upsample_conv(const Signal& input, const DeconvLayer& layer) {
  require_layer(layer, "deconv_as_upsample_conv");
  if (input.samples.empty()) throw InvalidInput("deconv_as_upsample_conv: empty input");
  Signal up = layer.upsample_mode == UpsampleMode::zero_insert
                  ? zero_insert_upsample(input, layer.stride)
                  : linear_interp_upsample(input, layer.stride);
  Signal out = convolve(up, layer.kernel, ConvMode::circular);
  for (double& v : out.samples) v += layer.bias;
  return out;
}

Matrix deconv_matrix(const DeconvLayer& layer, std::size_t input_len) {
  require_layer(layer, "deconv_matrix");
  if (input_len == 0) throw InvalidParameter("deconv_matrix: input_len must be >= 1");
  const std::size_t rows = layer.stride * input_len;
  Matrix mat(rows, input_len);
  if (layer.upsample_mode == UpsampleMode::zero_insert) {
    for (std::size_t i = 0; i < input_len; ++i) {
      for (std::size_t t = 0; t < layer.kernel.taps.size(); ++t) {
        mat.at((layer.stride * i + t) % rows, i) += layer.kernel.taps[t];
      }
    }
  } else {
    // Column i is the bias-free response to the i-th unit impulse.
    DeconvLayer unbiased = layer;
    unbiased.bias = 0.0;
    Signal impulse;
    impulse.samples.assign(input_len, 0.0);
    impulse.sample_rate = 1.0;
    for (std::size_t i = 0; i < input_len; ++i) {
      impulse.samples[i] = 1.0;
      const Signal col = deconv_direct(impulse, unbiased);
      for (std::size_t r = 0; r < rows; ++r) mat.at(r, i) = col.samples[r];
      impulse.samples[i] = 0.0;
    }
  }
  return mat;
}

Signal run_stack(const Signal& latent, const DeconvStack& stack) {
  return run_stack_recorded(latent, stack).stages.back();
}

StackRun run_stack_recorded(const Signal& latent, const DeconvStack& stack) {
  if (stack.layers.empty()) throw InvalidInput("run_stack: empty stack");
  if (latent.samples.empty()) throw InvalidInput("run_stack: empty latent");
  if (!(stack.input_rate > 0.0)) throw InvalidInput("run_stack: input_rate must be > 0");
  StackRun run;
  Signal cur = latent;
  cur.sample_rate = stack.input_rate;
  run.stages.push_back(cur);
  for (std::size_t i = 0; i < stack.layers.size(); ++i) {
    cur = deconv_direct(cur, stack.layers[i]);
    if (i + 1 < stack.layers.size()) apply_activation(cur, stack.activation, stack.leaky_slope);
    run.stages.push_back(cur);
  }
  return run;
}

PeakPrediction predict_peaks(const std::vector<std::size_t>& strides,
                             std::optional<double> output_rate) {
  if (strides.empty()) throw InvalidParameter("predict_peaks: empty stride list");
  unsigned __int128 prod = 1;
  for (std::size_t k : strides) {
    if (k == 0) throw InvalidParameter("predict_peaks: strides must be >= 1");
    prod *= k;
    if (prod > (static_cast<unsigned __int128>(1) << 40))
      throw InvalidParameter("predict_peaks: stride product too large");
  }
  const auto p = static_cast<std::uint64_t>(prod);

  PeakPrediction out;
  out.peak_count = static_cast<std::size_t>(p / 2 + 1);
  out.normalized_exact.reserve(out.peak_count);
  for (std::uint64_t n = 0; n <= p / 2; ++n) {
    const std::uint64_t g = std::gcd(n, p);
    out.normalized_exact.push_back({n / g, p / g});
  }
  // Already sorted and distinct by construction; frequencies from other
  // layers' replication grids are sub-grids of n/p, so the full grid is the
  // deduplicated union.
  out.normalized_frequencies.reserve(out.peak_count);
  for (const auto& r : out.normalized_exact) out.normalized_frequencies.push_back(r.value());
  if (output_rate) {
    if (!(*output_rate > 0.0)) throw InvalidParameter("predict_peaks: output_rate must be > 0");
    out.absolute_frequencies_hz.reserve(out.peak_count);
    for (const auto& r : out.normalized_exact)
      out.absolute_frequencies_hz.push_back(r.value() * *output_rate);
  }
  for (std::size_t i = 0; i < strides.size(); ++i) out.per_layer_counts.push_back({i, strides[i] / 2});
  return out;
}

std::vector<std::size_t> measure_peaks(const std::vector<double>& v, double min_prominence) {
  if (v.empty()) throw InvalidInput("measure_peaks: empty input");
  const std::size_t n = v.size();
  std::vector<std::size_t> peaks;
  if (n < 2) return peaks;

  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || v[i] > v[i - 1];
    const bool right_ok = i == n - 1 || v[i] > v[i + 1];
    if (!left_ok || !right_ok) continue;

    // Walk downhill to the nearest turning point on each side.
    std::size_t l = i;
    while (l > 0 && v[l - 1] <= v[l]) --l;
    std::size_t r = i;
    while (r + 1 < n && v[r + 1] <= v[r]) ++r;

    double base;
    if (i == 0) {
      if (r == n - 1) continue;  // descent never turns: not a peak
      base = v[r];
    } else if (i == n - 1) {
      if (l == 0) continue;
      base = v[l];
    } else {
      base = std::max(v[l], v[r]);
    }
    if (v[i] - base > min_prominence) peaks.push_back(i);
  }
  return peaks;
}

DeconvStack random_stack(const std::vector<std::size_t>& strides, std::uint64_t seed,
                         double input_rate, std::size_t kernel_len, UpsampleMode mode,
                         Activation act) {
  if (strides.empty()) throw InvalidParameter("random_stack: empty stride list");
  DeconvStack stack;
  stack.activation = act;
  stack.input_rate = input_rate;
  Rng rng(seed);
  for (std::size_t k : strides) {
    if (k == 0) throw InvalidParameter("random_stack: strides must be >= 1");
    DeconvLayer layer;
    layer.stride = k;
    layer.upsample_mode = mode;
    const std::size_t len = kernel_len == 0 ? 2 * k + 1 : kernel_len;
    layer.kernel.taps.resize(len);
    const double s = 1.0 / std::sqrt(static_cast<double>(len));
    for (double& t : layer.kernel.taps) t = rng.uniform(-1.0, 1.0) * s;
    layer.bias = rng.uniform(0.01, 0.1);
    stack.layers.push_back(std::move(layer));
  }
  return stack;
}

std::optional<std::vector<std::size_t>> preset_strides(const std::string& name) {
  if (name == "encodec48k") return std::vector<std::size_t>{8, 5, 4, 2};
  return std::nullopt;
}

std::vector<std::string> preset_names() { return {"encodec48k"}; }

}  // namespace specfp
