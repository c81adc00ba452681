#include "specfp/signal.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "specfp/errors.hpp"
#include "specfp/kernels.hpp"

namespace specfp {

namespace {

void require_signal(const Signal& s, const char* who) {
  if (s.samples.empty()) throw InvalidInput(std::string(who) + ": empty signal");
  if (!(s.sample_rate > 0.0)) throw InvalidInput(std::string(who) + ": sample_rate must be > 0");
}

}  // namespace

FftPlan::FftPlan(std::size_t n) : n_(n), pow2_(n > 0 && (n & (n - 1)) == 0) {
  if (n_ == 0) throw InvalidInput("FftPlan: size must be >= 1");
  roots_.resize(n_);
  const double step = -2.0 * std::numbers::pi / static_cast<double>(n_);
  for (std::size_t m = 0; m < n_; ++m) {
    roots_[m] = std::polar(1.0, step * static_cast<double>(m));
  }
  if (pow2_ && n_ > 1) {
    const int bits = std::countr_zero(n_);
    bitrev_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      std::uint32_t r = 0;
      for (int b = 0; b < bits; ++b) r |= ((i >> b) & 1u) << (bits - 1 - b);
      bitrev_[i] = r;
    }
  }
}

void FftPlan::transform(std::complex<double>* a, bool inv) const {
  if (n_ == 1) return;
  if (pow2_) {
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j = bitrev_[i];
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len >> 1;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          std::complex<double> w = roots_[k * step];
          if (inv) w = std::conj(w);
          const std::complex<double> u = a[start + k];
          const std::complex<double> v = a[start + k + half] * w;
          a[start + k] = u + v;
          a[start + k + half] = u - v;
        }
      }
    }
  } else {
    std::vector<std::complex<double>> out(n_);
    for (std::size_t k = 0; k < n_; ++k) {
      std::complex<double> acc{0.0, 0.0};
      std::size_t idx = 0;
      for (std::size_t j = 0; j < n_; ++j) {
        acc += a[j] * (inv ? std::conj(roots_[idx]) : roots_[idx]);
        idx += k;
        if (idx >= n_) idx -= n_;
      }
      out[k] = acc;
    }
    std::copy(out.begin(), out.end(), a);
  }
}

void FftPlan::forward(std::complex<double>* data) const { transform(data, false); }

void FftPlan::inverse(std::complex<double>* data) const {
  transform(data, true);
  const double inv_n = 1.0 / static_cast<double>(n_);
  for (std::size_t i = 0; i < n_; ++i) data[i] *= inv_n;
}

Spectrum dft(const Signal& s) {
  require_signal(s, "dft");
  const std::size_t n = s.size();
  Spectrum out;
  out.bins.assign(s.samples.begin(), s.samples.end());
  FftPlan(n).forward(out.bins.data());
  out.bin_resolution = s.sample_rate / static_cast<double>(n);
  out.origin_length = n;
  return out;
}

Signal idft(const Spectrum& spec) {
  if (spec.bins.empty()) throw InvalidInput("idft: empty spectrum");
  if (spec.bins.size() != spec.origin_length)
    throw InvalidInput("idft: bins length must equal origin_length");
  if (!(spec.bin_resolution > 0.0)) throw InvalidInput("idft: bin_resolution must be > 0");
  const std::size_t n = spec.origin_length;
  std::vector<std::complex<double>> data = spec.bins;
  FftPlan(n).inverse(data.data());
  Signal s;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.samples[i] = data[i].real();
  s.sample_rate = spec.sample_rate();
  return s;
}

Signal zero_insert_upsample(const Signal& s, std::size_t k) {
  require_signal(s, "zero_insert_upsample");
  if (k == 0) throw InvalidParameter("zero_insert_upsample: k must be >= 1");
  Signal out;
  out.samples.assign(s.size() * k, 0.0);
  for (std::size_t i = 0; i < s.size(); ++i) out.samples[i * k] = s.samples[i];
  out.sample_rate = s.sample_rate * static_cast<double>(k);
  return out;
}

Kernel triangular_kernel(std::size_t k) {
  if (k == 0) throw InvalidParameter("triangular_kernel: k must be >= 1");
  Kernel out;
  out.taps.resize(2 * k - 1);
  for (std::size_t j = 0; j < out.taps.size(); ++j) {
    const auto d = static_cast<std::ptrdiff_t>(j) - static_cast<std::ptrdiff_t>(k - 1);
    out.taps[j] =
        static_cast<double>(static_cast<std::ptrdiff_t>(k) - std::abs(d)) / static_cast<double>(k);
  }
  return out;
}

Signal linear_interp_upsample(const Signal& s, std::size_t k) {
  require_signal(s, "linear_interp_upsample");
  if (k == 0) throw InvalidParameter("linear_interp_upsample: k must be >= 1");
  Signal up = zero_insert_upsample(s, k);
  if (k == 1) return up;
  Signal conv = convolve(up, triangular_kernel(k), ConvMode::circular);
  // The triangle peaks at tap k-1; rotate so output[k*i] lands on input[i].
  const std::size_t n = conv.size();
  Signal out;
  out.samples.resize(n);
  for (std::size_t t = 0; t < n; ++t) out.samples[t] = conv.samples[(t + k - 1) % n];
  out.sample_rate = up.sample_rate;
  return out;
}

Signal convolve(const Signal& s, const Kernel& kern, ConvMode mode) {
  require_signal(s, "convolve");
  if (kern.taps.empty()) throw InvalidInput("convolve: empty kernel");
  const std::size_t n = s.size();
  const std::size_t m = kern.taps.size();
  Signal out;
  out.sample_rate = s.sample_rate;
  switch (mode) {
    case ConvMode::full: {
      out.samples.assign(n + m - 1, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) out.samples[i + j] += s.samples[i] * kern.taps[j];
      }
      break;
    }
    case ConvMode::same: {
      // Crop of full, centered like the usual "same" convention.
      Signal full = convolve(s, kern, ConvMode::full);
      const std::size_t off = (m - 1) / 2;
      out.samples.assign(full.samples.begin() + static_cast<std::ptrdiff_t>(off),
                         full.samples.begin() + static_cast<std::ptrdiff_t>(off + n));
      break;
    }
    case ConvMode::circular: {
      out.samples.assign(n, 0.0);
      const std::size_t pad = ((m + n - 1) / n) * n;  // multiple of n, >= m
      for (std::size_t t = 0; t < n; ++t) {
        double acc = 0.0;
        for (std::size_t j = 0; j < m; ++j) acc += kern.taps[j] * s.samples[(t + pad - j) % n];
        out.samples[t] = acc;
      }
      break;
    }
  }
  return out;
}

std::vector<double> average_frame_spectrum(const Signal& s, std::size_t frame_len,
                                           FrameWindow window, double overlap) {
  require_signal(s, "average_frame_spectrum");
  if (frame_len == 0) throw InvalidParameter("average_frame_spectrum: frame_len must be >= 1");
  if (s.size() < frame_len)
    throw InsufficientData("average_frame_spectrum: signal shorter than one frame");
  if (!(overlap >= 0.0 && overlap < 1.0))
    throw InvalidParameter("average_frame_spectrum: overlap must be in [0, 1)");

  const auto hop = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(static_cast<double>(frame_len) * (1.0 - overlap))));
  const std::size_t n_frames = (s.size() - frame_len) / hop + 1;
  const std::size_t half = frame_len / 2 + 1;

  std::vector<double> taper;
  if (window == FrameWindow::hann) {
    taper.resize(frame_len);
    for (std::size_t i = 0; i < frame_len; ++i) {
      taper[i] = frame_len == 1 ? 1.0
                                : 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi *
                                                        static_cast<double>(i) /
                                                        static_cast<double>(frame_len - 1)));
    }
  }

  FftPlan plan(frame_len);
  std::vector<std::complex<double>> frame(frame_len);
  std::vector<double> acc(half, 0.0);
  for (std::size_t f = 0; f < n_frames; ++f) {
    const double* src = s.samples.data() + f * hop;
    if (taper.empty()) {
      for (std::size_t i = 0; i < frame_len; ++i) frame[i] = src[i];
    } else {
      for (std::size_t i = 0; i < frame_len; ++i) frame[i] = src[i] * taper[i];
    }
    plan.forward(frame.data());
    kernels::magnitude_accumulate({frame.data(), half}, acc);
  }
  kernels::scale(acc, 1.0 / static_cast<double>(n_frames));
  return acc;
}

std::vector<double> log_magnitude(const std::vector<double>& v, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidParameter("log_magnitude: epsilon must be > 0");
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!(v[i] >= 0.0)) throw InvalidInput("log_magnitude: entries must be non-negative");
    out[i] = std::log(v[i] + epsilon);
  }
  return out;
}

}  // namespace specfp
