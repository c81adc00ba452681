#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace specfp {

// Discrete real-valued waveform.
struct Signal {
  std::vector<double> samples;
  double sample_rate = 1.0;  // Hz

  std::size_t size() const { return samples.size(); }
};

// Full complex DFT. bins.size() == origin_length; for real inputs the upper
// half mirrors the lower half (conjugate symmetry).
struct Spectrum {
  std::vector<std::complex<double>> bins;
  double bin_resolution = 0.0;  // Hz per bin
  std::size_t origin_length = 0;

  double sample_rate() const { return bin_resolution * static_cast<double>(origin_length); }
};

// Short FIR tap vector.
struct Kernel {
  std::vector<double> taps;
};

enum class ConvMode { full, same, circular };
enum class FrameWindow { rectangular, hann };

// Radix-2 FFT for power-of-two sizes, direct O(n^2) transform otherwise
// (small sizes only; intended for oracles and odd frame lengths).
// A plan is immutable after construction and reusable across frames.
class FftPlan {
 public:
  explicit FftPlan(std::size_t n);

  std::size_t size() const { return n_; }
  void forward(std::complex<double>* data) const;
  // Includes the 1/n factor.
  void inverse(std::complex<double>* data) const;

 private:
  void transform(std::complex<double>* data, bool inv) const;

  std::size_t n_ = 0;
  bool pow2_ = false;
  std::vector<std::complex<double>> roots_;  // e^{-2*pi*i*m/n}
  std::vector<std::uint32_t> bitrev_;
};

Spectrum dft(const Signal& s);
Signal idft(const Spectrum& spec);

// Inserts k-1 zeros between samples; output rate is k times the input rate.
Signal zero_insert_upsample(const Signal& s, std::size_t k);

// Zero-insert followed by a circular convolution with triangular_kernel(k),
// aligned so that output[k*i] == input[i]. Edge policy is circular.
Signal linear_interp_upsample(const Signal& s, std::size_t k);

// 2k-1 taps ramping linearly up to 1 at the center.
Kernel triangular_kernel(std::size_t k);

Signal convolve(const Signal& s, const Kernel& k, ConvMode mode);

// Mean magnitude of the non-negative half spectrum over frames of frame_len
// samples (frame_len/2 + 1 bins). Frames are non-overlapping by default and
// untapered; a trailing partial frame is discarded. overlap in [0, 1).
std::vector<double> average_frame_spectrum(const Signal& s, std::size_t frame_len,
                                           FrameWindow window = FrameWindow::rectangular,
                                           double overlap = 0.0);

// out[i] = log(v[i] + epsilon); inputs must be non-negative.
std::vector<double> log_magnitude(const std::vector<double>& v, double epsilon = 1e-10);

}  // namespace specfp
