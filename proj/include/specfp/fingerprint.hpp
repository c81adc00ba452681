#pragma once

#include <cstddef>
#include <vector>

#include "specfp/deconv.hpp"
#include "specfp/signal.hpp"

namespace specfp {

struct FingerprintConfig {
  std::size_t frame_len = 8192;  // samples; power of two
  double band_low = 5000.0;      // Hz
  double band_high = 16000.0;    // Hz
  std::size_t min_window = 11;   // sliding-min width in bins; odd, >= 3
  double epsilon = 1e-10;        // log floor
  FrameWindow window = FrameWindow::rectangular;
  double overlap = 0.0;

  // Band defaults by material: [5k, 16k] for 44.1/48 kHz audio,
  // [1k, 8k] for 16 kHz-class audio.
  static FingerprintConfig for_rate(double sample_rate);

  friend bool operator==(const FingerprintConfig&, const FingerprintConfig&) = default;
};

// Band-limited local deviations of the averaged log spectrum above its
// sliding local-minimum baseline. values[i] belongs to half-spectrum bin
// first_bin + i of a frame_len transform at source_rate.
struct Fingerprint {
  std::vector<double> values;           // >= 0
  std::vector<double> bin_frequencies;  // Hz, strictly increasing
  std::size_t first_bin = 0;
  double source_rate = 0.0;  // Hz
  FingerprintConfig config;
};

// out[i] = v[i] - min(v[i-w .. i+w]) with w = (window-1)/2, clamped at the
// edges. Adding a constant to v leaves the output unchanged.
std::vector<double> local_min_subtract(const std::vector<double>& logspec, std::size_t window);

struct BandSelection {
  std::vector<double> values;
  std::vector<double> frequencies;  // Hz
  std::size_t first_bin = 0;
};

// Keeps half-spectrum bins whose center frequency m*rate/frame_len lies in
// [band_low, band_high] (inclusive on both ends).
BandSelection band_select(const std::vector<double>& half_spectrum, double sample_rate,
                          double band_low, double band_high);

// average_frame_spectrum -> log_magnitude -> local_min_subtract -> band_select.
Fingerprint extract_fingerprint(const Signal& audio, const FingerprintConfig& config);

// 3x the median absolute deviation of the local-min-subtracted values;
// scale-free default threshold for measure_peaks.
double default_min_prominence(const std::vector<double>& values, std::size_t window = 11);

struct ArchitectureMatch {
  std::vector<std::size_t> strides;
  double score = 0.0;
};

// Scores each candidate stride schedule by the fraction of its predicted
// in-band peak bins that coincide (within one bin) with measured fingerprint
// peaks. Ranked by descending score, ties kept in input order.
std::vector<ArchitectureMatch> match_architecture(
    const Fingerprint& fp, const std::vector<std::vector<std::size_t>>& candidates);

}  // namespace specfp
