#include "specfp/fingerprint.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "specfp/errors.hpp"

namespace specfp {

FingerprintConfig FingerprintConfig::for_rate(double sample_rate) {
  FingerprintConfig cfg;
  if (!(sample_rate > 0.0)) throw InvalidParameter("FingerprintConfig: sample_rate must be > 0");
  if (sample_rate >= 32000.0) {
    cfg.band_low = 5000.0;
    cfg.band_high = 16000.0;
  } else {
    cfg.band_low = 1000.0;
    cfg.band_high = std::min(8000.0, sample_rate / 2.0);
  }
  return cfg;
}

std::vector<double> local_min_subtract(const std::vector<double>& logspec, std::size_t window) {
  if (window < 3 || window % 2 == 0)
    throw InvalidParameter("local_min_subtract: window must be odd and >= 3");
  if (window > logspec.size())
    throw InvalidParameter("local_min_subtract: window larger than input");
  const std::size_t n = logspec.size();
  const std::size_t w = (window - 1) / 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= w ? i - w : 0;
    const std::size_t hi = std::min(n - 1, i + w);
    double m = logspec[lo];
    for (std::size_t j = lo + 1; j <= hi; ++j) m = std::min(m, logspec[j]);
    out[i] = logspec[i] - m;
  }
  return out;
}

BandSelection band_select(const std::vector<double>& half_spectrum, double sample_rate,
                          double band_low, double band_high) {
  if (half_spectrum.empty()) throw InvalidInput("band_select: empty spectrum");
  if (!(sample_rate > 0.0)) throw InvalidParameter("band_select: sample_rate must be > 0");
  if (!(band_low >= 0.0) || !(band_low < band_high))
    throw InvalidParameter("band_select: need 0 <= band_low < band_high");
  if (band_high > sample_rate / 2.0 + 1e-9)
    throw InvalidParameter("band_select: band exceeds Nyquist");

  // half_spectrum has frame_len/2 + 1 bins of a frame_len transform.
  const std::size_t frame_len = 2 * (half_spectrum.size() - 1);
  const double hz_per_bin =
      frame_len == 0 ? sample_rate : sample_rate / static_cast<double>(frame_len);

  BandSelection sel;
  bool first = true;
  for (std::size_t m = 0; m < half_spectrum.size(); ++m) {
    const double f = static_cast<double>(m) * hz_per_bin;
    if (f < band_low || f > band_high) continue;
    if (first) {
      sel.first_bin = m;
      first = false;
    }
    sel.values.push_back(half_spectrum[m]);
    sel.frequencies.push_back(f);
  }
  if (sel.values.empty()) throw InvalidParameter("band_select: no bins inside band");
  return sel;
}

Fingerprint extract_fingerprint(const Signal& audio, const FingerprintConfig& config) {
  if (config.frame_len == 0 || (config.frame_len & (config.frame_len - 1)) != 0)
    throw InvalidParameter("extract_fingerprint: frame_len must be a power of two");
  if (audio.samples.size() < config.frame_len)
    throw InsufficientData("extract_fingerprint: audio shorter than one frame");
  if (config.band_high > audio.sample_rate / 2.0 + 1e-9)
    throw InvalidParameter("extract_fingerprint: band exceeds Nyquist");

  const std::vector<double> avg =
      average_frame_spectrum(audio, config.frame_len, config.window, config.overlap);
  const std::vector<double> logspec = log_magnitude(avg, config.epsilon);
  const std::vector<double> flattened = local_min_subtract(logspec, config.min_window);
  BandSelection sel =
      band_select(flattened, audio.sample_rate, config.band_low, config.band_high);

  Fingerprint fp;
  fp.values = std::move(sel.values);
  fp.bin_frequencies = std::move(sel.frequencies);
  fp.first_bin = sel.first_bin;
  fp.source_rate = audio.sample_rate;
  fp.config = config;
  return fp;
}

namespace {

double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

}  // namespace

double default_min_prominence(const std::vector<double>& values, std::size_t window) {
  if (values.empty()) throw InvalidInput("default_min_prominence: empty input");
  std::size_t w = std::min(window, values.size());
  if (w % 2 == 0) --w;
  if (w < 3) {
    // Too short for a baseline; fall back to the raw values.
    std::vector<double> tmp = values;
    const double med = median_inplace(tmp);
    for (double& x : tmp) x = std::fabs(x - med);
    return 3.0 * median_inplace(tmp);
  }
  std::vector<double> flat = local_min_subtract(values, w);
  std::vector<double> tmp = flat;
  const double med = median_inplace(tmp);
  for (std::size_t i = 0; i < flat.size(); ++i) tmp[i] = std::fabs(flat[i] - med);
  return 3.0 * median_inplace(tmp);
}

namespace {

// Rounds num*frame_len/den to the nearest half-spectrum bin.
std::size_t rational_to_bin(const RationalFreq& r, std::size_t frame_len) {
  const unsigned __int128 num = static_cast<unsigned __int128>(r.num) * frame_len;
  const unsigned __int128 den = r.den;
  return static_cast<std::size_t>((2 * num + den) / (2 * den));
}

}  // namespace

std::vector<ArchitectureMatch> match_architecture(
    const Fingerprint& fp, const std::vector<std::vector<std::size_t>>& candidates) {
  if (candidates.empty()) throw InvalidInput("match_architecture: no candidates");
  if (fp.values.empty()) throw InvalidInput("match_architecture: empty fingerprint");

  const auto measured_local =
      measure_peaks(fp.values, default_min_prominence(fp.values, fp.config.min_window));
  std::set<std::size_t> measured;
  for (std::size_t i : measured_local) measured.insert(i + fp.first_bin);

  auto has_near = [&measured](std::size_t bin) {
    auto it = measured.lower_bound(bin > 0 ? bin - 1 : 0);
    return it != measured.end() && *it <= bin + 1;
  };

  const std::size_t lo_bin = fp.first_bin;
  const std::size_t hi_bin = fp.first_bin + fp.values.size() - 1;

  std::vector<ArchitectureMatch> out;
  for (const auto& strides : candidates) {
    const PeakPrediction pp = predict_peaks(strides, fp.source_rate);
    std::set<std::size_t> predicted;
    for (const auto& r : pp.normalized_exact) {
      const std::size_t bin = rational_to_bin(r, fp.config.frame_len);
      if (bin >= lo_bin && bin <= hi_bin) predicted.insert(bin);
    }
    std::size_t matched = 0;
    for (std::size_t bin : predicted)
      if (has_near(bin)) ++matched;
    ArchitectureMatch m;
    m.strides = strides;
    m.score = predicted.empty()
                  ? 0.0
                  : static_cast<double>(matched) / static_cast<double>(predicted.size());
    out.push_back(std::move(m));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ArchitectureMatch& a, const ArchitectureMatch& b) {
                     return a.score > b.score;
                   });
  return out;
}

}  // namespace specfp
