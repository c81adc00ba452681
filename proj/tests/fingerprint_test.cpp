#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "helpers.hpp"
#include "specfp/audio_io.hpp"
#include "specfp/errors.hpp"
#include "specfp/fingerprint.hpp"

using namespace specfp;

namespace {

Signal noise_signal(double rate, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Signal s;
  s.sample_rate = rate;
  s.samples.resize(n);
  for (double& v : s.samples) v = rng.uniform(-1.0, 1.0);
  return s;
}

Signal simulated_codec_output(const std::vector<std::size_t>& strides, std::uint64_t seed,
                              double out_rate, std::size_t frame, std::size_t frames) {
  std::size_t p = 1;
  for (std::size_t k : strides) p *= k;
  Rng rng(100 + seed);
  Signal latent;
  latent.sample_rate = out_rate / static_cast<double>(p);
  latent.samples.resize(frame * frames / p);
  for (double& v : latent.samples) v = rng.uniform(0.0, 1.0);  // nonzero mean: DC to replicate
  const DeconvStack stack = random_stack(strides, seed, latent.sample_rate);
  return run_stack(latent, stack);
}

}  // namespace

TEST_CASE("local_min_subtract: constants vanish") {
  const std::vector<double> c(16, 3.25);
  const auto out = local_min_subtract(c, 5);
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("local_min_subtract: isolated spike is preserved, baseline removed") {
  std::vector<double> v(21, 1.0);
  v[10] = 5.5;
  const auto out = local_min_subtract(v, 7);
  for (std::size_t i = 0; i < v.size(); ++i) {
    CHECK(out[i] == (i == 10 ? 4.5 : 0.0));
  }
}

TEST_CASE("local_min_subtract: exact translation invariance") {
  // Values on a dyadic grid with a dyadic constant: the additions are exact,
  // so the outputs must be bit-identical.
  Rng rng(8);
  std::vector<double> v(64);
  for (double& x : v) x = std::floor(rng.uniform() * 1048576.0) / 1048576.0;
  std::vector<double> shifted = v;
  for (double& x : shifted) x += 7.25;
  CHECK(local_min_subtract(v, 11) == local_min_subtract(shifted, 11));

  // arbitrary constant: equal to rounding noise
  std::vector<double> shifted2 = v;
  for (double& x : shifted2) x += 7.3;
  CHECK(testutil::max_abs_diff(local_min_subtract(v, 11), local_min_subtract(shifted2, 11)) <
        1e-12);
}

TEST_CASE("local_min_subtract: outputs are non-negative") {
  const Signal s = testutil::random_signal(128, 17);
  const auto out = local_min_subtract(s.samples, 9);
  for (double v : out) CHECK(v >= 0.0);
}

TEST_CASE("local_min_subtract parameter validation") {
  const std::vector<double> v(10, 1.0);
  CHECK_THROWS_AS(local_min_subtract(v, 4), InvalidParameter);   // even
  CHECK_THROWS_AS(local_min_subtract(v, 1), InvalidParameter);   // too small
  CHECK_THROWS_AS(local_min_subtract(v, 11), InvalidParameter);  // larger than input
}

TEST_CASE("band_select: full band is the identity") {
  std::vector<double> half(129);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = static_cast<double>(i);
  const auto sel = band_select(half, 1.0, 0.0, 0.5);
  CHECK(sel.values == half);
  CHECK(sel.first_bin == 0);
  CHECK(sel.frequencies.front() == 0.0);
  CHECK(sel.frequencies.back() == doctest::Approx(0.5));
}

TEST_CASE("band_select: 48 kHz frame 8192 band [5k, 16k] keeps bins 854..2730") {
  std::vector<double> half(4097);
  for (std::size_t i = 0; i < half.size(); ++i) half[i] = static_cast<double>(i);
  const auto sel = band_select(half, 48000.0, 5000.0, 16000.0);
  CHECK(sel.first_bin == 854);
  CHECK(sel.values.front() == 854.0);
  CHECK(sel.values.back() == 2730.0);
  CHECK(sel.values.size() == 2730 - 854 + 1);
  CHECK(sel.frequencies.front() == doctest::Approx(854.0 * 48000.0 / 8192.0));
  CHECK(sel.frequencies.front() >= 5000.0);
  CHECK(sel.frequencies.back() <= 16000.0);
}

TEST_CASE("band_select error paths") {
  const std::vector<double> half(129, 1.0);
  CHECK_THROWS_AS(band_select(half, 1.0, 0.6, 0.8), InvalidParameter);  // above Nyquist
  CHECK_THROWS_AS(band_select(half, 1.0, 0.3, 0.2), InvalidParameter);  // inverted
  // a band narrower than the bin spacing selects nothing
  std::vector<double> wide(4097, 1.0);
  CHECK_THROWS_AS(band_select(wide, 48000.0, 5000.5, 5002.0), InvalidParameter);
}

TEST_CASE("extract_fingerprint: white noise stays featureless") {
  // Monte-Carlo with a fixed seed: the flattened averaged spectrum of white
  // noise stays well under three default prominences, so nothing registers
  // as a peak at that bar.
  const Signal s = noise_signal(1.0, 256 * 100, 1);
  FingerprintConfig cfg;
  cfg.frame_len = 256;
  cfg.band_low = 0.0;
  cfg.band_high = 0.5;
  const Fingerprint fp = extract_fingerprint(s, cfg);
  const double prom = default_min_prominence(fp.values, cfg.min_window);
  const double mx = *std::max_element(fp.values.begin(), fp.values.end());
  CHECK(mx < 3.0 * prom);
  CHECK(measure_peaks(fp.values, 3.0 * prom).empty());
}

TEST_CASE("extract_fingerprint: values are non-negative and bins increase") {
  Rng rng(12);
  const Signal s = harmonic_mixture(48000.0, 48000, rng);
  const Fingerprint fp = extract_fingerprint(s, FingerprintConfig{});
  REQUIRE(!fp.values.empty());
  CHECK(fp.values.size() == fp.bin_frequencies.size());
  for (double v : fp.values) CHECK(v >= 0.0);
  for (std::size_t i = 1; i < fp.bin_frequencies.size(); ++i)
    CHECK(fp.bin_frequencies[i] > fp.bin_frequencies[i - 1]);
  CHECK(fp.source_rate == 48000.0);
}

TEST_CASE("extract_fingerprint: gain invariance up to the epsilon floor") {
  Rng rng(10);
  const Signal s = harmonic_mixture(48000.0, 48000 * 2, rng);
  const FingerprintConfig cfg;
  const Fingerprint base = extract_fingerprint(s, cfg);
  // The epsilon floor in log_magnitude keeps the residual around
  // eps/(g*magnitude); everything above the floor agrees to ~1e-8.
  for (double g : {0.1, 10.0, 0.01}) {
    Signal scaled = s;
    for (double& v : scaled.samples) v *= g;
    const Fingerprint fp = extract_fingerprint(scaled, cfg);
    CHECK(testutil::max_abs_diff(fp.values, base.values) < 5e-8);
  }
}

TEST_CASE("extract_fingerprint: simulated {8,5,4,2} output shows the 150 Hz comb") {
  const Signal out = simulated_codec_output({8, 5, 4, 2}, 7, 48000.0, 8192, 64);
  const FingerprintConfig cfg;  // [5 kHz, 16 kHz]
  const Fingerprint fp = extract_fingerprint(out, cfg);
  const auto peaks = measure_peaks(fp.values, default_min_prominence(fp.values, cfg.min_window));

  const PeakPrediction pp = predict_peaks({8, 5, 4, 2}, 48000.0);
  std::size_t total = 0, matched = 0;
  for (double f : pp.absolute_frequencies_hz) {
    const long bin = std::lround(f * 8192.0 / 48000.0);
    if (bin < static_cast<long>(fp.first_bin) ||
        bin > static_cast<long>(fp.first_bin + fp.values.size() - 1))
      continue;
    ++total;
    for (std::size_t q : peaks) {
      if (std::labs(static_cast<long>(q + fp.first_bin) - bin) <= 1) {
        ++matched;
        break;
      }
    }
  }
  CHECK(total == 73);  // 150 Hz grid restricted to [5k, 16k]
  CHECK(static_cast<double>(matched) / static_cast<double>(total) >= 0.9);
}

TEST_CASE("extract_fingerprint error paths") {
  const Signal s = noise_signal(48000.0, 4096, 3);
  FingerprintConfig cfg;
  CHECK_THROWS_AS(extract_fingerprint(s, cfg), InsufficientData);  // < one frame

  FingerprintConfig med;
  med.frame_len = 1024;
  med.band_high = 30000.0;  // above Nyquist
  CHECK_THROWS_AS(extract_fingerprint(s, med), InvalidParameter);

  FingerprintConfig odd;
  odd.frame_len = 1000;  // not a power of two
  CHECK_THROWS_AS(extract_fingerprint(s, odd), InvalidParameter);
}

TEST_CASE("fingerprints are stable under whole-frame shifts") {
  Rng rng(14);
  const std::size_t frame = 1024;
  Signal s = harmonic_mixture(8000.0, frame * 8, rng);
  FingerprintConfig cfg;
  cfg.frame_len = frame;
  cfg.band_low = 1000.0;
  cfg.band_high = 4000.0;
  const Fingerprint base = extract_fingerprint(s, cfg);

  Signal rolled = s;
  std::rotate(rolled.samples.begin(), rolled.samples.begin() + frame, rolled.samples.end());
  const Fingerprint fp = extract_fingerprint(rolled, cfg);
  CHECK(testutil::max_abs_diff(fp.values, base.values) < 1e-12);

  // fractional-frame shifts move values by a bounded amount; informational
  Signal off = s;
  std::rotate(off.samples.begin(), off.samples.begin() + frame / 3, off.samples.end());
  const Fingerprint fp_off = extract_fingerprint(off, cfg);
  MESSAGE("third-of-frame shift changes values by up to "
          << testutil::max_abs_diff(fp_off.values, base.values));
}

TEST_CASE("FingerprintConfig::for_rate picks the documented bands") {
  const auto hi = FingerprintConfig::for_rate(48000.0);
  CHECK(hi.band_low == 5000.0);
  CHECK(hi.band_high == 16000.0);
  const auto lo = FingerprintConfig::for_rate(16000.0);
  CHECK(lo.band_low == 1000.0);
  CHECK(lo.band_high == 8000.0);
  const auto tiny = FingerprintConfig::for_rate(8000.0);
  CHECK(tiny.band_high == 4000.0);
}

TEST_CASE("match_architecture ranks the generating stack first") {
  // {4,4,4} and {2,2} predict sub-grids of the 150 Hz comb, so they can
  // only tie with the generating schedule, never beat it; ties keep the
  // candidate order.
  const Signal out = simulated_codec_output({8, 5, 4, 2}, 7, 48000.0, 8192, 64);
  const Fingerprint fp = extract_fingerprint(out, FingerprintConfig{});
  const std::vector<std::vector<std::size_t>> candidates{{8, 5, 4, 2}, {4, 4, 4}, {2, 2}};
  const auto ranked = match_architecture(fp, candidates);
  REQUIRE(ranked.size() == 3);
  CHECK(ranked.front().strides == std::vector<std::size_t>{8, 5, 4, 2});
  CHECK(ranked.front().score > 0.9);
  // a schedule whose grid does not nest inside the comb scores lower
  const auto off_grid = match_architecture(fp, {{8, 5, 4, 2}, {7, 3}});
  CHECK(off_grid.front().strides == std::vector<std::size_t>{8, 5, 4, 2});
  CHECK(off_grid.back().score < off_grid.front().score);
}

TEST_CASE("match_architecture: white noise scores near chance") {
  const Signal s = noise_signal(48000.0, 8192 * 32, 4);
  const Fingerprint fp = extract_fingerprint(s, FingerprintConfig{});
  const auto ranked = match_architecture(fp, {{8, 5, 4, 2}, {4, 4, 2}, {16, 4}});
  for (const auto& m : ranked) CHECK(m.score < 0.3);
}

TEST_CASE("match_architecture: a single candidate is returned with its score") {
  const Signal s = noise_signal(48000.0, 8192 * 8, 5);
  const Fingerprint fp = extract_fingerprint(s, FingerprintConfig{});
  const auto ranked = match_architecture(fp, {{6, 2}});
  REQUIRE(ranked.size() == 1);
  CHECK(ranked.front().strides == std::vector<std::size_t>{6, 2});
  CHECK(ranked.front().score >= 0.0);
  CHECK(ranked.front().score <= 1.0);
}

TEST_CASE("match_architecture rejects an empty candidate list") {
  const Signal s = noise_signal(48000.0, 8192 * 8, 6);
  const Fingerprint fp = extract_fingerprint(s, FingerprintConfig{});
  CHECK_THROWS_AS(match_architecture(fp, {}), InvalidInput);
}

TEST_CASE("fingerprint peaks survive the min_window choice") {
  // The sliding-window width is a free parameter; the comb must not depend
  // on it within a sensible range.
  const Signal out = simulated_codec_output({4, 4, 2}, 15, 48000.0, 8192, 48);
  std::vector<std::size_t> match_rates;
  for (std::size_t w : {std::size_t{7}, std::size_t{11}, std::size_t{15}}) {
    FingerprintConfig cfg;
    cfg.min_window = w;
    const Fingerprint fp = extract_fingerprint(out, cfg);
    const auto peaks = measure_peaks(fp.values, default_min_prominence(fp.values, w));
    const PeakPrediction pp = predict_peaks({4, 4, 2}, 48000.0);
    std::size_t matched = 0, total = 0;
    for (double f : pp.absolute_frequencies_hz) {
      const long bin = std::lround(f * 8192.0 / 48000.0);
      if (bin < static_cast<long>(fp.first_bin) ||
          bin > static_cast<long>(fp.first_bin + fp.values.size() - 1))
        continue;
      ++total;
      for (std::size_t q : peaks) {
        if (std::labs(static_cast<long>(q + fp.first_bin) - bin) <= 1) {
          ++matched;
          break;
        }
      }
    }
    REQUIRE(total > 0);
    match_rates.push_back(matched * 100 / total);
  }
  for (std::size_t pct : match_rates) CHECK(pct >= 90);
}
