#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "specfp/errors.hpp"
#include "specfp/signal.hpp"

using namespace specfp;
using testutil::naive_dft;
using testutil::random_signal;

TEST_CASE("dft: unit impulse transforms to all ones") {
  Signal s;
  s.samples = {1, 0, 0, 0, 0, 0, 0, 0};
  s.sample_rate = 8.0;
  const Spectrum spec = dft(s);
  REQUIRE(spec.bins.size() == 8);
  CHECK(spec.origin_length == 8);
  CHECK(spec.bin_resolution == doctest::Approx(1.0));
  for (const auto& b : spec.bins) {
    CHECK(b.real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(b.imag()) < 1e-12);
  }
}

TEST_CASE("dft: integer-bin cosine hits exactly two bins") {
  const std::size_t n = 16;
  Signal s;
  s.sample_rate = 16.0;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.samples[i] = std::cos(2.0 * std::numbers::pi * 2.0 * static_cast<double>(i) / 16.0);
  const Spectrum spec = dft(s);
  for (std::size_t m = 0; m < n; ++m) {
    const double expected = (m == 2 || m == 14) ? 8.0 : 0.0;
    CHECK(std::abs(spec.bins[m] - std::complex<double>(expected, 0.0)) < 1e-9);
  }
}

TEST_CASE("dft matches the brute-force oracle") {
  for (std::size_t n : {13u, 16u, 37u, 64u, 100u}) {
    const Signal s = random_signal(n, 11 * n);
    const Spectrum spec = dft(s);
    const auto oracle = naive_dft(s.samples);
    const double scale = testutil::spec_max_abs(oracle);
    CHECK(testutil::spec_max_diff(spec.bins, oracle) < 1e-9 * std::max(1.0, scale));
  }
}

TEST_CASE("dft rejects an empty signal") {
  Signal s;
  s.sample_rate = 1.0;
  CHECK_THROWS_AS(dft(s), InvalidInput);
}

TEST_CASE("idft: all-ones spectrum is the unit impulse") {
  Spectrum spec;
  spec.bins.assign(8, {1.0, 0.0});
  spec.origin_length = 8;
  spec.bin_resolution = 1.0;
  const Signal s = idft(spec);
  REQUIRE(s.size() == 8);
  CHECK(s.samples[0] == doctest::Approx(1.0).epsilon(1e-12));
  for (std::size_t i = 1; i < 8; ++i) CHECK(std::fabs(s.samples[i]) < 1e-12);
}

TEST_CASE("idft inverts dft") {
  const Signal s = random_signal(64, 42, 1000.0);
  const Signal back = idft(dft(s));
  CHECK(testutil::max_abs_diff(s.samples, back.samples) < 1e-9);
  CHECK(back.sample_rate == doctest::Approx(1000.0));
}

TEST_CASE("idft: conjugate-symmetric spectrum yields a real signal") {
  const std::size_t n = 32;
  Rng rng(5);
  Spectrum spec;
  spec.origin_length = n;
  spec.bin_resolution = 1.0;
  spec.bins.resize(n);
  spec.bins[0] = {rng.uniform(-1.0, 1.0), 0.0};
  spec.bins[n / 2] = {rng.uniform(-1.0, 1.0), 0.0};
  for (std::size_t m = 1; m < n / 2; ++m) {
    spec.bins[m] = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    spec.bins[n - m] = std::conj(spec.bins[m]);
  }
  // idft drops imaginary parts; verify they were negligible to begin with
  auto data = spec.bins;
  FftPlan(n).inverse(data.data());
  for (const auto& z : data) CHECK(std::fabs(z.imag()) < 1e-9);
}

TEST_CASE("zero_insert_upsample basics") {
  Signal s;
  s.samples = {1, 2, 3};
  s.sample_rate = 10.0;
  const Signal same = zero_insert_upsample(s, 1);
  CHECK(same.samples == s.samples);
  CHECK(same.sample_rate == doctest::Approx(10.0));

  Signal t;
  t.samples = {1, 2};
  t.sample_rate = 4.0;
  const Signal up = zero_insert_upsample(t, 3);
  CHECK(up.samples == std::vector<double>{1, 0, 0, 2, 0, 0});
  CHECK(up.sample_rate == doctest::Approx(12.0));

  CHECK_THROWS_AS(zero_insert_upsample(t, 0), InvalidParameter);
}

TEST_CASE("zero insertion tiles the spectrum") {
  // dft(zero_insert(s, k))[m] == dft(s)[m mod n], checked by brute force.
  const Signal s = random_signal(8, 77);
  const auto base = naive_dft(s.samples);
  const Signal up = zero_insert_upsample(s, 4);
  const auto tiled = naive_dft(up.samples);
  for (std::size_t m = 0; m < tiled.size(); ++m) {
    CHECK(std::abs(tiled[m] - base[m % 8]) < 1e-9);
  }
}

TEST_CASE("periodization identity holds for the fft path too") {
  for (std::size_t n : {8u, 16u}) {
    for (std::size_t k : {2u, 4u, 8u}) {
      const Signal s = random_signal(n, 1000 + n * k);
      const Spectrum base = dft(s);
      const Spectrum up = dft(zero_insert_upsample(s, k));
      double worst = 0.0;
      for (std::size_t m = 0; m < up.bins.size(); ++m)
        worst = std::max(worst, std::abs(up.bins[m] - base.bins[m % n]));
      CHECK(worst < 1e-9 * std::max(1.0, testutil::spec_max_abs(base.bins)));
    }
  }
}

TEST_CASE("linear_interp_upsample: ramp midpoint and identity stride") {
  Signal s;
  s.samples = {0.0, 1.0};
  s.sample_rate = 2.0;
  const Signal up = linear_interp_upsample(s, 2);
  REQUIRE(up.samples.size() == 4);
  CHECK(up.samples[0] == doctest::Approx(0.0));
  CHECK(up.samples[1] == doctest::Approx(0.5));
  CHECK(up.samples[2] == doctest::Approx(1.0));
  CHECK(up.samples[3] == doctest::Approx(0.5));  // circular wrap back toward 0

  const Signal id = linear_interp_upsample(s, 1);
  CHECK(id.samples == s.samples);
  CHECK_THROWS_AS(linear_interp_upsample(s, 0), InvalidParameter);
}

TEST_CASE("linear_interp_upsample: constants are fixed points") {
  Signal s;
  s.samples.assign(8, 0.7);
  s.sample_rate = 1.0;
  const Signal up = linear_interp_upsample(s, 4);
  for (double v : up.samples) CHECK(v == doctest::Approx(0.7).epsilon(1e-14));
}

TEST_CASE("linear_interp_upsample equals the zero-insert + triangle composition") {
  const Signal s = random_signal(16, 123);
  const std::size_t k = 3;
  const Signal got = linear_interp_upsample(s, k);

  const Signal z = zero_insert_upsample(s, k);
  const Signal conv = convolve(z, triangular_kernel(k), ConvMode::circular);
  const std::size_t n = conv.samples.size();
  std::vector<double> expect(n);
  for (std::size_t t = 0; t < n; ++t) expect[t] = conv.samples[(t + k - 1) % n];

  CHECK(got.samples == expect);  // same primitives, bit-identical
}

TEST_CASE("convolve: identity kernel and impulse response") {
  const Signal s = random_signal(10, 9);
  const Kernel id{{1.0}};
  CHECK(convolve(s, id, ConvMode::full).samples == s.samples);
  CHECK(convolve(s, id, ConvMode::same).samples == s.samples);
  CHECK(convolve(s, id, ConvMode::circular).samples == s.samples);

  Signal imp;
  imp.samples = {1, 0, 0, 0};
  imp.sample_rate = 1.0;
  const Kernel abc{{2.0, -3.0, 5.0}};
  CHECK(convolve(imp, abc, ConvMode::circular).samples == std::vector<double>{2, -3, 5, 0});
}

TEST_CASE("circular convolution obeys the convolution theorem") {
  const Signal s = random_signal(32, 21);
  Kernel kern;
  Rng rng(22);
  kern.taps.resize(5);
  for (double& t : kern.taps) t = rng.uniform(-1.0, 1.0);

  const Signal direct = convolve(s, kern, ConvMode::circular);

  Signal padded;
  padded.sample_rate = s.sample_rate;
  padded.samples = kern.taps;
  padded.samples.resize(32, 0.0);
  const Spectrum ss = dft(s);
  const Spectrum ks = dft(padded);
  Spectrum prod;
  prod.origin_length = 32;
  prod.bin_resolution = ss.bin_resolution;
  prod.bins.resize(32);
  for (std::size_t m = 0; m < 32; ++m) prod.bins[m] = ss.bins[m] * ks.bins[m];
  const Signal via_freq = idft(prod);

  CHECK(testutil::max_abs_diff(direct.samples, via_freq.samples) < 1e-9);
}

TEST_CASE("convolve: full mode matches the definition") {
  Signal s;
  s.samples = {1, 2};
  s.sample_rate = 1.0;
  const Kernel kern{{3.0, 4.0, 5.0}};
  const Signal full = convolve(s, kern, ConvMode::full);
  CHECK(full.samples == std::vector<double>{3, 10, 13, 10});
  const Signal same = convolve(s, kern, ConvMode::same);
  CHECK(same.samples == std::vector<double>{10, 13});
}

TEST_CASE("average_frame_spectrum: in-bin sine concentrates on one bin") {
  const std::size_t frame = 1024;
  const std::size_t n = frame * 4;
  Signal s;
  s.sample_rate = 1024.0;
  s.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    s.samples[i] = std::sin(2.0 * std::numbers::pi * 100.0 * static_cast<double>(i) / 1024.0);
  const auto avg = average_frame_spectrum(s, frame);
  REQUIRE(avg.size() == frame / 2 + 1);
  const double peak = avg[100];
  for (std::size_t m = 0; m < avg.size(); ++m) {
    if (m == 100) continue;
    CHECK(avg[m] < 1e-6 * peak);
  }
}

TEST_CASE("average_frame_spectrum: white noise averages flat") {
  Rng rng(31337);
  Signal s;
  s.sample_rate = 1.0;
  s.samples.resize(256 * 100);
  for (double& v : s.samples) v = rng.uniform(-1.0, 1.0);
  const auto avg = average_frame_spectrum(s, 256);
  // skip DC and Nyquist: their expected magnitude differs by construction
  double lo = avg[1], hi = avg[1];
  for (std::size_t m = 1; m + 1 < avg.size(); ++m) {
    lo = std::min(lo, avg[m]);
    hi = std::max(hi, avg[m]);
  }
  CHECK(hi / lo < 2.0);
}

TEST_CASE("average_frame_spectrum: two frames give the elementwise mean") {
  const Signal a = random_signal(64, 1);
  const Signal b = random_signal(64, 2);
  Signal both;
  both.sample_rate = 1.0;
  both.samples = a.samples;
  both.samples.insert(both.samples.end(), b.samples.begin(), b.samples.end());

  const auto avg = average_frame_spectrum(both, 64);
  const Spectrum sa = dft(a);
  const Spectrum sb = dft(b);
  for (std::size_t m = 0; m < avg.size(); ++m) {
    const double ma = std::sqrt(sa.bins[m].real() * sa.bins[m].real() +
                                sa.bins[m].imag() * sa.bins[m].imag());
    const double mb = std::sqrt(sb.bins[m].real() * sb.bins[m].real() +
                                sb.bins[m].imag() * sb.bins[m].imag());
    CHECK(avg[m] == doctest::Approx(0.5 * (ma + mb)).epsilon(1e-13));
  }
}

TEST_CASE("average_frame_spectrum: frame order does not matter") {
  const Signal a = random_signal(64 * 4, 3);
  Signal swapped = a;
  // swap the first two frames
  for (std::size_t i = 0; i < 64; ++i) std::swap(swapped.samples[i], swapped.samples[i + 64]);
  const auto m1 = average_frame_spectrum(a, 64);
  const auto m2 = average_frame_spectrum(swapped, 64);
  CHECK(testutil::max_abs_diff(m1, m2) < 1e-12);
}

TEST_CASE("average_frame_spectrum rejects short input") {
  const Signal s = random_signal(100, 4);
  CHECK_THROWS_AS(average_frame_spectrum(s, 128), InsufficientData);
}

TEST_CASE("average_frame_spectrum: Hann taper tames off-bin leakage") {
  const std::size_t frame = 512;
  Signal s;
  s.sample_rate = 512.0;
  s.samples.resize(frame * 8);
  // a tone halfway between bins: worst case for the rectangular window
  for (std::size_t i = 0; i < s.samples.size(); ++i)
    s.samples[i] = std::sin(2.0 * std::numbers::pi * 100.5 * static_cast<double>(i) / 512.0);
  const auto rect = average_frame_spectrum(s, frame, FrameWindow::rectangular);
  const auto hann = average_frame_spectrum(s, frame, FrameWindow::hann);
  // compare energy far from the tone relative to the tone itself
  const double rect_leak = rect[150] / rect[100];
  const double hann_leak = hann[150] / hann[100];
  CHECK(hann_leak < 0.1 * rect_leak);
}

TEST_CASE("average_frame_spectrum: overlap adds frames without changing flat content") {
  const Signal s = random_signal(256 * 8, 21);
  const auto dense = average_frame_spectrum(s, 256, FrameWindow::rectangular, 0.5);
  const auto plain = average_frame_spectrum(s, 256);
  REQUIRE(dense.size() == plain.size());
  // same signal, same estimator target: the two averages agree loosely
  for (std::size_t m = 1; m + 1 < dense.size(); ++m) {
    CHECK(dense[m] == doctest::Approx(plain[m]).epsilon(0.75));
  }
  CHECK_THROWS_AS(average_frame_spectrum(s, 256, FrameWindow::rectangular, 1.0),
                  InvalidParameter);
}

TEST_CASE("spectra of real signals are conjugate-symmetric") {
  for (std::size_t n : {16u, 31u}) {
    const Spectrum spec = dft(random_signal(n, 60 + n));
    for (std::size_t m = 1; m < n; ++m) {
      CHECK(std::abs(spec.bins[m] - std::conj(spec.bins[n - m])) < 1e-9);
    }
  }
}

TEST_CASE("idft validates spectrum shape") {
  Spectrum bad;
  bad.bins.assign(8, {1.0, 0.0});
  bad.origin_length = 16;  // inconsistent
  bad.bin_resolution = 1.0;
  CHECK_THROWS_AS(idft(bad), InvalidInput);
  CHECK_THROWS_AS(idft(Spectrum{}), InvalidInput);
}

TEST_CASE("log_magnitude") {
  const std::vector<double> zeros(5, 0.0);
  const auto lz = log_magnitude(zeros, 1e-10);
  for (double v : lz) CHECK(v == doctest::Approx(std::log(1e-10)));

  // scaling by g shifts by log(g) where values dominate epsilon
  const std::vector<double> v{1.0, 2.5, 100.0};
  std::vector<double> scaled = v;
  for (double& x : scaled) x *= 7.0;
  const auto lv = log_magnitude(v, 1e-10);
  const auto ls = log_magnitude(scaled, 1e-10);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(ls[i] - lv[i] == doctest::Approx(std::log(7.0)).epsilon(1e-9));

  const std::vector<double> e{1.0, std::numbers::e - 1e-10};
  const auto le = log_magnitude(e, 1e-10);
  CHECK(le[0] == doctest::Approx(std::log(1.0 + 1e-10)));
  CHECK(le[1] == doctest::Approx(1.0));

  CHECK_THROWS_AS(log_magnitude({-0.5}, 1e-10), InvalidInput);
  CHECK_THROWS_AS(log_magnitude({1.0}, 0.0), InvalidParameter);
}

TEST_CASE("dft is linear") {
  const Signal x = random_signal(32, 101);
  const Signal y = random_signal(32, 102);
  const double a = 1.7, b = -0.3;
  Signal combo;
  combo.sample_rate = 1.0;
  combo.samples.resize(32);
  for (std::size_t i = 0; i < 32; ++i) combo.samples[i] = a * x.samples[i] + b * y.samples[i];
  const Spectrum sx = dft(x), sy = dft(y), sc = dft(combo);
  double worst = 0.0;
  for (std::size_t m = 0; m < 32; ++m)
    worst = std::max(worst, std::abs(sc.bins[m] - (a * sx.bins[m] + b * sy.bins[m])));
  CHECK(worst < 1e-9);
}

TEST_CASE("Parseval's identity") {
  for (std::size_t n : {8u, 13u, 64u, 100u}) {
    const Signal s = random_signal(n, 500 + n);
    const Spectrum spec = dft(s);
    double time_energy = 0.0;
    for (double v : s.samples) time_energy += v * v;
    double freq_energy = 0.0;
    for (const auto& z : spec.bins) freq_energy += std::norm(z);
    freq_energy /= static_cast<double>(n);
    CHECK(std::fabs(time_energy - freq_energy) < 1e-9 * std::max(1.0, time_energy));
  }
}
