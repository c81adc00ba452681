#include "specfp/audio_io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <thread>

#include <json.hpp>

#include "specfp/errors.hpp"
#include "specfp/kernels.hpp"

namespace specfp {

namespace {

// ---------------------------------------------------------------- WAV ----

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::vector<unsigned char>& v, std::uint32_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 16) & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 24) & 0xff));
}

void wr_u16(std::vector<unsigned char>& v, std::uint16_t x) {
  v.push_back(static_cast<unsigned char>(x & 0xff));
  v.push_back(static_cast<unsigned char>((x >> 8) & 0xff));
}

struct WavFormat {
  std::uint16_t code = 0;  // 1 = PCM, 3 = IEEE float
  std::uint16_t channels = 0;
  std::uint32_t rate = 0;
  std::uint16_t bits = 0;
};

}  // namespace

Signal read_wav(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_wav: cannot open " + path.string());
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 12 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    throw UnsupportedFormat("read_wav: not a RIFF/WAVE file: " + path.string());

  WavFormat fmt;
  bool have_fmt = false;
  std::size_t data_off = 0, data_len = 0;
  bool have_data = false;

  std::size_t off = 12;
  while (off + 8 <= buf.size()) {
    const char* id = reinterpret_cast<const char*>(buf.data() + off);
    const std::uint32_t sz = rd_u32(buf.data() + off + 4);
    const std::size_t body = off + 8;
    if (body + sz > buf.size()) throw CorruptFile("read_wav: truncated chunk in " + path.string());
    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (sz < 16) throw CorruptFile("read_wav: short fmt chunk");
      fmt.code = rd_u16(buf.data() + body);
      fmt.channels = rd_u16(buf.data() + body + 2);
      fmt.rate = rd_u32(buf.data() + body + 4);
      fmt.bits = rd_u16(buf.data() + body + 14);
      if (fmt.code == 0xFFFE) {  // WAVE_FORMAT_EXTENSIBLE: real code leads the GUID
        if (sz < 40) throw CorruptFile("read_wav: short extensible fmt chunk");
        fmt.code = rd_u16(buf.data() + body + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = sz;
      have_data = true;
    }
    off = body + sz + (sz & 1);  // chunks are word-aligned
  }
  if (!have_fmt || !have_data) throw CorruptFile("read_wav: missing fmt/data chunk");
  if (fmt.channels == 0 || fmt.rate == 0) throw CorruptFile("read_wav: bad fmt fields");

  std::size_t bytes_per_sample;
  if (fmt.code == 1 && fmt.bits == 16) {
    bytes_per_sample = 2;
  } else if (fmt.code == 1 && fmt.bits == 24) {
    bytes_per_sample = 3;
  } else if (fmt.code == 3 && fmt.bits == 32) {
    bytes_per_sample = 4;
  } else {
    throw UnsupportedFormat("read_wav: unsupported codec/bit depth in " + path.string());
  }

  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  if (data_len % frame_bytes != 0) throw CorruptFile("read_wav: partial frame in data chunk");
  const std::size_t frames = data_len / frame_bytes;
  if (frames == 0) throw CorruptFile("read_wav: no audio frames");

  Signal out;
  out.sample_rate = static_cast<double>(fmt.rate);
  out.samples.resize(frames);
  const double inv_ch = 1.0 / static_cast<double>(fmt.channels);
  const unsigned char* p = buf.data() + data_off;
  for (std::size_t f = 0; f < frames; ++f) {
    double acc = 0.0;
    for (std::size_t c = 0; c < fmt.channels; ++c, p += bytes_per_sample) {
      double v;
      if (bytes_per_sample == 2) {
        const auto raw = static_cast<std::int16_t>(rd_u16(p));
        v = static_cast<double>(raw) / 32768.0;
      } else if (bytes_per_sample == 3) {
        std::int32_t raw = p[0] | (p[1] << 8) | (p[2] << 16);
        if (raw & 0x800000) raw |= ~0xFFFFFF;  // sign-extend
        v = static_cast<double>(raw) / 8388608.0;
      } else {
        float fv;
        std::memcpy(&fv, p, 4);
        v = static_cast<double>(fv);
      }
      acc += v;
    }
    out.samples[f] = acc * inv_ch;
  }
  return out;
}

void write_wav(const std::filesystem::path& path, const Signal& s) {
  if (s.samples.empty()) throw InvalidInput("write_wav: empty signal");
  if (!(s.sample_rate > 0.0)) throw InvalidInput("write_wav: sample_rate must be > 0");

  const std::uint32_t n = static_cast<std::uint32_t>(s.samples.size());
  const std::uint32_t data_bytes = n * 2;
  std::vector<unsigned char> buf;
  buf.reserve(44 + data_bytes);
  auto put4 = [&buf](const char* s4) { buf.insert(buf.end(), s4, s4 + 4); };

  put4("RIFF");
  wr_u32(buf, 36 + data_bytes);
  put4("WAVE");
  put4("fmt ");
  wr_u32(buf, 16);
  wr_u16(buf, 1);  // PCM
  wr_u16(buf, 1);  // mono
  const auto rate = static_cast<std::uint32_t>(std::llround(s.sample_rate));
  wr_u32(buf, rate);
  wr_u32(buf, rate * 2);
  wr_u16(buf, 2);
  wr_u16(buf, 16);
  put4("data");
  wr_u32(buf, data_bytes);
  for (double x : s.samples) {
    const auto q = static_cast<std::int16_t>(
        std::clamp<long long>(std::llround(x * 32768.0), -32768, 32767));
    wr_u16(buf, static_cast<std::uint16_t>(q));
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_wav: cannot open " + path.string());
  os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!os) throw Error("write_wav: write failed for " + path.string());
}

// ----------------------------------------------------------- resampler ----

namespace {

double bessel_i0(double x) {
  double sum = 1.0, term = 1.0;
  const double h = x * 0.5;
  for (int k = 1; k < 64; ++k) {
    term *= (h / k) * (h / k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

struct Ratio {
  std::int64_t up = 1;    // L
  std::int64_t down = 1;  // M
};

// Best rational approximation of r with denominator <= cap (continued
// fractions). Integer sample-rate pairs reduce exactly.
Ratio approx_ratio(double r, std::int64_t cap = 1 << 13) {
  Ratio best;
  double x = r;
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int it = 0; it < 64; ++it) {
    const double fa = std::floor(x);
    const auto a = static_cast<std::int64_t>(fa);
    const std::int64_t h2 = a * h1 + h0;
    const std::int64_t k2 = a * k1 + k0;
    if (k2 > cap || h2 > (std::int64_t{1} << 32)) break;
    h0 = h1;
    h1 = h2;
    k0 = k1;
    k1 = k2;
    best = {h1, k1};
    const double frac = x - fa;
    if (frac < 1e-12) break;
    x = 1.0 / frac;
  }
  if (best.up < 1) best.up = 1;
  if (best.down < 1) best.down = 1;
  return best;
}

struct Polyphase {
  std::vector<std::vector<double>> taps;  // per phase, reversed for forward dots
  std::vector<std::int64_t> s_max;        // per phase
};

// Kaiser-windowed sinc, ~80 dB stopband, cutoff 0.45/max(L,M) and transition
// 0.05/max(L,M) cycles per upsampled sample. Passband ripple ~1e-4.
Polyphase design_polyphase(std::int64_t up, std::int64_t down) {
  const double base = 1.0 / static_cast<double>(std::max(up, down));
  const double cutoff = 0.45 * base;
  const double transition = 0.05 * base;
  constexpr double kStopbandDb = 80.0;
  const double beta = 0.1102 * (kStopbandDb - 8.7);
  auto half = static_cast<std::int64_t>(
      std::ceil((kStopbandDb - 7.95) / (2.285 * 2.0 * std::numbers::pi * transition) / 2.0));
  half = std::min<std::int64_t>(half, std::int64_t{1} << 17);

  std::vector<double> h(static_cast<std::size_t>(2 * half + 1));
  const double i0_beta = bessel_i0(beta);
  double sum = 0.0;
  for (std::int64_t j = 0; j <= 2 * half; ++j) {
    const double m = static_cast<double>(j - half);
    const double x = 2.0 * cutoff * m;
    const double sinc =
        m == 0.0 ? 1.0 : std::sin(std::numbers::pi * x) / (std::numbers::pi * x);
    const double t = m / static_cast<double>(half);
    const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - t * t))) / i0_beta;
    h[static_cast<std::size_t>(j)] = 2.0 * cutoff * sinc * win;
    sum += h[static_cast<std::size_t>(j)];
  }
  // Unit DC gain overall, times L to undo the zero-insert energy loss.
  const double gain = static_cast<double>(up) / sum;
  for (double& v : h) v *= gain;

  Polyphase poly;
  poly.taps.resize(static_cast<std::size_t>(up));
  poly.s_max.resize(static_cast<std::size_t>(up));
  for (std::int64_t r = 0; r < up; ++r) {
    // kernel indices j = half + r + s*up within [0, 2*half]
    const auto s_min = static_cast<std::int64_t>(std::ceil(
        static_cast<double>(-half - r) / static_cast<double>(up)));
    const auto s_max = static_cast<std::int64_t>(std::floor(
        static_cast<double>(half - r) / static_cast<double>(up)));
    auto& t = poly.taps[static_cast<std::size_t>(r)];
    t.resize(static_cast<std::size_t>(s_max - s_min + 1));
    for (std::int64_t s = s_min; s <= s_max; ++s) {
      const std::int64_t j = half + r + s * up;
      // reversed: index 0 holds the tap for s_max
      t[static_cast<std::size_t>(s_max - s)] = h[static_cast<std::size_t>(j)];
    }
    poly.s_max[static_cast<std::size_t>(r)] = s_max;
  }
  return poly;
}

}  // namespace

Signal resample(const Signal& s, double target_rate) {
  if (s.samples.empty()) throw InvalidInput("resample: empty signal");
  if (!(s.sample_rate > 0.0)) throw InvalidInput("resample: sample_rate must be > 0");
  if (!(target_rate > 0.0)) throw InvalidParameter("resample: target_rate must be > 0");
  if (target_rate == s.sample_rate) return s;

  const Ratio ratio = approx_ratio(target_rate / s.sample_rate);
  if (ratio.up == ratio.down) {
    Signal out = s;
    out.sample_rate = target_rate;
    return out;
  }
  const Polyphase poly = design_polyphase(ratio.up, ratio.down);

  const auto in_len = static_cast<std::int64_t>(s.samples.size());
  const std::int64_t out_len =
      (in_len * ratio.up + ratio.down / 2) / ratio.down;  // round(len * target/source)
  Signal out;
  out.sample_rate = target_rate;
  out.samples.assign(static_cast<std::size_t>(std::max<std::int64_t>(out_len, 1)), 0.0);

  for (std::int64_t j = 0; j < out_len; ++j) {
    const std::int64_t idx = j * ratio.down;
    const std::int64_t n = idx / ratio.up;
    const auto r = static_cast<std::size_t>(idx % ratio.up);
    const auto& taps = poly.taps[r];
    const std::int64_t count = static_cast<std::int64_t>(taps.size());
    const std::int64_t first = n - poly.s_max[r];  // input index of taps[0]
    const std::int64_t lo = std::max<std::int64_t>(first, 0);
    const std::int64_t hi = std::min<std::int64_t>(first + count - 1, in_len - 1);
    if (hi < lo) continue;
    const auto tap_off = static_cast<std::size_t>(lo - first);
    const auto len = static_cast<std::size_t>(hi - lo + 1);
    out.samples[static_cast<std::size_t>(j)] =
        kernels::dot(std::span<const double>(taps).subspan(tap_off, len),
                     std::span<const double>(s.samples).subspan(static_cast<std::size_t>(lo), len));
  }
  return out;
}

// ------------------------------------------------------------ manifest ----

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("read_manifest: cannot open " + path.string());
  std::vector<ManifestEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      ManifestEntry e;
      e.path = j.at("path").get<std::string>();
      e.label = j.at("label").get<std::string>();
      e.sample_rate = j.value("sample_rate", 0.0);
      e.duration_s = j.value("duration_s", 0.0);
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw CorruptFile("read_manifest: " + path.string() + ":" + std::to_string(lineno) + ": " +
                        ex.what());
    }
  }
  return out;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw Error("write_manifest: cannot open " + path.string());
  for (const auto& e : entries) {
    nlohmann::json j{{"path", e.path},
                     {"label", e.label},
                     {"sample_rate", e.sample_rate},
                     {"duration_s", e.duration_s}};
    os << j.dump() << "\n";
  }
}

// ------------------------------------------------------------- sources ----

std::vector<double> pink_noise(std::size_t length, Rng& rng) {
  // Kellet's three-pole approximation, good to ~0.5 dB over the audio band.
  std::vector<double> out(length);
  double b0 = 0.0, b1 = 0.0, b2 = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    const double w = rng.uniform(-1.0, 1.0);
    b0 = 0.99765 * b0 + w * 0.0990460;
    b1 = 0.96300 * b1 + w * 0.2965164;
    b2 = 0.57000 * b2 + w * 1.0526913;
    out[i] = 0.25 * (b0 + b1 + b2 + w * 0.1848);
  }
  return out;
}

namespace {

void normalize_peak(Signal& s, double target) {
  double peak = 0.0;
  for (double v : s.samples) peak = std::max(peak, std::fabs(v));
  if (peak > 0.0) kernels::scale(s.samples, target / peak);
}

double rms(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::sqrt(kernels::dot(v, v) / static_cast<double>(v.size()));
}

}  // namespace

Signal white_noise(double rate, std::size_t length, Rng& rng) {
  Signal s;
  s.sample_rate = rate;
  s.samples.resize(length);
  for (double& v : s.samples) v = rng.uniform(-1.0, 1.0);
  normalize_peak(s, 0.7);
  return s;
}

Signal harmonic_mixture(double rate, std::size_t length, Rng& rng) {
  Signal s;
  s.sample_rate = rate;
  s.samples.assign(length, 0.0);
  const std::size_t n_partials = 5 + rng.index(11);  // 5..15
  // Partials span the whole analysis band; a lower ceiling would hand a
  // trained detector a trivial bandwidth cue unrelated to artifacts.
  const double f_max = 0.45 * rate;
  const double lf_lo = std::log(50.0), lf_hi = std::log(f_max);
  for (std::size_t p = 0; p < n_partials; ++p) {
    const double f = std::exp(rng.uniform(lf_lo, lf_hi));
    const double amp = std::pow(f / 50.0, -0.7) * rng.uniform(0.5, 1.0);
    const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double w = 2.0 * std::numbers::pi * f / rate;
    for (std::size_t i = 0; i < length; ++i)
      s.samples[i] += amp * std::sin(w * static_cast<double>(i) + phase);
  }
  const double tonal_rms = rms(s.samples);
  std::vector<double> pink = pink_noise(length, rng);
  const double pink_rms = rms(pink);
  if (pink_rms > 0.0) {
    const double g = 0.1 * tonal_rms / pink_rms;  // noise floor 20 dB down
    for (std::size_t i = 0; i < length; ++i) s.samples[i] += g * pink[i];
  }
  normalize_peak(s, 0.7);
  return s;
}

// ------------------------------------------------------ dataset builder ----

namespace {

std::size_t target_length(const SynthSpec& spec) {
  const auto len = static_cast<std::size_t>(spec.duration_s * spec.output_rate);
  std::size_t final_len = len;
  for (const auto& st : spec.stacks) {
    std::size_t p = 1;
    for (std::size_t k : st.strides) p *= k;
    if (p == 0 || len / p == 0)
      throw InvalidParameter("SynthSpec: duration too short for stack " + st.tag);
    final_len = std::min(final_len, (len / p) * p);
  }
  return final_len;
}

Signal make_source(const SynthSpec& spec, std::uint64_t seed, std::size_t raw_len) {
  Rng rng(seed);
  switch (spec.real_source) {
    case RealSource::noise:
      return white_noise(spec.output_rate, raw_len, rng);
    case RealSource::harmonic_mixture:
      return harmonic_mixture(spec.output_rate, raw_len, rng);
    case RealSource::file_dir: {
      std::vector<std::filesystem::path> files;
      for (const auto& e : std::filesystem::directory_iterator(spec.source_dir)) {
        if (e.path().extension() == ".wav") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      if (files.empty())
        throw InvalidParameter("SynthSpec: no .wav files in " + spec.source_dir);
      Signal src = read_wav(files[static_cast<std::size_t>(seed % files.size())]);
      src = resample(src, spec.output_rate);
      Signal out;
      out.sample_rate = spec.output_rate;
      out.samples.resize(raw_len);
      for (std::size_t i = 0; i < raw_len; ++i)
        out.samples[i] = src.samples[i % src.samples.size()];
      normalize_peak(out, 0.7);
      return out;
    }
  }
  throw InvalidParameter("SynthSpec: unknown real_source");
}

}  // namespace

Signal make_real_signal(const SynthSpec& spec, std::size_t index) {
  if (spec.n_per_class == 0) throw InvalidParameter("SynthSpec: n_per_class must be >= 1");
  const std::size_t raw_len = static_cast<std::size_t>(spec.duration_s * spec.output_rate);
  if (raw_len == 0) throw InvalidParameter("SynthSpec: duration too short");
  Signal s = make_source(spec, derive_seed(spec.seed, index), raw_len);
  s.samples.resize(target_length(spec));
  normalize_peak(s, 0.9);
  return s;
}

Signal make_synthetic_signal(const SynthSpec& spec, const SynthStackSpec& stack,
                             std::size_t index) {
  std::size_t p = 1;
  for (std::size_t k : stack.strides) {
    if (k == 0) throw InvalidParameter("SynthSpec: strides must be >= 1");
    p *= k;
  }
  if (stack.strides.empty()) throw InvalidParameter("SynthSpec: empty stride list");

  const std::size_t raw_len = static_cast<std::size_t>(spec.duration_s * spec.output_rate);
  const std::size_t final_len = target_length(spec);
  const std::size_t latent_len = final_len / p + (final_len % p != 0 ? 1 : 0);

  // Class-specific source stream, so synthetic files are not paired with
  // real ones sample for sample. Stream id 0 is the real class.
  std::size_t class_id = 1;
  for (std::size_t i = 0; i < spec.stacks.size(); ++i) {
    if (spec.stacks[i].tag == stack.tag) {
      class_id = i + 1;
      break;
    }
  }
  Signal src = make_source(spec, derive_seed(derive_seed(spec.seed, class_id), index), raw_len);

  Signal latent = resample(src, spec.output_rate / static_cast<double>(p));
  if (latent.samples.size() < latent_len)
    latent.samples.resize(latent_len, latent.samples.empty() ? 0.0 : latent.samples.back());
  latent.samples.resize(latent_len);

  // Encoder-side analog of the bias/ReLU argument: quantized latents of real
  // codecs carry a nonzero mean, and that DC component is what the stack
  // replicates into the full peak grid. Without it only the per-layer bias
  // sub-combs would appear.
  const std::uint64_t file_seed = derive_seed(stack.seed, index);
  Rng lrng(derive_seed(file_seed, 0x1a7e27));
  const double latent_dc = lrng.uniform(0.1, 0.3);
  for (double& v : latent.samples) v += latent_dc;

  const DeconvStack net = random_stack(stack.strides, file_seed,
                                       spec.output_rate / static_cast<double>(p),
                                       stack.kernel_len);
  Signal out = run_stack(latent, net);
  out.samples.resize(final_len);
  normalize_peak(out, 0.9);
  return out;
}

SynthSpec load_synth_spec(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error("load_synth_spec: cannot open " + path.string());
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile("load_synth_spec: " + std::string(e.what()));
  }
  SynthSpec spec;
  try {
    spec.n_per_class = j.value("n_per_class", std::size_t{10});
    spec.duration_s = j.value("duration_s", 2.0);
    spec.output_rate = j.value("output_rate", 48000.0);
    spec.seed = j.value("seed", std::uint64_t{1});
    spec.source_dir = j.value("source_dir", std::string{});
    const std::string src = j.value("real_source", "harmonic_mixture");
    if (src == "noise") {
      spec.real_source = RealSource::noise;
    } else if (src == "harmonic_mixture") {
      spec.real_source = RealSource::harmonic_mixture;
    } else if (src == "file_dir") {
      spec.real_source = RealSource::file_dir;
    } else {
      throw InvalidParameter("load_synth_spec: unknown real_source " + src);
    }
    for (const auto& st : j.at("stacks")) {
      SynthStackSpec s;
      s.tag = st.at("tag").get<std::string>();
      s.strides = st.at("strides").get<std::vector<std::size_t>>();
      s.seed = st.value("seed", std::uint64_t{1});
      s.kernel_len = st.value("kernel_len", std::size_t{0});
      spec.stacks.push_back(std::move(s));
    }
  } catch (const nlohmann::json::exception& e) {
    throw CorruptFile("load_synth_spec: " + std::string(e.what()));
  }
  if (spec.n_per_class == 0) throw InvalidParameter("load_synth_spec: n_per_class must be >= 1");
  for (const auto& st : spec.stacks) {
    if (st.tag.empty() || st.tag == "real")
      throw InvalidParameter("load_synth_spec: stack tags must be non-empty and not 'real'");
    if (st.strides.empty()) throw InvalidParameter("load_synth_spec: empty stride list");
    for (std::size_t k : st.strides)
      if (k == 0) throw InvalidParameter("load_synth_spec: strides must be >= 1");
  }
  return spec;
}

std::vector<ManifestEntry> generate_synth_dataset(const SynthSpec& spec,
                                                  const std::filesystem::path& out_dir,
                                                  unsigned threads) {
  if (spec.n_per_class == 0) throw InvalidParameter("generate_synth_dataset: n_per_class >= 1");
  std::filesystem::create_directories(out_dir);

  struct Task {
    std::string file;
    std::string label;
    const SynthStackSpec* stack;  // nullptr -> real class
    std::size_t index;
  };
  std::vector<Task> tasks;
  char name[80];
  for (std::size_t i = 0; i < spec.n_per_class; ++i) {
    // "real" is the label the detector treats as the non-synthetic class.
    std::snprintf(name, sizeof name, "real_%04zu.wav", i);
    tasks.push_back({name, "real", nullptr, i});
  }
  for (const auto& st : spec.stacks) {
    for (std::size_t i = 0; i < spec.n_per_class; ++i) {
      std::snprintf(name, sizeof name, "%s_%04zu.wav", st.tag.c_str(), i);
      tasks.push_back({name, st.tag, &st, i});
    }
  }

  const double final_dur =
      static_cast<double>(target_length(spec)) / spec.output_rate;

  auto work = [&](const Task& t) {
    const Signal sig = t.stack == nullptr ? make_real_signal(spec, t.index)
                                          : make_synthetic_signal(spec, *t.stack, t.index);
    write_wav(out_dir / t.file, sig);
  };

  if (threads <= 1) {
    for (const auto& t : tasks) work(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    const unsigned n_threads = std::min<unsigned>(threads, std::thread::hardware_concurrency());
    std::exception_ptr first_error;
    std::mutex err_mutex;
    for (unsigned w = 0; w < std::max(1u, n_threads); ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= tasks.size()) return;
          try {
            work(tasks[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(err_mutex);
            if (!first_error) first_error = std::current_exception();
            return;
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  std::vector<ManifestEntry> entries;
  entries.reserve(tasks.size());
  for (const auto& t : tasks)
    entries.push_back({t.file, t.label, spec.output_rate, final_dur});
  write_manifest(entries, out_dir / "manifest.jsonl");
  return entries;
}

}  // namespace specfp
