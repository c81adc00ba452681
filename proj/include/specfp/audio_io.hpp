#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "specfp/deconv.hpp"
#include "specfp/rng.hpp"
#include "specfp/signal.hpp"

namespace specfp {

// PCM 16/24-bit or IEEE float 32-bit WAV. Samples are normalized to
// [-1, 1] (integer convention: sample / 2^(bits-1)); multi-channel input is
// downmixed by the arithmetic mean of the channels.
Signal read_wav(const std::filesystem::path& path);

// PCM16 mono RIFF output: round(x * 32768) clamped to [-32768, 32767].
void write_wav(const std::filesystem::path& path, const Signal& s);

// Windowed-sinc (Kaiser, ~80 dB stopband, 8% transition band) polyphase
// resampler. Output length = round(len * target / source); identity when the
// rates already match.
Signal resample(const Signal& s, double target_rate);

struct ManifestEntry {
  std::string path;  // relative to the manifest file
  std::string label;
  double sample_rate = 0.0;
  double duration_s = 0.0;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& path);

enum class RealSource { noise, harmonic_mixture, file_dir };

struct SynthStackSpec {
  std::string tag;
  std::vector<std::size_t> strides;
  std::uint64_t seed = 1;
  std::size_t kernel_len = 0;  // 0 -> per-layer default 2*stride+1
};

struct SynthSpec {
  std::size_t n_per_class = 10;
  double duration_s = 2.0;
  RealSource real_source = RealSource::harmonic_mixture;
  std::string source_dir;  // for RealSource::file_dir
  std::vector<SynthStackSpec> stacks;
  double output_rate = 48000.0;
  std::uint64_t seed = 1;
};

SynthSpec load_synth_spec(const std::filesystem::path& path);

// Deterministic per (spec.seed, index); every class entry i uses the same
// underlying source so durations and material match across classes.
Signal make_real_signal(const SynthSpec& spec, std::size_t index);
Signal make_synthetic_signal(const SynthSpec& spec, const SynthStackSpec& stack,
                             std::size_t index);

// Writes WAVs plus manifest.jsonl under out_dir and returns the entries.
// Outputs are byte-identical for a given spec regardless of thread count.
std::vector<ManifestEntry> generate_synth_dataset(const SynthSpec& spec,
                                                  const std::filesystem::path& out_dir,
                                                  unsigned threads = 1);

// 5-15 seeded partials (log-uniform 50 Hz .. 10 kHz, amplitudes decaying
// with frequency) plus pink noise 20 dB down; peak-normalized.
Signal harmonic_mixture(double rate, std::size_t length, Rng& rng);
Signal white_noise(double rate, std::size_t length, Rng& rng);
std::vector<double> pink_noise(std::size_t length, Rng& rng);

}  // namespace specfp
