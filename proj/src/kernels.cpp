#include "specfp/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "specfp/errors.hpp"

namespace specfp::kernels {

namespace scalar {

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::span<double> x, double a) {
  for (double& v : x) v *= a;
}

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc) {
  // sqrt(re*re + im*im) rather than std::abs: the AVX2 variant performs the
  // identical operation sequence, so the two backends agree bit for bit here.
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double re = z[i].real(), im = z[i].imag();
    acc[i] += std::sqrt(re * re + im * im);
  }
}

}  // namespace scalar

bool cpu_has_avx2() {
#if defined(SPECFP_HAVE_AVX2) && (defined(__x86_64__) || defined(_M_X64))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

namespace {

Backend resolve_backend() {
  const char* force = std::getenv("SPECFP_FORCE_SCALAR");
  if (force && std::strcmp(force, "0") != 0) return Backend::scalar;
  return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend>& backend_slot() {
  static std::atomic<Backend> slot{resolve_backend()};
  return slot;
}

}  // namespace

Backend active_backend() { return backend_slot().load(std::memory_order_relaxed); }

void force_backend(Backend b) {
  if (b == Backend::avx2 && !cpu_has_avx2())
    throw InvalidParameter("kernels: AVX2 backend not available on this CPU/build");
  backend_slot().store(b, std::memory_order_relaxed);
}

#ifdef SPECFP_HAVE_AVX2
#define SPECFP_DISPATCH(fn, ...) \
  return active_backend() == Backend::avx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__)
#else
#define SPECFP_DISPATCH(fn, ...) return scalar::fn(__VA_ARGS__)
#endif

double dot(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw InvalidInput("kernels::dot: size mismatch");
  SPECFP_DISPATCH(dot, x, y);
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw InvalidInput("kernels::axpy: size mismatch");
  SPECFP_DISPATCH(axpy, a, x, y);
}

void scale(std::span<double> x, double a) { SPECFP_DISPATCH(scale, x, a); }

double sum(std::span<const double> x) { SPECFP_DISPATCH(sum, x); }

void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc) {
  if (z.size() != acc.size()) throw InvalidInput("kernels::magnitude_accumulate: size mismatch");
  SPECFP_DISPATCH(magnitude_accumulate, z, acc);
}

#undef SPECFP_DISPATCH

}  // namespace specfp::kernels
