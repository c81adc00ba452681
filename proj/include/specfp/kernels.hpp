#pragma once

#include <complex>
#include <cstddef>
#include <span>

// Data-parallel inner loops shared by the DSP and training code.
//
// Every kernel has a scalar reference implementation; on x86-64 an AVX2
// variant is compiled as well and selected once at startup. The two
// backends are equivalence-tested against each other. Set SPECFP_FORCE_SCALAR=1
// in the environment to pin the scalar path.
namespace specfp::kernels {

enum class Backend { scalar, avx2 };

Backend active_backend();
// Testing hook. Requesting avx2 on a machine without it throws.
void force_backend(Backend b);
bool cpu_has_avx2();

// sum_i x[i] * y[i]; sizes must match
double dot(std::span<const double> x, std::span<const double> y);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
// x *= a
void scale(std::span<double> x, double a);
double sum(std::span<const double> x);
// acc[i] += sqrt(re^2 + im^2) of z[i]
void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc);

namespace scalar {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);
double sum(std::span<const double> x);
void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc);
}  // namespace scalar

#ifdef SPECFP_HAVE_AVX2
namespace avx2 {
double dot(std::span<const double> x, std::span<const double> y);
void axpy(double a, std::span<const double> x, std::span<double> y);
void scale(std::span<double> x, double a);
double sum(std::span<const double> x);
void magnitude_accumulate(std::span<const std::complex<double>> z, std::span<double> acc);
}  // namespace avx2
#endif

}  // namespace specfp::kernels
