#pragma once

// Dense arithmetic kernels used by the network layers and the motor-unit
// force accumulator. Each kernel has a scalar reference implementation and,
// where the target supports it, an AVX2/FMA or NEON variant. The variant is
// chosen once at runtime from CPU features; GAITLAB_SIMD=scalar in the
// environment pins the scalar path.

#include <cstddef>
#include <span>
#include <string_view>

namespace gaitlab::kernels {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa);

/// ISA selected for this process.
Isa active_isa();

/// Whether the variant was compiled in and the CPU can run it.
bool isa_available(Isa isa);

/// Overrides dispatch for the rest of the process; throws if unavailable.
void force_isa(Isa isa);

/// sum(a[i] * b[i]); sizes must match.
double dot(std::span<const double> a, std::span<const double> b);

/// y[i] += alpha * x[i]; sizes must match.
void axpy(double alpha, std::span<const double> x, std::span<double> y);

/// sum(min(x[i], cap[i])).
double sum_clamped(std::span<const double> x, std::span<const double> cap);

/// Function table for one ISA. Exposed for equivalence tests.
struct KernelTable {
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  double (*sum_clamped)(const double* x, const double* cap, std::size_t n);
};

const KernelTable& table_for(Isa isa);

namespace scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_clamped(const double* x, const double* cap, std::size_t n);
}  // namespace scalar

namespace avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_clamped(const double* x, const double* cap, std::size_t n);
}  // namespace avx2

namespace neon {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
double sum_clamped(const double* x, const double* cap, std::size_t n);
}  // namespace neon

}  // namespace gaitlab::kernels
