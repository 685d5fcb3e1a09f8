#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>
#include <string>

#include "gaitlab/kernels.hpp"

namespace gaitlab::kernels {

namespace {

constexpr KernelTable kScalarTable{&scalar::dot, &scalar::axpy, &scalar::sum_clamped};
#if defined(GAITLAB_WITH_AVX2)
constexpr KernelTable kAvx2Table{&avx2::dot, &avx2::axpy, &avx2::sum_clamped};
#endif
#if defined(GAITLAB_WITH_NEON)
constexpr KernelTable kNeonTable{&neon::dot, &neon::axpy, &neon::sum_clamped};
#endif

bool cpu_supports(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(GAITLAB_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(GAITLAB_WITH_NEON)
      return true;  // mandatory on aarch64
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (const char* env = std::getenv("GAITLAB_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::scalar;
  }
  if (cpu_supports(Isa::avx2)) return Isa::avx2;
  if (cpu_supports(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

std::atomic<const KernelTable*> g_active{nullptr};
std::atomic<Isa> g_isa{Isa::scalar};

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    Isa isa = detect();
    g_isa.store(isa, std::memory_order_relaxed);
    t = &table_for(isa);
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

}  // namespace

std::string_view to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) { return cpu_supports(isa); }

const KernelTable& table_for(Isa isa) {
  switch (isa) {
#if defined(GAITLAB_WITH_AVX2)
    case Isa::avx2:
      if (cpu_supports(isa)) return kAvx2Table;
      break;
#endif
#if defined(GAITLAB_WITH_NEON)
    case Isa::neon:
      return kNeonTable;
#endif
    case Isa::scalar:
      return kScalarTable;
    default:
      break;
  }
  throw std::invalid_argument("kernel variant not available: " + std::string(to_string(isa)));
}

Isa active_isa() {
  active();
  return g_isa.load(std::memory_order_relaxed);
}

void force_isa(Isa isa) {
  const KernelTable& t = table_for(isa);
  g_isa.store(isa, std::memory_order_relaxed);
  g_active.store(&t, std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  return active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  active().axpy(alpha, x.data(), y.data(), x.size());
}

double sum_clamped(std::span<const double> x, std::span<const double> cap) {
  if (x.size() != cap.size()) throw std::invalid_argument("sum_clamped: size mismatch");
  return active().sum_clamped(x.data(), cap.data(), x.size());
}

}  // namespace gaitlab::kernels
