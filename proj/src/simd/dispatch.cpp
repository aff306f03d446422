#include <atomic>
#include <cstdlib>
#include <string>

#include "lzeros/errors.hpp"
#include "lzeros/simd/term_sums.hpp"

namespace lzeros::simd {
namespace {

using TermSumsFn = TermSums (*)(std::span<const double>, std::span<const double>, double, double);

bool cpu_has_avx2() {
#if defined(LZEROS_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__)) && \
    (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

TermSumsFn fn_for(Isa isa) {
  switch (isa) {
#if defined(LZEROS_HAVE_AVX2)
    case Isa::avx2:
      return &term_sums_avx2;
#endif
    default:
      return &term_sums_scalar;
  }
}

struct Selection {
  std::atomic<Isa> isa;
  std::atomic<TermSumsFn> fn;
  Selection() : isa(detected_isa()), fn(fn_for(isa.load())) {}
};

Selection& selection() {
  static Selection s;
  return s;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return cpu_has_avx2();
  }
  return false;
}

Isa detected_isa() {
  if (const char* env = std::getenv("LZEROS_ISA")) {
    const std::string want(env);
    if (want == "scalar") return Isa::scalar;
    if (want == "avx2" && isa_available(Isa::avx2)) return Isa::avx2;
  }
  return isa_available(Isa::avx2) ? Isa::avx2 : Isa::scalar;
}

Isa active_isa() { return selection().isa.load(); }

void set_active_isa(Isa isa) {
  if (!isa_available(isa))
    throw InvalidArgument("SIMD variant '" + std::string(isa_name(isa)) + "' is not available");
  selection().isa.store(isa);
  selection().fn.store(fn_for(isa));
}

TermSums term_sums(std::span<const double> log_w, std::span<const double> energies, double beta,
                   double t) {
  return selection().fn.load(std::memory_order_relaxed)(log_w, energies, beta, t);
}

}  // namespace lzeros::simd
