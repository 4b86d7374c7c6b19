#include "qg/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels.hpp"
#include "qg/error.hpp"

namespace qg::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return kernels::avx2_set() != nullptr && __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("QG_SIMD")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && cpu_has_avx2()) return Isa::avx2;
  }
  return cpu_has_avx2() ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() { return current().load(std::memory_order_relaxed); }

bool isa_available(Isa isa) { return isa == Isa::scalar || cpu_has_avx2(); }

std::string_view isa_name(Isa isa) { return isa == Isa::avx2 ? "avx2" : "scalar"; }

void set_isa(Isa isa) {
  if (!isa_available(isa)) throw InvalidArgument("instruction set not available: " + std::string(isa_name(isa)));
  current().store(isa, std::memory_order_relaxed);
}

}  // namespace qg::simd

namespace qg::kernels {

const KernelSet& active() {
  return simd::active_isa() == simd::Isa::avx2 ? *avx2_set() : scalar_set();
}

}  // namespace qg::kernels
