#pragma once

#include <string_view>

namespace qg::simd {

enum class Isa { scalar, avx2 };

/// Instruction set used by the stencil kernels. Chosen once from CPU features;
/// the QG_SIMD environment variable ("scalar" or "avx2") overrides.
Isa active_isa();
bool isa_available(Isa isa);
std::string_view isa_name(Isa isa);

/// Forces a kernel set (tests use this to compare implementations). Throws if unavailable.
void set_isa(Isa isa);

}  // namespace qg::simd
