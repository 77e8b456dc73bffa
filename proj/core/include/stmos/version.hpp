#pragma once

namespace stmos {

inline constexpr const char* kVersion = "0.1.0";

// Version tag of the kernel-offset enumeration order baked into saved
// weights. Bump if the enumeration in KernelSpec::offsets() ever changes.
inline constexpr const char* kOffsetOrderVersion = "lex-tmajor-1";

// Weight container format version.
inline constexpr int kWeightContainerVersion = 1;

}  // namespace stmos
