#pragma once

#include <span>
#include <vector>

#include "stmos/geometry.hpp"
#include "stmos/net/config.hpp"

namespace stmos {

/// Applies one shared random rigid transform (yaw rotation, shift, axis
/// flips, global scale) to every scan of an aligned window, plus per-point
/// gaussian jitter. Labels and ordering are untouched, so a static point
/// stays aligned across scans up to the jitter scale.
std::vector<Scan> augment(std::span<const Scan> aligned, const AugmentConfig& cfg,
                          std::uint64_t seed);

}  // namespace stmos
