#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stmos/geometry.hpp"

namespace stmos {

template <class Scalar>
struct BceResult {
  double loss = 0.0;
  std::vector<Scalar> grad;  // d loss / d confidence, zero where ignored
};

/// Mean binary cross-entropy over non-ignored points. Confidences are
/// clamped into [1e-7, 1-1e-7] before the logs; the gradient is zero where
/// the clamp binds. All points ignored yields zero loss and zero gradient.
template <class Scalar>
BceResult<Scalar> bce_loss(std::span<const Scalar> confidences,
                           std::span<const std::uint8_t> labels,
                           std::span<const std::uint8_t> ignore_mask);

/// Convenience: labels/ignore derived from PointClass ground truth.
template <class Scalar>
BceResult<Scalar> bce_loss(std::span<const Scalar> confidences,
                           std::span<const PointClass> labels);

}  // namespace stmos
