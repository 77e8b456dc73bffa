#pragma once

#include <filesystem>
#include <vector>

#include "stmos/net/config.hpp"
#include "stmos/net/params.hpp"

namespace stmos {

/// First/second moment buffers aligned with a trainable tensor list.
template <class Scalar>
struct AdamState {
  std::vector<std::vector<Scalar>> m, v;
  std::int64_t step = 0;

  static AdamState init(const std::vector<TensorRef<Scalar>>& params);

  void save(const std::filesystem::path& path,
            const std::vector<TensorRef<Scalar>>& params) const;
  static AdamState load(const std::filesystem::path& path,
                        const std::vector<TensorRef<Scalar>>& params);
};

/// Bias-corrected Adam with weight decay applied as an additive L2 term in
/// the gradient (classic Adam). Consumes the gradients stored on `params`.
template <class Scalar>
void adam_step(std::vector<TensorRef<Scalar>>& params, AdamState<Scalar>& state,
               const TrainConfig& cfg);

}  // namespace stmos
