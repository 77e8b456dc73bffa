#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stmos/sparse/features.hpp"

namespace stmos {

/// Non-owning handle to one named tensor of a model: contiguous value
/// storage, optional gradient storage of the same size, and whether the
/// optimizer may touch it (running statistics are registered as
/// non-trainable buffers).
template <class Scalar>
struct TensorRef {
  std::string name;
  Scalar* data = nullptr;
  Scalar* grad = nullptr;
  std::vector<std::int64_t> shape;
  std::int64_t size = 0;
  bool trainable = true;
};

}  // namespace stmos
