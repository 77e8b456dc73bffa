#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stmos/errors.hpp"

namespace stmos {

/// Flat binary tensor container: magic "STWB", little-endian u32 header
/// length, JSON header (version, offset_order, dtype, tensor table), then
/// the raw little-endian tensor payload. The version field is mandatory
/// and rejected when unknown.
template <class Scalar>
struct NamedTensorView {
  std::string name;
  std::vector<std::int64_t> shape;
  const Scalar* data = nullptr;
  std::int64_t size = 0;
};

template <class Scalar>
struct LoadedTensor {
  std::string name;
  std::vector<std::int64_t> shape;
  std::vector<Scalar> data;
};

template <class Scalar>
void write_weight_container(const std::filesystem::path& path,
                            std::span<const NamedTensorView<Scalar>> tensors);

/// Loads all tensors, converting between float32/float64 payloads and the
/// requested scalar type when they differ.
template <class Scalar>
std::vector<LoadedTensor<Scalar>> read_weight_container(const std::filesystem::path& path);

}  // namespace stmos
