#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "stmos/errors.hpp"

namespace stmos {

/// Voxel coordinate (t, x, y, z). Time axis first so lexicographic order
/// is time-major everywhere (site ordering, kernel offset enumeration).
using Coord4 = std::array<std::int32_t, 4>;
using CoordList = std::vector<Coord4>;

struct Coord4Hash {
  std::size_t operator()(const Coord4& c) const noexcept {
    // FNV-1a over the four 32-bit lanes.
    std::uint64_t h = 1469598103934665603ull;
    for (std::int32_t v : c) {
      h ^= static_cast<std::uint32_t>(v);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

using CoordIndex = std::unordered_map<Coord4, std::int32_t, Coord4Hash>;

CoordIndex build_coord_index(const CoordList& coords);

/// Floor division (rounds toward negative infinity, unlike C++ '/').
constexpr std::int32_t floor_div(std::int32_t a, std::int32_t b) {
  std::int32_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

enum class KernelShape { Hypercube, Hypercross };

/// Geometry of one sparse convolution: odd kernel extent and stride per
/// (t,x,y,z) dimension plus the support shape. Hypercross restricts the
/// support to the center and axis-aligned offsets, shrinking a size-3 4D
/// kernel from 81 to 9 offsets.
struct KernelSpec {
  std::array<int, 4> size{3, 3, 3, 3};
  std::array<int, 4> stride{1, 1, 1, 1};
  KernelShape shape = KernelShape::Hypercube;

  void validate() const;
  bool unit_stride() const { return stride == std::array<int, 4>{1, 1, 1, 1}; }
  /// Number of kernel offsets: prod(size) for hypercube, 1 + sum(size-1)
  /// for hypercross.
  int volume() const;
  /// Offsets in the fixed enumeration order: lexicographic over the
  /// 4-tuples, time axis most significant. Saved weights depend on it.
  CoordList offsets() const;
};

/// Output coordinates of a convolution over `in`.
///  - unit stride, not transposed: the input coordinates themselves;
///  - strided: unique floor(coord / stride), canonically sorted;
///  - transposed: the caller must pass the `target` coordinates (the
///    decoder reuses the matching encoder level's coordinates); the call
///    validates that every target maps back into `in` under the stride.
CoordList output_coords(const CoordList& in, const KernelSpec& spec, bool transposed,
                        const CoordList* target = nullptr);

}  // namespace stmos
