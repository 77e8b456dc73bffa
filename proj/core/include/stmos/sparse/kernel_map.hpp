#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "stmos/sparse/coords.hpp"

namespace stmos {

/// Gather-scatter plan of one sparse convolution: for each kernel offset,
/// the (input_site, output_site) index pairs it connects. Offsets follow
/// KernelSpec::offsets() order.
struct KernelMap {
  CoordList offsets;
  std::vector<std::vector<std::pair<std::int32_t, std::int32_t>>> pairs;

  std::size_t total_pairs() const {
    std::size_t n = 0;
    for (const auto& p : pairs) n += p.size();
    return n;
  }
};

/// Builds the kernel map between deduplicated coordinate sets.
/// Pairing rule, non-transposed: (i, o) under offset k iff
///   coord(i) = coord(o) * stride + k.
/// Transposed convolution swaps the roles: (i, o) under offset k iff
///   coord(o) = coord(i) * stride + k.
/// Expected O(out_sites * offsets) via a hash index over `in`.
KernelMap build_kernel_map(const CoordList& in, const CoordList& out, const KernelSpec& spec,
                           bool transposed);

}  // namespace stmos
