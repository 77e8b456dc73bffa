#include "stmos/sparse/kernel_map.hpp"

namespace stmos {

KernelMap build_kernel_map(const CoordList& in, const CoordList& out, const KernelSpec& spec,
                           bool transposed) {
  spec.validate();
  KernelMap map;
  map.offsets = spec.offsets();
  map.pairs.resize(map.offsets.size());

  const CoordIndex in_index = build_coord_index(in);

  for (std::size_t k = 0; k < map.offsets.size(); ++k) {
    const Coord4& off = map.offsets[k];
    auto& pairs = map.pairs[k];
    for (std::size_t o = 0; o < out.size(); ++o) {
      Coord4 probe;
      if (!transposed) {
        // input sits at out * stride + k
        for (int d = 0; d < 4; ++d) probe[d] = out[o][d] * spec.stride[d] + off[d];
      } else {
        // out = in * stride + k, so the contributing input is
        // (out - k) / stride when that division is exact
        bool divisible = true;
        for (int d = 0; d < 4; ++d) {
          const std::int32_t q = out[o][d] - off[d];
          if (q % spec.stride[d] != 0) {
            divisible = false;
            break;
          }
          probe[d] = q / spec.stride[d];
        }
        if (!divisible) continue;
      }
      auto it = in_index.find(probe);
      if (it != in_index.end())
        pairs.emplace_back(it->second, static_cast<std::int32_t>(o));
    }
  }
  return map;
}

}  // namespace stmos
