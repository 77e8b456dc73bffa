#include "stmos/sparse/coords.hpp"

#include <algorithm>
#include <string>

namespace stmos {

CoordIndex build_coord_index(const CoordList& coords) {
  CoordIndex index;
  index.reserve(coords.size() * 2);
  for (std::size_t i = 0; i < coords.size(); ++i)
    index.emplace(coords[i], static_cast<std::int32_t>(i));
  return index;
}

void KernelSpec::validate() const {
  for (int d = 0; d < 4; ++d) {
    if (size[d] < 1 || size[d] % 2 == 0)
      throw ArgumentError("kernel size must be odd and >= 1 per dimension");
    if (stride[d] < 1) throw ArgumentError("kernel stride must be >= 1 per dimension");
  }
}

int KernelSpec::volume() const {
  if (shape == KernelShape::Hypercube)
    return size[0] * size[1] * size[2] * size[3];
  int v = 1;
  for (int d = 0; d < 4; ++d) v += size[d] - 1;
  return v;
}

CoordList KernelSpec::offsets() const {
  validate();
  CoordList out;
  out.reserve(static_cast<std::size_t>(volume()));
  if (shape == KernelShape::Hypercube) {
    const std::array<int, 4> half{size[0] / 2, size[1] / 2, size[2] / 2, size[3] / 2};
    for (int t = -half[0]; t <= half[0]; ++t)
      for (int x = -half[1]; x <= half[1]; ++x)
        for (int y = -half[2]; y <= half[2]; ++y)
          for (int z = -half[3]; z <= half[3]; ++z) out.push_back({t, x, y, z});
  } else {
    out.push_back({0, 0, 0, 0});
    for (int d = 0; d < 4; ++d) {
      const int half = size[d] / 2;
      for (int m = 1; m <= half; ++m) {
        Coord4 plus{0, 0, 0, 0}, minus{0, 0, 0, 0};
        plus[d] = m;
        minus[d] = -m;
        out.push_back(plus);
        out.push_back(minus);
      }
    }
    std::sort(out.begin(), out.end());
  }
  return out;
}

CoordList output_coords(const CoordList& in, const KernelSpec& spec, bool transposed,
                        const CoordList* target) {
  spec.validate();
  if (transposed) {
    if (target == nullptr)
      throw ArgumentError("output_coords: transposed convolution requires target coordinates");
    CoordIndex index = build_coord_index(in);
    for (const Coord4& c : *target) {
      Coord4 down;
      for (int d = 0; d < 4; ++d) down[d] = floor_div(c[d], spec.stride[d]);
      if (index.find(down) == index.end())
        throw ArgumentError(
            "output_coords: target coordinates are not an upsampling of the input set");
    }
    return *target;
  }
  if (spec.unit_stride()) return in;
  CoordList out;
  out.reserve(in.size());
  for (const Coord4& c : in) {
    Coord4 down;
    for (int d = 0; d < 4; ++d) down[d] = floor_div(c[d], spec.stride[d]);
    out.push_back(down);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace stmos
