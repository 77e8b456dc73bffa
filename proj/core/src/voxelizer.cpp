#include "stmos/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace stmos {

SparseTensor4D quantize(std::span<const Scan> aligned, const VoxelConfig& cfg) {
  cfg.validate();

  std::size_t total_points = 0;
  for (const Scan& s : aligned) total_points += s.size();

  CoordList per_point_coords;
  per_point_coords.reserve(total_points);
  for (std::size_t j = 0; j < aligned.size(); ++j) {
    const Scan& scan = aligned[j];
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      const Eigen::Vector3d& p = scan.points[i];
      if (!p.allFinite())
        throw DataError("quantize: non-finite coordinate in scan " + std::to_string(j) +
                        ", point " + std::to_string(i));
      per_point_coords.push_back({static_cast<std::int32_t>(j),
                                  static_cast<std::int32_t>(std::floor(p.x() / cfg.delta_s)),
                                  static_cast<std::int32_t>(std::floor(p.y() / cfg.delta_s)),
                                  static_cast<std::int32_t>(std::floor(p.z() / cfg.delta_s))});
    }
  }

  SparseTensor4D t;
  t.coords = per_point_coords;
  std::sort(t.coords.begin(), t.coords.end());
  t.coords.erase(std::unique(t.coords.begin(), t.coords.end()), t.coords.end());

  const CoordIndex index = build_coord_index(t.coords);
  t.point_map.reserve(total_points);
  for (const Coord4& c : per_point_coords) t.point_map.push_back(index.at(c));

  t.features = FeatureMatrix<float>::Constant(static_cast<Eigen::Index>(t.coords.size()), 1, 0.5f);

  t.sites_per_scan.assign(aligned.size(), 0);
  for (const Coord4& c : t.coords) t.sites_per_scan[static_cast<std::size_t>(c[0])]++;
  return t;
}

void dump_sparse_tensor(std::ostream& os, const SparseTensor4D& tensor) {
  for (Eigen::Index s = 0; s < tensor.num_sites(); ++s) {
    const Coord4& c = tensor.coords[static_cast<std::size_t>(s)];
    os << c[0] << ' ' << c[1] << ' ' << c[2] << ' ' << c[3];
    for (Eigen::Index ch = 0; ch < tensor.features.cols(); ++ch) os << ' ' << tensor.features(s, ch);
    os << '\n';
  }
}

}  // namespace stmos
