#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "stmos/geometry.hpp"
#include "stmos/sparse/coords.hpp"
#include "stmos/sparse/features.hpp"

namespace stmos {

struct VoxelConfig {
  double delta_s = 0.1;  // spatial voxel edge, meters
  double delta_t = 0.1;  // physical spacing of consecutive window slots, seconds

  void validate() const {
    if (!(delta_s > 0.0) || !(delta_t > 0.0))
      throw ArgumentError("voxel resolutions must be positive");
  }
};

/// Sparse 4D occupancy tensor over an aligned scan window. Sites are the
/// unique (t,x,y,z) voxels, in canonical lexicographic order; the time index
/// is the scan's window position directly (one scan = one slice, delta_t is
/// metadata about how the window was sampled from the stream). Every point
/// keeps a handle to its site so per-site predictions can be mapped back.
struct SparseTensor4D {
  CoordList coords;
  FeatureMatrix<float> features;           // [sites x C]
  std::vector<std::int32_t> point_map;     // per point (scan-major input order): site index
  std::vector<std::int32_t> sites_per_scan;

  Eigen::Index num_sites() const { return features.rows(); }
  std::size_t num_points() const { return point_map.size(); }
};

/// Quantizes an aligned, current-first scan sequence. Spatial indices are
/// floor(p / delta_s); every occupied site carries the constant occupancy
/// feature 0.5 (C = 1). Throws DataError on non-finite coordinates.
SparseTensor4D quantize(std::span<const Scan> aligned, const VoxelConfig& cfg);

/// Copies each site's score to every point quantized into it.
template <class Scalar>
std::vector<Scalar> devoxelize(std::span<const Scalar> site_scores, const SparseTensor4D& tensor) {
  if (site_scores.size() != static_cast<std::size_t>(tensor.num_sites()))
    throw ArgumentError("devoxelize: one score per site required");
  std::vector<Scalar> out;
  out.reserve(tensor.point_map.size());
  for (std::int32_t site : tensor.point_map) out.push_back(site_scores[static_cast<std::size_t>(site)]);
  return out;
}

/// Adjoint of devoxelize: sums per-point gradients into their sites.
template <class Scalar>
std::vector<Scalar> devoxelize_adjoint(std::span<const Scalar> point_grads,
                                       const SparseTensor4D& tensor) {
  if (point_grads.size() != tensor.point_map.size())
    throw ArgumentError("devoxelize_adjoint: one gradient per point required");
  std::vector<Scalar> out(static_cast<std::size_t>(tensor.num_sites()), Scalar(0));
  for (std::size_t i = 0; i < point_grads.size(); ++i)
    out[static_cast<std::size_t>(tensor.point_map[i])] += point_grads[i];
  return out;
}

/// Splits a flat per-point vector back into per-scan vectors, input order.
template <class Scalar>
std::vector<std::vector<Scalar>> split_by_scan(std::span<const Scalar> per_point,
                                               std::span<const Scan> aligned) {
  std::size_t total = 0;
  for (const Scan& s : aligned) total += s.size();
  if (per_point.size() != total)
    throw ArgumentError("split_by_scan: score count does not match total point count");
  std::vector<std::vector<Scalar>> out;
  out.reserve(aligned.size());
  std::size_t at = 0;
  for (const Scan& s : aligned) {
    out.emplace_back(per_point.begin() + at, per_point.begin() + at + s.size());
    at += s.size();
  }
  return out;
}

/// Debug dump, one line per site: "t x y z f0 ... fC-1", canonical order.
void dump_sparse_tensor(std::ostream& os, const SparseTensor4D& tensor);

}  // namespace stmos
