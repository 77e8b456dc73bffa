#include "stmos/net/augment.hpp"

#include <cmath>

#include "stmos/rng.hpp"

namespace stmos {

std::vector<Scan> augment(std::span<const Scan> aligned, const AugmentConfig& cfg,
                          std::uint64_t seed) {
  Rng rng(seed);

  double yaw = 0.0;
  Eigen::Vector3d shift = Eigen::Vector3d::Zero();
  double fx = 1.0, fy = 1.0;
  double scale = 1.0;
  if (cfg.rotation) yaw = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
  if (cfg.shift)
    shift = Eigen::Vector3d(rng.uniform(-cfg.shift_range, cfg.shift_range),
                            rng.uniform(-cfg.shift_range, cfg.shift_range),
                            rng.uniform(-cfg.shift_range, cfg.shift_range));
  if (cfg.flip) {
    fx = rng.bernoulli(0.5) ? -1.0 : 1.0;
    fy = rng.bernoulli(0.5) ? -1.0 : 1.0;
  }
  if (cfg.scale) scale = rng.uniform(cfg.scale_min, cfg.scale_max);

  const double c = std::cos(yaw), s = std::sin(yaw);
  std::vector<Scan> out;
  out.reserve(aligned.size());
  for (const Scan& scan : aligned) {
    Scan a;
    a.labels = scan.labels;
    a.seq_index = scan.seq_index;
    a.points.reserve(scan.points.size());
    for (const auto& p : scan.points) {
      Eigen::Vector3d q(c * p.x() - s * p.y(), s * p.x() + c * p.y(), p.z());
      q.x() *= fx;
      q.y() *= fy;
      q = scale * q + shift;
      if (cfg.jitter)
        q += Eigen::Vector3d(rng.normal(0.0, cfg.jitter_sigma), rng.normal(0.0, cfg.jitter_sigma),
                             rng.normal(0.0, cfg.jitter_sigma));
      a.points.push_back(q);
    }
    out.push_back(std::move(a));
  }
  return out;
}

}  // namespace stmos
