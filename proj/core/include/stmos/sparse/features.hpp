#pragma once

#include <Eigen/Core>

namespace stmos {

/// Per-site feature block: one row per site, one column per channel.
template <class Scalar>
using FeatureMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class Scalar>
using RowVec = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

}  // namespace stmos
