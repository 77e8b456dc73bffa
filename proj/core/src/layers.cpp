#include "stmos/sparse/layers.hpp"

#include <string>

namespace stmos {

template <class Scalar>
FeatureMatrix<Scalar> conv_forward(const FeatureMatrix<Scalar>& input, const KernelMap& kmap,
                                   const ConvParams<Scalar>& params, Eigen::Index num_out_sites) {
  if (input.cols() != params.in_channels)
    throw ArgumentError("conv_forward: feature width " + std::to_string(input.cols()) +
                        " does not match in_channels " + std::to_string(params.in_channels));
  if (params.num_offsets() != static_cast<int>(kmap.offsets.size()))
    throw ArgumentError("conv_forward: kernel map offset count does not match weights");

  FeatureMatrix<Scalar> out = FeatureMatrix<Scalar>::Zero(num_out_sites, params.out_channels);
  FeatureMatrix<Scalar> gathered, product;
  for (std::size_t k = 0; k < kmap.pairs.size(); ++k) {
    const auto& pairs = kmap.pairs[k];
    if (pairs.empty()) continue;
    gathered.resize(static_cast<Eigen::Index>(pairs.size()), params.in_channels);
    for (std::size_t r = 0; r < pairs.size(); ++r) gathered.row(static_cast<Eigen::Index>(r)) = input.row(pairs[r].first);
    product.noalias() = gathered * params.weight_block(static_cast<int>(k));
    for (std::size_t r = 0; r < pairs.size(); ++r)
      out.row(pairs[r].second) += product.row(static_cast<Eigen::Index>(r));
  }
  if (params.has_bias()) out.rowwise() += params.bias;
  return out;
}

template <class Scalar>
LayerGrads<Scalar> conv_backward(const FeatureMatrix<Scalar>& grad_output,
                                 const FeatureMatrix<Scalar>& input, const KernelMap& kmap,
                                 const ConvParams<Scalar>& params) {
  if (grad_output.cols() != params.out_channels || input.cols() != params.in_channels)
    throw ArgumentError("conv_backward: gradient/input widths do not match the parameters");

  LayerGrads<Scalar> g;
  g.grad_input = FeatureMatrix<Scalar>::Zero(input.rows(), params.in_channels);
  g.grad_weights = FeatureMatrix<Scalar>::Zero(params.weights.rows(), params.weights.cols());
  if (params.has_bias()) g.grad_bias = grad_output.colwise().sum();

  FeatureMatrix<Scalar> g_out, g_in, x_in;
  for (std::size_t k = 0; k < kmap.pairs.size(); ++k) {
    const auto& pairs = kmap.pairs[k];
    if (pairs.empty()) continue;
    const Eigen::Index n = static_cast<Eigen::Index>(pairs.size());
    g_out.resize(n, params.out_channels);
    x_in.resize(n, params.in_channels);
    for (Eigen::Index r = 0; r < n; ++r) {
      g_out.row(r) = grad_output.row(pairs[static_cast<std::size_t>(r)].second);
      x_in.row(r) = input.row(pairs[static_cast<std::size_t>(r)].first);
    }
    g_in.noalias() = g_out * params.weight_block(static_cast<int>(k)).transpose();
    for (Eigen::Index r = 0; r < n; ++r)
      g.grad_input.row(pairs[static_cast<std::size_t>(r)].first) += g_in.row(r);
    g.grad_weights.middleRows(static_cast<Eigen::Index>(k) * params.in_channels,
                              params.in_channels)
        .noalias() += x_in.transpose() * g_out;
  }
  return g;
}

template <class Scalar>
FeatureMatrix<Scalar> batchnorm_forward(const FeatureMatrix<Scalar>& input,
                                        BatchNormParams<Scalar>& params, bool training,
                                        BatchNormCache<Scalar>* cache) {
  const Eigen::Index n = input.rows();
  const Eigen::Index c = input.cols();
  if (params.gamma.size() != c || params.beta.size() != c)
    throw ArgumentError("batchnorm: gamma/beta width does not match features");

  RowVec<Scalar> mean(c), var(c);
  if (training) {
    if (n == 0) throw NumericError("batchnorm: cannot normalize zero active sites in train mode");
    mean = input.colwise().mean();
    var = (input.rowwise() - mean).array().square().colwise().mean();
    params.running_mean = (Scalar(1) - params.momentum) * params.running_mean + params.momentum * mean;
    params.running_var = (Scalar(1) - params.momentum) * params.running_var + params.momentum * var;
  } else {
    mean = params.running_mean;
    var = params.running_var;
  }

  const RowVec<Scalar> inv_std = (var.array() + params.eps).rsqrt();
  FeatureMatrix<Scalar> x_hat =
      (input.rowwise() - mean).array().rowwise() * inv_std.array();
  FeatureMatrix<Scalar> out =
      (x_hat.array().rowwise() * params.gamma.array()).rowwise() + params.beta.array();
  if (cache) {
    cache->x_hat = std::move(x_hat);
    cache->inv_std = inv_std;
    cache->training = training;
  }
  return out;
}

template <class Scalar>
BatchNormGrads<Scalar> batchnorm_backward(const FeatureMatrix<Scalar>& grad_output,
                                          const BatchNormCache<Scalar>& cache,
                                          const BatchNormParams<Scalar>& params) {
  BatchNormGrads<Scalar> g;
  g.grad_gamma = (grad_output.array() * cache.x_hat.array()).colwise().sum();
  g.grad_beta = grad_output.colwise().sum();

  if (!cache.training) {
    // Running statistics are constants in eval mode.
    g.grad_input = (grad_output.array().rowwise() *
                    (params.gamma.array() * cache.inv_std.array()))
                       .matrix();
    return g;
  }
  // Batch statistics depend on the input: standard train-mode backward with
  // biased variance over the active sites.
  RowVec<Scalar> mean_dy = grad_output.colwise().mean();
  RowVec<Scalar> mean_dy_xhat = (grad_output.array() * cache.x_hat.array()).colwise().mean();
  g.grad_input =
      ((grad_output.rowwise() - mean_dy).array() -
       cache.x_hat.array().rowwise() * mean_dy_xhat.array())
          .rowwise() *
      (params.gamma.array() * cache.inv_std.array());
  return g;
}

template <class Scalar>
FeatureMatrix<Scalar> relu_forward(const FeatureMatrix<Scalar>& input) {
  return input.cwiseMax(Scalar(0));
}

template <class Scalar>
FeatureMatrix<Scalar> relu_backward(const FeatureMatrix<Scalar>& grad_output,
                                    const FeatureMatrix<Scalar>& input) {
  return (input.array() > Scalar(0)).template cast<Scalar>() * grad_output.array();
}

template <class Scalar>
FeatureMatrix<Scalar> softmax_forward(const FeatureMatrix<Scalar>& input) {
  FeatureMatrix<Scalar> out(input.rows(), input.cols());
  for (Eigen::Index r = 0; r < input.rows(); ++r) {
    const Scalar m = input.row(r).maxCoeff();
    RowVec<Scalar> e = (input.row(r).array() - m).exp();
    out.row(r) = e / e.sum();
  }
  return out;
}

template <class Scalar>
FeatureMatrix<Scalar> softmax_backward(const FeatureMatrix<Scalar>& grad_output,
                                       const FeatureMatrix<Scalar>& probs) {
  FeatureMatrix<Scalar> out(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    const Scalar dot = grad_output.row(r).dot(probs.row(r));
    out.row(r) = probs.row(r).array() * (grad_output.row(r).array() - dot);
  }
  return out;
}

#define STMOS_INSTANTIATE_LAYERS(S)                                                              \
  template FeatureMatrix<S> conv_forward<S>(const FeatureMatrix<S>&, const KernelMap&,           \
                                            const ConvParams<S>&, Eigen::Index);                 \
  template LayerGrads<S> conv_backward<S>(const FeatureMatrix<S>&, const FeatureMatrix<S>&,      \
                                          const KernelMap&, const ConvParams<S>&);               \
  template FeatureMatrix<S> batchnorm_forward<S>(const FeatureMatrix<S>&, BatchNormParams<S>&,   \
                                                 bool, BatchNormCache<S>*);                      \
  template BatchNormGrads<S> batchnorm_backward<S>(const FeatureMatrix<S>&,                      \
                                                   const BatchNormCache<S>&,                     \
                                                   const BatchNormParams<S>&);                   \
  template FeatureMatrix<S> relu_forward<S>(const FeatureMatrix<S>&);                            \
  template FeatureMatrix<S> relu_backward<S>(const FeatureMatrix<S>&, const FeatureMatrix<S>&);  \
  template FeatureMatrix<S> softmax_forward<S>(const FeatureMatrix<S>&);                         \
  template FeatureMatrix<S> softmax_backward<S>(const FeatureMatrix<S>&, const FeatureMatrix<S>&);

STMOS_INSTANTIATE_LAYERS(float)
STMOS_INSTANTIATE_LAYERS(double)

#undef STMOS_INSTANTIATE_LAYERS

}  // namespace stmos
