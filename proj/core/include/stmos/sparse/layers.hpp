#pragma once

#include "stmos/sparse/features.hpp"
#include "stmos/sparse/kernel_map.hpp"

namespace stmos {

/// Weights of one sparse convolution. The per-offset kernels W[k] of shape
/// [in_channels x out_channels] are stacked row-wise: block k occupies rows
/// [k*in_channels, (k+1)*in_channels). Bias of size 0 means no bias.
template <class Scalar>
struct ConvParams {
  int in_channels = 0;
  int out_channels = 0;
  FeatureMatrix<Scalar> weights;  // [(num_offsets * in_channels) x out_channels]
  RowVec<Scalar> bias;

  bool has_bias() const { return bias.size() > 0; }
  int num_offsets() const {
    return in_channels == 0 ? 0 : static_cast<int>(weights.rows()) / in_channels;
  }
  auto weight_block(int k) { return weights.middleRows(k * in_channels, in_channels); }
  auto weight_block(int k) const { return weights.middleRows(k * in_channels, in_channels); }

  static ConvParams zeros(int num_offsets, int c_in, int c_out, bool with_bias) {
    ConvParams p;
    p.in_channels = c_in;
    p.out_channels = c_out;
    p.weights = FeatureMatrix<Scalar>::Zero(static_cast<Eigen::Index>(num_offsets) * c_in, c_out);
    if (with_bias) p.bias = RowVec<Scalar>::Zero(c_out);
    return p;
  }
};

template <class Scalar>
struct LayerGrads {
  FeatureMatrix<Scalar> grad_weights;
  RowVec<Scalar> grad_bias;
  FeatureMatrix<Scalar> grad_input;
};

/// Gather-GEMM-scatter sparse convolution:
///   out[o] = bias + sum_k sum_{(i,o) in kmap[k]} W[k]' * in[i].
/// Sites with no contributing pairs receive the bias alone.
template <class Scalar>
FeatureMatrix<Scalar> conv_forward(const FeatureMatrix<Scalar>& input, const KernelMap& kmap,
                                   const ConvParams<Scalar>& params, Eigen::Index num_out_sites);

/// Gradients of conv_forward:
///   grad_in[i]  = sum_k sum_{(i,o)} W[k] * grad_out[o]
///   grad_W[k]   = sum_{(i,o)} in[i] * grad_out[o]'
///   grad_bias   = sum_o grad_out[o]
template <class Scalar>
LayerGrads<Scalar> conv_backward(const FeatureMatrix<Scalar>& grad_output,
                                 const FeatureMatrix<Scalar>& input, const KernelMap& kmap,
                                 const ConvParams<Scalar>& params);

/// Per-channel affine normalization state over active sites.
template <class Scalar>
struct BatchNormParams {
  RowVec<Scalar> gamma, beta;
  RowVec<Scalar> running_mean, running_var;
  Scalar momentum = Scalar(0.1);
  Scalar eps = Scalar(1e-5);

  static BatchNormParams init(int channels) {
    BatchNormParams p;
    p.gamma = RowVec<Scalar>::Ones(channels);
    p.beta = RowVec<Scalar>::Zero(channels);
    p.running_mean = RowVec<Scalar>::Zero(channels);
    p.running_var = RowVec<Scalar>::Ones(channels);
    return p;
  }
};

template <class Scalar>
struct BatchNormCache {
  FeatureMatrix<Scalar> x_hat;
  RowVec<Scalar> inv_std;
  bool training = true;
};

/// Train mode normalizes with batch statistics over all active sites and
/// updates the running stats in place; eval mode uses the running stats.
/// Throws NumericError on zero sites in train mode.
template <class Scalar>
FeatureMatrix<Scalar> batchnorm_forward(const FeatureMatrix<Scalar>& input,
                                        BatchNormParams<Scalar>& params, bool training,
                                        BatchNormCache<Scalar>* cache = nullptr);

template <class Scalar>
struct BatchNormGrads {
  FeatureMatrix<Scalar> grad_input;
  RowVec<Scalar> grad_gamma, grad_beta;
};

template <class Scalar>
BatchNormGrads<Scalar> batchnorm_backward(const FeatureMatrix<Scalar>& grad_output,
                                          const BatchNormCache<Scalar>& cache,
                                          const BatchNormParams<Scalar>& params);

template <class Scalar>
FeatureMatrix<Scalar> relu_forward(const FeatureMatrix<Scalar>& input);

template <class Scalar>
FeatureMatrix<Scalar> relu_backward(const FeatureMatrix<Scalar>& grad_output,
                                    const FeatureMatrix<Scalar>& input);

/// Row-wise softmax over the channel axis, max-subtracted for stability.
template <class Scalar>
FeatureMatrix<Scalar> softmax_forward(const FeatureMatrix<Scalar>& input);

/// grad wrt logits given the forward output `probs`.
template <class Scalar>
FeatureMatrix<Scalar> softmax_backward(const FeatureMatrix<Scalar>& grad_output,
                                       const FeatureMatrix<Scalar>& probs);

}  // namespace stmos
