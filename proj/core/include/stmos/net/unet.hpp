#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "stmos/net/config.hpp"
#include "stmos/net/params.hpp"
#include "stmos/sparse/layers.hpp"
#include "stmos/voxelizer.hpp"

namespace stmos {

/// Sparse 4D U-Net over a SparseTensor4D window: a strided-convolution
/// encoder with residual blocks per level, a transposed-convolution decoder
/// that concatenates the matching encoder level (skip connections), and a
/// per-site linear head with a two-class softmax. Output sites equal input
/// sites in count and order; column 1 of the output is the moving
/// confidence.
///
/// forward() caches activations and kernel maps; backward() consumes them.
/// One instance therefore serves one thread at a time.
template <class Scalar>
class UNet {
 public:
  explicit UNet(const NetworkConfig& cfg);

  UNet(const UNet&) = delete;
  UNet& operator=(const UNet&) = delete;

  const NetworkConfig& config() const { return cfg_; }

  /// Re-draws all parameters from cfg.seed (Kaiming fan-in weights, unit
  /// gamma, zero beta/bias, reset running stats). Identical seeds give
  /// bit-identical parameters.
  void init_params();

  /// Number of trainable scalars.
  std::size_t parameter_count();

  /// Runs the network; returns per-site class probabilities [sites x 2].
  const FeatureMatrix<Scalar>& forward(const SparseTensor4D& input, bool training);

  /// Backpropagates a gradient w.r.t. the softmax probabilities; parameter
  /// gradients accumulate into the registered grad tensors. Returns the
  /// gradient w.r.t. the input features.
  FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& grad_probs);

  void zero_grads();

  /// All named tensors (parameters first trainable flag set, then running
  /// stats as buffers), in a deterministic order.
  std::vector<TensorRef<Scalar>> tensors();
  std::vector<TensorRef<Scalar>> trainable_tensors();

  void save_weights(const std::filesystem::path& path);
  void load_weights(const std::filesystem::path& path);

  /// Copies all tensor values out / back in (best-checkpoint bookkeeping).
  std::vector<std::vector<Scalar>> snapshot_tensors();
  void restore_tensors(const std::vector<std::vector<Scalar>>& snap);

 private:
  struct Conv {
    ConvParams<Scalar> p;
    FeatureMatrix<Scalar> grad_w;
    RowVec<Scalar> grad_b;
    // backward cache
    const KernelMap* kmap = nullptr;
    FeatureMatrix<Scalar> input;

    FeatureMatrix<Scalar> forward(const FeatureMatrix<Scalar>& x, const KernelMap& km,
                                  Eigen::Index n_out);
    FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& dy);
  };

  struct Norm {
    BatchNormParams<Scalar> p;
    RowVec<Scalar> grad_gamma, grad_beta;
    BatchNormCache<Scalar> cache;

    FeatureMatrix<Scalar> forward(const FeatureMatrix<Scalar>& x, bool training);
    FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& dy);
  };

  // conv -> batchnorm -> relu
  struct ConvBnRelu {
    Conv conv;
    Norm norm;
    FeatureMatrix<Scalar> pre_relu;

    FeatureMatrix<Scalar> forward(const FeatureMatrix<Scalar>& x, const KernelMap& km,
                                  Eigen::Index n_out, bool training);
    FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& dy);
  };

  // per-site linear map (a sparse conv of kernel volume 1)
  struct Linear {
    FeatureMatrix<Scalar> w;
    RowVec<Scalar> b;  // size 0 = no bias
    FeatureMatrix<Scalar> grad_w;
    RowVec<Scalar> grad_b;
    FeatureMatrix<Scalar> input;

    FeatureMatrix<Scalar> forward(const FeatureMatrix<Scalar>& x);
    FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& dy);
  };

  // (conv-norm-relu) x2 with additive skip; 1x1 projection when widths differ
  struct ResBlock {
    ConvBnRelu cbr1, cbr2;
    std::optional<Linear> proj;

    FeatureMatrix<Scalar> forward(const FeatureMatrix<Scalar>& x, const KernelMap& km,
                                  bool training);
    FeatureMatrix<Scalar> backward(const FeatureMatrix<Scalar>& dy);
  };

  struct EncoderLevel {
    ConvBnRelu down;
    std::vector<ResBlock> blocks;
  };
  struct DecoderLevel {
    ConvBnRelu up;  // transposed conv
    ResBlock block;
    Eigen::Index up_channels = 0;  // concat split point for backward
  };

  void register_tensor(std::vector<TensorRef<Scalar>>& out, const std::string& name,
                       FeatureMatrix<Scalar>& value, FeatureMatrix<Scalar>* grad, bool trainable);
  void register_tensor(std::vector<TensorRef<Scalar>>& out, const std::string& name,
                       RowVec<Scalar>& value, RowVec<Scalar>* grad, bool trainable);
  void register_conv(std::vector<TensorRef<Scalar>>& out, const std::string& prefix, Conv& c);
  void register_norm(std::vector<TensorRef<Scalar>>& out, const std::string& prefix, Norm& n);
  void register_cbr(std::vector<TensorRef<Scalar>>& out, const std::string& prefix, ConvBnRelu& c);
  void register_block(std::vector<TensorRef<Scalar>>& out, const std::string& prefix, ResBlock& b);

  NetworkConfig cfg_;
  KernelSpec spec_same_;  // stride 1 convolutions within a level
  KernelSpec spec_down_;  // strided convolutions between levels

  ConvBnRelu stem_;
  std::vector<EncoderLevel> enc_;
  std::vector<DecoderLevel> dec_;
  Linear head_;

  // per-forward state
  std::vector<CoordList> level_coords_;
  std::vector<KernelMap> km_same_;
  std::vector<KernelMap> km_down_;
  std::vector<KernelMap> km_up_;
  std::vector<FeatureMatrix<Scalar>> enc_out_;
  FeatureMatrix<Scalar> probs_;
};

using UNetF = UNet<float>;
using UNetD = UNet<double>;

}  // namespace stmos
