#include "stmos/net/unet.hpp"

#include <cmath>
#include <string>

#include "stmos/rng.hpp"
#include "stmos/sparse/weight_io.hpp"

namespace stmos {

// ---------------------------------------------------------------------------
// layer pieces

template <class S>
FeatureMatrix<S> UNet<S>::Conv::forward(const FeatureMatrix<S>& x, const KernelMap& km,
                                        Eigen::Index n_out) {
  kmap = &km;
  input = x;
  return conv_forward(x, km, p, n_out);
}

template <class S>
FeatureMatrix<S> UNet<S>::Conv::backward(const FeatureMatrix<S>& dy) {
  LayerGrads<S> g = conv_backward(dy, input, *kmap, p);
  grad_w += g.grad_weights;
  if (p.has_bias()) grad_b += g.grad_bias;
  return std::move(g.grad_input);
}

template <class S>
FeatureMatrix<S> UNet<S>::Norm::forward(const FeatureMatrix<S>& x, bool training) {
  return batchnorm_forward(x, p, training, &cache);
}

template <class S>
FeatureMatrix<S> UNet<S>::Norm::backward(const FeatureMatrix<S>& dy) {
  BatchNormGrads<S> g = batchnorm_backward(dy, cache, p);
  grad_gamma += g.grad_gamma;
  grad_beta += g.grad_beta;
  return std::move(g.grad_input);
}

template <class S>
FeatureMatrix<S> UNet<S>::ConvBnRelu::forward(const FeatureMatrix<S>& x, const KernelMap& km,
                                              Eigen::Index n_out, bool training) {
  pre_relu = norm.forward(conv.forward(x, km, n_out), training);
  return relu_forward(pre_relu);
}

template <class S>
FeatureMatrix<S> UNet<S>::ConvBnRelu::backward(const FeatureMatrix<S>& dy) {
  return conv.backward(norm.backward(relu_backward(dy, pre_relu)));
}

template <class S>
FeatureMatrix<S> UNet<S>::Linear::forward(const FeatureMatrix<S>& x) {
  input = x;
  FeatureMatrix<S> y = x * w;
  if (b.size() > 0) y.rowwise() += b;
  return y;
}

template <class S>
FeatureMatrix<S> UNet<S>::Linear::backward(const FeatureMatrix<S>& dy) {
  grad_w.noalias() += input.transpose() * dy;
  if (b.size() > 0) grad_b += dy.colwise().sum();
  return dy * w.transpose();
}

template <class S>
FeatureMatrix<S> UNet<S>::ResBlock::forward(const FeatureMatrix<S>& x, const KernelMap& km,
                                            bool training) {
  const Eigen::Index n = x.rows();
  FeatureMatrix<S> h = cbr2.forward(cbr1.forward(x, km, n, training), km, n, training);
  if (proj) return h + proj->forward(x);
  return h + x;
}

template <class S>
FeatureMatrix<S> UNet<S>::ResBlock::backward(const FeatureMatrix<S>& dy) {
  FeatureMatrix<S> dx = cbr1.backward(cbr2.backward(dy));
  if (proj)
    dx += proj->backward(dy);
  else
    dx += dy;
  return dx;
}

// ---------------------------------------------------------------------------
// construction

template <class S>
UNet<S>::UNet(const NetworkConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  spec_same_ = cfg_.kernel;
  spec_same_.stride = {1, 1, 1, 1};
  spec_down_ = cfg_.kernel;

  const auto& ec = cfg_.encoder_channels;
  const auto& dc = cfg_.decoder_channels;
  const int levels = cfg_.levels();
  const int volume = spec_same_.volume();

  auto make_conv = [&](int c_in, int c_out) {
    Conv c;
    c.p = ConvParams<S>::zeros(volume, c_in, c_out, /*with_bias=*/false);
    c.grad_w = FeatureMatrix<S>::Zero(c.p.weights.rows(), c.p.weights.cols());
    return c;
  };
  auto make_norm = [&](int channels) {
    Norm n;
    n.p = BatchNormParams<S>::init(channels);
    n.grad_gamma = RowVec<S>::Zero(channels);
    n.grad_beta = RowVec<S>::Zero(channels);
    return n;
  };
  auto make_cbr = [&](int c_in, int c_out) {
    ConvBnRelu c;
    c.conv = make_conv(c_in, c_out);
    c.norm = make_norm(c_out);
    return c;
  };
  auto make_block = [&](int c_in, int c_out) {
    ResBlock b;
    b.cbr1 = make_cbr(c_in, c_out);
    b.cbr2 = make_cbr(c_out, c_out);
    if (c_in != c_out) {
      Linear l;
      l.w = FeatureMatrix<S>::Zero(c_in, c_out);
      l.grad_w = FeatureMatrix<S>::Zero(c_in, c_out);
      b.proj = std::move(l);
    }
    return b;
  };

  stem_ = make_cbr(1, ec[0]);
  enc_.resize(static_cast<std::size_t>(levels));
  for (int l = 1; l <= levels; ++l) {
    EncoderLevel& level = enc_[static_cast<std::size_t>(l - 1)];
    level.down = make_cbr(ec[static_cast<std::size_t>(l - 1)], ec[static_cast<std::size_t>(l)]);
    for (int b = 0; b < cfg_.blocks_per_level; ++b)
      level.blocks.push_back(make_block(ec[static_cast<std::size_t>(l)], ec[static_cast<std::size_t>(l)]));
  }
  dec_.resize(static_cast<std::size_t>(levels));
  for (int d = 0; d < levels; ++d) {
    DecoderLevel& level = dec_[static_cast<std::size_t>(d)];
    const int target_level = levels - 1 - d;
    const int in_ch = d == 0 ? ec.back() : dc[static_cast<std::size_t>(d - 1)];
    const int out_ch = dc[static_cast<std::size_t>(d)];
    level.up = make_cbr(in_ch, out_ch);
    level.up_channels = out_ch;
    level.block = make_block(out_ch + ec[static_cast<std::size_t>(target_level)], out_ch);
  }
  head_.w = FeatureMatrix<S>::Zero(dc.back(), cfg_.num_classes);
  head_.b = RowVec<S>::Zero(cfg_.num_classes);
  head_.grad_w = FeatureMatrix<S>::Zero(dc.back(), cfg_.num_classes);
  head_.grad_b = RowVec<S>::Zero(cfg_.num_classes);

  init_params();
}

// ---------------------------------------------------------------------------
// parameter registry

template <class S>
void UNet<S>::register_tensor(std::vector<TensorRef<S>>& out, const std::string& name,
                              FeatureMatrix<S>& value, FeatureMatrix<S>* grad, bool trainable) {
  TensorRef<S> r;
  r.name = name;
  r.data = value.data();
  r.grad = grad ? grad->data() : nullptr;
  r.shape = {value.rows(), value.cols()};
  r.size = value.size();
  r.trainable = trainable;
  out.push_back(std::move(r));
}

template <class S>
void UNet<S>::register_tensor(std::vector<TensorRef<S>>& out, const std::string& name,
                              RowVec<S>& value, RowVec<S>* grad, bool trainable) {
  TensorRef<S> r;
  r.name = name;
  r.data = value.data();
  r.grad = grad ? grad->data() : nullptr;
  r.shape = {value.size()};
  r.size = value.size();
  r.trainable = trainable;
  out.push_back(std::move(r));
}

template <class S>
void UNet<S>::register_conv(std::vector<TensorRef<S>>& out, const std::string& prefix, Conv& c) {
  register_tensor(out, prefix + ".weight", c.p.weights, &c.grad_w, true);
  if (c.p.has_bias()) register_tensor(out, prefix + ".bias", c.p.bias, &c.grad_b, true);
}

template <class S>
void UNet<S>::register_norm(std::vector<TensorRef<S>>& out, const std::string& prefix, Norm& n) {
  register_tensor(out, prefix + ".gamma", n.p.gamma, &n.grad_gamma, true);
  register_tensor(out, prefix + ".beta", n.p.beta, &n.grad_beta, true);
  register_tensor(out, prefix + ".running_mean", n.p.running_mean, nullptr, false);
  register_tensor(out, prefix + ".running_var", n.p.running_var, nullptr, false);
}

template <class S>
void UNet<S>::register_cbr(std::vector<TensorRef<S>>& out, const std::string& prefix,
                           ConvBnRelu& c) {
  register_conv(out, prefix + ".conv", c.conv);
  register_norm(out, prefix + ".norm", c.norm);
}

template <class S>
void UNet<S>::register_block(std::vector<TensorRef<S>>& out, const std::string& prefix,
                             ResBlock& b) {
  register_cbr(out, prefix + ".cbr1", b.cbr1);
  register_cbr(out, prefix + ".cbr2", b.cbr2);
  if (b.proj) register_tensor(out, prefix + ".proj.weight", b.proj->w, &b.proj->grad_w, true);
}

template <class S>
std::vector<TensorRef<S>> UNet<S>::tensors() {
  std::vector<TensorRef<S>> out;
  register_cbr(out, "stem", stem_);
  for (std::size_t l = 0; l < enc_.size(); ++l) {
    const std::string p = "enc" + std::to_string(l + 1);
    register_cbr(out, p + ".down", enc_[l].down);
    for (std::size_t b = 0; b < enc_[l].blocks.size(); ++b)
      register_block(out, p + ".block" + std::to_string(b), enc_[l].blocks[b]);
  }
  for (std::size_t d = 0; d < dec_.size(); ++d) {
    const std::string p = "dec" + std::to_string(dec_.size() - 1 - d);  // named by target level
    register_cbr(out, p + ".up", dec_[d].up);
    register_block(out, p + ".block", dec_[d].block);
  }
  register_tensor(out, "head.weight", head_.w, &head_.grad_w, true);
  register_tensor(out, "head.bias", head_.b, &head_.grad_b, true);
  return out;
}

template <class S>
std::vector<TensorRef<S>> UNet<S>::trainable_tensors() {
  std::vector<TensorRef<S>> all = tensors();
  std::vector<TensorRef<S>> out;
  for (auto& t : all)
    if (t.trainable) out.push_back(std::move(t));
  return out;
}

template <class S>
std::size_t UNet<S>::parameter_count() {
  std::size_t n = 0;
  for (auto& t : tensors())
    if (t.trainable) n += static_cast<std::size_t>(t.size);
  return n;
}

template <class S>
void UNet<S>::init_params() {
  Rng rng(cfg_.seed);
  for (auto& t : tensors()) {
    if (!t.trainable) {
      // running stats: mean 0, var 1
      const bool is_var = t.name.ends_with("running_var");
      for (std::int64_t i = 0; i < t.size; ++i) t.data[i] = is_var ? S(1) : S(0);
      continue;
    }
    if (t.name.ends_with(".gamma")) {
      for (std::int64_t i = 0; i < t.size; ++i) t.data[i] = S(1);
    } else if (t.name.ends_with(".beta") || t.name.ends_with(".bias")) {
      for (std::int64_t i = 0; i < t.size; ++i) t.data[i] = S(0);
    } else {
      // Kaiming fan-in: rows of the stored weight matrix are the fan-in.
      const double fan_in = static_cast<double>(t.shape.front() > 0 ? t.shape[0] : 1);
      const double stddev = std::sqrt(2.0 / fan_in);
      for (std::int64_t i = 0; i < t.size; ++i) t.data[i] = static_cast<S>(rng.normal(0.0, stddev));
    }
  }
}

template <class S>
void UNet<S>::zero_grads() {
  for (auto& t : tensors())
    if (t.grad)
      for (std::int64_t i = 0; i < t.size; ++i) t.grad[i] = S(0);
}

// ---------------------------------------------------------------------------
// forward / backward

template <class S>
const FeatureMatrix<S>& UNet<S>::forward(const SparseTensor4D& input, bool training) {
  if (input.features.cols() != 1)
    throw ArgumentError("network: expected single-channel occupancy features");
  const int levels = cfg_.levels();
  const Eigen::Index n0 = input.num_sites();

  level_coords_.assign(static_cast<std::size_t>(levels) + 1, {});
  level_coords_[0] = input.coords;
  for (int l = 1; l <= levels; ++l)
    level_coords_[static_cast<std::size_t>(l)] =
        output_coords(level_coords_[static_cast<std::size_t>(l - 1)], spec_down_, false);

  km_same_.assign(static_cast<std::size_t>(levels) + 1, {});
  km_down_.assign(static_cast<std::size_t>(levels), {});
  km_up_.assign(static_cast<std::size_t>(levels), {});
  for (int l = 0; l <= levels; ++l)
    km_same_[static_cast<std::size_t>(l)] =
        build_kernel_map(level_coords_[static_cast<std::size_t>(l)],
                         level_coords_[static_cast<std::size_t>(l)], spec_same_, false);
  for (int l = 0; l < levels; ++l) {
    km_down_[static_cast<std::size_t>(l)] =
        build_kernel_map(level_coords_[static_cast<std::size_t>(l)],
                         level_coords_[static_cast<std::size_t>(l + 1)], spec_down_, false);
    km_up_[static_cast<std::size_t>(l)] =
        build_kernel_map(level_coords_[static_cast<std::size_t>(l + 1)],
                         level_coords_[static_cast<std::size_t>(l)], spec_down_, true);
  }

  FeatureMatrix<S> x = input.features.template cast<S>();
  enc_out_.assign(static_cast<std::size_t>(levels) + 1, {});
  x = stem_.forward(x, km_same_[0], n0, training);
  enc_out_[0] = x;
  for (int l = 1; l <= levels; ++l) {
    const Eigen::Index n_l =
        static_cast<Eigen::Index>(level_coords_[static_cast<std::size_t>(l)].size());
    EncoderLevel& level = enc_[static_cast<std::size_t>(l - 1)];
    x = level.down.forward(x, km_down_[static_cast<std::size_t>(l - 1)], n_l, training);
    for (auto& block : level.blocks) x = block.forward(x, km_same_[static_cast<std::size_t>(l)], training);
    enc_out_[static_cast<std::size_t>(l)] = x;
  }

  FeatureMatrix<S> y = x;
  for (int d = 0; d < levels; ++d) {
    const int target = levels - 1 - d;
    const Eigen::Index n_t =
        static_cast<Eigen::Index>(level_coords_[static_cast<std::size_t>(target)].size());
    DecoderLevel& level = dec_[static_cast<std::size_t>(d)];
    y = level.up.forward(y, km_up_[static_cast<std::size_t>(target)], n_t, training);
    FeatureMatrix<S> cat(n_t, y.cols() + enc_out_[static_cast<std::size_t>(target)].cols());
    cat << y, enc_out_[static_cast<std::size_t>(target)];
    y = level.block.forward(cat, km_same_[static_cast<std::size_t>(target)], training);
  }

  FeatureMatrix<S> logits = head_.forward(y);
  probs_ = softmax_forward(logits);
  return probs_;
}

template <class S>
FeatureMatrix<S> UNet<S>::backward(const FeatureMatrix<S>& grad_probs) {
  if (grad_probs.rows() != probs_.rows() || grad_probs.cols() != probs_.cols())
    throw ArgumentError("network backward: gradient shape does not match the forward output");
  const int levels = cfg_.levels();

  FeatureMatrix<S> dy = head_.backward(softmax_backward(grad_probs, probs_));

  // Skip gradients per encoder level, filled by the decoder sweep.
  std::vector<FeatureMatrix<S>> denc(static_cast<std::size_t>(levels) + 1);
  for (int d = levels - 1; d >= 0; --d) {
    const int target = levels - 1 - d;
    DecoderLevel& level = dec_[static_cast<std::size_t>(d)];
    FeatureMatrix<S> dcat = level.block.backward(dy);
    FeatureMatrix<S> dup = dcat.leftCols(level.up_channels);
    FeatureMatrix<S>& dskip = denc[static_cast<std::size_t>(target)];
    if (dskip.size() == 0)
      dskip = dcat.rightCols(dcat.cols() - level.up_channels);
    else
      dskip += dcat.rightCols(dcat.cols() - level.up_channels);
    dy = level.up.backward(dup);
  }

  // dy is now the gradient at the bottleneck output (encoder level L).
  for (int l = levels; l >= 1; --l) {
    EncoderLevel& level = enc_[static_cast<std::size_t>(l - 1)];
    for (auto it = level.blocks.rbegin(); it != level.blocks.rend(); ++it) dy = it->backward(dy);
    dy = level.down.backward(dy);
    if (denc[static_cast<std::size_t>(l - 1)].size() > 0)
      dy += denc[static_cast<std::size_t>(l - 1)];
  }
  return stem_.backward(dy);
}

// ---------------------------------------------------------------------------
// serialization and snapshots

template <class S>
void UNet<S>::save_weights(const std::filesystem::path& path) {
  std::vector<NamedTensorView<S>> views;
  for (auto& t : tensors())
    views.push_back({t.name, {t.shape.begin(), t.shape.end()}, t.data, t.size});
  write_weight_container<S>(path, views);
}

template <class S>
void UNet<S>::load_weights(const std::filesystem::path& path) {
  auto loaded = read_weight_container<S>(path);
  auto refs = tensors();
  if (loaded.size() != refs.size())
    throw FormatError("weight container holds " + std::to_string(loaded.size()) +
                      " tensors, model expects " + std::to_string(refs.size()));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (loaded[i].name != refs[i].name)
      throw FormatError("weight container tensor '" + loaded[i].name + "' does not match model tensor '" +
                        refs[i].name + "'");
    if (static_cast<std::int64_t>(loaded[i].data.size()) != refs[i].size)
      throw FormatError("weight container tensor '" + loaded[i].name + "' has wrong size");
    for (std::int64_t k = 0; k < refs[i].size; ++k) refs[i].data[k] = loaded[i].data[static_cast<std::size_t>(k)];
  }
}

template <class S>
std::vector<std::vector<S>> UNet<S>::snapshot_tensors() {
  std::vector<std::vector<S>> snap;
  for (auto& t : tensors()) snap.emplace_back(t.data, t.data + t.size);
  return snap;
}

template <class S>
void UNet<S>::restore_tensors(const std::vector<std::vector<S>>& snap) {
  auto refs = tensors();
  if (snap.size() != refs.size()) throw ArgumentError("tensor snapshot does not match the model");
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (static_cast<std::int64_t>(snap[i].size()) != refs[i].size)
      throw ArgumentError("tensor snapshot entry has wrong size");
    for (std::int64_t k = 0; k < refs[i].size; ++k) refs[i].data[k] = snap[i][static_cast<std::size_t>(k)];
  }
}

template class UNet<float>;
template class UNet<double>;

}  // namespace stmos
