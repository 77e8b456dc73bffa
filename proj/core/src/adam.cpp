#include "stmos/net/adam.hpp"

#include <cmath>
#include <string>

#include "stmos/sparse/weight_io.hpp"

namespace stmos {

template <class Scalar>
AdamState<Scalar> AdamState<Scalar>::init(const std::vector<TensorRef<Scalar>>& params) {
  AdamState st;
  st.m.reserve(params.size());
  st.v.reserve(params.size());
  for (const auto& p : params) {
    st.m.emplace_back(static_cast<std::size_t>(p.size), Scalar(0));
    st.v.emplace_back(static_cast<std::size_t>(p.size), Scalar(0));
  }
  return st;
}

template <class Scalar>
void adam_step(std::vector<TensorRef<Scalar>>& params, AdamState<Scalar>& state,
               const TrainConfig& cfg) {
  if (state.m.size() != params.size() || state.v.size() != params.size())
    throw ArgumentError("adam_step: optimizer state does not match the parameter list");
  state.step += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.step));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    TensorRef<Scalar>& p = params[i];
    if (static_cast<std::int64_t>(state.m[i].size()) != p.size)
      throw ArgumentError("adam_step: state tensor size mismatch at '" + p.name + "'");
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::int64_t k = 0; k < p.size; ++k) {
      const double g = static_cast<double>(p.grad[k]) +
                       cfg.weight_decay * static_cast<double>(p.data[k]);
      const double mk = b1 * static_cast<double>(m[static_cast<std::size_t>(k)]) + (1.0 - b1) * g;
      const double vk = b2 * static_cast<double>(v[static_cast<std::size_t>(k)]) + (1.0 - b2) * g * g;
      m[static_cast<std::size_t>(k)] = static_cast<Scalar>(mk);
      v[static_cast<std::size_t>(k)] = static_cast<Scalar>(vk);
      const double m_hat = mk / bias1;
      const double v_hat = vk / bias2;
      p.data[k] -= static_cast<Scalar>(cfg.learning_rate * m_hat /
                                       (std::sqrt(v_hat) + cfg.adam_eps));
    }
  }
}

template <class Scalar>
void AdamState<Scalar>::save(const std::filesystem::path& path,
                             const std::vector<TensorRef<Scalar>>& params) const {
  std::vector<NamedTensorView<Scalar>> views;
  const Scalar step_value = static_cast<Scalar>(step);
  views.push_back({"adam.step", {1}, &step_value, 1});
  for (std::size_t i = 0; i < params.size(); ++i) {
    views.push_back({params[i].name + ".m", {static_cast<std::int64_t>(m[i].size())}, m[i].data(),
                     static_cast<std::int64_t>(m[i].size())});
    views.push_back({params[i].name + ".v", {static_cast<std::int64_t>(v[i].size())}, v[i].data(),
                     static_cast<std::int64_t>(v[i].size())});
  }
  write_weight_container<Scalar>(path, views);
}

template <class Scalar>
AdamState<Scalar> AdamState<Scalar>::load(const std::filesystem::path& path,
                                          const std::vector<TensorRef<Scalar>>& params) {
  auto loaded = read_weight_container<Scalar>(path);
  if (loaded.size() != params.size() * 2 + 1)
    throw FormatError("optimizer state file does not match the parameter list");
  AdamState st;
  st.step = static_cast<std::int64_t>(loaded[0].data.at(0));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& tm = loaded[1 + 2 * i];
    const auto& tv = loaded[2 + 2 * i];
    if (tm.name != params[i].name + ".m" || tv.name != params[i].name + ".v")
      throw FormatError("optimizer state tensor names do not match the model");
    st.m.push_back(tm.data);
    st.v.push_back(tv.data);
  }
  return st;
}

template struct AdamState<float>;
template struct AdamState<double>;
template void adam_step<float>(std::vector<TensorRef<float>>&, AdamState<float>&,
                               const TrainConfig&);
template void adam_step<double>(std::vector<TensorRef<double>>&, AdamState<double>&,
                                const TrainConfig&);

}  // namespace stmos
