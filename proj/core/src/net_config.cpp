#include "stmos/net/config.hpp"

#include <json.hpp>

namespace stmos {

namespace {
using nlohmann::json;

json kernel_to_json(const KernelSpec& k) {
  return json{{"size", k.size},
              {"stride", k.stride},
              {"shape", k.shape == KernelShape::Hypercube ? "hypercube" : "hypercross"}};
}

KernelSpec kernel_from_json(const json& j) {
  KernelSpec k;
  if (j.contains("size")) k.size = j.at("size").get<std::array<int, 4>>();
  if (j.contains("stride")) k.stride = j.at("stride").get<std::array<int, 4>>();
  if (j.contains("shape")) {
    const std::string s = j.at("shape").get<std::string>();
    if (s == "hypercube")
      k.shape = KernelShape::Hypercube;
    else if (s == "hypercross")
      k.shape = KernelShape::Hypercross;
    else
      throw ArgumentError("unknown kernel shape: " + s);
  }
  k.validate();
  return k;
}

}  // namespace

void NetworkConfig::validate() const {
  if (encoder_channels.empty() || decoder_channels.empty())
    throw ArgumentError("network config: channel lists must be non-empty");
  if (decoder_channels.size() != encoder_channels.size() - 1)
    throw ArgumentError("network config: decoder must mirror the encoder (need " +
                        std::to_string(encoder_channels.size() - 1) + " decoder widths)");
  for (int c : encoder_channels)
    if (c < 1) throw ArgumentError("network config: channel widths must be >= 1");
  for (int c : decoder_channels)
    if (c < 1) throw ArgumentError("network config: channel widths must be >= 1");
  if (blocks_per_level < 1) throw ArgumentError("network config: blocks_per_level must be >= 1");
  if (num_classes != 2) throw ArgumentError("network config: this head is two-class");
  kernel.validate();
}

NetworkConfig NetworkConfig::tiny() {
  NetworkConfig cfg;
  cfg.encoder_channels = {8, 16, 24, 32};
  cfg.decoder_channels = {24, 16, 8};
  cfg.blocks_per_level = 1;
  cfg.kernel.shape = KernelShape::Hypercross;
  cfg.kernel.size = {3, 3, 3, 3};
  cfg.kernel.stride = {1, 2, 2, 2};
  return cfg;
}

std::string NetworkConfig::to_json_string() const {
  json j{{"encoder_channels", encoder_channels},
         {"decoder_channels", decoder_channels},
         {"blocks_per_level", blocks_per_level},
         {"kernel", kernel_to_json(kernel)},
         {"num_classes", num_classes},
         {"seed", seed}};
  return j.dump(2);
}

NetworkConfig NetworkConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("network config: " + std::string(e.what()));
  }
  NetworkConfig cfg;
  if (j.contains("encoder_channels")) cfg.encoder_channels = j.at("encoder_channels").get<std::vector<int>>();
  if (j.contains("decoder_channels")) cfg.decoder_channels = j.at("decoder_channels").get<std::vector<int>>();
  if (j.contains("blocks_per_level")) cfg.blocks_per_level = j.at("blocks_per_level").get<int>();
  if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("num_classes")) cfg.num_classes = j.at("num_classes").get<int>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.validate();
  return cfg;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw ArgumentError("train config: learning rate must be positive");
  if (weight_decay < 0.0) throw ArgumentError("train config: weight decay must be non-negative");
  if (max_epochs < 1 || max_epochs > 60)
    throw ArgumentError("train config: max_epochs must be in [1, 60]");
  if (window_size < 1) throw ArgumentError("train config: window_size must be >= 1");
  if (window_stride < 1) throw ArgumentError("train config: window_stride must be >= 1");
  if (accum_steps < 1) throw ArgumentError("train config: accum_steps must be >= 1");
}

std::string TrainConfig::to_json_string() const {
  json a{{"rotation", augment.rotation}, {"shift", augment.shift},
         {"flip", augment.flip},         {"jitter", augment.jitter},
         {"scale", augment.scale},       {"shift_range", augment.shift_range},
         {"jitter_sigma", augment.jitter_sigma}, {"scale_min", augment.scale_min},
         {"scale_max", augment.scale_max}};
  json j{{"learning_rate", learning_rate},
         {"weight_decay", weight_decay},
         {"max_epochs", max_epochs},
         {"augment", a},
         {"window_size", window_size},
         {"window_stride", window_stride},
         {"accum_steps", accum_steps},
         {"shuffle", shuffle},
         {"seed", seed},
         {"adam_beta1", adam_beta1},
         {"adam_beta2", adam_beta2},
         {"adam_eps", adam_eps}};
  return j.dump(2);
}

TrainConfig TrainConfig::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError("train config: " + std::string(e.what()));
  }
  TrainConfig cfg;
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
  cfg.max_epochs = j.value("max_epochs", cfg.max_epochs);
  if (j.contains("augment")) {
    const json& a = j.at("augment");
    cfg.augment.rotation = a.value("rotation", cfg.augment.rotation);
    cfg.augment.shift = a.value("shift", cfg.augment.shift);
    cfg.augment.flip = a.value("flip", cfg.augment.flip);
    cfg.augment.jitter = a.value("jitter", cfg.augment.jitter);
    cfg.augment.scale = a.value("scale", cfg.augment.scale);
    cfg.augment.shift_range = a.value("shift_range", cfg.augment.shift_range);
    cfg.augment.jitter_sigma = a.value("jitter_sigma", cfg.augment.jitter_sigma);
    cfg.augment.scale_min = a.value("scale_min", cfg.augment.scale_min);
    cfg.augment.scale_max = a.value("scale_max", cfg.augment.scale_max);
  }
  cfg.window_size = j.value("window_size", cfg.window_size);
  cfg.window_stride = j.value("window_stride", cfg.window_stride);
  cfg.accum_steps = j.value("accum_steps", cfg.accum_steps);
  cfg.shuffle = j.value("shuffle", cfg.shuffle);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.adam_beta1 = j.value("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
  cfg.adam_eps = j.value("adam_eps", cfg.adam_eps);
  cfg.validate();
  return cfg;
}

}  // namespace stmos
