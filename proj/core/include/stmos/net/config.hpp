#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stmos/sparse/coords.hpp"

namespace stmos {

/// Architecture of the sparse U-Net. encoder_channels[0] is the stem width
/// at full resolution; each following entry adds one strided level. The
/// decoder mirrors the encoder: decoder_channels must have exactly
/// encoder_channels.size() - 1 entries. kernel.size/shape applies to every
/// convolution; kernel.stride is the downsampling stride between levels
/// (spatial-only (1,2,2,2) by default so the short time axis survives).
struct NetworkConfig {
  std::vector<int> encoder_channels{8, 16, 32, 64};
  std::vector<int> decoder_channels{32, 16, 8};
  int blocks_per_level = 1;
  KernelSpec kernel{{3, 3, 3, 3}, {1, 2, 2, 2}, KernelShape::Hypercube};
  int num_classes = 2;  // static, moving
  std::uint64_t seed = 42;

  int levels() const { return static_cast<int>(encoder_channels.size()) - 1; }
  void validate() const;

  /// Small config for CPU training and CI: hypercross kernels, narrow widths.
  static NetworkConfig tiny();

  std::string to_json_string() const;
  static NetworkConfig from_json_string(const std::string& text);
};

struct AugmentConfig {
  bool rotation = true;  // shared yaw rotation, full circle
  bool shift = true;     // shared translation
  bool flip = true;      // shared x/y axis flips
  bool jitter = true;    // per-point gaussian noise
  bool scale = true;     // shared global scale
  double shift_range = 0.5;    // meters, uniform per axis
  double jitter_sigma = 0.01;  // meters
  double scale_min = 0.95;
  double scale_max = 1.05;

  bool any() const { return rotation || shift || flip || jitter || scale; }
};

/// Optimization recipe. One window ("4D point cloud") per step; larger
/// effective batches via grad accumulation.
struct TrainConfig {
  double learning_rate = 1e-4;
  double weight_decay = 1e-4;
  int max_epochs = 60;
  AugmentConfig augment;
  int window_size = 10;    // N scans per window
  int window_stride = 5;   // enumerate training windows every k scans
  int accum_steps = 1;
  bool shuffle = true;
  std::uint64_t seed = 1;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;

  std::string to_json_string() const;
  static TrainConfig from_json_string(const std::string& text);
};

}  // namespace stmos
