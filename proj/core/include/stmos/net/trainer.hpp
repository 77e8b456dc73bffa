#pragma once

#include <functional>
#include <span>

#include "stmos/net/adam.hpp"
#include "stmos/net/unet.hpp"
#include "stmos/sequence.hpp"

namespace stmos {

struct EpochLogRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_iou = 0.0;
  double best_val_iou = 0.0;
};

struct TrainOutcome {
  std::vector<EpochLogRow> log;
  int best_epoch = -1;
  double best_val_iou = 0.0;
  int epochs_run = 0;
};

/// Epoch loop: window-per-step BCE + Adam over the training sequences,
/// validation IoU of the moving class after each epoch, best-validation
/// parameters restored into `net` on return. Deterministic given the
/// configured seeds (stochasticity: init, shuffling, augmentation).
/// `state`/`start_epoch` resume a previous run.
template <class Scalar>
TrainOutcome train(UNet<Scalar>& net, std::span<const ScanSequence> train_seqs,
                   std::span<const ScanSequence> val_seqs, const TrainConfig& cfg,
                   const VoxelConfig& voxel_cfg, AdamState<Scalar>* state = nullptr,
                   int start_epoch = 0,
                   const std::function<void(const EpochLogRow&)>& on_epoch = {});

/// Single-window prediction without fusion: aligned forward pass in eval
/// mode, per-point moving confidences. Shared by validation and tests.
template <class Scalar>
std::vector<Scalar> predict_window(UNet<Scalar>& net, const Window& window,
                                   const VoxelConfig& voxel_cfg, bool use_poses = true);

}  // namespace stmos
