#pragma once

#include <utility>

#include "pnpmri/denoiser.hpp"
#include "pnpmri/types.hpp"

namespace pnpmri {

enum class Optimizer { sgd, adam };
enum class LossKind { l2, l1 };

struct TrainConfig {
  std::size_t epochs = 50;
  std::size_t batch_size = 8;
  double lr = 1e-3;
  Optimizer optimizer = Optimizer::adam;  // beta1 0.9, beta2 0.999, eps 1e-8
  LossKind loss = LossKind::l2;
  std::size_t factor_n = 2;
  std::uint64_t seed = 0;

  void validate() const {
    require(lr >= 0.0, "TrainConfig: lr must be >= 0");
    require(epochs >= 1, "TrainConfig: epochs must be >= 1");
    require(batch_size >= 1, "TrainConfig: batch_size must be >= 1");
    require(factor_n >= 2, "TrainConfig: factor_n must be >= 2");
  }
};

struct TrainReport {
  std::vector<double> epoch_loss;       // mean pair loss per epoch
  double final_loss = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t model_checksum = 0;
  std::vector<double> subject_scales;   // max magnitude per training subject
  std::size_t pair_count = 0;
};

using TrainingPair = std::pair<ComplexImage, ComplexImage>;

/// Concatenates training_pairs(multiscale_downsample(x_i, n)) over subjects;
/// (#subjects) * n^2 * (n^2 - 1) pairs total.
std::vector<TrainingPair> build_training_set(const std::vector<ComplexImage>& zero_filled_subjects,
                                             std::size_t factor_n);

/// Mini-batch risk minimization over variant pairs with seeded shuffling.
/// Deterministic in (seed, cfg, pairs); loss gradients flow only through the
/// input argument, never the target. Throws divergence_error on a non-finite
/// batch loss.
TrainReport train(DenoiserModel& model, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg);

/// PSNR (dB) of the denoised validation image against the known ground truth.
double evaluate_denoiser(const DenoiserModel& model, const ComplexImage& zero_filled_val,
                         const ComplexImage& ground_truth);

}  // namespace pnpmri
