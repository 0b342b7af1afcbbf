#pragma once

#include <string>
#include <vector>

#include "pnpmri/nufft.hpp"
#include "pnpmri/solver.hpp"
#include "pnpmri/trainer.hpp"
#include "pnpmri/trajectory.hpp"
#include "pnpmri/types.hpp"

namespace pnpmri {

/// Every knob of the simulate/train/reconstruct/evaluate pipeline, loadable
/// from a key=value file. Defaults describe the standard 64x64, 4-phase,
/// 4-coil, 16-spoke experiment.
struct ExperimentConfig {
  PhantomSpec phantom{PhantomKind::ellipse_dynamic, 64, 64, 4, 0.1, 0};
  std::size_t coils = 4;
  std::size_t spokes_per_phase = 16;
  RadialScheme scheme = RadialScheme::golden_angle;
  double noise_sigma = 0.01;
  bool apodization = false;

  NufftConfig nufft;
  TrainConfig train;
  SolverConfig solver;

  std::vector<std::uint64_t> train_subjects = {0, 1, 2, 3, 4, 5, 6, 7};
  std::uint64_t validation_subject = 8;

  std::string data_dir = "data";
  std::string model_path;     // default: <data_dir>/model.msn
  std::string loss_log_path;  // default: <data_dir>/loss.log
  std::string recon_path;     // default: <data_dir>/recon.cimg
  std::string trace_path;     // default: <data_dir>/trace.txt

  std::string resolved_model_path() const;
  std::string resolved_loss_log_path() const;
  std::string resolved_recon_path() const;
  std::string resolved_trace_path() const;

  /// Subject file stem for a given seed: <data_dir>/subject_<seed>.
  std::string subject_stem(std::uint64_t seed) const;

  void validate() const;
};

/// Parses `key = value` lines ('#' comments, blank lines ignored). Unknown
/// keys are rejected. See the README for the key list.
ExperimentConfig parse_config_file(const std::string& path);
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);

}  // namespace pnpmri
