#pragma once

#include "pnpmri/denoiser.hpp"
#include "pnpmri/forward_model.hpp"

namespace pnpmri {

struct SolverConfig {
  double gamma = 0.0;  // <= 0 selects 1/L with L from power iteration
  std::size_t max_iters = 100;
  bool accelerate = true;
  double tol = 1e-6;  // relative-change stopping threshold
  bool record_trace = true;

  void validate() const {
    require(max_iters >= 1, "SolverConfig: max_iters must be >= 1");
    require(tol >= 0.0, "SolverConfig: tol must be >= 0");
  }
};

struct SolverTrace {
  std::vector<double> rel_change;  // ||x_k - x_{k-1}|| / ||x_{k-1}||
  std::vector<double> datafit;     // g(x_k), filled when record_trace is set
  std::vector<double> q;           // momentum sequence value at iteration k
};

struct ReconResult {
  ComplexImage image;
  SolverTrace trace;
  std::size_t iterations = 0;
  double gamma = 0.0;  // step size actually used
};

/// q_0 = 1, q_k = (1 + sqrt(1 + 4 q_{k-1}^2)) / 2; returns q_0..q_kmax.
std::vector<double> nesterov_seq(std::size_t k_max);

/// One fixed-point step: denoise(s - gamma * grad g(s)).
ComplexImage pnp_step(const ComplexImage& s, const KSpaceData& y, const CoilSensitivities& maps,
                      const Trajectory& traj, const NufftConfig& cfg, double gamma,
                      const DenoiserModel& model);

/// Accelerated plug-and-play iteration started from the zero-filled image.
/// Stops at max_iters or when the relative change drops below tol; throws
/// divergence_error (with the iteration index) on a non-finite iterate.
/// q_override forces an explicit momentum sequence (testing hook).
ReconResult reconstruct(const KSpaceData& y, const CoilSensitivities& maps, const Trajectory& traj,
                        const NufftConfig& cfg, const DenoiserModel& model,
                        const SolverConfig& solver_cfg,
                        const std::vector<double>* q_override = nullptr);

/// Largest eigenvalue of H^H H by power iteration from a seeded start vector.
double power_iteration_L(const CoilSensitivities& maps, const Trajectory& traj,
                         const NufftConfig& cfg, std::size_t iters, std::uint64_t seed = 0);

}  // namespace pnpmri
