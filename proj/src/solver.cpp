#include "pnpmri/solver.hpp"

#include <cmath>

#include "pnpmri/rng.hpp"

namespace pnpmri {

std::vector<double> nesterov_seq(std::size_t k_max) {
  std::vector<double> q(k_max + 1);
  q[0] = 1.0;
  for (std::size_t k = 1; k <= k_max; ++k) {
    q[k] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * q[k - 1] * q[k - 1]));
  }
  return q;
}

ComplexImage pnp_step(const ComplexImage& s, const KSpaceData& y, const CoilSensitivities& maps,
                      const Trajectory& traj, const NufftConfig& cfg, double gamma,
                      const DenoiserModel& model) {
  const ComplexImage grad = grad_datafit(s, y, maps, traj, cfg);
  ComplexImage z = s;
  for (std::size_t i = 0; i < z.data.size(); ++i) z.data[i] -= gamma * grad.data[i];
  return denoise_image(model, z);
}

double power_iteration_L(const CoilSensitivities& maps, const Trajectory& traj,
                         const NufftConfig& cfg, std::size_t iters, std::uint64_t seed) {
  require(iters >= 1, "power_iteration_L: need at least one iteration");
  const std::size_t t = traj.phase_count();
  ComplexImage v(maps.h, maps.w, t);
  Rng rng(seed);
  for (auto& e : v.data) e = cdouble(rng.normal(), rng.normal());

  double lambda = 0.0;
  for (std::size_t it = 0; it < iters; ++it) {
    const double nrm = std::sqrt(dot_real(v, v));
    require(nrm > 0.0, "power_iteration_L: start vector collapsed to zero");
    for (auto& e : v.data) e /= nrm;
    const ComplexImage w = apply_H_adjoint(apply_H(v, maps, traj, cfg), maps, traj, cfg);
    lambda = dot_real(v, w);  // Rayleigh quotient of the normal operator
    v = w;
  }
  return lambda;
}

ReconResult reconstruct(const KSpaceData& y, const CoilSensitivities& maps, const Trajectory& traj,
                        const NufftConfig& cfg, const DenoiserModel& model,
                        const SolverConfig& solver_cfg, const std::vector<double>* q_override) {
  solver_cfg.validate();
  model.validate();

  double gamma = solver_cfg.gamma;
  if (gamma <= 0.0) {
    const double big_l = power_iteration_L(maps, traj, cfg, 30);
    require(big_l > 0.0, "reconstruct: operator norm estimate is not positive");
    gamma = 1.0 / big_l;
  }

  std::vector<double> q;
  if (q_override != nullptr) {
    q = *q_override;
    require(q.size() >= solver_cfg.max_iters + 1, "reconstruct: q_override too short");
  } else {
    q = nesterov_seq(solver_cfg.max_iters);
  }

  ReconResult result;
  result.gamma = gamma;

  ComplexImage x_prev = zero_filled_recon(y, maps, traj, cfg);
  ComplexImage s = x_prev;
  for (std::size_t k = 1; k <= solver_cfg.max_iters; ++k) {
    ComplexImage x = pnp_step(s, y, maps, traj, cfg, gamma, model);
    if (!x.finite()) {
      throw divergence_error("reconstruction produced a non-finite iterate at iteration " +
                                 std::to_string(k),
                             k);
    }

    const double denom = std::sqrt(dot_real(x_prev, x_prev));
    ComplexImage diff = x;
    for (std::size_t i = 0; i < diff.data.size(); ++i) diff.data[i] -= x_prev.data[i];
    const double rel = (denom > 0.0) ? std::sqrt(dot_real(diff, diff)) / denom
                                     : std::sqrt(dot_real(diff, diff));
    result.trace.rel_change.push_back(rel);
    result.trace.q.push_back(solver_cfg.accelerate ? q[k] : 1.0);
    if (solver_cfg.record_trace) {
      result.trace.datafit.push_back(datafit_value(x, y, maps, traj, cfg));
    }

    if (solver_cfg.accelerate) {
      const double momentum = (q[k - 1] - 1.0) / q[k];
      s = x;
      for (std::size_t i = 0; i < s.data.size(); ++i) {
        s.data[i] += momentum * (x.data[i] - x_prev.data[i]);
      }
    } else {
      s = x;
    }

    x_prev = std::move(x);
    result.iterations = k;
    if (rel < solver_cfg.tol) break;
  }

  result.image = std::move(x_prev);
  return result;
}

}  // namespace pnpmri
