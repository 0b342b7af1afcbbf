#include "pnpmri/forward_model.hpp"

#include <cmath>

#include "pnpmri/parallel.hpp"
#include "pnpmri/rng.hpp"

namespace pnpmri {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;

void check_shapes(const CoilSensitivities& maps, const Trajectory& traj, std::size_t h,
                  std::size_t w, std::size_t t) {
  require(maps.h == h && maps.w == w, "forward model: coil map shape mismatch");
  require(traj.phase_count() == t, "forward model: trajectory phase count mismatch");
}
}  // namespace

double dot_real(const ComplexImage& a, const ComplexImage& b) {
  require(a.data.size() == b.data.size(), "dot_real: shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    acc += a.data[i].real() * b.data[i].real() + a.data[i].imag() * b.data[i].imag();
  }
  return acc;
}

cdouble dot(const KSpaceData& a, const KSpaceData& b) {
  require(a.data.size() == b.data.size(), "dot: shape mismatch");
  cdouble acc(0.0, 0.0);
  for (std::size_t i = 0; i < a.data.size(); ++i) acc += std::conj(a.data[i]) * b.data[i];
  return acc;
}

KSpaceData apply_H(const ComplexImage& x, const CoilSensitivities& maps, const Trajectory& traj,
                   const NufftConfig& cfg) {
  check_shapes(maps, traj, x.h, x.w, x.t);
  KSpaceData y(maps.coils, x.t, traj.samples_per_phase());
  // One task per (coil, phase); each writes a disjoint slice of y.
  parallel_for(maps.coils * x.t, [&](std::size_t task) {
    const std::size_t c = task / x.t;
    const std::size_t t = task % x.t;
    ComplexImage weighted(x.h, x.w, 1);
    for (std::size_t i = 0; i < x.h; ++i) {
      for (std::size_t j = 0; j < x.w; ++j) {
        weighted.at(i, j, 0) = maps.at(c, i, j) * x.at(i, j, t);
      }
    }
    const TrajectoryPhase& ph = traj.phases[t];
    const std::vector<cdouble> samples = nufft_forward(weighted, ph.kx, ph.ky, cfg);
    for (std::size_t m = 0; m < samples.size(); ++m) y.at(c, t, m) = samples[m];
  });
  return y;
}

ComplexImage apply_H_adjoint(const KSpaceData& y, const CoilSensitivities& maps,
                             const Trajectory& traj, const NufftConfig& cfg) {
  require(y.coils == maps.coils, "apply_H_adjoint: coil count mismatch");
  require(y.phases == traj.phase_count() && y.samples == traj.samples_per_phase(),
          "apply_H_adjoint: sample layout mismatch");
  // Backproject every (coil, phase) pair independently, then reduce over
  // coils in coil order so the result is bitwise independent of threading.
  std::vector<ComplexImage> partial(y.coils * y.phases);
  parallel_for(y.coils * y.phases, [&](std::size_t task) {
    const std::size_t c = task / y.phases;
    const std::size_t t = task % y.phases;
    const TrajectoryPhase& ph = traj.phases[t];
    std::vector<cdouble> samples(y.samples);
    for (std::size_t m = 0; m < y.samples; ++m) samples[m] = y.at(c, t, m);
    partial[task] = nufft_adjoint(samples, ph.kx, ph.ky, maps.h, maps.w, cfg);
  });

  ComplexImage out(maps.h, maps.w, y.phases);
  for (std::size_t t = 0; t < y.phases; ++t) {
    for (std::size_t c = 0; c < y.coils; ++c) {
      const ComplexImage& p = partial[c * y.phases + t];
      for (std::size_t i = 0; i < maps.h; ++i) {
        for (std::size_t j = 0; j < maps.w; ++j) {
          out.at(i, j, t) += std::conj(maps.at(c, i, j)) * p.at(i, j, 0);
        }
      }
    }
  }
  return out;
}

ComplexImage grad_datafit(const ComplexImage& x, const KSpaceData& y,
                          const CoilSensitivities& maps, const Trajectory& traj,
                          const NufftConfig& cfg) {
  KSpaceData residual = apply_H(x, maps, traj, cfg);
  require(residual.data.size() == y.data.size(), "grad_datafit: measurement shape mismatch");
  for (std::size_t i = 0; i < residual.data.size(); ++i) residual.data[i] -= y.data[i];
  return apply_H_adjoint(residual, maps, traj, cfg);
}

double datafit_value(const ComplexImage& x, const KSpaceData& y, const CoilSensitivities& maps,
                     const Trajectory& traj, const NufftConfig& cfg) {
  const KSpaceData hx = apply_H(x, maps, traj, cfg);
  require(hx.data.size() == y.data.size(), "datafit_value: measurement shape mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < hx.data.size(); ++i) {
    const cdouble d = hx.data[i] - y.data[i];
    acc += d.real() * d.real() + d.imag() * d.imag();
  }
  return 0.5 * acc;
}

ComplexImage zero_filled_recon(const KSpaceData& y, const CoilSensitivities& maps,
                               const Trajectory& traj, const NufftConfig& cfg,
                               bool hamming_apodization) {
  require(y.coils == maps.coils, "zero_filled_recon: coil count mismatch");
  require(y.phases == traj.phase_count() && y.samples == traj.samples_per_phase(),
          "zero_filled_recon: sample layout mismatch");

  KSpaceData weighted = y;
  for (std::size_t t = 0; t < y.phases; ++t) {
    const TrajectoryPhase& ph = traj.phases[t];
    for (std::size_t m = 0; m < y.samples; ++m) {
      double wgt = ph.dcf[m];
      if (hamming_apodization) {
        const double rho = std::sqrt(ph.kx[m] * ph.kx[m] + ph.ky[m] * ph.ky[m]);
        wgt *= 0.54 + 0.46 * std::cos(kTwoPi * rho);
      }
      for (std::size_t c = 0; c < y.coils; ++c) weighted.at(c, t, m) = y.at(c, t, m) * wgt;
    }
  }

  ComplexImage out = apply_H_adjoint(weighted, maps, traj, cfg);
  const double cy = 0.5 * static_cast<double>(maps.h - 1);
  const double cx = 0.5 * static_cast<double>(maps.w - 1);
  const double radius = 0.5 * static_cast<double>(std::min(maps.h, maps.w));
  for (std::size_t i = 0; i < maps.h; ++i) {
    for (std::size_t j = 0; j < maps.w; ++j) {
      double sos = maps.sos(i, j);
      if (sos < 1e-12) {
        // Vanishing coverage is only tolerable outside the inscribed circle,
        // where the floor merely keeps the division defined.
        const double dy = static_cast<double>(i) - cy;
        const double dx = static_cast<double>(j) - cx;
        require(dy * dy + dx * dx > radius * radius,
                "zero_filled_recon: coil maps vanish inside the support");
        sos = 1e-12;
      }
      for (std::size_t t = 0; t < out.t; ++t) out.at(i, j, t) /= sos;
    }
  }
  return out;
}

KSpaceData simulate_measurement(const ComplexImage& x_true, const CoilSensitivities& maps,
                                const Trajectory& traj, const NufftConfig& cfg,
                                double noise_sigma, std::uint64_t seed) {
  require(noise_sigma >= 0.0, "simulate_measurement: noise level must be non-negative");
  KSpaceData y = apply_H(x_true, maps, traj, cfg);
  if (noise_sigma > 0.0) {
    Rng rng(seed);
    // Storage order (coil, phase, sample) fixes the draw order for a seed.
    for (auto& v : y.data) {
      v += cdouble(noise_sigma * rng.normal(), noise_sigma * rng.normal());
    }
  }
  return y;
}

}  // namespace pnpmri
