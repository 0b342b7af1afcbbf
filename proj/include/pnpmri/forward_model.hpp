#pragma once

#include "pnpmri/nufft.hpp"
#include "pnpmri/trajectory.hpp"
#include "pnpmri/types.hpp"

namespace pnpmri {

/// Multicoil k-space samples, indexed (coil, phase, sample), coil slowest.
struct KSpaceData {
  std::size_t coils = 0, phases = 0, samples = 0;
  std::vector<cdouble> data;

  KSpaceData() = default;
  KSpaceData(std::size_t c, std::size_t t, std::size_t m)
      : coils(c), phases(t), samples(m), data(c * t * m) {}

  cdouble& at(std::size_t c, std::size_t t, std::size_t m) {
    return data[(c * phases + t) * samples + m];
  }
  const cdouble& at(std::size_t c, std::size_t t, std::size_t m) const {
    return data[(c * phases + t) * samples + m];
  }
};

double dot_real(const ComplexImage& a, const ComplexImage& b);
cdouble dot(const KSpaceData& a, const KSpaceData& b);

/// y[i, t, .] = nufft_forward(S_i .* x[., ., t], coords_t). Linear in x.
KSpaceData apply_H(const ComplexImage& x, const CoilSensitivities& maps, const Trajectory& traj,
                   const NufftConfig& cfg);

/// x[., ., t] = sum_i conj(S_i) .* nufft_adjoint(y[i, t, .], coords_t).
/// Exact adjoint of apply_H; coil partials are summed in fixed coil order.
ComplexImage apply_H_adjoint(const KSpaceData& y, const CoilSensitivities& maps,
                             const Trajectory& traj, const NufftConfig& cfg);

/// Gradient of g(x) = 0.5 ||y - Hx||^2, i.e. H^H (Hx - y).
ComplexImage grad_datafit(const ComplexImage& x, const KSpaceData& y,
                          const CoilSensitivities& maps, const Trajectory& traj,
                          const NufftConfig& cfg);

/// g(x) = 0.5 ||y - Hx||^2.
double datafit_value(const ComplexImage& x, const KSpaceData& y, const CoilSensitivities& maps,
                     const Trajectory& traj, const NufftConfig& cfg);

/// Density-compensated backprojection normalized by the coil sum-of-squares.
/// With hamming_apodization the samples are additionally windowed along |k|.
ComplexImage zero_filled_recon(const KSpaceData& y, const CoilSensitivities& maps,
                               const Trajectory& traj, const NufftConfig& cfg,
                               bool hamming_apodization = false);

/// y = Hx + e with e complex Gaussian, std noise_sigma per component.
KSpaceData simulate_measurement(const ComplexImage& x_true, const CoilSensitivities& maps,
                                const Trajectory& traj, const NufftConfig& cfg,
                                double noise_sigma, std::uint64_t seed);

}  // namespace pnpmri
