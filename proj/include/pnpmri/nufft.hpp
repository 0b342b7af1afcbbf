#pragma once

#include "pnpmri/types.hpp"

namespace pnpmri {

struct NufftConfig {
  double oversampling = 2.0;
  int kernel_width = 4;     // grid cells, even
  double kernel_beta = 0.0;  // <= 0 selects the Beatty value for (width, oversampling)

  double beta() const;
  void validate() const;
};

/// Type-2 NUFFT of one (H, W) slice: out[m] ~= sum_r img(r) exp(-2*pi*i k_m.r)
/// with r pixel-centered at (floor(H/2), floor(W/2)). Gridding pipeline:
/// deapodize, zero-pad to the oversampled grid, FFT, separable Kaiser-Bessel
/// interpolation. Relative L2 error vs the direct sum is ~1e-4 at defaults.
std::vector<cdouble> nufft_forward(const ComplexImage& img2d, const std::vector<double>& kx,
                                   const std::vector<double>& ky, const NufftConfig& cfg);

/// Exact adjoint of nufft_forward (same kernel, same grid, steps reversed).
ComplexImage nufft_adjoint(const std::vector<cdouble>& samples, const std::vector<double>& kx,
                           const std::vector<double>& ky, std::size_t h, std::size_t w,
                           const NufftConfig& cfg);

}  // namespace pnpmri
