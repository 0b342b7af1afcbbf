#pragma once

#include "pnpmri/types.hpp"

namespace pnpmri {

/// Synthetic receive maps: C Gaussian lobes centered at equally spaced angles
/// on the image boundary, each with a smooth per-coil linear phase ramp.
/// C = 1 returns the constant map 1+0i. For C >= 2 the lobe width is chosen
/// so the sum-of-squares magnitude stays >= 0.1 inside the inscribed circle.
CoilSensitivities make_coil_maps(std::size_t h, std::size_t w, std::size_t coils);

/// Smallest sum-of-squares magnitude over the inscribed circle.
double min_sos_in_support(const CoilSensitivities& maps);

}  // namespace pnpmri
