#pragma once

#include "pnpmri/types.hpp"

namespace pnpmri {

/// Builds a synthetic dynamic phantom. Output is real-valued (zero imaginary
/// part) with intensities in [0, 1], bit-identical for identical specs.
///
/// shepp_logan: the classic ten-ellipse head slice (modified intensities, so
/// the skull ring peaks at exactly 1), replicated across phases.
/// ellipse_dynamic: static ellipse scene plus one bright ellipse translating
/// down by motion_amplitude*H*(t/(T-1)) pixels at phase t.
ComplexImage make_phantom(const PhantomSpec& spec);

}  // namespace pnpmri
