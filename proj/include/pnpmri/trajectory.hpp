#pragma once

#include "pnpmri/types.hpp"

namespace pnpmri {

enum class RadialScheme { golden_angle, uniform };

/// One phase's worth of k-space sample locations and density weights.
/// Coordinates are in cycles per pixel, inside [-0.5, 0.5) on both axes.
struct TrajectoryPhase {
  std::vector<double> kx, ky, dcf;
  std::vector<double> spoke_angles;  // radians, empty for file-loaded trajectories
  std::size_t samples() const { return kx.size(); }
};

struct Trajectory {
  std::size_t samples_per_spoke = 0;  // 0 for file-loaded trajectories
  std::vector<TrajectoryPhase> phases;

  std::size_t phase_count() const { return phases.size(); }
  std::size_t samples_per_phase() const { return phases.empty() ? 0 : phases[0].samples(); }
  void validate() const;
};

/// Radial spokes with 2*H samples each, spanning |k| <= 0.5 through the origin.
/// golden_angle advances the angle by pi*(3 - sqrt(5)) per spoke, continuing
/// across phases; uniform spaces spokes evenly in [0, pi) within each phase.
/// Density weights follow the ramp rule (|k| * ring area, DC sample at half
/// the first ring).
Trajectory make_radial_trajectory(std::size_t h, std::size_t spokes_per_phase,
                                  std::size_t phases, RadialScheme scheme);

}  // namespace pnpmri
