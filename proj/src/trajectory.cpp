#include "pnpmri/trajectory.hpp"

#include <cmath>

namespace pnpmri {

namespace {
constexpr double kPi = 3.1415926535897932384626433832795;
// Golden-angle increment pi * (3 - sqrt(5)), in radians.
constexpr double kGoldenAngle = 2.399963229728653;
}  // namespace

Trajectory make_radial_trajectory(std::size_t h, std::size_t spokes_per_phase,
                                  std::size_t phases, RadialScheme scheme) {
  require(h >= 2 && h % 2 == 0, "make_radial_trajectory: H must be even and >= 2");
  require(spokes_per_phase >= 1, "make_radial_trajectory: need at least one spoke");
  require(phases >= 1, "make_radial_trajectory: need at least one phase");

  Trajectory traj;
  traj.samples_per_spoke = 2 * h;
  traj.phases.resize(phases);

  const std::size_t sps = traj.samples_per_spoke;
  const double dr = 1.0 / static_cast<double>(sps);
  // Ramp-shaped density compensation: each sample owns an annulus slice of
  // area |rho| * dr * (pi / nspokes); the half ring around DC collapses to
  // 0.5 * dr^2 * (pi / nspokes) for the rho = 0 sample.
  const double wedge = kPi / static_cast<double>(spokes_per_phase);

  for (std::size_t t = 0; t < phases; ++t) {
    TrajectoryPhase& ph = traj.phases[t];
    ph.kx.resize(spokes_per_phase * sps);
    ph.ky.resize(spokes_per_phase * sps);
    ph.dcf.resize(spokes_per_phase * sps);
    ph.spoke_angles.resize(spokes_per_phase);
    for (std::size_t j = 0; j < spokes_per_phase; ++j) {
      double angle = 0.0;
      if (scheme == RadialScheme::golden_angle) {
        // The spoke counter keeps running across phases so consecutive
        // phases interleave instead of repeating the same star.
        const double g = static_cast<double>(t * spokes_per_phase + j);
        angle = std::fmod(g * kGoldenAngle, kPi);
      } else {
        angle = static_cast<double>(j) * kPi / static_cast<double>(spokes_per_phase);
      }
      ph.spoke_angles[j] = angle;
      const double ca = std::cos(angle);
      const double sa = std::sin(angle);
      for (std::size_t s = 0; s < sps; ++s) {
        const double rho =
            (static_cast<double>(s) - static_cast<double>(h)) / static_cast<double>(sps);
        const std::size_t m = j * sps + s;
        ph.kx[m] = rho * ca;
        ph.ky[m] = rho * sa;
        ph.dcf[m] = (rho == 0.0) ? 0.5 * dr * dr * wedge : std::abs(rho) * dr * wedge;
      }
    }
  }
  traj.validate();
  return traj;
}

void Trajectory::validate() const {
  require(!phases.empty(), "trajectory: need at least one phase");
  const std::size_t m = phases.front().kx.size();
  require(m >= 1, "trajectory: phases must hold at least one sample");
  if (samples_per_spoke != 0) {  // 0 marks a file-loaded trajectory
    require(m % samples_per_spoke == 0,
            "trajectory: phase sample count must be a multiple of samples_per_spoke");
  }
  for (const TrajectoryPhase& ph : phases) {
    require(ph.kx.size() == m && ph.ky.size() == m && ph.dcf.size() == m,
            "trajectory: kx/ky/dcf lengths must agree across phases");
    require(ph.spoke_angles.empty() ||
                (samples_per_spoke != 0 && ph.spoke_angles.size() == m / samples_per_spoke),
            "trajectory: spoke angle count must match spokes per phase");
    for (std::size_t i = 0; i < m; ++i) {
      require(ph.kx[i] >= -0.5 && ph.kx[i] < 0.5 && ph.ky[i] >= -0.5 && ph.ky[i] < 0.5,
              "trajectory: sample coordinates must lie in [-0.5, 0.5)");
      require(ph.dcf[i] > 0.0, "trajectory: density weights must be positive");
    }
  }
}

}  // namespace pnpmri
