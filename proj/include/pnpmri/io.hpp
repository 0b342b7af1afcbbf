#pragma once

#include <string>

#include "pnpmri/forward_model.hpp"
#include "pnpmri/trajectory.hpp"
#include "pnpmri/types.hpp"

// Binary file formats, all little-endian with float32 payloads:
//   .cimg  "CIMG" v1, u32 H W T, interleaved (re, im) t-slowest row-major
//   .coil  "COIL" v1, u32 C H W, data as above per coil
//   .ksp   "KSPC" v1, u32 C T M, (re, im) coil-slowest
//   .trj   "TRAJ" v1, u32 T M, per phase M triples (kx, ky, dcf)
namespace pnpmri {

void save_image(const ComplexImage& img, const std::string& path);
ComplexImage load_image(const std::string& path);

void save_coils(const CoilSensitivities& maps, const std::string& path);
CoilSensitivities load_coils(const std::string& path);

void save_kspace(const KSpaceData& ksp, const std::string& path);
KSpaceData load_kspace(const std::string& path);

void save_trajectory(const Trajectory& traj, const std::string& path);
Trajectory load_trajectory(const std::string& path);

}  // namespace pnpmri
