#include "pnpmri/io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace pnpmri {

namespace {

constexpr std::uint32_t kVersion = 1;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 31;

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw io_error("truncated file: " + path);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, double v) {
  const float f = static_cast<float>(v);
  std::uint32_t bits;
  std::memcpy(&bits, &f, 4);
  write_u32(os, bits);
}

double read_f32(std::istream& is, const std::string& path) {
  const std::uint32_t bits = read_u32(is, path);
  float f;
  std::memcpy(&f, &bits, 4);
  return static_cast<double>(f);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open for writing: " + path);
  return os;
}

std::ifstream open_in(const std::string& path, const char magic[4]) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open: " + path);
  char got[4];
  is.read(got, 4);
  if (!is || std::memcmp(got, magic, 4) != 0) throw io_error("bad magic in " + path);
  if (read_u32(is, path) != kVersion) throw io_error("unsupported version in " + path);
  return is;
}

void finish_write(std::ostream& os, const std::string& path) {
  if (!os) throw io_error("failed while writing: " + path);
}

void check_counts(std::uint64_t product, const std::string& path) {
  if (product == 0 || product > kMaxElements) throw io_error("implausible dimensions in " + path);
}

}  // namespace

void save_image(const ComplexImage& img, const std::string& path) {
  auto os = open_out(path);
  os.write("CIMG", 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(img.h));
  write_u32(os, static_cast<std::uint32_t>(img.w));
  write_u32(os, static_cast<std::uint32_t>(img.t));
  for (const cdouble& v : img.data) {
    write_f32(os, v.real());
    write_f32(os, v.imag());
  }
  finish_write(os, path);
}

ComplexImage load_image(const std::string& path) {
  auto is = open_in(path, "CIMG");
  const std::uint32_t h = read_u32(is, path);
  const std::uint32_t w = read_u32(is, path);
  const std::uint32_t t = read_u32(is, path);
  check_counts(static_cast<std::uint64_t>(h) * w * t, path);
  ComplexImage img(h, w, t);
  for (cdouble& v : img.data) {
    const double re = read_f32(is, path);
    const double im = read_f32(is, path);
    v = cdouble(re, im);
  }
  return img;
}

void save_coils(const CoilSensitivities& maps, const std::string& path) {
  auto os = open_out(path);
  os.write("COIL", 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(maps.coils));
  write_u32(os, static_cast<std::uint32_t>(maps.h));
  write_u32(os, static_cast<std::uint32_t>(maps.w));
  for (const cdouble& v : maps.data) {
    write_f32(os, v.real());
    write_f32(os, v.imag());
  }
  finish_write(os, path);
}

CoilSensitivities load_coils(const std::string& path) {
  auto is = open_in(path, "COIL");
  const std::uint32_t c = read_u32(is, path);
  const std::uint32_t h = read_u32(is, path);
  const std::uint32_t w = read_u32(is, path);
  check_counts(static_cast<std::uint64_t>(c) * h * w, path);
  CoilSensitivities maps(c, h, w);
  for (cdouble& v : maps.data) {
    const double re = read_f32(is, path);
    const double im = read_f32(is, path);
    v = cdouble(re, im);
  }
  return maps;
}

void save_kspace(const KSpaceData& ksp, const std::string& path) {
  auto os = open_out(path);
  os.write("KSPC", 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(ksp.coils));
  write_u32(os, static_cast<std::uint32_t>(ksp.phases));
  write_u32(os, static_cast<std::uint32_t>(ksp.samples));
  for (const cdouble& v : ksp.data) {
    write_f32(os, v.real());
    write_f32(os, v.imag());
  }
  finish_write(os, path);
}

KSpaceData load_kspace(const std::string& path) {
  auto is = open_in(path, "KSPC");
  const std::uint32_t c = read_u32(is, path);
  const std::uint32_t t = read_u32(is, path);
  const std::uint32_t m = read_u32(is, path);
  check_counts(static_cast<std::uint64_t>(c) * t * m, path);
  KSpaceData ksp(c, t, m);
  for (cdouble& v : ksp.data) {
    const double re = read_f32(is, path);
    const double im = read_f32(is, path);
    v = cdouble(re, im);
  }
  return ksp;
}

void save_trajectory(const Trajectory& traj, const std::string& path) {
  traj.validate();
  auto os = open_out(path);
  os.write("TRAJ", 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(traj.phase_count()));
  write_u32(os, static_cast<std::uint32_t>(traj.samples_per_phase()));
  for (const TrajectoryPhase& ph : traj.phases) {
    for (std::size_t m = 0; m < ph.kx.size(); ++m) {
      write_f32(os, ph.kx[m]);
      write_f32(os, ph.ky[m]);
      write_f32(os, ph.dcf[m]);
    }
  }
  finish_write(os, path);
}

Trajectory load_trajectory(const std::string& path) {
  auto is = open_in(path, "TRAJ");
  const std::uint32_t t = read_u32(is, path);
  const std::uint32_t m = read_u32(is, path);
  check_counts(static_cast<std::uint64_t>(t) * m, path);

  // Spoke grouping is not part of the format; samples_per_spoke = 0 and empty
  // spoke angles mark a file-loaded trajectory, which is all recon needs.
  Trajectory traj;
  traj.samples_per_spoke = 0;
  traj.phases.resize(t);
  for (TrajectoryPhase& ph : traj.phases) {
    ph.kx.resize(m);
    ph.ky.resize(m);
    ph.dcf.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      ph.kx[i] = read_f32(is, path);
      ph.ky[i] = read_f32(is, path);
      ph.dcf[i] = read_f32(is, path);
    }
  }
  try {
    traj.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error(std::string("invalid trajectory in ") + path + ": " + e.what());
  }
  return traj;
}

}  // namespace pnpmri
