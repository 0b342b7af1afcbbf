#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnpmri {

using cdouble = std::complex<double>;

/// Thrown when a file is missing, truncated, or carries a bad magic/version.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown when an iteration produces non-finite values.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& msg, std::size_t index)
      : std::runtime_error(msg), index_(index) {}
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

/// Complex image with explicit (rows, cols, phases) axes.
/// Memory layout matches the .cimg file: phase slowest, then row, then column.
struct ComplexImage {
  std::size_t h = 0, w = 0, t = 0;
  std::vector<cdouble> data;

  ComplexImage() = default;
  // Degenerate 1x1 slices are legal: the deepest downsampling level produces them.
  ComplexImage(std::size_t h_, std::size_t w_, std::size_t t_)
      : h(h_), w(w_), t(t_), data(h_ * w_ * t_) {
    require(h >= 1 && w >= 1 && t >= 1, "ComplexImage: need H >= 1, W >= 1, T >= 1");
  }

  cdouble& at(std::size_t i, std::size_t j, std::size_t tt = 0) {
    return data[(tt * h + i) * w + j];
  }
  const cdouble& at(std::size_t i, std::size_t j, std::size_t tt = 0) const {
    return data[(tt * h + i) * w + j];
  }

  std::size_t size() const { return data.size(); }

  bool finite() const {
    for (const auto& v : data)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
  }

  /// One (H, W) phase slice as a standalone single-phase image.
  ComplexImage slice(std::size_t tt) const {
    ComplexImage out(h, w, 1);
    std::copy(data.begin() + tt * h * w, data.begin() + (tt + 1) * h * w, out.data.begin());
    return out;
  }
};

inline double norm2(const ComplexImage& x) {
  double s = 0;
  for (const auto& v : x.data) s += std::norm(v);
  return std::sqrt(s);
}

/// Per-coil complex weighting maps, all of shape (H, W). Coil-major layout.
struct CoilSensitivities {
  std::size_t coils = 0, h = 0, w = 0;
  std::vector<cdouble> data;

  CoilSensitivities() = default;
  CoilSensitivities(std::size_t c, std::size_t h_, std::size_t w_)
      : coils(c), h(h_), w(w_), data(c * h_ * w_) {
    require(coils >= 1, "CoilSensitivities: need at least one coil");
  }

  cdouble& at(std::size_t c, std::size_t i, std::size_t j) {
    return data[(c * h + i) * w + j];
  }
  const cdouble& at(std::size_t c, std::size_t i, std::size_t j) const {
    return data[(c * h + i) * w + j];
  }

  /// Pixelwise sum of squared magnitudes over coils.
  double sos(std::size_t i, std::size_t j) const {
    double s = 0;
    for (std::size_t c = 0; c < coils; ++c) s += std::norm(at(c, i, j));
    return s;
  }
};

enum class PhantomKind { shepp_logan, ellipse_dynamic };

struct PhantomSpec {
  PhantomKind kind = PhantomKind::shepp_logan;
  std::size_t h = 64, w = 64, t = 1;
  double motion_amplitude = 0.0;  // fraction of H
  std::uint64_t seed = 0;

  void validate() const {
    require(h >= 2 && w >= 2 && t >= 1, "PhantomSpec: need H >= 2, W >= 2, T >= 1");
    require(motion_amplitude >= 0.0 && motion_amplitude <= 0.25,
            "PhantomSpec: motion_amplitude must be in [0, 0.25]");
  }
};

}  // namespace pnpmri
