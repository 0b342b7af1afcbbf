#include "pnpmri/coils.hpp"

#include <cmath>

namespace pnpmri {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
// Lobe width as a fraction of min(H, W); 0.3 keeps the sum-of-squares in
// [0.1, 1.5] over the inscribed circle for C in {2, ..., 8}.
constexpr double kSigmaFrac = 0.3;
}  // namespace

CoilSensitivities make_coil_maps(std::size_t h, std::size_t w, std::size_t coils) {
  require(coils >= 1, "make_coil_maps: need at least one coil");
  require(h >= 2 && w >= 2, "make_coil_maps: need H >= 2 and W >= 2");
  CoilSensitivities maps(coils, h, w);
  if (coils == 1) {
    for (auto& v : maps.data) v = cdouble(1.0, 0.0);
    return maps;
  }

  const double cy = 0.5 * static_cast<double>(h - 1);
  const double cx = 0.5 * static_cast<double>(w - 1);
  const double radius = 0.5 * static_cast<double>(std::min(h, w));
  const double sigma2 = kSigmaFrac * kSigmaFrac * 4.0 * radius * radius;

  for (std::size_t c = 0; c < coils; ++c) {
    const double angle = kTwoPi * static_cast<double>(c) / static_cast<double>(coils);
    const double ly = cy + radius * std::sin(angle);
    const double lx = cx + radius * std::cos(angle);
    // Gentle per-coil phase ramp so conjugation bugs cannot hide.
    const double py = 0.2 * kTwoPi * std::sin(angle) / static_cast<double>(h);
    const double px = 0.2 * kTwoPi * std::cos(angle) / static_cast<double>(w);
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        const double dy = static_cast<double>(i) - ly;
        const double dx = static_cast<double>(j) - lx;
        const double mag = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma2));
        const double phase = py * (static_cast<double>(i) - cy) + px * (static_cast<double>(j) - cx);
        maps.at(c, i, j) = cdouble(mag * std::cos(phase), mag * std::sin(phase));
      }
    }
  }
  return maps;
}

double min_sos_in_support(const CoilSensitivities& maps) {
  const double cy = 0.5 * static_cast<double>(maps.h - 1);
  const double cx = 0.5 * static_cast<double>(maps.w - 1);
  const double radius = 0.5 * static_cast<double>(std::min(maps.h, maps.w));
  double lo = std::numeric_limits<double>::max();
  for (std::size_t i = 0; i < maps.h; ++i) {
    for (std::size_t j = 0; j < maps.w; ++j) {
      const double dy = static_cast<double>(i) - cy;
      const double dx = static_cast<double>(j) - cx;
      if (dy * dy + dx * dx > radius * radius) continue;
      lo = std::min(lo, maps.sos(i, j));
    }
  }
  return lo;
}

}  // namespace pnpmri
