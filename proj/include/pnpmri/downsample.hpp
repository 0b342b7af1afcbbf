#pragma once

#include <utility>

#include "pnpmri/types.hpp"

namespace pnpmri {

/// The n^2 stride-offset sub-images of a source image. Variant (a, b) holds
/// source pixels (n*i + a, n*j + b); the phase axis is kept complete.
/// Offset (0, 0) is the first element of each n-by-n block.
struct DownsampleSet {
  std::size_t factor = 0;
  std::vector<ComplexImage> variants;  // index a * factor + b

  const ComplexImage& variant(std::size_t a, std::size_t b) const {
    return variants[a * factor + b];
  }
};

DownsampleSet multiscale_downsample(const ComplexImage& img, std::size_t n);

/// Exact inverse of multiscale_downsample when factor divides H and W.
ComplexImage interleave(const DownsampleSet& set, std::size_t h, std::size_t w);

/// All ordered pairs (m, m') of distinct variants: n^2 * (n^2 - 1) pairs.
std::vector<std::pair<ComplexImage, ComplexImage>> training_pairs(const DownsampleSet& set);

}  // namespace pnpmri
