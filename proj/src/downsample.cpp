#include "pnpmri/downsample.hpp"

namespace pnpmri {

DownsampleSet multiscale_downsample(const ComplexImage& img, std::size_t n) {
  require(n >= 2, "multiscale_downsample: factor must be >= 2");
  require(img.h >= n && img.w >= n, "multiscale_downsample: image smaller than factor");

  // Non-divisible trailing rows/columns are dropped so every variant has the
  // same shape (floor(H/n), floor(W/n), T).
  const std::size_t hh = img.h / n;
  const std::size_t ww = img.w / n;

  DownsampleSet set;
  set.factor = n;
  set.variants.reserve(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      ComplexImage v(hh, ww, img.t);
      for (std::size_t t = 0; t < img.t; ++t) {
        for (std::size_t i = 0; i < hh; ++i) {
          for (std::size_t j = 0; j < ww; ++j) {
            v.at(i, j, t) = img.at(n * i + a, n * j + b, t);
          }
        }
      }
      set.variants.push_back(std::move(v));
    }
  }
  return set;
}

ComplexImage interleave(const DownsampleSet& set, std::size_t h, std::size_t w) {
  const std::size_t n = set.factor;
  require(n >= 1 && set.variants.size() == n * n, "interleave: malformed variant set");
  const ComplexImage& first = set.variants.front();
  require(first.h * n == h && first.w * n == w,
          "interleave: target shape must be factor times the variant shape");

  ComplexImage out(h, w, first.t);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const ComplexImage& v = set.variant(a, b);
      require(v.h == first.h && v.w == first.w && v.t == first.t,
              "interleave: variant shapes differ");
      for (std::size_t t = 0; t < v.t; ++t) {
        for (std::size_t i = 0; i < v.h; ++i) {
          for (std::size_t j = 0; j < v.w; ++j) {
            out.at(n * i + a, n * j + b, t) = v.at(i, j, t);
          }
        }
      }
    }
  }
  return out;
}

std::vector<std::pair<ComplexImage, ComplexImage>> training_pairs(const DownsampleSet& set) {
  const std::size_t count = set.variants.size();
  std::vector<std::pair<ComplexImage, ComplexImage>> pairs;
  pairs.reserve(count * (count - 1));
  // Ordered pairs in row-major (input, target) order; both directions of a
  // pair appear, which doubles the set without extra storage per image.
  for (std::size_t in = 0; in < count; ++in) {
    for (std::size_t tgt = 0; tgt < count; ++tgt) {
      if (in == tgt) continue;
      pairs.emplace_back(set.variants[in], set.variants[tgt]);
    }
  }
  return pairs;
}

}  // namespace pnpmri
