#include <doctest.h>

#include <cmath>
#include <set>

#include "pnpmri/downsample.hpp"
#include "pnpmri/rng.hpp"

using namespace pnpmri;

namespace {

ComplexImage random_image(std::size_t h, std::size_t w, std::size_t t, Rng& rng) {
  ComplexImage img(h, w, t);
  for (cdouble& v : img.data) v = cdouble(rng.normal(), rng.normal());
  return img;
}

}  // namespace

TEST_CASE("two-by-two image splits into its four pixels") {
  ComplexImage img(2, 2, 1);
  img.at(0, 0, 0) = cdouble(1, 0);  // p
  img.at(0, 1, 0) = cdouble(2, 0);  // q
  img.at(1, 0, 0) = cdouble(3, 0);  // r
  img.at(1, 1, 0) = cdouble(4, 0);  // s
  const DownsampleSet set = multiscale_downsample(img, 2);
  REQUIRE(set.variants.size() == 4);
  CHECK(set.variant(0, 0).at(0, 0, 0) == cdouble(1, 0));
  CHECK(set.variant(0, 1).at(0, 0, 0) == cdouble(2, 0));
  CHECK(set.variant(1, 0).at(0, 0, 0) == cdouble(3, 0));
  CHECK(set.variant(1, 1).at(0, 0, 0) == cdouble(4, 0));
}

TEST_CASE("variants index the source by stride and offset") {
  Rng rng(1);
  const ComplexImage img = random_image(12, 12, 3, rng);
  const std::size_t n = 3;
  const DownsampleSet set = multiscale_downsample(img, n);
  REQUIRE(set.variants.size() == 9);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const ComplexImage& v = set.variant(a, b);
      REQUIRE(v.h == 4);
      REQUIRE(v.w == 4);
      REQUIRE(v.t == 3);
      for (std::size_t t = 0; t < v.t; ++t)
        for (std::size_t i = 0; i < v.h; ++i)
          for (std::size_t j = 0; j < v.w; ++j)
            REQUIRE(v.at(i, j, t) == img.at(n * i + a, n * j + b, t));
    }
  }
}

TEST_CASE("constant images downsample to identical constants") {
  ComplexImage img(8, 8, 2);
  for (cdouble& v : img.data) v = cdouble(0.7, -0.3);
  const DownsampleSet set = multiscale_downsample(img, 2);
  for (const ComplexImage& v : set.variants) {
    for (const cdouble& p : v.data) CHECK(p == cdouble(0.7, -0.3));
  }
}

TEST_CASE("interleave inverts the downsampling bitwise for n in 2..4") {
  Rng rng(2);
  for (std::size_t n : {2u, 3u, 4u}) {
    const ComplexImage img = random_image(12, 24, 2, rng);  // 12 and 24 divide by all three
    const DownsampleSet set = multiscale_downsample(img, n);
    const ComplexImage round = interleave(set, img.h, img.w);
    CHECK(round.data == img.data);
  }
}

TEST_CASE("checkerboard splits into constant variants and reassembles") {
  ComplexImage img(4, 4, 1);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) img.at(i, j, 0) = cdouble(((i + j) % 2 == 0) ? 1.0 : 0.0, 0.0);
  const DownsampleSet set = multiscale_downsample(img, 2);
  for (std::size_t a = 0; a < 2; ++a) {
    for (std::size_t b = 0; b < 2; ++b) {
      const cdouble expected(((a + b) % 2 == 0) ? 1.0 : 0.0, 0.0);
      for (const cdouble& v : set.variant(a, b).data) REQUIRE(v == expected);
    }
  }
  CHECK(interleave(set, 4, 4).data == img.data);
}

TEST_CASE("non-divisible trailing pixels are cropped") {
  Rng rng(3);
  const ComplexImage img = random_image(7, 10, 1, rng);
  const DownsampleSet set = multiscale_downsample(img, 3);
  for (const ComplexImage& v : set.variants) {
    CHECK(v.h == 2);
    CHECK(v.w == 3);
  }
  // The cropped set cannot reassemble to the original size.
  CHECK_THROWS_AS(interleave(set, 7, 10), std::invalid_argument);
  CHECK_NOTHROW(interleave(set, 6, 9));
}

TEST_CASE("training pairs enumerate all ordered distinct variant pairs") {
  Rng rng(4);
  for (std::size_t n : {2u, 3u}) {
    const ComplexImage img = random_image(12, 12, 1, rng);
    const DownsampleSet set = multiscale_downsample(img, n);
    const auto pairs = training_pairs(set);
    const std::size_t v = n * n;
    CHECK(pairs.size() == v * (v - 1));
    for (const auto& [in, tgt] : pairs) {
      CHECK(in.h == tgt.h);
      CHECK(in.w == tgt.w);
      CHECK(in.t == tgt.t);
      CHECK(in.data != tgt.data);  // random data makes self-pairs detectable
    }
  }
}

TEST_CASE("noise in distinct variants is uncorrelated for iid pixel noise") {
  // An image that is a constant plus i.i.d. noise must split into variants
  // whose noise components are mutually independent; the empirical pairwise
  // cross-covariance over 64x64-pixel variants stays within 0.05 sigma^2.
  const std::size_t size = 128, n = 2;
  const double mean = 0.5, sigma = 0.1;
  Rng rng(2026);
  ComplexImage img(size, size, 1);
  for (cdouble& v : img.data) v = cdouble(mean + sigma * rng.normal(), 0.0);

  const DownsampleSet set = multiscale_downsample(img, n);
  const std::size_t count = set.variants[0].data.size();
  std::vector<std::vector<double>> noise(set.variants.size());
  for (std::size_t k = 0; k < set.variants.size(); ++k) {
    double vmean = 0.0;
    for (const cdouble& v : set.variants[k].data) vmean += v.real();
    vmean /= static_cast<double>(count);
    noise[k].reserve(count);
    for (const cdouble& v : set.variants[k].data) noise[k].push_back(v.real() - vmean);
  }
  for (std::size_t p = 0; p < noise.size(); ++p) {
    for (std::size_t q = p + 1; q < noise.size(); ++q) {
      double cov = 0.0;
      for (std::size_t i = 0; i < count; ++i) cov += noise[p][i] * noise[q][i];
      cov /= static_cast<double>(count);
      CHECK(std::abs(cov) <= 0.05 * sigma * sigma);
    }
  }
}

TEST_CASE("downsampling rejects undersized factors and images") {
  ComplexImage img(8, 8, 1);
  CHECK_THROWS_AS(multiscale_downsample(img, 1), std::invalid_argument);
  ComplexImage tiny(2, 2, 1);
  CHECK_THROWS_AS(multiscale_downsample(tiny, 3), std::invalid_argument);
}
