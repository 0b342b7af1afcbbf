#include "pnpmri/phantom.hpp"

#include <algorithm>
#include <cmath>

#include "pnpmri/rng.hpp"

namespace pnpmri {

namespace {

struct Ellipse {
  double cx, cy;  // center in [-1, 1] coordinates (x right, y up)
  double ax, ay;  // half axes
  double angle;   // radians, counterclockwise
  double value;
};

// Modified Shepp-Logan intensities; overlaps stay within [0, 1] and the
// skull ring (inside a, outside b) sits at exactly 1.
const Ellipse kSheppLogan[] = {
    {0.0, 0.0, 0.69, 0.92, 0.0, 1.0},
    {0.0, -0.0184, 0.6624, 0.874, 0.0, -0.8},
    {0.22, 0.0, 0.11, 0.31, -0.31415926535897931, -0.2},
    {-0.22, 0.0, 0.16, 0.41, 0.31415926535897931, -0.2},
    {0.0, 0.35, 0.21, 0.25, 0.0, 0.1},
    {0.0, 0.1, 0.046, 0.046, 0.0, 0.1},
    {0.0, -0.1, 0.046, 0.046, 0.0, 0.1},
    {-0.08, -0.605, 0.046, 0.023, 0.0, 0.1},
    {0.0, -0.605, 0.023, 0.023, 0.0, 0.1},
    {0.06, -0.605, 0.023, 0.046, 0.0, 0.1},
};

bool inside(const Ellipse& e, double x, double y) {
  const double c = std::cos(e.angle), s = std::sin(e.angle);
  const double dx = x - e.cx, dy = y - e.cy;
  const double u = (c * dx + s * dy) / e.ax;
  const double v = (-s * dx + c * dy) / e.ay;
  return u * u + v * v <= 1.0;
}

// Pixel (i, j) maps to x in [-1, 1] left-to-right and y in [-1, 1] bottom-up.
void rasterize_add(ComplexImage& img, std::size_t tt, const Ellipse& e) {
  const double sx = 2.0 / static_cast<double>(img.w);
  const double sy = 2.0 / static_cast<double>(img.h);
  for (std::size_t i = 0; i < img.h; ++i) {
    const double y = 1.0 - (static_cast<double>(i) + 0.5) * sy;
    for (std::size_t j = 0; j < img.w; ++j) {
      const double x = -1.0 + (static_cast<double>(j) + 0.5) * sx;
      if (inside(e, x, y)) img.at(i, j, tt) += e.value;
    }
  }
}

void rasterize_set(ComplexImage& img, std::size_t tt, const Ellipse& e) {
  const double sx = 2.0 / static_cast<double>(img.w);
  const double sy = 2.0 / static_cast<double>(img.h);
  for (std::size_t i = 0; i < img.h; ++i) {
    const double y = 1.0 - (static_cast<double>(i) + 0.5) * sy;
    for (std::size_t j = 0; j < img.w; ++j) {
      const double x = -1.0 + (static_cast<double>(j) + 0.5) * sx;
      if (inside(e, x, y)) img.at(i, j, tt) = e.value;
    }
  }
}

ComplexImage make_shepp_logan(const PhantomSpec& spec) {
  ComplexImage img(spec.h, spec.w, spec.t);
  for (const auto& e : kSheppLogan) rasterize_add(img, 0, e);
  for (auto& v : img.data) {
    double r = std::clamp(v.real(), 0.0, 1.0);
    v = cdouble(r, 0.0);
  }
  for (std::size_t tt = 1; tt < spec.t; ++tt)
    std::copy(img.data.begin(), img.data.begin() + spec.h * spec.w,
              img.data.begin() + tt * spec.h * spec.w);
  return img;
}

ComplexImage make_ellipse_dynamic(const PhantomSpec& spec) {
  Rng rng(spec.seed);
  // Static scene: a large background ellipse plus two seed-jittered features.
  const Ellipse background{0.0, 0.05, 0.72, 0.82, 0.0, 0.35};
  const Ellipse feature1{-0.30 + 0.06 * (rng.uniform() - 0.5), -0.25 + 0.06 * (rng.uniform() - 0.5),
                         0.16 + 0.03 * rng.uniform(), 0.22 + 0.03 * rng.uniform(),
                         0.6 * (rng.uniform() - 0.5), 0.20};
  const Ellipse feature2{0.32 + 0.06 * (rng.uniform() - 0.5), -0.20 + 0.06 * (rng.uniform() - 0.5),
                         0.20 + 0.03 * rng.uniform(), 0.14 + 0.03 * rng.uniform(),
                         0.6 * (rng.uniform() - 0.5), 0.15};

  ComplexImage img(spec.h, spec.w, spec.t);
  for (std::size_t tt = 0; tt < spec.t; ++tt) {
    rasterize_add(img, tt, background);
    rasterize_add(img, tt, feature1);
    rasterize_add(img, tt, feature2);
    // Bright ellipse translating downward by amp*H*(t/(T-1)) pixels; value is
    // set, not added, so it is separable by thresholding above 0.75.
    double shift_px = 0.0;
    if (spec.t > 1)
      shift_px = spec.motion_amplitude * static_cast<double>(spec.h) *
                 (static_cast<double>(tt) / static_cast<double>(spec.t - 1));
    const double shift_y = shift_px * 2.0 / static_cast<double>(spec.h);
    rasterize_set(img, tt, Ellipse{0.05, 0.38 - shift_y, 0.13, 0.13, 0.0, 1.0});
  }
  for (auto& v : img.data) v = cdouble(std::clamp(v.real(), 0.0, 1.0), 0.0);
  return img;
}

}  // namespace

ComplexImage make_phantom(const PhantomSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case PhantomKind::shepp_logan:
      return make_shepp_logan(spec);
    case PhantomKind::ellipse_dynamic:
      return make_ellipse_dynamic(spec);
  }
  throw std::invalid_argument("make_phantom: unknown phantom kind");
}

}  // namespace pnpmri
