#include "pnpmri/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace pnpmri {

namespace {

MetricReport psnr_over(const ComplexImage& x, const ComplexImage& ref, std::size_t t0,
                       std::size_t t1) {
  double peak = 0.0;
  double err = 0.0;
  std::size_t count = 0;
  for (std::size_t t = t0; t < t1; ++t) {
    for (std::size_t i = 0; i < ref.h; ++i) {
      for (std::size_t j = 0; j < ref.w; ++j) {
        const double rm = std::abs(ref.at(i, j, t));
        const double xm = std::abs(x.at(i, j, t));
        peak = std::max(peak, rm);
        const double d = xm - rm;
        err += d * d;
        ++count;
      }
    }
  }
  require(peak > 0.0, "psnr: reference image is identically zero");

  MetricReport rep;
  rep.peak = peak;
  rep.mse = err / static_cast<double>(count);
  rep.psnr_db = (rep.mse == 0.0) ? kPsnrSentinelDb
                                 : 10.0 * std::log10(peak * peak / rep.mse);
  return rep;
}

}  // namespace

std::string MetricReport::to_line() const {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g", psnr_db, mse, peak);
  return buf;
}

MetricReport psnr(const ComplexImage& x, const ComplexImage& ref) {
  require(x.h == ref.h && x.w == ref.w && x.t == ref.t, "psnr: image shape mismatch");
  return psnr_over(x, ref, 0, ref.t);
}

std::vector<MetricReport> psnr_per_phase(const ComplexImage& x, const ComplexImage& ref) {
  require(x.h == ref.h && x.w == ref.w && x.t == ref.t, "psnr: image shape mismatch");
  std::vector<MetricReport> out;
  out.reserve(ref.t);
  for (std::size_t t = 0; t < ref.t; ++t) out.push_back(psnr_over(x, ref, t, t + 1));
  return out;
}

}  // namespace pnpmri
