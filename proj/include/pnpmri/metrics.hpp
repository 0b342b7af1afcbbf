#pragma once

#include "pnpmri/types.hpp"

namespace pnpmri {

struct MetricReport {
  double psnr_db = 0.0;
  double mse = 0.0;
  double peak = 0.0;  // max reference magnitude

  std::string to_line() const;  // "psnr_db mse peak", 17 significant digits
};

inline constexpr double kPsnrSentinelDb = 99.0;  // reported when mse == 0

/// PSNR on magnitude images: peak = max |ref|, mse = mean (|x| - |ref|)^2.
/// Rejects shape mismatches and an all-zero reference.
MetricReport psnr(const ComplexImage& x, const ComplexImage& ref);

/// Same metric restricted to each phase slice.
std::vector<MetricReport> psnr_per_phase(const ComplexImage& x, const ComplexImage& ref);

}  // namespace pnpmri
