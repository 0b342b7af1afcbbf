#include "pnpmri/nufft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

namespace pnpmri {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

// Polynomial approximation of the zeroth-order modified Bessel function
// (Abramowitz & Stegun 9.8.1 / 9.8.2). Forward and adjoint share these
// values, so the operator pair stays exactly adjoint regardless of the
// approximation error (~2e-7 relative).
double bessel_i0(double x) {
  const double ax = std::abs(x);
  if (ax < 3.75) {
    double t = x / 3.75;
    t *= t;
    return 1.0 + t * (3.5156229 + t * (3.0899424 + t * (1.2067492 +
                 t * (0.2659732 + t * (0.0360768 + t * 0.0045813)))));
  }
  const double t = 3.75 / ax;
  return (std::exp(ax) / std::sqrt(ax)) *
         (0.39894228 + t * (0.01328592 + t * (0.00225319 + t * (-0.00157565 +
          t * (0.00916281 + t * (-0.02057706 + t * (0.02635537 +
          t * (-0.01647633 + t * 0.00392377))))))));
}

// Kaiser-Bessel interpolation kernel on [-width/2, width/2], peak-normalised.
double kb_kernel(double u, double width, double beta, double i0_beta) {
  const double s = 2.0 * u / width;
  double arg = 1.0 - s * s;
  if (arg < 0.0) arg = 0.0;  // |u| == width/2 up to roundoff
  return bessel_i0(beta * std::sqrt(arg)) / i0_beta;
}

// Continuous Fourier transform of the kernel, used for deapodization:
// chat(f) = width * sinh(sqrt(beta^2 - (pi*width*f)^2)) / sqrt(...) / I0(beta),
// switching to the sin branch when the square root argument goes negative.
double kb_kernel_ft(double f, double width, double beta, double i0_beta) {
  const double p = kPi * width * f;
  const double t = beta * beta - p * p;
  double core = 1.0;
  if (t > 0.0) {
    const double s = std::sqrt(t);
    core = std::sinh(s) / s;
  } else if (t < 0.0) {
    const double s = std::sqrt(-t);
    core = (s > 1e-12) ? std::sin(s) / s : 1.0;
  }
  return width * core / i0_beta;
}

std::size_t oversampled_size(std::size_t n, double oversampling) {
  auto g = static_cast<std::size_t>(std::ceil(oversampling * static_cast<double>(n)));
  return g + (g & 1u);  // keep the grid even so the centre index is exact
}

// FFTW plans are cached per (rows, cols, direction); planning is guarded by a
// mutex because only execution is thread-safe in FFTW.
std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan>& plan_cache() {
  static std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> cache;
  return cache;
}

void run_fft(std::vector<cdouble>& grid, std::size_t gy, std::size_t gx, int sign) {
  static std::mutex mu;
  fftw_plan plan = nullptr;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(gy, gx, sign);
    auto it = plan_cache().find(key);
    if (it == plan_cache().end()) {
      std::vector<cdouble> dummy(gy * gx);
      auto* d = reinterpret_cast<fftw_complex*>(dummy.data());
      plan = fftw_plan_dft_2d(static_cast<int>(gy), static_cast<int>(gx), d, d, sign,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
      plan_cache().emplace(key, plan);
    } else {
      plan = it->second;
    }
  }
  auto* b = reinterpret_cast<fftw_complex*>(grid.data());
  fftw_execute_dft(plan, b, b);
}

struct GridGeometry {
  std::size_t h, w, gy, gx;
  long off_y, off_x;              // embedding offset of pixel (0, 0)
  std::vector<double> deapod_y;   // 1 / chat((i - cy) / gy)
  std::vector<double> deapod_x;
};

GridGeometry make_geometry(std::size_t h, std::size_t w, const NufftConfig& cfg) {
  GridGeometry g;
  g.h = h;
  g.w = w;
  g.gy = oversampled_size(h, cfg.oversampling);
  g.gx = oversampled_size(w, cfg.oversampling);
  const long cy = static_cast<long>(h / 2);
  const long cx = static_cast<long>(w / 2);
  g.off_y = static_cast<long>(g.gy / 2) - cy;
  g.off_x = static_cast<long>(g.gx / 2) - cx;

  const double beta = cfg.beta();
  const double width = static_cast<double>(cfg.kernel_width);
  const double i0_beta = bessel_i0(beta);
  g.deapod_y.resize(h);
  g.deapod_x.resize(w);
  for (std::size_t i = 0; i < h; ++i) {
    const double f = (static_cast<double>(i) - static_cast<double>(cy)) / static_cast<double>(g.gy);
    g.deapod_y[i] = 1.0 / kb_kernel_ft(f, width, beta, i0_beta);
  }
  for (std::size_t j = 0; j < w; ++j) {
    const double f = (static_cast<double>(j) - static_cast<double>(cx)) / static_cast<double>(g.gx);
    g.deapod_x[j] = 1.0 / kb_kernel_ft(f, width, beta, i0_beta);
  }
  return g;
}

// Convert the plain row-major FFT into a centred DFT: shifting the input by
// half the grid is a (-1)^(my+mx) sign flip on the output.
void apply_centering_signs(std::vector<cdouble>& grid, std::size_t gy, std::size_t gx) {
  for (std::size_t my = 0; my < gy; ++my) {
    for (std::size_t mx = 0; mx < gx; ++mx) {
      if ((my + mx) & 1u) grid[my * gx + mx] = -grid[my * gx + mx];
    }
  }
}

inline std::size_t wrap_index(long n, std::size_t g) {
  const long m = static_cast<long>(g);
  long r = n % m;
  if (r < 0) r += m;
  return static_cast<std::size_t>(r);
}

}  // namespace

double NufftConfig::beta() const {
  if (kernel_beta > 0.0) return kernel_beta;
  // Beatty's choice for a kernel of the given width at this grid oversampling.
  const double ratio = static_cast<double>(kernel_width) / oversampling;
  const double arg = ratio * ratio * (oversampling - 0.5) * (oversampling - 0.5) - 0.8;
  return kPi * std::sqrt(arg);
}

void NufftConfig::validate() const {
  require(oversampling >= 1.25 && oversampling <= 4.0,
          "nufft: oversampling must lie in [1.25, 4]");
  require(kernel_width >= 2 && kernel_width <= 16 && kernel_width % 2 == 0,
          "nufft: kernel width must be even and in [2, 16]");
  const double ratio = static_cast<double>(kernel_width) / oversampling;
  require(ratio * ratio * (oversampling - 0.5) * (oversampling - 0.5) > 0.8,
          "nufft: kernel width too small for this oversampling");
}

std::vector<cdouble> nufft_forward(const ComplexImage& img2d, const std::vector<double>& kx,
                                   const std::vector<double>& ky, const NufftConfig& cfg) {
  cfg.validate();
  require(img2d.t == 1, "nufft_forward: expected a single (H, W) slice");
  require(kx.size() == ky.size(), "nufft_forward: kx and ky lengths differ");

  const GridGeometry g = make_geometry(img2d.h, img2d.w, cfg);
  std::vector<cdouble> grid(g.gy * g.gx, cdouble(0.0, 0.0));
  for (std::size_t i = 0; i < g.h; ++i) {
    const std::size_t row = static_cast<std::size_t>(static_cast<long>(i) + g.off_y);
    for (std::size_t j = 0; j < g.w; ++j) {
      const std::size_t col = static_cast<std::size_t>(static_cast<long>(j) + g.off_x);
      grid[row * g.gx + col] = img2d.at(i, j, 0) * (g.deapod_y[i] * g.deapod_x[j]);
    }
  }

  run_fft(grid, g.gy, g.gx, FFTW_FORWARD);
  apply_centering_signs(grid, g.gy, g.gx);

  const double beta = cfg.beta();
  const double width = static_cast<double>(cfg.kernel_width);
  const double i0_beta = bessel_i0(beta);
  const int half = cfg.kernel_width / 2;

  std::vector<cdouble> out(kx.size());
  std::vector<double> wy(static_cast<std::size_t>(cfg.kernel_width));
  std::vector<double> wx(static_cast<std::size_t>(cfg.kernel_width));
  for (std::size_t m = 0; m < kx.size(); ++m) {
    const double gyk = ky[m] * static_cast<double>(g.gy);
    const double gxk = kx[m] * static_cast<double>(g.gx);
    const long ny0 = static_cast<long>(std::floor(gyk)) - half + 1;
    const long nx0 = static_cast<long>(std::floor(gxk)) - half + 1;
    for (int p = 0; p < cfg.kernel_width; ++p) {
      wy[static_cast<std::size_t>(p)] =
          kb_kernel(gyk - static_cast<double>(ny0 + p), width, beta, i0_beta);
      wx[static_cast<std::size_t>(p)] =
          kb_kernel(gxk - static_cast<double>(nx0 + p), width, beta, i0_beta);
    }
    cdouble acc(0.0, 0.0);
    for (int py = 0; py < cfg.kernel_width; ++py) {
      const std::size_t row = wrap_index(ny0 + py, g.gy);
      cdouble row_acc(0.0, 0.0);
      for (int px = 0; px < cfg.kernel_width; ++px) {
        const std::size_t col = wrap_index(nx0 + px, g.gx);
        row_acc += wx[static_cast<std::size_t>(px)] * grid[row * g.gx + col];
      }
      acc += wy[static_cast<std::size_t>(py)] * row_acc;
    }
    out[m] = acc;
  }
  return out;
}

ComplexImage nufft_adjoint(const std::vector<cdouble>& samples, const std::vector<double>& kx,
                           const std::vector<double>& ky, std::size_t h, std::size_t w,
                           const NufftConfig& cfg) {
  cfg.validate();
  require(kx.size() == ky.size() && kx.size() == samples.size(),
          "nufft_adjoint: samples/kx/ky lengths differ");

  const GridGeometry g = make_geometry(h, w, cfg);
  const double beta = cfg.beta();
  const double width = static_cast<double>(cfg.kernel_width);
  const double i0_beta = bessel_i0(beta);
  const int half = cfg.kernel_width / 2;

  std::vector<cdouble> grid(g.gy * g.gx, cdouble(0.0, 0.0));
  std::vector<double> wy(static_cast<std::size_t>(cfg.kernel_width));
  std::vector<double> wx(static_cast<std::size_t>(cfg.kernel_width));
  for (std::size_t m = 0; m < samples.size(); ++m) {
    const double gyk = ky[m] * static_cast<double>(g.gy);
    const double gxk = kx[m] * static_cast<double>(g.gx);
    const long ny0 = static_cast<long>(std::floor(gyk)) - half + 1;
    const long nx0 = static_cast<long>(std::floor(gxk)) - half + 1;
    for (int p = 0; p < cfg.kernel_width; ++p) {
      wy[static_cast<std::size_t>(p)] =
          kb_kernel(gyk - static_cast<double>(ny0 + p), width, beta, i0_beta);
      wx[static_cast<std::size_t>(p)] =
          kb_kernel(gxk - static_cast<double>(nx0 + p), width, beta, i0_beta);
    }
    for (int py = 0; py < cfg.kernel_width; ++py) {
      const std::size_t row = wrap_index(ny0 + py, g.gy);
      const cdouble vy = wy[static_cast<std::size_t>(py)] * samples[m];
      for (int px = 0; px < cfg.kernel_width; ++px) {
        const std::size_t col = wrap_index(nx0 + px, g.gx);
        grid[row * g.gx + col] += wx[static_cast<std::size_t>(px)] * vy;
      }
    }
  }

  apply_centering_signs(grid, g.gy, g.gx);
  run_fft(grid, g.gy, g.gx, FFTW_BACKWARD);

  ComplexImage out(h, w, 1);
  for (std::size_t i = 0; i < h; ++i) {
    const std::size_t row = static_cast<std::size_t>(static_cast<long>(i) + g.off_y);
    for (std::size_t j = 0; j < w; ++j) {
      const std::size_t col = static_cast<std::size_t>(static_cast<long>(j) + g.off_x);
      out.at(i, j, 0) = grid[row * g.gx + col] * (g.deapod_y[i] * g.deapod_x[j]);
    }
  }
  return out;
}

}  // namespace pnpmri
