#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pnpmri/coils.hpp"
#include "pnpmri/denoiser.hpp"
#include "pnpmri/downsample.hpp"
#include "pnpmri/forward_model.hpp"
#include "pnpmri/io.hpp"
#include "pnpmri/metrics.hpp"
#include "pnpmri/parallel.hpp"
#include "pnpmri/phantom.hpp"
#include "pnpmri/solver.hpp"
#include "pnpmri/trajectory.hpp"

namespace py = pybind11;

namespace {

using pnpmri::cdouble;
using pnpmri::ComplexImage;
using pnpmri::Trajectory;

using ComplexArray = py::array_t<cdouble, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Images cross the boundary as (T, H, W) complex128; the C-contiguous layout
// matches ComplexImage exactly (phase slowest).
ComplexImage to_image(const ComplexArray& arr) {
  const py::buffer_info info = arr.request();
  std::size_t t = 1, h = 0, w = 0;
  if (info.ndim == 2) {
    h = static_cast<std::size_t>(info.shape[0]);
    w = static_cast<std::size_t>(info.shape[1]);
  } else if (info.ndim == 3) {
    t = static_cast<std::size_t>(info.shape[0]);
    h = static_cast<std::size_t>(info.shape[1]);
    w = static_cast<std::size_t>(info.shape[2]);
  } else {
    throw std::invalid_argument("expected a (H, W) or (T, H, W) complex array");
  }
  ComplexImage img(h, w, t);
  const auto* src = static_cast<const cdouble*>(info.ptr);
  std::copy(src, src + img.size(), img.data.begin());
  return img;
}

py::array from_image(const ComplexImage& img) {
  py::array_t<cdouble> arr({img.t, img.h, img.w});
  std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
  return std::move(arr);
}

pnpmri::CoilSensitivities to_coils(const ComplexArray& arr) {
  const py::buffer_info info = arr.request();
  if (info.ndim != 3) throw std::invalid_argument("expected a (C, H, W) complex array");
  pnpmri::CoilSensitivities maps(static_cast<std::size_t>(info.shape[0]),
                                 static_cast<std::size_t>(info.shape[1]),
                                 static_cast<std::size_t>(info.shape[2]));
  const auto* src = static_cast<const cdouble*>(info.ptr);
  std::copy(src, src + maps.data.size(), maps.data.begin());
  return maps;
}

py::array from_coils(const pnpmri::CoilSensitivities& maps) {
  py::array_t<cdouble> arr({maps.coils, maps.h, maps.w});
  std::copy(maps.data.begin(), maps.data.end(), arr.mutable_data());
  return std::move(arr);
}

pnpmri::KSpaceData to_kspace(const ComplexArray& arr) {
  const py::buffer_info info = arr.request();
  if (info.ndim != 3) throw std::invalid_argument("expected a (C, T, M) complex array");
  pnpmri::KSpaceData y(static_cast<std::size_t>(info.shape[0]),
                       static_cast<std::size_t>(info.shape[1]),
                       static_cast<std::size_t>(info.shape[2]));
  const auto* src = static_cast<const cdouble*>(info.ptr);
  std::copy(src, src + y.data.size(), y.data.begin());
  return y;
}

py::array from_kspace(const pnpmri::KSpaceData& y) {
  py::array_t<cdouble> arr({y.coils, y.phases, y.samples});
  std::copy(y.data.begin(), y.data.end(), arr.mutable_data());
  return std::move(arr);
}

std::vector<double> to_vector(const DoubleArray& arr) {
  const py::buffer_info info = arr.request();
  if (info.ndim != 1) throw std::invalid_argument("expected a 1-d float array");
  const auto* src = static_cast<const double*>(info.ptr);
  return std::vector<double>(src, src + info.shape[0]);
}

// Rebuilds a trajectory from (T, M) coordinate/weight arrays, the same shape
// the module hands out.
Trajectory to_trajectory(const DoubleArray& kx, const DoubleArray& ky, const DoubleArray& dcf) {
  const py::buffer_info ix = kx.request(), iy = ky.request(), id = dcf.request();
  if (ix.ndim != 2 || iy.ndim != 2 || id.ndim != 2 || ix.shape[0] != iy.shape[0] ||
      ix.shape[0] != id.shape[0] || ix.shape[1] != iy.shape[1] || ix.shape[1] != id.shape[1]) {
    throw std::invalid_argument("kx, ky, dcf must share a (T, M) shape");
  }
  Trajectory traj;
  traj.samples_per_spoke = 0;
  const std::size_t t = static_cast<std::size_t>(ix.shape[0]);
  const std::size_t m = static_cast<std::size_t>(ix.shape[1]);
  traj.phases.resize(t);
  const auto* px = static_cast<const double*>(ix.ptr);
  const auto* py_ = static_cast<const double*>(iy.ptr);
  const auto* pd = static_cast<const double*>(id.ptr);
  for (std::size_t i = 0; i < t; ++i) {
    traj.phases[i].kx.assign(px + i * m, px + (i + 1) * m);
    traj.phases[i].ky.assign(py_ + i * m, py_ + (i + 1) * m);
    traj.phases[i].dcf.assign(pd + i * m, pd + (i + 1) * m);
  }
  traj.validate();
  return traj;
}

py::array grid_2d(const std::vector<std::vector<double>>& rows) {
  const std::size_t t = rows.size(), m = rows.front().size();
  py::array_t<double> arr({t, m});
  auto* dst = arr.mutable_data();
  for (std::size_t i = 0; i < t; ++i) std::copy(rows[i].begin(), rows[i].end(), dst + i * m);
  return std::move(arr);
}

pnpmri::PhantomKind kind_from_string(const std::string& kind) {
  if (kind == "shepp_logan") return pnpmri::PhantomKind::shepp_logan;
  if (kind == "ellipse_dynamic") return pnpmri::PhantomKind::ellipse_dynamic;
  throw std::invalid_argument("phantom kind must be shepp_logan or ellipse_dynamic");
}

pnpmri::RadialScheme scheme_from_string(const std::string& scheme) {
  if (scheme == "golden_angle") return pnpmri::RadialScheme::golden_angle;
  if (scheme == "uniform") return pnpmri::RadialScheme::uniform;
  throw std::invalid_argument("scheme must be golden_angle or uniform");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "core operators: phantoms, radial NUFFT forward model, denoiser, PnP solver";

  py::register_exception<pnpmri::io_error>(m, "IoError");
  py::register_exception<pnpmri::divergence_error>(m, "DivergenceError");

  m.def("set_max_threads", &pnpmri::set_max_threads, py::arg("n"),
        "cap worker threads for data-parallel loops (results are identical for any value)");

  m.def(
      "make_phantom",
      [](const std::string& kind, std::size_t h, std::size_t w, std::size_t t, double amplitude,
         std::uint64_t seed) {
        pnpmri::PhantomSpec spec{kind_from_string(kind), h, w, t, amplitude, seed};
        return from_image(pnpmri::make_phantom(spec));
      },
      py::arg("kind"), py::arg("h"), py::arg("w"), py::arg("t") = 1,
      py::arg("motion_amplitude") = 0.0, py::arg("seed") = 0,
      "synthetic (T, H, W) phantom, real-valued in [0, 1]");

  m.def(
      "make_coil_maps",
      [](std::size_t h, std::size_t w, std::size_t coils) {
        return from_coils(pnpmri::make_coil_maps(h, w, coils));
      },
      py::arg("h"), py::arg("w"), py::arg("coils"), "(C, H, W) complex receive maps");

  m.def(
      "make_radial_trajectory",
      [](std::size_t h, std::size_t spokes, std::size_t phases, const std::string& scheme) {
        const Trajectory traj =
            pnpmri::make_radial_trajectory(h, spokes, phases, scheme_from_string(scheme));
        std::vector<std::vector<double>> kx, ky, dcf;
        for (const auto& ph : traj.phases) {
          kx.push_back(ph.kx);
          ky.push_back(ph.ky);
          dcf.push_back(ph.dcf);
        }
        return py::make_tuple(grid_2d(kx), grid_2d(ky), grid_2d(dcf));
      },
      py::arg("h"), py::arg("spokes_per_phase"), py::arg("phases"),
      py::arg("scheme") = "golden_angle", "(kx, ky, dcf) arrays of shape (T, 2*H*spokes)");

  m.def(
      "nufft_forward",
      [](const ComplexArray& img, const DoubleArray& kx, const DoubleArray& ky) {
        const auto out = pnpmri::nufft_forward(to_image(img), to_vector(kx), to_vector(ky), {});
        // Shape goes in as a container: the bare-count array_t constructor
        // derives strides from the runtime dtype, which a pybind11 older than
        // the installed numpy ABI misreads as 0.
        py::array_t<cdouble> arr(std::vector<py::ssize_t>{static_cast<py::ssize_t>(out.size())});
        std::copy(out.begin(), out.end(), arr.mutable_data());
        return arr;
      },
      py::arg("image"), py::arg("kx"), py::arg("ky"),
      "type-2 NUFFT of one (H, W) slice at unit-cube frequencies");

  m.def(
      "nufft_adjoint",
      [](const ComplexArray& samples, const DoubleArray& kx, const DoubleArray& ky, std::size_t h,
         std::size_t w) {
        const py::buffer_info info = samples.request();
        if (info.ndim != 1) throw std::invalid_argument("expected 1-d samples");
        const auto* src = static_cast<const cdouble*>(info.ptr);
        const std::vector<cdouble> s(src, src + info.shape[0]);
        return from_image(pnpmri::nufft_adjoint(s, to_vector(kx), to_vector(ky), h, w, {}));
      },
      py::arg("samples"), py::arg("kx"), py::arg("ky"), py::arg("h"), py::arg("w"),
      "exact adjoint of nufft_forward, returns (1, H, W)");

  m.def(
      "apply_forward_model",
      [](const ComplexArray& x, const ComplexArray& maps, const DoubleArray& kx,
         const DoubleArray& ky, const DoubleArray& dcf) {
        return from_kspace(pnpmri::apply_H(to_image(x), to_coils(maps),
                                           to_trajectory(kx, ky, dcf), {}));
      },
      py::arg("x"), py::arg("maps"), py::arg("kx"), py::arg("ky"), py::arg("dcf"),
      "multicoil radial measurements (C, T, M) of a (T, H, W) image");

  m.def(
      "simulate_measurement",
      [](const ComplexArray& x, const ComplexArray& maps, const DoubleArray& kx,
         const DoubleArray& ky, const DoubleArray& dcf, double noise_sigma, std::uint64_t seed) {
        return from_kspace(pnpmri::simulate_measurement(to_image(x), to_coils(maps),
                                                        to_trajectory(kx, ky, dcf), {},
                                                        noise_sigma, seed));
      },
      py::arg("x"), py::arg("maps"), py::arg("kx"), py::arg("ky"), py::arg("dcf"),
      py::arg("noise_sigma") = 0.0, py::arg("seed") = 0,
      "forward model plus seeded complex Gaussian noise");

  m.def(
      "zero_filled",
      [](const ComplexArray& y, const ComplexArray& maps, const DoubleArray& kx,
         const DoubleArray& ky, const DoubleArray& dcf, bool apodization) {
        return from_image(pnpmri::zero_filled_recon(to_kspace(y), to_coils(maps),
                                                    to_trajectory(kx, ky, dcf), {}, apodization));
      },
      py::arg("y"), py::arg("maps"), py::arg("kx"), py::arg("ky"), py::arg("dcf"),
      py::arg("apodization") = false,
      "density-compensated backprojection normalized by the coil sum of squares");

  m.def(
      "multiscale_downsample",
      [](const ComplexArray& img, std::size_t n) {
        const pnpmri::DownsampleSet set = pnpmri::multiscale_downsample(to_image(img), n);
        py::list out;
        for (const auto& v : set.variants) out.append(from_image(v));
        return out;
      },
      py::arg("image"), py::arg("n") = 2,
      "the n^2 stride-offset sub-images (row-major offset order)");

  m.def(
      "psnr",
      [](const ComplexArray& x, const ComplexArray& ref) {
        const pnpmri::MetricReport rep = pnpmri::psnr(to_image(x), to_image(ref));
        return py::make_tuple(rep.psnr_db, rep.mse, rep.peak);
      },
      py::arg("x"), py::arg("ref"), "(psnr_db, mse, peak) on magnitude images");

  py::class_<pnpmri::DenoiserModel>(m, "Model")
      .def_static("load", &pnpmri::load_model, py::arg("path"))
      .def_static(
          "initialize",
          [](std::size_t levels, std::size_t base_channels, std::size_t io_channels,
             std::uint64_t seed) {
            return pnpmri::init_model({levels, base_channels, io_channels}, seed);
          },
          py::arg("levels") = 2, py::arg("base_channels") = 16, py::arg("io_channels") = 2,
          py::arg("seed") = 0)
      .def_static("identity", &pnpmri::make_identity_model, py::arg("io_channels"))
      .def("save", [](const pnpmri::DenoiserModel& model,
                      const std::string& path) { pnpmri::save_model(model, path); },
           py::arg("path"))
      .def("denoise",
           [](const pnpmri::DenoiserModel& model, const ComplexArray& img) {
             return from_image(pnpmri::denoise_image(model, to_image(img)));
           },
           py::arg("image"))
      .def_property_readonly("checksum", &pnpmri::model_checksum)
      .def_property_readonly("parameter_count", &pnpmri::DenoiserModel::parameter_count)
      .def_property_readonly("io_channels", &pnpmri::DenoiserModel::io_channels);

  m.def(
      "reconstruct",
      [](const ComplexArray& y, const ComplexArray& maps, const DoubleArray& kx,
         const DoubleArray& ky, const DoubleArray& dcf, const pnpmri::DenoiserModel& model,
         double gamma, std::size_t max_iters, bool accelerate, double tol) {
        pnpmri::SolverConfig cfg;
        cfg.gamma = gamma;
        cfg.max_iters = max_iters;
        cfg.accelerate = accelerate;
        cfg.tol = tol;
        const pnpmri::ReconResult res = pnpmri::reconstruct(
            to_kspace(y), to_coils(maps), to_trajectory(kx, ky, dcf), {}, model, cfg);
        py::array_t<double> rel(
            std::vector<py::ssize_t>{static_cast<py::ssize_t>(res.trace.rel_change.size())});
        std::copy(res.trace.rel_change.begin(), res.trace.rel_change.end(), rel.mutable_data());
        return py::make_tuple(from_image(res.image), rel, res.iterations, res.gamma);
      },
      py::arg("y"), py::arg("maps"), py::arg("kx"), py::arg("ky"), py::arg("dcf"),
      py::arg("model"), py::arg("gamma") = 0.0, py::arg("max_iters") = 100,
      py::arg("accelerate") = true, py::arg("tol") = 1e-6,
      "accelerated plug-and-play reconstruction; returns (image, rel_change, iters, gamma)");

  m.def(
      "load_image", [](const std::string& path) { return from_image(pnpmri::load_image(path)); },
      py::arg("path"), "read a .cimg file as a (T, H, W) complex array");
  m.def(
      "save_image",
      [](const ComplexArray& img, const std::string& path) {
        pnpmri::save_image(to_image(img), path);
      },
      py::arg("image"), py::arg("path"), "write a (T, H, W) complex array as a .cimg file");
}
