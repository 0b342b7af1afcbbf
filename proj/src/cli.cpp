#include "pnpmri/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "pnpmri/coils.hpp"
#include "pnpmri/config.hpp"
#include "pnpmri/denoiser.hpp"
#include "pnpmri/forward_model.hpp"
#include "pnpmri/io.hpp"
#include "pnpmri/metrics.hpp"
#include "pnpmri/parallel.hpp"
#include "pnpmri/phantom.hpp"
#include "pnpmri/solver.hpp"
#include "pnpmri/trainer.hpp"

namespace pnpmri {

namespace {

namespace fs = std::filesystem;

constexpr double kPi = 3.1415926535897932384626433832795;

// Decorrelates each subject's measurement noise stream from its phantom seed.
constexpr std::uint64_t kNoiseSeedSalt = 0x9e3779b97f4a7c15ull;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_hex(std::uint64_t v) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void ensure_parent_dir(const std::string& path) {
  const fs::path dir = fs::path(path).parent_path();
  if (dir.empty()) return;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw io_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& text) {
  ensure_parent_dir(path);
  std::ofstream os(path);
  if (!os) throw io_error("cannot open for writing: " + path);
  os << text;
  if (!os) throw io_error("failed while writing: " + path);
}

struct CommonOpts {
  std::string config_path, out, mode;
  std::uint64_t seed = 0;
  int threads = 1;
  CLI::Option* config_opt = nullptr;
  CLI::Option* out_opt = nullptr;
  CLI::Option* mode_opt = nullptr;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;

  bool has_seed() const { return seed_opt->count() > 0; }
  bool has_out() const { return out_opt->count() > 0; }
};

void add_common(CLI::App* sub, CommonOpts& o) {
  o.config_opt = sub->add_option("--config", o.config_path, "key=value experiment file");
  o.seed_opt = sub->add_option("--seed", o.seed, "subject id / RNG seed override");
  o.mode_opt = sub->add_option("--mode", o.mode,
                               "reconstruction pipeline: zero_filled | denoiser_only | pnp");
  o.out_opt = sub->add_option("--out", o.out, "primary output path override");
  o.threads_opt = sub->add_option("--threads", o.threads, "worker thread cap (default 1)");
}

ExperimentConfig load_experiment(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (o.config_opt->count() > 0) cfg = parse_config_file(o.config_path);
  if (o.has_seed()) {
    cfg.phantom.seed = o.seed;
    cfg.train.seed = o.seed;
  }
  if (o.mode_opt->count() > 0) {
    require(o.mode == "zero_filled" || o.mode == "denoiser_only" || o.mode == "pnp",
            "--mode must be zero_filled, denoiser_only, or pnp");
  }
  if (o.threads_opt->count() > 0) {
    require(o.threads >= 1, "--threads must be >= 1");
    set_max_threads(o.threads);
  }
  cfg.validate();
  return cfg;
}

int cmd_simulate(const CommonOpts& o) {
  ExperimentConfig cfg = load_experiment(o);
  if (o.has_out()) cfg.data_dir = o.out;
  cfg.validate();

  std::error_code ec;
  fs::create_directories(cfg.data_dir, ec);
  if (ec) throw io_error("cannot create directory " + cfg.data_dir + ": " + ec.message());

  const CoilSensitivities maps = make_coil_maps(cfg.phantom.h, cfg.phantom.w, cfg.coils);
  const Trajectory traj =
      make_radial_trajectory(cfg.phantom.h, cfg.spokes_per_phase, cfg.phantom.t, cfg.scheme);
  save_coils(maps, cfg.data_dir + "/coils.coil");
  save_trajectory(traj, cfg.data_dir + "/traj.trj");

  std::vector<std::uint64_t> subjects;
  if (o.has_seed()) {
    subjects.push_back(cfg.phantom.seed);
  } else {
    subjects = cfg.train_subjects;
    subjects.push_back(cfg.validation_subject);
  }

  for (std::uint64_t id : subjects) {
    PhantomSpec spec = cfg.phantom;
    spec.seed = id;
    const ComplexImage truth = make_phantom(spec);
    const KSpaceData y = simulate_measurement(truth, maps, traj, cfg.nufft, cfg.noise_sigma,
                                              id ^ kNoiseSeedSalt);
    const ComplexImage zf = zero_filled_recon(y, maps, traj, cfg.nufft, cfg.apodization);
    const std::string stem = cfg.subject_stem(id);
    save_image(truth, stem + "_truth.cimg");
    save_kspace(y, stem + ".ksp");
    save_image(zf, stem + "_zf.cimg");
  }

  // Nyquist spoke count for radial sampling of an H-wide image is ceil(pi/2 * H).
  const double nyquist = std::ceil(kPi / 2.0 * static_cast<double>(cfg.phantom.h));
  const double factor = nyquist / static_cast<double>(cfg.spokes_per_phase);
  char factor_buf[64];
  std::snprintf(factor_buf, sizeof(factor_buf), "%.4g", factor);

  std::cout << "simulated " << subjects.size() << " subject(s) under " << cfg.data_dir << " ("
            << cfg.phantom.h << "x" << cfg.phantom.w << ", " << cfg.phantom.t << " phases, "
            << cfg.coils << " coils, " << cfg.spokes_per_phase << " spokes/phase, noise "
            << fmt17(cfg.noise_sigma) << ")\n"
            << "undersampling factor " << factor_buf << "x ("
            << static_cast<std::size_t>(nyquist) << " Nyquist spokes / " << cfg.spokes_per_phase
            << " acquired)\n";
  return kExitOk;
}

int cmd_train(const CommonOpts& o) {
  ExperimentConfig cfg = load_experiment(o);
  if (o.has_out()) cfg.model_path = o.out;

  std::vector<ComplexImage> subjects;
  std::vector<double> scales;
  subjects.reserve(cfg.train_subjects.size());
  for (std::uint64_t id : cfg.train_subjects) {
    ComplexImage zf = load_image(cfg.subject_stem(id) + "_zf.cimg");
    require(subjects.empty() || (zf.h == subjects.front().h && zf.w == subjects.front().w &&
                                 zf.t == subjects.front().t),
            "train: training subjects must share one shape");
    double peak = 0.0;
    for (const cdouble& v : zf.data) peak = std::max(peak, std::abs(v));
    require(peak > 0.0, "train: a training subject is identically zero");
    scales.push_back(peak);
    subjects.push_back(std::move(zf));
  }

  const std::vector<TrainingPair> pairs = build_training_set(subjects, cfg.train.factor_n);
  const ArchSpec arch{2, 16, 2 * subjects.front().t};
  DenoiserModel model = init_model(arch, cfg.train.seed);
  TrainReport report = train(model, pairs, cfg.train);
  report.subject_scales = scales;

  const std::string model_path = cfg.resolved_model_path();
  ensure_parent_dir(model_path);
  save_model(model, model_path);

  std::string log;
  for (std::size_t e = 0; e < report.epoch_loss.size(); ++e) {
    log += std::to_string(e) + " " + fmt17(report.epoch_loss[e]) + "\n";
  }
  write_text(cfg.resolved_loss_log_path(), log);

  std::cout << "trained " << report.pair_count << " pairs for " << cfg.train.epochs
            << " epochs in " << fmt17(report.wall_seconds) << " s\n"
            << "final loss " << fmt17(report.final_loss) << "\n"
            << "model checksum " << fmt_hex(report.model_checksum) << "\n"
            << "model written to " << model_path << "\n";
  return kExitOk;
}

int cmd_reconstruct(const CommonOpts& o) {
  ExperimentConfig cfg = load_experiment(o);
  if (o.has_out()) cfg.recon_path = o.out;
  const std::string mode = o.mode_opt->count() > 0 ? o.mode : std::string("pnp");
  const std::uint64_t subject = o.has_seed() ? cfg.phantom.seed : cfg.validation_subject;

  const CoilSensitivities maps = load_coils(cfg.data_dir + "/coils.coil");
  const Trajectory traj = load_trajectory(cfg.data_dir + "/traj.trj");
  const KSpaceData y = load_kspace(cfg.subject_stem(subject) + ".ksp");

  std::string summary;
  ComplexImage image;
  if (mode == "zero_filled") {
    image = zero_filled_recon(y, maps, traj, cfg.nufft, cfg.apodization);
    summary = "zero-filled adjoint reconstruction";
  } else if (mode == "denoiser_only") {
    const DenoiserModel model = load_model(cfg.resolved_model_path());
    image = denoise_image(model, zero_filled_recon(y, maps, traj, cfg.nufft, cfg.apodization));
    summary = "single denoiser pass on the zero-filled image";
  } else {
    const DenoiserModel model = load_model(cfg.resolved_model_path());
    const ReconResult result = reconstruct(y, maps, traj, cfg.nufft, model, cfg.solver);
    image = result.image;

    std::string trace;
    for (std::size_t k = 0; k < result.trace.rel_change.size(); ++k) {
      trace += std::to_string(k + 1) + "\t" + fmt17(result.trace.rel_change[k]);
      if (k < result.trace.datafit.size()) trace += "\t" + fmt17(result.trace.datafit[k]);
      trace += "\t" + fmt17(result.trace.q[k]) + "\n";
    }
    write_text(cfg.resolved_trace_path(), trace);

    summary = std::to_string(result.iterations) + " iterations, gamma " + fmt17(result.gamma) +
              ", final rel change " + fmt17(result.trace.rel_change.back()) + "\ntrace written to " +
              cfg.resolved_trace_path();
  }

  ensure_parent_dir(cfg.resolved_recon_path());
  save_image(image, cfg.resolved_recon_path());

  std::cout << "reconstructed subject " << subject << " (" << mode << "): " << summary << "\n"
            << "image written to " << cfg.resolved_recon_path() << "\n";
  return kExitOk;
}

int cmd_evaluate(const CommonOpts& o) {
  const ExperimentConfig cfg = load_experiment(o);
  const std::uint64_t subject = o.has_seed() ? cfg.phantom.seed : cfg.validation_subject;

  const ComplexImage truth = load_image(cfg.subject_stem(subject) + "_truth.cimg");
  const ComplexImage zf = load_image(cfg.subject_stem(subject) + "_zf.cimg");
  const ComplexImage recon = load_image(cfg.resolved_recon_path());

  std::string text;
  text += "zero_filled " + psnr(zf, truth).to_line() + "\n";
  text += "recon " + psnr(recon, truth).to_line() + "\n";
  const std::vector<MetricReport> per_phase = psnr_per_phase(recon, truth);
  for (std::size_t t = 0; t < per_phase.size(); ++t) {
    text += "phase " + std::to_string(t) + " " + per_phase[t].to_line() + "\n";
  }

  std::cout << text;
  if (o.has_out()) write_text(o.out, text);
  return kExitOk;
}

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"self-supervised dynamic radial MRI reconstruction toolkit"};
  app.require_subcommand(1);

  CommonOpts sim_opts, train_opts, recon_opts, eval_opts;
  CLI::App* sim =
      app.add_subcommand("simulate", "generate phantom, coil, trajectory, and k-space files");
  add_common(sim, sim_opts);
  CLI::App* tr = app.add_subcommand("train", "fit the denoiser on zero-filled training subjects");
  add_common(tr, train_opts);
  CLI::App* rec = app.add_subcommand("reconstruct", "run the plug-and-play solver on one subject");
  add_common(rec, recon_opts);
  CLI::App* ev = app.add_subcommand("evaluate", "report PSNR of a reconstruction against truth");
  add_common(ev, eval_opts);

  std::vector<std::string> storage;
  storage.reserve(args.size() + 1);
  storage.push_back("pnpmri");
  for (const std::string& a : args) storage.push_back(a);
  std::vector<const char*> argv;
  argv.reserve(storage.size());
  for (const std::string& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  if (sim->parsed()) return cmd_simulate(sim_opts);
  if (tr->parsed()) return cmd_train(train_opts);
  if (rec->parsed()) return cmd_reconstruct(recon_opts);
  if (ev->parsed()) return cmd_evaluate(eval_opts);
  return kExitValidation;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  try {
    return dispatch(args);
  } catch (const divergence_error& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const io_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace pnpmri
