#include "pnpmri/config.hpp"

#include <algorithm>
#include <fstream>

namespace pnpmri {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    require(pos == value.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' needs an unsigned integer, got '" +
                                value + "'");
  }
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    require(pos == value.size(), "trailing characters");
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + value + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "yes" || value == "on") return true;
  if (value == "0" || value == "false" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config: key '" + key + "' needs a boolean, got '" + value + "'");
}

std::vector<std::uint64_t> parse_u64_list(const std::string& key, const std::string& value) {
  std::vector<std::uint64_t> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    const std::string item =
        trim(value.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
    if (!item.empty()) out.push_back(parse_u64(key, item));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  if (out.empty()) {
    throw std::invalid_argument("config: key '" + key + "' needs a comma-separated list");
  }
  return out;
}

}  // namespace

std::string ExperimentConfig::resolved_model_path() const {
  return model_path.empty() ? data_dir + "/model.msn" : model_path;
}

std::string ExperimentConfig::resolved_loss_log_path() const {
  return loss_log_path.empty() ? data_dir + "/loss.log" : loss_log_path;
}

std::string ExperimentConfig::resolved_recon_path() const {
  return recon_path.empty() ? data_dir + "/recon.cimg" : recon_path;
}

std::string ExperimentConfig::resolved_trace_path() const {
  return trace_path.empty() ? data_dir + "/trace.txt" : trace_path;
}

std::string ExperimentConfig::subject_stem(std::uint64_t seed) const {
  return data_dir + "/subject_" + std::to_string(seed);
}

void ExperimentConfig::validate() const {
  phantom.validate();
  require(phantom.h % 2 == 0 && phantom.w % 2 == 0, "config: image dims must be even");
  require(phantom.h >= 16 && phantom.h <= 1024 && phantom.w >= 16 && phantom.w <= 1024,
          "config: image dims must lie in [16, 1024]");
  require(coils >= 1 && coils <= 64, "config: coils must lie in [1, 64]");
  require(spokes_per_phase >= 1 && spokes_per_phase <= 4096,
          "config: spokes_per_phase must lie in [1, 4096]");
  require(noise_sigma >= 0.0, "config: noise_sigma must be >= 0");
  nufft.validate();
  train.validate();
  solver.validate();
  require(!train_subjects.empty(), "config: need at least one training subject");
  for (std::size_t i = 0; i < train_subjects.size(); ++i) {
    require(train_subjects[i] != validation_subject,
            "config: validation subject must not appear in the training list");
    for (std::size_t j = i + 1; j < train_subjects.size(); ++j) {
      require(train_subjects[i] != train_subjects[j], "config: duplicate training subject");
    }
  }
  require(!data_dir.empty(), "config: data_dir must not be empty");
}

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "phantom") {
    if (value == "shepp_logan") {
      cfg.phantom.kind = PhantomKind::shepp_logan;
    } else if (value == "ellipse_dynamic") {
      cfg.phantom.kind = PhantomKind::ellipse_dynamic;
    } else {
      throw std::invalid_argument("config: unknown phantom '" + value + "'");
    }
  } else if (key == "height") {
    cfg.phantom.h = parse_u64(key, value);
  } else if (key == "width") {
    cfg.phantom.w = parse_u64(key, value);
  } else if (key == "phases") {
    cfg.phantom.t = parse_u64(key, value);
  } else if (key == "motion_amplitude") {
    cfg.phantom.motion_amplitude = parse_double(key, value);
  } else if (key == "seed") {
    cfg.phantom.seed = parse_u64(key, value);
  } else if (key == "coils") {
    cfg.coils = parse_u64(key, value);
  } else if (key == "spokes_per_phase") {
    cfg.spokes_per_phase = parse_u64(key, value);
  } else if (key == "scheme") {
    if (value == "golden_angle") {
      cfg.scheme = RadialScheme::golden_angle;
    } else if (value == "uniform") {
      cfg.scheme = RadialScheme::uniform;
    } else {
      throw std::invalid_argument("config: unknown scheme '" + value + "'");
    }
  } else if (key == "noise_sigma") {
    cfg.noise_sigma = parse_double(key, value);
  } else if (key == "apodization") {
    cfg.apodization = parse_bool(key, value);
  } else if (key == "oversampling") {
    cfg.nufft.oversampling = parse_double(key, value);
  } else if (key == "kernel_width") {
    cfg.nufft.kernel_width = static_cast<int>(parse_u64(key, value));
  } else if (key == "kernel_beta") {
    cfg.nufft.kernel_beta = parse_double(key, value);
  } else if (key == "epochs") {
    cfg.train.epochs = parse_u64(key, value);
  } else if (key == "batch_size") {
    cfg.train.batch_size = parse_u64(key, value);
  } else if (key == "lr") {
    cfg.train.lr = parse_double(key, value);
  } else if (key == "optimizer") {
    if (value == "adam") {
      cfg.train.optimizer = Optimizer::adam;
    } else if (value == "sgd") {
      cfg.train.optimizer = Optimizer::sgd;
    } else {
      throw std::invalid_argument("config: unknown optimizer '" + value + "'");
    }
  } else if (key == "loss") {
    if (value == "l2") {
      cfg.train.loss = LossKind::l2;
    } else if (value == "l1") {
      cfg.train.loss = LossKind::l1;
    } else {
      throw std::invalid_argument("config: unknown loss '" + value + "'");
    }
  } else if (key == "factor_n") {
    cfg.train.factor_n = parse_u64(key, value);
  } else if (key == "train_seed") {
    cfg.train.seed = parse_u64(key, value);
  } else if (key == "gamma") {
    cfg.solver.gamma = parse_double(key, value);
  } else if (key == "max_iters") {
    cfg.solver.max_iters = parse_u64(key, value);
  } else if (key == "accelerate") {
    cfg.solver.accelerate = parse_bool(key, value);
  } else if (key == "tol") {
    cfg.solver.tol = parse_double(key, value);
  } else if (key == "record_trace") {
    cfg.solver.record_trace = parse_bool(key, value);
  } else if (key == "train_subjects") {
    cfg.train_subjects = parse_u64_list(key, value);
  } else if (key == "validation_subject") {
    cfg.validation_subject = parse_u64(key, value);
  } else if (key == "data_dir") {
    cfg.data_dir = value;
  } else if (key == "model_path") {
    cfg.model_path = value;
  } else if (key == "loss_log_path") {
    cfg.loss_log_path = value;
  } else if (key == "recon_path") {
    cfg.recon_path = value;
  } else if (key == "trace_path") {
    cfg.trace_path = value;
  } else {
    throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw io_error("cannot open config file: " + path);

  ExperimentConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string text = trim(line);
    if (text.empty()) continue;
    const std::size_t eq = text.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not a key=value pair");
    }
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) + " has an empty key");
    }
    apply_config_line(cfg, key, value);
  }
  cfg.validate();
  return cfg;
}

}  // namespace pnpmri
