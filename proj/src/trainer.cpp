#include "pnpmri/trainer.hpp"

#include <chrono>
#include <cmath>

#include "pnpmri/downsample.hpp"
#include "pnpmri/metrics.hpp"
#include "pnpmri/parallel.hpp"
#include "pnpmri/rng.hpp"

namespace pnpmri {

namespace {

struct SampleResult {
  double loss = 0.0;
  Gradients grads;
};

// Loss and gradient for one (input, target) pair. The target enters only as
// data: no gradient propagates through it.
SampleResult sample_loss(const DenoiserModel& model, const TrainingPair& pair, LossKind loss) {
  const std::size_t div = model.required_divisor();
  const Tensor4 input = reflect_pad(pack_image(pair.first), div);
  const Tensor4 target = reflect_pad(pack_image(pair.second), div);
  require(input.size() == target.size(), "train: pair images must share a shape");

  ForwardTrace trace;
  const Tensor4 pred = forward(model, input, &trace);
  const double inv_k = 1.0 / static_cast<double>(pred.size());

  SampleResult res;
  Tensor4 grad_out(pred.n, pred.c, pred.h, pred.w);
  if (loss == LossKind::l2) {
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
      const double d = pred.data[i] - target.data[i];
      res.loss += d * d * inv_k;
      grad_out.data[i] = 2.0 * d * inv_k;
    }
  } else {
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
      const double d = pred.data[i] - target.data[i];
      res.loss += std::abs(d) * inv_k;
      grad_out.data[i] = (d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0)) * inv_k;
    }
  }
  res.grads = backward(model, trace, grad_out);
  return res;
}

struct AdamState {
  std::vector<std::vector<double>> mw, vw, mb, vb;
  std::size_t step = 0;

  explicit AdamState(const DenoiserModel& model) {
    mw.resize(model.layers.size());
    vw.resize(model.layers.size());
    mb.resize(model.layers.size());
    vb.resize(model.layers.size());
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      mw[l].assign(model.layers[l].weights.size(), 0.0);
      vw[l].assign(model.layers[l].weights.size(), 0.0);
      mb[l].assign(model.layers[l].bias.size(), 0.0);
      vb[l].assign(model.layers[l].bias.size(), 0.0);
    }
  }
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEps = 1e-8;

void adam_update(std::vector<double>& p, std::vector<double>& m, std::vector<double>& v,
                 const std::vector<double>& g, double lr, double bc1, double bc2) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
    v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
    p[i] -= lr * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + kEps);
  }
}

void apply_step(DenoiserModel& model, const Gradients& grads, const TrainConfig& cfg,
                AdamState& adam) {
  if (cfg.optimizer == Optimizer::sgd) {
    for (std::size_t l = 0; l < model.layers.size(); ++l) {
      Layer& layer = model.layers[l];
      for (std::size_t i = 0; i < layer.weights.size(); ++i) layer.weights[i] -= cfg.lr * grads.weights[l][i];
      for (std::size_t i = 0; i < layer.bias.size(); ++i) layer.bias[i] -= cfg.lr * grads.bias[l][i];
    }
    return;
  }
  ++adam.step;
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(adam.step));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(adam.step));
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Layer& layer = model.layers[l];
    adam_update(layer.weights, adam.mw[l], adam.vw[l], grads.weights[l], cfg.lr, bc1, bc2);
    adam_update(layer.bias, adam.mb[l], adam.vb[l], grads.bias[l], cfg.lr, bc1, bc2);
  }
}

}  // namespace

std::vector<TrainingPair> build_training_set(const std::vector<ComplexImage>& zero_filled_subjects,
                                             std::size_t factor_n) {
  require(!zero_filled_subjects.empty(), "build_training_set: no subjects");
  std::vector<TrainingPair> pairs;
  for (const ComplexImage& subject : zero_filled_subjects) {
    const DownsampleSet set = multiscale_downsample(subject, factor_n);
    auto subject_pairs = training_pairs(set);
    for (auto& p : subject_pairs) pairs.push_back(std::move(p));
  }
  return pairs;
}

TrainReport train(DenoiserModel& model, const std::vector<TrainingPair>& pairs,
                  const TrainConfig& cfg) {
  cfg.validate();
  model.validate();
  require(!pairs.empty(), "train: empty training set");
  for (const TrainingPair& p : pairs) {
    require(p.first.h == p.second.h && p.first.w == p.second.w && p.first.t == p.second.t,
            "train: pair shape mismatch");
    require(2 * p.first.t == model.io_channels(), "train: pair phase count mismatch with model");
  }

  const auto start = std::chrono::steady_clock::now();
  const std::size_t count = pairs.size();
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i;

  Rng rng(cfg.seed);
  AdamState adam(model);
  TrainReport report;
  report.pair_count = count;
  std::size_t global_batch = 0;

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates with our own generator keeps the visit order identical on
    // every platform for a given seed.
    for (std::size_t i = count - 1; i > 0; --i) {
      const std::size_t j = rng.below(i + 1);
      std::swap(order[i], order[j]);
    }

    double epoch_sum = 0.0;
    for (std::size_t b0 = 0; b0 < count; b0 += cfg.batch_size) {
      const std::size_t batch = std::min(cfg.batch_size, count - b0);
      std::vector<SampleResult> results(batch);
      // Samples are independent; the reduction below runs in batch order so
      // the update is bitwise identical for any thread count.
      parallel_for(batch, [&](std::size_t k) {
        results[k] = sample_loss(model, pairs[order[b0 + k]], cfg.loss);
      });

      double batch_loss = 0.0;
      Gradients mean = make_zero_gradients(model);
      const double inv_b = 1.0 / static_cast<double>(batch);
      for (std::size_t k = 0; k < batch; ++k) {
        batch_loss += results[k].loss;
        mean.accumulate(results[k].grads, inv_b);
      }
      batch_loss *= inv_b;
      if (!std::isfinite(batch_loss)) {
        throw divergence_error("training loss became non-finite at epoch " +
                                   std::to_string(epoch) + ", batch " +
                                   std::to_string(b0 / cfg.batch_size),
                               global_batch);
      }
      apply_step(model, mean, cfg, adam);
      epoch_sum += batch_loss * static_cast<double>(batch);
      ++global_batch;
    }
    report.epoch_loss.push_back(epoch_sum / static_cast<double>(count));
  }

  report.final_loss = report.epoch_loss.back();
  report.model_checksum = model_checksum(model);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

double evaluate_denoiser(const DenoiserModel& model, const ComplexImage& zero_filled_val,
                         const ComplexImage& ground_truth) {
  const ComplexImage denoised = denoise_image(model, zero_filled_val);
  return psnr(denoised, ground_truth).psnr_db;
}

}  // namespace pnpmri
