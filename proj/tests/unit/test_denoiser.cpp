#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "pnpmri/denoiser.hpp"
#include "pnpmri/rng.hpp"

using namespace pnpmri;

namespace {

Tensor4 random_tensor(std::size_t n, std::size_t c, std::size_t h, std::size_t w, Rng& rng) {
  Tensor4 x(n, c, h, w);
  for (double& v : x.data) v = rng.normal();
  return x;
}

ComplexImage random_image(std::size_t h, std::size_t w, std::size_t t, Rng& rng) {
  ComplexImage img(h, w, t);
  for (cdouble& v : img.data) v = cdouble(rng.normal(), rng.normal());
  return img;
}

// Two conv stages around a relu, closed by the residual connection: the tiny
// probe used for exhaustive finite-difference checks.
DenoiserModel make_probe_model(std::uint64_t seed) {
  DenoiserModel m = make_identity_model(4);
  m.layers.clear();
  Layer conv1, conv2, relu, res;
  conv1.kind = conv2.kind = LayerKind::conv;
  conv1.dims = {4, 4, 3, 3};
  conv2.dims = {4, 4, 3, 3};
  conv1.weights.resize(4 * 4 * 9);
  conv2.weights.resize(4 * 4 * 9);
  conv1.bias.resize(4);
  conv2.bias.resize(4);
  relu.kind = LayerKind::relu;
  res.kind = LayerKind::residual_add;
  Rng rng(seed);
  const double scale = std::sqrt(2.0 / 36.0);
  for (double& w : conv1.weights) w = scale * rng.normal();
  for (double& w : conv2.weights) w = scale * rng.normal();
  for (double& b : conv1.bias) b = 0.1 * rng.normal();
  for (double& b : conv2.bias) b = 0.1 * rng.normal();
  m.layers = {conv1, relu, conv2, res};
  m.validate();
  return m;
}

double weighted_sum(const Tensor4& out, const Tensor4& weights) {
  double s = 0.0;
  for (std::size_t i = 0; i < out.data.size(); ++i) s += out.data[i] * weights.data[i];
  return s;
}

}  // namespace

TEST_CASE("identity model reproduces its input exactly") {
  const DenoiserModel m = make_identity_model(4);
  Rng rng(1);
  const Tensor4 x = random_tensor(1, 4, 8, 8, rng);
  const Tensor4 y = forward(m, x);
  CHECK(y.data == x.data);
}

TEST_CASE("zero input stays zero through a freshly initialized model") {
  const DenoiserModel m = init_model(ArchSpec{2, 8, 4}, 3);
  const Tensor4 x(1, 4, 16, 16);
  const Tensor4 y = forward(m, x);
  for (double v : y.data) CHECK(v == 0.0);
}

TEST_CASE("forward is deterministic") {
  const DenoiserModel m = init_model(ArchSpec{2, 8, 2}, 5);
  Rng rng(2);
  const Tensor4 x = random_tensor(1, 2, 8, 8, rng);
  const Tensor4 a = forward(m, x);
  const Tensor4 b = forward(m, x);
  CHECK(a.data == b.data);
}

TEST_CASE("initialization is seed-deterministic with he-scaled weights and zero biases") {
  const ArchSpec arch{2, 16, 8};
  const DenoiserModel a = init_model(arch, 11);
  const DenoiserModel b = init_model(arch, 11);
  const DenoiserModel c = init_model(arch, 12);
  REQUIRE(a.layers.size() == b.layers.size());
  bool all_equal = true, any_differs = false;
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    all_equal = all_equal && a.layers[l].weights == b.layers[l].weights;
    any_differs = any_differs || a.layers[l].weights != c.layers[l].weights;
  }
  CHECK(all_equal);
  CHECK(any_differs);

  for (const Layer& l : a.layers) {
    for (double bias : l.bias) REQUIRE(bias == 0.0);
    if (l.kind != LayerKind::conv) continue;
    const double fan_in = static_cast<double>(l.dims[1]) * l.dims[2] * l.dims[3];
    if (fan_in < 144.0) continue;  // too few samples for a tight std estimate
    double sum = 0.0, sum2 = 0.0;
    for (double w : l.weights) {
      sum += w;
      sum2 += w * w;
    }
    const double mean = sum / static_cast<double>(l.weights.size());
    const double std_dev = std::sqrt(sum2 / static_cast<double>(l.weights.size()) - mean * mean);
    const double target = std::sqrt(2.0 / fan_in);
    CHECK(std::abs(std_dev - target) <= 0.2 * target);
  }
}

TEST_CASE("model bookkeeping reports channels, divisor, and parameter count") {
  const DenoiserModel m = init_model(ArchSpec{2, 16, 8}, 0);
  CHECK(m.io_channels() == 8);
  CHECK(m.required_divisor() == 4);

  const DenoiserModel probe = make_probe_model(0);
  CHECK(probe.io_channels() == 4);
  CHECK(probe.required_divisor() == 1);
  CHECK(probe.parameter_count() == 2 * (4 * 4 * 9 + 4));
}

TEST_CASE("backward matches finite differences on every probe parameter") {
  DenoiserModel m = make_probe_model(7);
  Rng rng(8);
  const Tensor4 x = random_tensor(1, 4, 8, 8, rng);
  const Tensor4 loss_w = random_tensor(1, 4, 8, 8, rng);  // fixed scalarization

  ForwardTrace trace;
  forward(m, x, &trace);
  Tensor4 grad_x;
  const Gradients grads = backward(m, trace, loss_w, &grad_x);

  const double eps = 1e-5;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    Layer& layer = m.layers[l];
    for (std::size_t isBias = 0; isBias < 2; ++isBias) {
      std::vector<double>& params = isBias ? layer.bias : layer.weights;
      const std::vector<double>& analytic = isBias ? grads.bias[l] : grads.weights[l];
      for (std::size_t p = 0; p < params.size(); ++p) {
        const double keep = params[p];
        params[p] = keep + eps;
        const double up = weighted_sum(forward(m, x), loss_w);
        params[p] = keep - eps;
        const double down = weighted_sum(forward(m, x), loss_w);
        params[p] = keep;
        const double fd = (up - down) / (2.0 * eps);
        REQUIRE(std::abs(fd - analytic[p]) <= 1e-4 * std::max(1.0, std::abs(fd)));
      }
    }
  }

  // Input entries follow the same contract.
  Tensor4 xp = x;
  for (std::size_t i = 0; i < xp.data.size(); i += 7) {
    const double keep = xp.data[i];
    xp.data[i] = keep + eps;
    const double up = weighted_sum(forward(m, xp), loss_w);
    xp.data[i] = keep - eps;
    const double down = weighted_sum(forward(m, xp), loss_w);
    xp.data[i] = keep;
    const double fd = (up - down) / (2.0 * eps);
    REQUIRE(std::abs(fd - grad_x.data[i]) <= 1e-4 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("zero output gradient produces zero parameter gradients") {
  const DenoiserModel m = init_model(ArchSpec{1, 4, 2}, 3);
  Rng rng(4);
  const Tensor4 x = random_tensor(1, 2, 8, 8, rng);
  ForwardTrace trace;
  forward(m, x, &trace);
  const Tensor4 zeros(1, 2, 8, 8);
  Tensor4 grad_x;
  const Gradients grads = backward(m, trace, zeros, &grad_x);
  for (const auto& wl : grads.weights)
    for (double v : wl) REQUIRE(v == 0.0);
  for (const auto& bl : grads.bias)
    for (double v : bl) REQUIRE(v == 0.0);
  for (double v : grad_x.data) REQUIRE(v == 0.0);
}

TEST_CASE("sum-of-outputs bias gradient of the final conv is the pixel count") {
  // For L = sum of all outputs, each final-conv bias feeds every pixel of its
  // channel once (the residual path bypasses the bias), so dL/db = H * W.
  DenoiserModel m = make_probe_model(9);
  Rng rng(10);
  const Tensor4 x = random_tensor(1, 4, 8, 8, rng);
  ForwardTrace trace;
  forward(m, x, &trace);
  Tensor4 ones(1, 4, 8, 8);
  for (double& v : ones.data) v = 1.0;
  const Gradients grads = backward(m, trace, ones);
  for (double gb : grads.bias[2]) CHECK(gb == 64.0);  // layer 2 is the final conv
}

TEST_CASE("denoise_image is the identity for the constructed zero-body model") {
  const DenoiserModel m = make_identity_model(8);
  Rng rng(5);
  const ComplexImage img = random_image(12, 10, 4, rng);
  const ComplexImage out = denoise_image(m, img);
  CHECK(out.data == img.data);
}

TEST_CASE("denoise_image preserves odd shapes through pad and crop") {
  const DenoiserModel m = init_model(ArchSpec{2, 4, 8}, 6);
  Rng rng(6);
  const ComplexImage img = random_image(63, 61, 4, rng);
  const ComplexImage out = denoise_image(m, img);
  CHECK(out.h == 63);
  CHECK(out.w == 61);
  CHECK(out.t == 4);
  REQUIRE(out.finite());
}

TEST_CASE("denoise_image rejects a phase count the model was not built for") {
  const DenoiserModel m = make_identity_model(4);  // expects T = 2
  Rng rng(7);
  const ComplexImage img = random_image(8, 8, 3, rng);
  CHECK_THROWS_AS(denoise_image(m, img), std::invalid_argument);
}

TEST_CASE("pack and unpack round trip the complex planes") {
  Rng rng(8);
  const ComplexImage img = random_image(6, 5, 3, rng);
  const Tensor4 packed = pack_image(img);
  REQUIRE(packed.c == 6);
  CHECK(packed.at(0, 0, 1, 2) == img.at(1, 2, 0).real());
  CHECK(packed.at(0, 1, 1, 2) == img.at(1, 2, 0).imag());
  CHECK(packed.at(0, 4, 3, 4) == img.at(3, 4, 2).real());
  const ComplexImage back = unpack_image(packed, 6, 5);
  CHECK(back.data == img.data);
}

TEST_CASE("reflect padding mirrors about the last row and column") {
  Tensor4 x(1, 1, 5, 6);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) x.at(0, 0, i, j) = 10.0 * static_cast<double>(i) + static_cast<double>(j);
  const Tensor4 y = reflect_pad(x, 4);
  REQUIRE(y.h == 8);
  REQUIRE(y.w == 8);
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 6; ++j) CHECK(y.at(0, 0, i, j) == x.at(0, 0, i, j));
  CHECK(y.at(0, 0, 5, 0) == x.at(0, 0, 3, 0));
  CHECK(y.at(0, 0, 6, 0) == x.at(0, 0, 2, 0));
  CHECK(y.at(0, 0, 7, 0) == x.at(0, 0, 1, 0));
  CHECK(y.at(0, 0, 0, 6) == x.at(0, 0, 0, 4));
  CHECK(y.at(0, 0, 0, 7) == x.at(0, 0, 0, 3));
  CHECK(y.at(0, 0, 7, 7) == x.at(0, 0, 1, 3));
}

TEST_CASE("forward rejects non-divisible inputs and wrong channel counts") {
  const DenoiserModel m = init_model(ArchSpec{2, 4, 2}, 1);
  const Tensor4 bad_dims(1, 2, 10, 10);  // 10 is not divisible by 4
  CHECK_THROWS_AS(forward(m, bad_dims), std::invalid_argument);
  const Tensor4 bad_ch(1, 4, 8, 8);
  CHECK_THROWS_AS(forward(m, bad_ch), std::invalid_argument);
}

TEST_CASE("structure validation rejects malformed layer lists") {
  DenoiserModel m = make_identity_model(2);

  DenoiserModel no_res = m;
  no_res.layers.pop_back();
  CHECK_THROWS_AS(no_res.validate(), std::invalid_argument);

  DenoiserModel bad_first = m;
  bad_first.layers.insert(bad_first.layers.begin(), Layer{LayerKind::relu, {}, {}, {}});
  CHECK_THROWS_AS(bad_first.validate(), std::invalid_argument);

  DenoiserModel even_kernel = m;
  even_kernel.layers[0].dims[2] = 2;
  even_kernel.layers[0].weights.resize(2 * 2 * 2 * 3);
  CHECK_THROWS_AS(even_kernel.validate(), std::invalid_argument);

  DenoiserModel bad_count = m;
  bad_count.layers[0].weights.pop_back();
  CHECK_THROWS_AS(bad_count.validate(), std::invalid_argument);

  DenoiserModel stray_upsample = m;
  stray_upsample.layers.insert(stray_upsample.layers.begin() + 1,
                               Layer{LayerKind::upsample, {}, {}, {}});
  CHECK_THROWS_AS(stray_upsample.validate(), std::invalid_argument);

  DenoiserModel fwd_concat = m;
  Layer cat;
  cat.kind = LayerKind::concat;
  cat.dims[0] = 5;  // out of range
  fwd_concat.layers.insert(fwd_concat.layers.begin() + 1, cat);
  CHECK_THROWS_AS(fwd_concat.validate(), std::invalid_argument);
}

TEST_CASE("model files round trip and reject corruption") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "pnpmri_model_test";
  fs::create_directories(dir);
  const std::string path = (dir / "model.msn").string();

  const DenoiserModel m = init_model(ArchSpec{2, 8, 4}, 21);
  save_model(m, path);

  // Parameters survive the float32 serialization bitwise: a second save of
  // the loaded model reproduces the file exactly, and the checksum (defined
  // over the float32 serialization) is unchanged.
  const DenoiserModel loaded = load_model(path);
  CHECK(model_checksum(loaded) == model_checksum(m));
  REQUIRE(loaded.layers.size() == m.layers.size());
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    REQUIRE(loaded.layers[l].kind == m.layers[l].kind);
    REQUIRE(loaded.layers[l].weights.size() == m.layers[l].weights.size());
    for (std::size_t i = 0; i < m.layers[l].weights.size(); ++i) {
      REQUIRE(loaded.layers[l].weights[i] == static_cast<double>(static_cast<float>(m.layers[l].weights[i])));
    }
  }
  const std::string path2 = (dir / "model2.msn").string();
  save_model(loaded, path2);
  std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
  const std::string bytes1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
  const std::string bytes2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
  CHECK(bytes1 == bytes2);

  // Size arithmetic: magic+version+count, 20 bytes of metadata per layer,
  // then 4 bytes per parameter.
  CHECK(bytes1.size() == 12 + 20 * m.layers.size() + 4 * m.parameter_count());

  // Corrupted magic and truncation are detected.
  std::string corrupted = bytes1;
  corrupted[0] = 'X';
  const std::string bad_path = (dir / "bad.msn").string();
  std::ofstream(bad_path, std::ios::binary) << corrupted;
  CHECK_THROWS_AS(load_model(bad_path), io_error);

  std::ofstream(bad_path, std::ios::binary) << bytes1.substr(0, bytes1.size() / 2);
  CHECK_THROWS_AS(load_model(bad_path), io_error);

  std::string bad_version = bytes1;
  bad_version[4] = 9;
  std::ofstream(bad_path, std::ios::binary) << bad_version;
  CHECK_THROWS_AS(load_model(bad_path), io_error);

  CHECK_THROWS_AS(load_model((dir / "missing.msn").string()), io_error);

  fs::remove_all(dir);
}

TEST_CASE("checksum distinguishes different parameter vectors") {
  const DenoiserModel a = init_model(ArchSpec{1, 4, 2}, 1);
  const DenoiserModel b = init_model(ArchSpec{1, 4, 2}, 2);
  CHECK(model_checksum(a) != model_checksum(b));
  CHECK(model_checksum(a) == model_checksum(a));
}
