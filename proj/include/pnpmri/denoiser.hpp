#pragma once

#include <array>
#include <string>

#include "pnpmri/types.hpp"

namespace pnpmri {

/// Real tensor, (batch, channels, rows, cols), row-major.
struct Tensor4 {
  std::size_t n = 0, c = 0, h = 0, w = 0;
  std::vector<double> data;

  Tensor4() = default;
  Tensor4(std::size_t n_, std::size_t c_, std::size_t h_, std::size_t w_)
      : n(n_), c(c_), h(h_), w(w_), data(n_ * c_ * h_ * w_, 0.0) {}

  double& at(std::size_t b, std::size_t ch, std::size_t i, std::size_t j) {
    return data[((b * c + ch) * h + i) * w + j];
  }
  double at(std::size_t b, std::size_t ch, std::size_t i, std::size_t j) const {
    return data[((b * c + ch) * h + i) * w + j];
  }
  std::size_t size() const { return data.size(); }
};

enum class LayerKind : std::uint32_t {
  conv = 1,          // 3x3 (or any odd size), stride 1, zero pad, size-preserving
  relu = 2,
  avgpool = 3,       // 2x2, stride 2
  upsample = 4,      // 2x nearest neighbor
  concat = 5,        // append the output of layer dims[0] on the channel axis
  residual_add = 6,  // add the network input; must be the last layer
};

struct Layer {
  LayerKind kind;
  std::array<std::uint32_t, 4> dims{};  // conv: (out, in, kh, kw); concat: (src, 0, 0, 0)
  std::vector<double> weights;          // conv only, out*in*kh*kw
  std::vector<double> bias;             // conv only, out
};

/// An ordered layer list executed sequentially; each layer consumes the
/// previous output (layer 0 consumes the network input). Skip connections are
/// expressed by concat layers referencing an earlier layer's output.
struct DenoiserModel {
  std::vector<Layer> layers;

  std::size_t io_channels() const;       // input channels of the first conv
  std::size_t required_divisor() const;  // 2^(number of avgpool layers)
  std::size_t parameter_count() const;
  void validate() const;
};

struct ArchSpec {
  std::size_t levels = 2;         // number of pool/upsample stages
  std::size_t base_channels = 16;
  std::size_t io_channels = 2;    // 2*T for complex T-phase stacks
};

/// UNet-style residual network: per-level conv+ReLU encoders with channel
/// doubling, nearest-neighbor upsampling with concatenated skips, and a final
/// conv added back onto the input. He-scaled weights, zero biases.
DenoiserModel init_model(const ArchSpec& arch, std::uint64_t seed);

/// Model whose body ends in an all-zero conv, so forward(x) == x exactly.
DenoiserModel make_identity_model(std::size_t io_channels);

/// Per-layer activations recorded by forward for use in backward.
struct ForwardTrace {
  Tensor4 input;
  std::vector<Tensor4> outputs;
};

Tensor4 forward(const DenoiserModel& model, const Tensor4& x, ForwardTrace* trace = nullptr);

/// Per-layer parameter gradients, aligned with model.layers.
struct Gradients {
  std::vector<std::vector<double>> weights, bias;

  void accumulate(const Gradients& other, double scale);
};

Gradients make_zero_gradients(const DenoiserModel& model);

/// Reverse-mode gradients for the recorded forward pass. grad_input, when
/// non-null, receives dL/dx.
Gradients backward(const DenoiserModel& model, const ForwardTrace& trace, const Tensor4& grad_out,
                   Tensor4* grad_input = nullptr);

/// Packs (real, imag) phase planes into 2T channels, reflection-pads to the
/// model's divisibility requirement, runs forward, crops, and unpacks.
ComplexImage denoise_image(const DenoiserModel& model, const ComplexImage& img);

Tensor4 pack_image(const ComplexImage& img);
ComplexImage unpack_image(const Tensor4& x, std::size_t h, std::size_t w);
Tensor4 reflect_pad(const Tensor4& x, std::size_t divisor);

void save_model(const DenoiserModel& model, const std::string& path);
DenoiserModel load_model(const std::string& path);

/// FNV-1a over the float32 serialization of all parameters.
std::uint64_t model_checksum(const DenoiserModel& model);

}  // namespace pnpmri
