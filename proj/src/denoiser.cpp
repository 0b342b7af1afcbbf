#include "pnpmri/denoiser.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "pnpmri/rng.hpp"

namespace pnpmri {

namespace {

constexpr char kMagic[4] = {'M', 'S', 'N', 'T'};
constexpr std::uint32_t kVersion = 1;

bool is_conv(const Layer& l) { return l.kind == LayerKind::conv; }

// ---- layer execution -------------------------------------------------------

// Zero-padded stride-1 convolution as shift-and-accumulate passes: each tap
// touches one interior rectangle with no per-pixel bounds checks, so the
// inner loops vectorize.
Tensor4 run_conv(const Layer& l, const Tensor4& x) {
  const std::size_t out_c = l.dims[0], in_c = l.dims[1];
  const std::size_t kh = l.dims[2], kw = l.dims[3];
  require(x.c == in_c, "conv: input channel mismatch");
  const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
  const long rows = static_cast<long>(x.h), cols = static_cast<long>(x.w);

  Tensor4 y(x.n, out_c, x.h, x.w);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t o = 0; o < out_c; ++o) {
      double* out0 = &y.data[((b * out_c + o) * x.h) * x.w];
      const double bias = l.bias[o];
      for (std::size_t idx = 0; idx < x.h * x.w; ++idx) out0[idx] = bias;
      for (std::size_t c = 0; c < in_c; ++c) {
        const double* in0 = &x.data[((b * in_c + c) * x.h) * x.w];
        for (std::size_t ki = 0; ki < kh; ++ki) {
          const long di = static_cast<long>(ki) - ph;
          const long i0 = std::max<long>(0, -di), i1 = std::min<long>(rows, rows - di);
          for (std::size_t kj = 0; kj < kw; ++kj) {
            const long dj = static_cast<long>(kj) - pw;
            const long j0 = std::max<long>(0, -dj), j1 = std::min<long>(cols, cols - dj);
            const double wgt = l.weights[((o * in_c + c) * kh + ki) * kw + kj];
            for (long i = i0; i < i1; ++i) {
              double* orow = out0 + i * cols;
              const double* irow = in0 + (i + di) * cols + dj;
              for (long j = j0; j < j1; ++j) orow[j] += wgt * irow[j];
            }
          }
        }
      }
    }
  }
  return y;
}

Tensor4 run_relu(const Tensor4& x) {
  Tensor4 y = x;
  for (auto& v : y.data) v = (v > 0.0) ? v : 0.0;
  return y;
}

Tensor4 run_avgpool(const Tensor4& x) {
  require(x.h % 2 == 0 && x.w % 2 == 0, "avgpool: spatial dims must be even");
  Tensor4 y(x.n, x.c, x.h / 2, x.w / 2);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t i = 0; i < y.h; ++i) {
        for (std::size_t j = 0; j < y.w; ++j) {
          y.at(b, c, i, j) = 0.25 * (x.at(b, c, 2 * i, 2 * j) + x.at(b, c, 2 * i, 2 * j + 1) +
                                     x.at(b, c, 2 * i + 1, 2 * j) + x.at(b, c, 2 * i + 1, 2 * j + 1));
        }
      }
    }
  }
  return y;
}

Tensor4 run_upsample(const Tensor4& x) {
  Tensor4 y(x.n, x.c, 2 * x.h, 2 * x.w);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t i = 0; i < y.h; ++i) {
        for (std::size_t j = 0; j < y.w; ++j) {
          y.at(b, c, i, j) = x.at(b, c, i / 2, j / 2);
        }
      }
    }
  }
  return y;
}

Tensor4 run_concat(const Tensor4& x, const Tensor4& skip) {
  require(x.n == skip.n && x.h == skip.h && x.w == skip.w,
          "concat: spatial shape mismatch with skip source");
  Tensor4 y(x.n, x.c + skip.c, x.h, x.w);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < y.c; ++c) {
      const Tensor4& src = (c < x.c) ? x : skip;
      const std::size_t sc = (c < x.c) ? c : c - x.c;
      std::memcpy(&y.data[((b * y.c + c) * y.h) * y.w], &src.data[((b * src.c + sc) * src.h) * src.w],
                  sizeof(double) * x.h * x.w);
    }
  }
  return y;
}

Tensor4 run_residual_add(const Tensor4& x, const Tensor4& input) {
  require(x.n == input.n && x.c == input.c && x.h == input.h && x.w == input.w,
          "residual_add: shape must match the network input");
  Tensor4 y = x;
  for (std::size_t i = 0; i < y.data.size(); ++i) y.data[i] += input.data[i];
  return y;
}

// ---- little-endian stream helpers ------------------------------------------

void write_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  if (!is) throw io_error("model file: truncated");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void write_f32(std::ostream& os, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  write_u32(os, bits);
}

float read_f32(std::istream& is) {
  const std::uint32_t bits = read_u32(is);
  float v;
  std::memcpy(&v, &bits, 4);
  return v;
}

void append_f32(std::vector<unsigned char>& buf, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  buf.push_back(static_cast<unsigned char>(bits));
  buf.push_back(static_cast<unsigned char>(bits >> 8));
  buf.push_back(static_cast<unsigned char>(bits >> 16));
  buf.push_back(static_cast<unsigned char>(bits >> 24));
}

}  // namespace

// ---- model structure ---------------------------------------------------------

std::size_t DenoiserModel::io_channels() const {
  for (const Layer& l : layers) {
    if (is_conv(l)) return l.dims[1];
  }
  return 0;
}

std::size_t DenoiserModel::required_divisor() const {
  std::size_t scale = 0, max_scale = 0;
  for (const Layer& l : layers) {
    if (l.kind == LayerKind::avgpool) ++scale;
    if (l.kind == LayerKind::upsample && scale > 0) --scale;
    max_scale = std::max(max_scale, scale);
  }
  return std::size_t{1} << max_scale;
}

std::size_t DenoiserModel::parameter_count() const {
  std::size_t n = 0;
  for (const Layer& l : layers) n += l.weights.size() + l.bias.size();
  return n;
}

void DenoiserModel::validate() const {
  require(!layers.empty(), "model: layer list is empty");
  require(layers.front().kind == LayerKind::conv, "model: first layer must be a conv");
  require(layers.back().kind == LayerKind::residual_add, "model: last layer must add the input");

  const std::size_t io = layers.front().dims[1];
  std::vector<std::size_t> out_ch(layers.size()), out_scale(layers.size());
  std::size_t ch = io, scale = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    switch (l.kind) {
      case LayerKind::conv: {
        require(l.dims[0] >= 1 && l.dims[1] == ch, "model: conv channel mismatch");
        require(l.dims[2] % 2 == 1 && l.dims[3] % 2 == 1 && l.dims[2] >= 1 && l.dims[3] >= 1,
                "model: conv kernels must have odd extents");
        const std::size_t want = static_cast<std::size_t>(l.dims[0]) * l.dims[1] * l.dims[2] * l.dims[3];
        require(l.weights.size() == want && l.bias.size() == l.dims[0],
                "model: conv parameter sizes inconsistent with dims");
        ch = l.dims[0];
        break;
      }
      case LayerKind::relu:
        require(l.weights.empty() && l.bias.empty(), "model: relu carries no parameters");
        break;
      case LayerKind::avgpool:
        require(l.weights.empty() && l.bias.empty(), "model: avgpool carries no parameters");
        ++scale;
        break;
      case LayerKind::upsample:
        require(l.weights.empty() && l.bias.empty(), "model: upsample carries no parameters");
        require(scale > 0, "model: upsample above the input resolution");
        --scale;
        break;
      case LayerKind::concat: {
        require(l.weights.empty() && l.bias.empty(), "model: concat carries no parameters");
        const std::size_t src = l.dims[0];
        require(src < i, "model: concat must reference an earlier layer");
        require(out_scale[src] == scale, "model: concat source resolution mismatch");
        ch += out_ch[src];
        break;
      }
      case LayerKind::residual_add:
        require(i + 1 == layers.size(), "model: residual_add must be the final layer");
        require(ch == io, "model: residual_add channel count must match the input");
        require(scale == 0, "model: residual_add resolution must match the input");
        break;
      default:
        throw std::invalid_argument("model: unknown layer kind");
    }
    out_ch[i] = ch;
    out_scale[i] = scale;
  }
}

// ---- construction ------------------------------------------------------------

namespace {

Layer conv_layer(std::size_t out, std::size_t in) {
  Layer l;
  l.kind = LayerKind::conv;
  l.dims = {static_cast<std::uint32_t>(out), static_cast<std::uint32_t>(in), 3, 3};
  l.weights.assign(out * in * 9, 0.0);
  l.bias.assign(out, 0.0);
  return l;
}

Layer plain_layer(LayerKind kind) {
  Layer l;
  l.kind = kind;
  return l;
}

Layer concat_layer(std::size_t src) {
  Layer l;
  l.kind = LayerKind::concat;
  l.dims[0] = static_cast<std::uint32_t>(src);
  return l;
}

}  // namespace

DenoiserModel init_model(const ArchSpec& arch, std::uint64_t seed) {
  require(arch.levels >= 1 && arch.levels <= 4, "init_model: levels must be in [1, 4]");
  require(arch.base_channels >= 1, "init_model: base_channels must be >= 1");
  require(arch.io_channels >= 1, "init_model: io_channels must be >= 1");

  DenoiserModel m;
  std::vector<std::size_t> skip_index(arch.levels);
  std::size_t ch = arch.io_channels;

  for (std::size_t lvl = 0; lvl < arch.levels; ++lvl) {
    const std::size_t want = arch.base_channels << lvl;
    m.layers.push_back(conv_layer(want, ch));
    m.layers.push_back(plain_layer(LayerKind::relu));
    m.layers.push_back(conv_layer(want, want));
    m.layers.push_back(plain_layer(LayerKind::relu));
    skip_index[lvl] = m.layers.size() - 1;
    m.layers.push_back(plain_layer(LayerKind::avgpool));
    ch = want;
  }

  const std::size_t bottom = arch.base_channels << arch.levels;
  m.layers.push_back(conv_layer(bottom, ch));
  m.layers.push_back(plain_layer(LayerKind::relu));
  m.layers.push_back(conv_layer(bottom, bottom));
  m.layers.push_back(plain_layer(LayerKind::relu));
  ch = bottom;

  for (std::size_t lvl = arch.levels; lvl-- > 0;) {
    const std::size_t want = arch.base_channels << lvl;
    m.layers.push_back(plain_layer(LayerKind::upsample));
    m.layers.push_back(concat_layer(skip_index[lvl]));
    m.layers.push_back(conv_layer(want, ch + want));
    m.layers.push_back(plain_layer(LayerKind::relu));
    m.layers.push_back(conv_layer(want, want));
    m.layers.push_back(plain_layer(LayerKind::relu));
    ch = want;
  }

  m.layers.push_back(conv_layer(arch.io_channels, ch));
  m.layers.push_back(plain_layer(LayerKind::residual_add));

  // He-scaled Gaussian weights, zero biases, drawn in layer order.
  Rng rng(seed);
  for (Layer& l : m.layers) {
    if (!is_conv(l)) continue;
    const double fan_in = static_cast<double>(l.dims[1]) * l.dims[2] * l.dims[3];
    const double scale = std::sqrt(2.0 / fan_in);
    for (auto& w : l.weights) w = scale * rng.normal();
  }
  m.validate();
  return m;
}

DenoiserModel make_identity_model(std::size_t io_channels) {
  DenoiserModel m;
  m.layers.push_back(conv_layer(io_channels, io_channels));  // all-zero parameters
  m.layers.push_back(plain_layer(LayerKind::residual_add));
  m.validate();
  return m;
}

// ---- forward / backward --------------------------------------------------------

Tensor4 forward(const DenoiserModel& model, const Tensor4& x, ForwardTrace* trace) {
  require(x.c == model.io_channels(), "forward: input channel count mismatch");
  require(x.h % model.required_divisor() == 0 && x.w % model.required_divisor() == 0,
          "forward: spatial dims must be divisible by the pooling depth");

  std::vector<Tensor4> outputs;
  outputs.reserve(model.layers.size());
  const Tensor4* cur = &x;
  for (const Layer& l : model.layers) {
    switch (l.kind) {
      case LayerKind::conv:
        outputs.push_back(run_conv(l, *cur));
        break;
      case LayerKind::relu:
        outputs.push_back(run_relu(*cur));
        break;
      case LayerKind::avgpool:
        outputs.push_back(run_avgpool(*cur));
        break;
      case LayerKind::upsample:
        outputs.push_back(run_upsample(*cur));
        break;
      case LayerKind::concat:
        outputs.push_back(run_concat(*cur, outputs[l.dims[0]]));
        break;
      case LayerKind::residual_add:
        outputs.push_back(run_residual_add(*cur, x));
        break;
      default:
        throw std::invalid_argument("forward: unknown layer kind");
    }
    cur = &outputs.back();
  }

  Tensor4 result = outputs.back();
  if (trace != nullptr) {
    trace->input = x;
    trace->outputs = std::move(outputs);
  }
  return result;
}

void Gradients::accumulate(const Gradients& other, double scale) {
  require(weights.size() == other.weights.size() && bias.size() == other.bias.size(),
          "gradients: layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    require(weights[l].size() == other.weights[l].size() && bias[l].size() == other.bias[l].size(),
            "gradients: parameter shape mismatch");
    for (std::size_t i = 0; i < weights[l].size(); ++i) weights[l][i] += scale * other.weights[l][i];
    for (std::size_t i = 0; i < bias[l].size(); ++i) bias[l][i] += scale * other.bias[l][i];
  }
}

Gradients make_zero_gradients(const DenoiserModel& model) {
  Gradients g;
  g.weights.resize(model.layers.size());
  g.bias.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    g.weights[l].assign(model.layers[l].weights.size(), 0.0);
    g.bias[l].assign(model.layers[l].bias.size(), 0.0);
  }
  return g;
}

Gradients backward(const DenoiserModel& model, const ForwardTrace& trace, const Tensor4& grad_out,
                   Tensor4* grad_input) {
  const std::size_t L = model.layers.size();
  require(trace.outputs.size() == L, "backward: trace does not match the model");
  require(grad_out.size() == trace.outputs.back().size(), "backward: grad_out shape mismatch");

  Gradients grads = make_zero_gradients(model);
  // grad wrt each layer's output; filled lazily to the matching shape.
  std::vector<Tensor4> gout(L);
  gout[L - 1] = grad_out;
  Tensor4 gx(trace.input.n, trace.input.c, trace.input.h, trace.input.w);

  auto ensure = [](Tensor4& g, const Tensor4& like) {
    if (g.size() == 0) g = Tensor4(like.n, like.c, like.h, like.w);
  };

  for (std::size_t idx = L; idx-- > 0;) {
    if (gout[idx].size() == 0) continue;  // no path reached this output
    const Layer& l = model.layers[idx];
    const Tensor4& g = gout[idx];
    const Tensor4& prev = (idx == 0) ? trace.input : trace.outputs[idx - 1];
    Tensor4* gprev = nullptr;
    if (idx == 0) {
      gprev = &gx;
    } else {
      ensure(gout[idx - 1], prev);
      gprev = &gout[idx - 1];
    }

    switch (l.kind) {
      case LayerKind::conv: {
        const std::size_t out_c = l.dims[0], in_c = l.dims[1];
        const std::size_t kh = l.dims[2], kw = l.dims[3];
        const long ph = static_cast<long>(kh / 2), pw = static_cast<long>(kw / 2);
        const long rows = static_cast<long>(g.h), cols = static_cast<long>(g.w);
        std::vector<double>& gw = grads.weights[idx];
        std::vector<double>& gb = grads.bias[idx];
        // Same rectangle decomposition as the forward pass: per tap, the
        // weight gradient is a shifted dot product and the input gradient a
        // shifted axpy, both over the tap's interior rectangle.
        for (std::size_t b = 0; b < g.n; ++b) {
          for (std::size_t o = 0; o < out_c; ++o) {
            const double* g0 = &g.data[((b * out_c + o) * g.h) * g.w];
            double bsum = 0.0;
            for (std::size_t idx2 = 0; idx2 < g.h * g.w; ++idx2) bsum += g0[idx2];
            gb[o] += bsum;
            for (std::size_t c = 0; c < in_c; ++c) {
              const double* p0 = &prev.data[((b * in_c + c) * prev.h) * prev.w];
              double* gp0 = &gprev->data[((b * in_c + c) * prev.h) * prev.w];
              for (std::size_t ki = 0; ki < kh; ++ki) {
                const long di = static_cast<long>(ki) - ph;
                const long i0 = std::max<long>(0, -di), i1 = std::min<long>(rows, rows - di);
                for (std::size_t kj = 0; kj < kw; ++kj) {
                  const long dj = static_cast<long>(kj) - pw;
                  const long j0 = std::max<long>(0, -dj), j1 = std::min<long>(cols, cols - dj);
                  const std::size_t widx = ((o * in_c + c) * kh + ki) * kw + kj;
                  const double wgt = l.weights[widx];
                  double wsum = 0.0;
                  for (long i = i0; i < i1; ++i) {
                    const double* grow = g0 + i * cols;
                    const double* prow = p0 + (i + di) * cols + dj;
                    double* gprow = gp0 + (i + di) * cols + dj;
                    for (long j = j0; j < j1; ++j) {
                      wsum += grow[j] * prow[j];
                      gprow[j] += wgt * grow[j];
                    }
                  }
                  gw[widx] += wsum;
                }
              }
            }
          }
        }
        break;
      }
      case LayerKind::relu:
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          if (prev.data[i] > 0.0) gprev->data[i] += g.data[i];
        }
        break;
      case LayerKind::avgpool:
        for (std::size_t b = 0; b < g.n; ++b) {
          for (std::size_t c = 0; c < g.c; ++c) {
            for (std::size_t i = 0; i < g.h; ++i) {
              for (std::size_t j = 0; j < g.w; ++j) {
                const double v = 0.25 * g.at(b, c, i, j);
                gprev->at(b, c, 2 * i, 2 * j) += v;
                gprev->at(b, c, 2 * i, 2 * j + 1) += v;
                gprev->at(b, c, 2 * i + 1, 2 * j) += v;
                gprev->at(b, c, 2 * i + 1, 2 * j + 1) += v;
              }
            }
          }
        }
        break;
      case LayerKind::upsample:
        for (std::size_t b = 0; b < g.n; ++b) {
          for (std::size_t c = 0; c < g.c; ++c) {
            for (std::size_t i = 0; i < g.h; ++i) {
              for (std::size_t j = 0; j < g.w; ++j) {
                gprev->at(b, c, i / 2, j / 2) += g.at(b, c, i, j);
              }
            }
          }
        }
        break;
      case LayerKind::concat: {
        const std::size_t src = l.dims[0];
        const Tensor4& skip = trace.outputs[src];
        ensure(gout[src], skip);
        for (std::size_t b = 0; b < g.n; ++b) {
          for (std::size_t c = 0; c < g.c; ++c) {
            Tensor4& tgt = (c < prev.c) ? *gprev : gout[src];
            const std::size_t tc = (c < prev.c) ? c : c - prev.c;
            for (std::size_t i = 0; i < g.h; ++i) {
              for (std::size_t j = 0; j < g.w; ++j) {
                tgt.at(b, tc, i, j) += g.at(b, c, i, j);
              }
            }
          }
        }
        break;
      }
      case LayerKind::residual_add:
        for (std::size_t i = 0; i < g.data.size(); ++i) {
          gprev->data[i] += g.data[i];
          gx.data[i] += g.data[i];
        }
        break;
      default:
        throw std::invalid_argument("backward: unknown layer kind");
    }
  }

  if (grad_input != nullptr) *grad_input = std::move(gx);
  return grads;
}

// ---- complex image plumbing ---------------------------------------------------

Tensor4 pack_image(const ComplexImage& img) {
  Tensor4 x(1, 2 * img.t, img.h, img.w);
  for (std::size_t t = 0; t < img.t; ++t) {
    for (std::size_t i = 0; i < img.h; ++i) {
      for (std::size_t j = 0; j < img.w; ++j) {
        x.at(0, 2 * t, i, j) = img.at(i, j, t).real();
        x.at(0, 2 * t + 1, i, j) = img.at(i, j, t).imag();
      }
    }
  }
  return x;
}

ComplexImage unpack_image(const Tensor4& x, std::size_t h, std::size_t w) {
  require(x.n == 1 && x.c % 2 == 0, "unpack_image: expected one batch item with 2T channels");
  require(x.h >= h && x.w >= w, "unpack_image: tensor smaller than the requested crop");
  ComplexImage img(h, w, x.c / 2);
  for (std::size_t t = 0; t < img.t; ++t) {
    for (std::size_t i = 0; i < h; ++i) {
      for (std::size_t j = 0; j < w; ++j) {
        img.at(i, j, t) = cdouble(x.at(0, 2 * t, i, j), x.at(0, 2 * t + 1, i, j));
      }
    }
  }
  return img;
}

Tensor4 reflect_pad(const Tensor4& x, std::size_t divisor) {
  require(divisor >= 1, "reflect_pad: divisor must be >= 1");
  const std::size_t hh = (x.h + divisor - 1) / divisor * divisor;
  const std::size_t ww = (x.w + divisor - 1) / divisor * divisor;
  if (hh == x.h && ww == x.w) return x;
  require(hh - x.h < x.h && ww - x.w < x.w, "reflect_pad: image too small for this divisor");

  // Mirror rows/cols about the last one (index H-1-k has image H-1+k).
  Tensor4 y(x.n, x.c, hh, ww);
  for (std::size_t b = 0; b < x.n; ++b) {
    for (std::size_t c = 0; c < x.c; ++c) {
      for (std::size_t i = 0; i < hh; ++i) {
        const std::size_t si = (i < x.h) ? i : 2 * x.h - 2 - i;
        for (std::size_t j = 0; j < ww; ++j) {
          const std::size_t sj = (j < x.w) ? j : 2 * x.w - 2 - j;
          y.at(b, c, i, j) = x.at(b, c, si, sj);
        }
      }
    }
  }
  return y;
}

ComplexImage denoise_image(const DenoiserModel& model, const ComplexImage& img) {
  require(2 * img.t == model.io_channels(), "denoise_image: phase count mismatch with model");
  const Tensor4 packed = pack_image(img);
  const Tensor4 padded = reflect_pad(packed, model.required_divisor());
  const Tensor4 out = forward(model, padded);
  return unpack_image(out, img.h, img.w);
}

// ---- serialization --------------------------------------------------------------

void save_model(const DenoiserModel& model, const std::string& path) {
  model.validate();
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot open model file for writing: " + path);
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, static_cast<std::uint32_t>(model.layers.size()));
  for (const Layer& l : model.layers) {
    write_u32(os, static_cast<std::uint32_t>(l.kind));
    for (std::uint32_t d : l.dims) write_u32(os, d);
    for (double w : l.weights) write_f32(os, static_cast<float>(w));
    for (double b : l.bias) write_f32(os, static_cast<float>(b));
  }
  if (!os) throw io_error("failed while writing model file: " + path);
}

DenoiserModel load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open model file: " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw io_error("model file: bad magic");
  if (read_u32(is) != kVersion) throw io_error("model file: unsupported version");

  const std::uint32_t count = read_u32(is);
  if (count == 0 || count > 4096) throw io_error("model file: implausible layer count");
  DenoiserModel m;
  m.layers.resize(count);
  for (Layer& l : m.layers) {
    const std::uint32_t kind = read_u32(is);
    if (kind < 1 || kind > 6) throw io_error("model file: unknown layer kind");
    l.kind = static_cast<LayerKind>(kind);
    for (auto& d : l.dims) d = read_u32(is);
    if (l.kind == LayerKind::conv) {
      const std::uint64_t want = static_cast<std::uint64_t>(l.dims[0]) * l.dims[1] * l.dims[2] * l.dims[3];
      if (l.dims[0] == 0 || want > (std::uint64_t{1} << 28)) {
        throw io_error("model file: implausible conv size");
      }
      l.weights.resize(want);
      l.bias.resize(l.dims[0]);
      for (auto& w : l.weights) w = read_f32(is);
      for (auto& b : l.bias) b = read_f32(is);
    }
  }
  try {
    m.validate();
  } catch (const std::invalid_argument& e) {
    throw io_error(std::string("model file: ") + e.what());
  }
  return m;
}

std::uint64_t model_checksum(const DenoiserModel& model) {
  std::vector<unsigned char> buf;
  buf.reserve(4 * model.parameter_count());
  for (const Layer& l : model.layers) {
    for (double w : l.weights) append_f32(buf, static_cast<float>(w));
    for (double b : l.bias) append_f32(buf, static_cast<float>(b));
  }
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char byte : buf) {
    h ^= byte;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace pnpmri
