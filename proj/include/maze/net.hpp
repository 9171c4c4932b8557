#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "maze/error.hpp"
#include "maze/tensor.hpp"

namespace maze::net {

enum class RbActivation : std::uint32_t { None = 0, Relu = 1 };

// Projection / recurrent / head stack of nine convolution layers. The head
// narrows as width -> width/4 -> width/16 -> 2 with floors of 8 and 4 so
// small desk-scale widths keep a usable head.
struct NetworkConfig {
  int width = 128;
  int input_channels = 3;
  int kernel = 3;
  int rb_layers = 5;
  RbActivation rb_activation = RbActivation::None;

  int head1() const { return std::max(width / 4, 8); }
  int head2() const { return std::max(width / 16, 4); }

  void validate() const {
    if (width < 8) throw ContractError("network width must be at least 8");
    if (kernel < 1 || kernel % 2 == 0) throw ContractError("kernel size must be odd");
    if (input_channels != 3) throw ContractError("input must have 3 channels");
    if (rb_layers != 5) throw ContractError("the recurrent block has 5 layers");
  }
};

inline constexpr int kNumLayers = 9;

// Expected (out_ch, in_ch) for layer `index` under `config`.
std::pair<int, int> layer_shape(const NetworkConfig& config, int index);

template <typename T>
struct ConvLayerT {
  int out_ch = 0;
  int in_ch = 0;
  int k = 0;
  std::vector<T> weights;  // [out][in][ky][kx]
  std::vector<T> bias;     // [out]

  static ConvLayerT zeros(int out, int in, int kernel) {
    ConvLayerT l;
    l.out_ch = out;
    l.in_ch = in;
    l.k = kernel;
    l.weights.assign(static_cast<std::size_t>(out) * static_cast<std::size_t>(in) *
                         static_cast<std::size_t>(kernel) * static_cast<std::size_t>(kernel),
                     T(0));
    l.bias.assign(static_cast<std::size_t>(out), T(0));
    return l;
  }
};

template <typename T>
using LayerStack = std::vector<ConvLayerT<T>>;

struct WeightsMetadata {
  std::uint64_t seed = 0;
  std::uint32_t epoch = 0;
  std::string note;
};

struct NetworkWeights {
  NetworkConfig config;
  WeightsMetadata meta;
  LayerStack<float> layers;  // exactly kNumLayers, chain-validated
};

// Fan-in-scaled uniform init (U(-a,a), a = 1/sqrt(in_ch*k*k)) for weights and
// biases, drawn deterministically from the seed.
NetworkWeights init_weights(const NetworkConfig& config, std::uint64_t seed);

void validate_chain(const NetworkWeights& weights);  // FormatError naming the layer

// "MZNW" weights file: magic, u32 version, config block, raster-convention
// block, provenance block, then per-layer dims and little-endian 32-bit
// floats. Roundtrips byte-exactly.
void save_weights(const NetworkWeights& weights, const std::filesystem::path& path);
NetworkWeights load_weights(const std::filesystem::path& path);

LayerStack<double> widen_layers(const LayerStack<float>& layers);
LayerStack<float> narrow_layers(const LayerStack<double>& layers);

// Stride-1 cross-correlation with zero padding k/2 and bias. The per-pixel
// accumulation order is fixed: bias first, then taps in (in_ch, kernel row
// top-to-bottom, kernel column left-to-right) order, independent of the
// pixel's position. The tiled inference path relies on this order so that
// sliced and whole-image runs are bit-identical.
template <typename T>
TensorT<T> conv_apply(const TensorT<T>& in, const ConvLayerT<T>& layer) {
  if (in.channels != layer.in_ch) {
    throw ContractError("conv input has " + std::to_string(in.channels) +
                        " channels, layer expects " + std::to_string(layer.in_ch));
  }
  const int h = in.height, w = in.width, k = layer.k, pad = k / 2;
  TensorT<T> out(layer.out_ch, h, w);
  for (int oc = 0; oc < layer.out_ch; ++oc) {
    T* op = out.plane(oc);
    const T b = layer.bias[static_cast<std::size_t>(oc)];
    for (std::size_t i = 0; i < out.plane_size(); ++i) op[i] = b;
    for (int ic = 0; ic < layer.in_ch; ++ic) {
      const T* ip = in.plane(ic);
      const T* wbase = layer.weights.data() +
                       (static_cast<std::size_t>(oc) * static_cast<std::size_t>(layer.in_ch) +
                        static_cast<std::size_t>(ic)) *
                           static_cast<std::size_t>(k) * static_cast<std::size_t>(k);
      for (int ky = 0; ky < k; ++ky) {
        const int dy = ky - pad;
        const int y0 = std::max(0, -dy), y1 = std::min(h, h - dy);
        for (int kx = 0; kx < k; ++kx) {
          const int dx = kx - pad;
          const int x0 = std::max(0, -dx), x1 = std::min(w, w - dx);
          const T wv = wbase[ky * k + kx];
          for (int y = y0; y < y1; ++y) {
            T* orow = op + static_cast<std::size_t>(y) * static_cast<std::size_t>(w);
            const T* irow = ip + static_cast<std::size_t>(y + dy) * static_cast<std::size_t>(w) + dx;
            for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
  return out;
}

template <typename T>
void relu_inplace(TensorT<T>& t) {
  for (T& v : t.data) v = std::max(v, T(0));
}

// channels = a.channels + b.channels, a's planes first.
template <typename T>
TensorT<T> concat_channels(const TensorT<T>& a, const TensorT<T>& b) {
  if (a.height != b.height || a.width != b.width) {
    throw ContractError("concat operands must share spatial dims");
  }
  TensorT<T> out(a.channels + b.channels, a.height, a.width);
  std::copy(a.data.begin(), a.data.end(), out.data.begin());
  std::copy(b.data.begin(), b.data.end(), out.data.begin() + static_cast<std::ptrdiff_t>(a.data.size()));
  return out;
}

// Spec'd forward pieces. The recurrent block runs without inter-layer
// activations by default; RbActivation::Relu inserts ReLU between its layers
// (after each of the first four convolutions, never after the last).
template <typename T>
TensorT<T> project(const TensorT<T>& input, const NetworkConfig& config, const LayerStack<T>& layers) {
  (void)config;
  TensorT<T> state = conv_apply(input, layers[0]);
  relu_inplace(state);
  return state;
}

template <typename T>
TensorT<T> rb_iterate(const TensorT<T>& input, const TensorT<T>& state, const NetworkConfig& config,
                      const LayerStack<T>& layers) {
  TensorT<T> x = concat_channels(state, input);
  for (int l = 1; l <= config.rb_layers; ++l) {
    x = conv_apply(x, layers[static_cast<std::size_t>(l)]);
    if (config.rb_activation == RbActivation::Relu && l < config.rb_layers) relu_inplace(x);
  }
  return x;
}

template <typename T>
TensorT<T> head(const TensorT<T>& state, const NetworkConfig& config, const LayerStack<T>& layers) {
  (void)config;
  TensorT<T> x = conv_apply(state, layers[6]);
  relu_inplace(x);
  x = conv_apply(x, layers[7]);
  relu_inplace(x);
  return conv_apply(x, layers[8]);
}

// Per-pixel class choice over the two logit channels; ties go to background.
ImageTensor argmax_image(const ImageTensor& logits);

// conv2d by layer index against a weights bundle (shape-checked).
ImageTensor conv2d(const ImageTensor& input, int layer_index, const NetworkWeights& weights);

struct ForwardResult {
  std::vector<int> checkpoints;           // sorted iteration indices
  std::vector<ImageTensor> logits;        // head output per checkpoint
  std::vector<ImageTensor> predictions;   // argmax per checkpoint
  ImageTensor final_state;
};

// Project once, iterate the recurrent block `iterations` times, apply the
// head at every requested checkpoint. Purely functional.
ForwardResult forward(const ImageTensor& input, const NetworkWeights& weights, int iterations,
                      std::vector<int> checkpoints);
ForwardResult forward(const ImageTensor& input, const NetworkWeights& weights, int iterations);

}  // namespace maze::net
