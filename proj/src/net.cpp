#include "maze/net.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

#include "maze/rng.hpp"

namespace maze::net {

namespace {

constexpr char kMagic[4] = {'M', 'Z', 'N', 'W'};
constexpr std::uint32_t kVersion = 1;

// Raster conventions recorded in every weights file so trained models are
// self-describing: cell size, padding, targets marking terminal cells, and
// the RGB/green-terminal channel order.
constexpr std::uint32_t kCellPixelsTag = 2;
constexpr std::uint32_t kPaddingTag = 3;
constexpr std::uint32_t kTargetMarksTerminals = 1;
constexpr std::uint32_t kChannelOrderRgbGreenTerminals = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
  put_u32(out, static_cast<std::uint32_t>(v & 0xffffffffull));
  put_u32(out, static_cast<std::uint32_t>(v >> 32));
}

void put_f32_block(std::ostream& out, const std::vector<float>& v) {
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(v.data()),
            static_cast<std::streamsize>(v.size() * sizeof(float)));
}

std::uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw FormatError("weights file truncated reading " + what);
  }
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

std::uint64_t get_u64(std::istream& in, const std::string& what) {
  const std::uint64_t lo = get_u32(in, what);
  const std::uint64_t hi = get_u32(in, what);
  return lo | (hi << 32);
}

void get_f32_block(std::istream& in, std::vector<float>& v, const std::string& what) {
  if (!in.read(reinterpret_cast<char*>(v.data()),
               static_cast<std::streamsize>(v.size() * sizeof(float)))) {
    throw FormatError("weights file truncated reading " + what);
  }
}

}  // namespace

std::pair<int, int> layer_shape(const NetworkConfig& config, int index) {
  const int w = config.width;
  switch (index) {
    case 0: return {w, config.input_channels};
    case 1: return {w, w + config.input_channels};
    case 2:
    case 3:
    case 4:
    case 5: return {w, w};
    case 6: return {config.head1(), w};
    case 7: return {config.head2(), config.head1()};
    case 8: return {2, config.head2()};
    default: throw ContractError("layer index out of range: " + std::to_string(index));
  }
}

NetworkWeights init_weights(const NetworkConfig& config, std::uint64_t seed) {
  config.validate();
  NetworkWeights w;
  w.config = config;
  w.meta.seed = seed;
  Rng rng(seed);
  for (int i = 0; i < kNumLayers; ++i) {
    const auto [out_ch, in_ch] = layer_shape(config, i);
    ConvLayerT<float> layer = ConvLayerT<float>::zeros(out_ch, in_ch, config.kernel);
    const double a = 1.0 / std::sqrt(static_cast<double>(in_ch) * config.kernel * config.kernel);
    for (float& v : layer.weights) v = static_cast<float>(rng.uniform_range(-a, a));
    for (float& v : layer.bias) v = static_cast<float>(rng.uniform_range(-a, a));
    w.layers.push_back(std::move(layer));
  }
  return w;
}

void validate_chain(const NetworkWeights& weights) {
  weights.config.validate();
  if (weights.layers.size() != kNumLayers) {
    throw FormatError("expected " + std::to_string(kNumLayers) + " layers, got " +
                      std::to_string(weights.layers.size()));
  }
  for (int i = 0; i < kNumLayers; ++i) {
    const auto [out_ch, in_ch] = layer_shape(weights.config, i);
    const ConvLayerT<float>& l = weights.layers[static_cast<std::size_t>(i)];
    if (l.out_ch != out_ch || l.in_ch != in_ch || l.k != weights.config.kernel) {
      throw FormatError("layer " + std::to_string(i) + " has shape " + std::to_string(l.out_ch) +
                        "x" + std::to_string(l.in_ch) + "x" + std::to_string(l.k) +
                        ", expected " + std::to_string(out_ch) + "x" + std::to_string(in_ch) + "x" +
                        std::to_string(weights.config.kernel));
    }
    const std::size_t want = static_cast<std::size_t>(out_ch) * static_cast<std::size_t>(in_ch) *
                             static_cast<std::size_t>(l.k) * static_cast<std::size_t>(l.k);
    if (l.weights.size() != want || l.bias.size() != static_cast<std::size_t>(out_ch)) {
      throw FormatError("layer " + std::to_string(i) + " has inconsistent buffer sizes");
    }
  }
}

void save_weights(const NetworkWeights& weights, const std::filesystem::path& path) {
  validate_chain(weights);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(weights.config.width));
  put_u32(out, static_cast<std::uint32_t>(weights.config.input_channels));
  put_u32(out, static_cast<std::uint32_t>(weights.config.kernel));
  put_u32(out, static_cast<std::uint32_t>(weights.config.rb_layers));
  put_u32(out, static_cast<std::uint32_t>(weights.config.head1()));
  put_u32(out, static_cast<std::uint32_t>(weights.config.head2()));
  put_u32(out, static_cast<std::uint32_t>(weights.config.rb_activation));
  put_u32(out, kCellPixelsTag);
  put_u32(out, kPaddingTag);
  put_u32(out, kTargetMarksTerminals);
  put_u32(out, kChannelOrderRgbGreenTerminals);
  put_u64(out, weights.meta.seed);
  put_u32(out, weights.meta.epoch);
  put_u32(out, static_cast<std::uint32_t>(weights.meta.note.size()));
  out.write(weights.meta.note.data(), static_cast<std::streamsize>(weights.meta.note.size()));
  for (const ConvLayerT<float>& l : weights.layers) {
    put_u32(out, static_cast<std::uint32_t>(l.out_ch));
    put_u32(out, static_cast<std::uint32_t>(l.in_ch));
    put_u32(out, static_cast<std::uint32_t>(l.k));
    put_f32_block(out, l.weights);
    put_f32_block(out, l.bias);
  }
}

NetworkWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open weights file: " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad weights magic");
  }
  const std::uint32_t version = get_u32(in, "version");
  if (version != kVersion) {
    throw FormatError(path.string() + ": unsupported weights version " + std::to_string(version));
  }

  NetworkWeights w;
  w.config.width = static_cast<int>(get_u32(in, "width"));
  w.config.input_channels = static_cast<int>(get_u32(in, "input_channels"));
  w.config.kernel = static_cast<int>(get_u32(in, "kernel"));
  w.config.rb_layers = static_cast<int>(get_u32(in, "rb_layers"));
  const std::uint32_t head1 = get_u32(in, "head1");
  const std::uint32_t head2 = get_u32(in, "head2");
  w.config.rb_activation = static_cast<RbActivation>(get_u32(in, "rb_activation"));
  if (get_u32(in, "cell_pixels") != kCellPixelsTag || get_u32(in, "padding") != kPaddingTag ||
      get_u32(in, "target_convention") != kTargetMarksTerminals ||
      get_u32(in, "channel_order") != kChannelOrderRgbGreenTerminals) {
    throw FormatError(path.string() + ": raster conventions do not match this build");
  }
  if (head1 != static_cast<std::uint32_t>(w.config.head1()) ||
      head2 != static_cast<std::uint32_t>(w.config.head2())) {
    throw FormatError(path.string() + ": head widths inconsistent with network width");
  }
  w.meta.seed = get_u64(in, "seed");
  w.meta.epoch = get_u32(in, "epoch");
  const std::uint32_t note_len = get_u32(in, "note length");
  if (note_len > (1u << 20)) throw FormatError(path.string() + ": implausible note length");
  w.meta.note.resize(note_len);
  if (note_len > 0 && !in.read(w.meta.note.data(), note_len)) {
    throw FormatError(path.string() + ": truncated provenance note");
  }

  for (int i = 0; i < kNumLayers; ++i) {
    ConvLayerT<float> l;
    l.out_ch = static_cast<int>(get_u32(in, "layer " + std::to_string(i) + " out_ch"));
    l.in_ch = static_cast<int>(get_u32(in, "layer " + std::to_string(i) + " in_ch"));
    l.k = static_cast<int>(get_u32(in, "layer " + std::to_string(i) + " kernel"));
    if (l.out_ch <= 0 || l.in_ch <= 0 || l.k <= 0 || l.out_ch > 65536 || l.in_ch > 65536 ||
        l.k > 63) {
      throw FormatError(path.string() + ": implausible dims in layer " + std::to_string(i));
    }
    l.weights.resize(static_cast<std::size_t>(l.out_ch) * static_cast<std::size_t>(l.in_ch) *
                     static_cast<std::size_t>(l.k) * static_cast<std::size_t>(l.k));
    l.bias.resize(static_cast<std::size_t>(l.out_ch));
    get_f32_block(in, l.weights, "layer " + std::to_string(i) + " weights");
    get_f32_block(in, l.bias, "layer " + std::to_string(i) + " bias");
    w.layers.push_back(std::move(l));
  }
  validate_chain(w);  // names the first layer whose shape breaks the chain
  return w;
}

LayerStack<double> widen_layers(const LayerStack<float>& layers) {
  LayerStack<double> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    ConvLayerT<double> d;
    d.out_ch = l.out_ch;
    d.in_ch = l.in_ch;
    d.k = l.k;
    d.weights.assign(l.weights.begin(), l.weights.end());
    d.bias.assign(l.bias.begin(), l.bias.end());
    out.push_back(std::move(d));
  }
  return out;
}

LayerStack<float> narrow_layers(const LayerStack<double>& layers) {
  LayerStack<float> out;
  out.reserve(layers.size());
  for (const auto& l : layers) {
    ConvLayerT<float> f;
    f.out_ch = l.out_ch;
    f.in_ch = l.in_ch;
    f.k = l.k;
    f.weights.reserve(l.weights.size());
    for (double v : l.weights) f.weights.push_back(static_cast<float>(v));
    f.bias.reserve(l.bias.size());
    for (double v : l.bias) f.bias.push_back(static_cast<float>(v));
    out.push_back(std::move(f));
  }
  return out;
}

ImageTensor argmax_image(const ImageTensor& logits) {
  if (logits.channels != 2) throw ContractError("argmax expects 2 logit channels");
  ImageTensor out(1, logits.height, logits.width);
  const float* c0 = logits.plane(0);
  const float* c1 = logits.plane(1);
  float* op = out.plane(0);
  for (std::size_t i = 0; i < out.plane_size(); ++i) {
    op[i] = (c1[i] > c0[i]) ? 1.0f : 0.0f;
  }
  return out;
}

ImageTensor conv2d(const ImageTensor& input, int layer_index, const NetworkWeights& weights) {
  if (layer_index < 0 || layer_index >= static_cast<int>(weights.layers.size())) {
    throw ContractError("layer index out of range: " + std::to_string(layer_index));
  }
  return conv_apply(input, weights.layers[static_cast<std::size_t>(layer_index)]);
}

ForwardResult forward(const ImageTensor& input, const NetworkWeights& weights, int iterations,
                      std::vector<int> checkpoints) {
  validate_chain(weights);
  if (iterations < 1) throw ContractError("forward requires at least one iteration");
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
  for (int c : checkpoints) {
    if (c < 1 || c > iterations) {
      throw ContractError("checkpoint " + std::to_string(c) + " outside [1, iterations]");
    }
  }

  ForwardResult result;
  ImageTensor state = project(input, weights.config, weights.layers);
  std::size_t next = 0;
  for (int i = 1; i <= iterations; ++i) {
    state = rb_iterate(input, state, weights.config, weights.layers);
    if (next < checkpoints.size() && checkpoints[next] == i) {
      ImageTensor logits = head(state, weights.config, weights.layers);
      result.checkpoints.push_back(i);
      result.predictions.push_back(argmax_image(logits));
      result.logits.push_back(std::move(logits));
      ++next;
    }
  }
  result.final_state = std::move(state);
  return result;
}

ForwardResult forward(const ImageTensor& input, const NetworkWeights& weights, int iterations) {
  return forward(input, weights, iterations, std::vector<int>{iterations});
}

}  // namespace maze::net
