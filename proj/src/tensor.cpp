#include "maze/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "maze/error.hpp"

namespace maze {

namespace {

constexpr char kTensorMagic[4] = {'M', 'Z', 'T', 'B'};

int to_255(float v) {
  const float clamped = std::clamp(v, 0.0f, 1.0f);
  return static_cast<int>(std::lround(clamped * 255.0f));
}

void put_u32(std::ofstream& out, std::uint32_t v) {
  char buf[4];
  for (int i = 0; i < 4; ++i) buf[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(buf, 4);
}

std::uint32_t get_u32(std::ifstream& in, const char* what) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw FormatError(std::string("tensor file truncated reading ") + what);
  }
  return static_cast<std::uint32_t>(buf[0]) | (static_cast<std::uint32_t>(buf[1]) << 8) |
         (static_cast<std::uint32_t>(buf[2]) << 16) | (static_cast<std::uint32_t>(buf[3]) << 24);
}

}  // namespace

TensorT<double> widen(const ImageTensor& t) {
  TensorT<double> out(t.channels, t.height, t.width);
  std::copy(t.data.begin(), t.data.end(), out.data.begin());
  return out;
}

ImageTensor narrow(const TensorT<double>& t) {
  ImageTensor out(t.channels, t.height, t.width);
  for (std::size_t i = 0; i < t.data.size(); ++i) out.data[i] = static_cast<float>(t.data[i]);
  return out;
}

std::string to_pixmap(const ImageTensor& image) {
  if (image.channels != 1 && image.channels != 3) {
    throw InputError("pixmap export supports 1 or 3 channels, got " +
                     std::to_string(image.channels));
  }
  std::ostringstream out;
  out << (image.channels == 1 ? "P2" : "P3") << "\n";
  out << image.width << " " << image.height << "\n255\n";
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      for (int c = 0; c < image.channels; ++c) {
        if (x != 0 || c != 0) out << " ";
        out << to_255(image.at(c, y, x));
      }
    }
    out << "\n";
  }
  return out.str();
}

void write_pixmap(const ImageTensor& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out << to_pixmap(image);
}

ImageTensor read_pixmap(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open pixmap: " + path.string());
  std::string magic;
  in >> magic;
  int channels = 0;
  if (magic == "P2") {
    channels = 1;
  } else if (magic == "P3") {
    channels = 3;
  } else {
    throw FormatError(path.string() + ": unsupported pixmap magic '" + magic + "'");
  }
  int w = 0, h = 0, maxval = 0;
  if (!(in >> w >> h >> maxval) || w <= 0 || h <= 0 || maxval <= 0) {
    throw FormatError(path.string() + ": malformed pixmap header");
  }
  ImageTensor img(channels, h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < channels; ++c) {
        int v = 0;
        if (!(in >> v)) throw FormatError(path.string() + ": truncated pixmap data");
        img.at(c, y, x) = static_cast<float>(v) / static_cast<float>(maxval);
      }
    }
  }
  return img;
}

void write_tensor(const ImageTensor& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot open for writing: " + path.string());
  out.write(kTensorMagic, 4);
  put_u32(out, static_cast<std::uint32_t>(image.channels));
  put_u32(out, static_cast<std::uint32_t>(image.height));
  put_u32(out, static_cast<std::uint32_t>(image.width));
  static_assert(sizeof(float) == 4);
  out.write(reinterpret_cast<const char*>(image.data.data()),
            static_cast<std::streamsize>(image.data.size() * sizeof(float)));
}

ImageTensor read_tensor(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open tensor file: " + path.string());
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kTensorMagic, 4) != 0) {
    throw FormatError(path.string() + ": bad tensor magic");
  }
  const std::uint32_t c = get_u32(in, "channels");
  const std::uint32_t h = get_u32(in, "height");
  const std::uint32_t w = get_u32(in, "width");
  if (c == 0 || h == 0 || w == 0 || c > 4096 || h > (1u << 20) || w > (1u << 20)) {
    throw FormatError(path.string() + ": implausible tensor dimensions");
  }
  ImageTensor img(static_cast<int>(c), static_cast<int>(h), static_cast<int>(w));
  if (!in.read(reinterpret_cast<char*>(img.data.data()),
               static_cast<std::streamsize>(img.data.size() * sizeof(float)))) {
    throw FormatError(path.string() + ": truncated tensor data");
  }
  return img;
}

}  // namespace maze
