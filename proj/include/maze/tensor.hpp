#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace maze {

// Dense channels x height x width array, row-major within each channel.
// Inputs and targets hold unit-interval values; logits are unconstrained.
template <typename T>
struct TensorT {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<T> data;

  TensorT() = default;
  TensorT(int c, int h, int w)
      : channels(c),
        height(h),
        width(w),
        data(static_cast<std::size_t>(c) * static_cast<std::size_t>(h) * static_cast<std::size_t>(w),
             T(0)) {}

  std::size_t plane_size() const {
    return static_cast<std::size_t>(height) * static_cast<std::size_t>(width);
  }

  T* plane(int c) { return data.data() + static_cast<std::size_t>(c) * plane_size(); }
  const T* plane(int c) const { return data.data() + static_cast<std::size_t>(c) * plane_size(); }

  T& at(int c, int y, int x) {
    return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
                 static_cast<std::size_t>(y)) *
                    static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }
  const T& at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(height) +
                 static_cast<std::size_t>(y)) *
                    static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)];
  }

  bool same_shape(const TensorT& o) const {
    return channels == o.channels && height == o.height && width == o.width;
  }

  bool operator==(const TensorT&) const = default;
};

using ImageTensor = TensorT<float>;

TensorT<double> widen(const ImageTensor& t);
ImageTensor narrow(const TensorT<double>& t);

// Portable pixmap text export for human inspection and golden tests:
// P2 for single-channel images, P3 for 3-channel, maxval 255.
std::string to_pixmap(const ImageTensor& image);
void write_pixmap(const ImageTensor& image, const std::filesystem::path& path);
ImageTensor read_pixmap(const std::filesystem::path& path);

// Raw tensor interchange: 16-byte header ("MZTB", u32 channels, u32 height,
// u32 width, all little-endian) followed by row-major 32-bit floats.
void write_tensor(const ImageTensor& image, const std::filesystem::path& path);
ImageTensor read_tensor(const std::filesystem::path& path);

}  // namespace maze
