#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

namespace xfer {

// H x W x 3 RGB, channel values in [0,1], stored row-major HWC.
struct Image {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(std::size_t h, std::size_t w) : height(h), width(w), pixels(h * w * 3, 0.0) {}

  double& at(std::size_t y, std::size_t x, std::size_t c) { return pixels[(y * width + x) * 3 + c]; }
  double at(std::size_t y, std::size_t x, std::size_t c) const { return pixels[(y * width + x) * 3 + c]; }
  bool empty() const noexcept { return height == 0 || width == 0; }
};

// Decodes PNG or binary/ASCII PPM (chosen by content, not extension).
// Throws InputError on anything else.
Image load_image(const std::filesystem::path& path);

// 8-bit quantized output.
void save_png(const Image& image, const std::filesystem::path& path);
void save_ppm(const Image& image, const std::filesystem::path& path);

}  // namespace xfer
