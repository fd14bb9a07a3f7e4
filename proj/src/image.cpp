#include "xfer/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>
#include <string>

#include <png.h>

#include "xfer/error.hpp"

namespace xfer {
namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open image '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct PngReader {
  const std::vector<unsigned char>* bytes;
  std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
  auto* r = static_cast<PngReader*>(png_get_io_ptr(png));
  if (r->pos + len > r->bytes->size()) png_error(png, "unexpected end of PNG data");
  std::memcpy(out, r->bytes->data() + r->pos, len);
  r->pos += len;
}

Image decode_png(const std::vector<unsigned char>& bytes, const std::string& name) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!png) throw InputError("libpng initialization failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw InputError("libpng initialization failed");
  }
  Image image;
  std::vector<png_byte> raw;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw InputError("cannot decode PNG '" + name + "'");
  }
  PngReader reader{&bytes, 0};
  png_set_read_fn(png, &reader, png_read_from_memory);
  png_read_info(png, info);

  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);

  const auto w = png_get_image_width(png, info);
  const auto h = png_get_image_height(png, info);
  const auto rowbytes = png_get_rowbytes(png, info);
  raw.resize(rowbytes * h);
  rows.resize(h);
  for (png_uint_32 y = 0; y < h; ++y) rows[y] = raw.data() + y * rowbytes;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);

  image = Image(h, w);
  for (std::size_t i = 0; i < image.pixels.size(); ++i) image.pixels[i] = raw[i] / 255.0;
  return image;
}

Image decode_ppm(const std::vector<unsigned char>& bytes, const std::string& name) {
  const bool binary = bytes[1] == '6';
  std::size_t pos = 2;
  auto next_token = [&]() -> long {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    std::size_t start = pos;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) ++pos;
    if (start == pos) throw InputError("malformed PPM header in '" + name + "'");
    return std::stol(std::string(bytes.begin() + start, bytes.begin() + pos));
  };
  const long w = next_token();
  const long h = next_token();
  const long maxval = next_token();
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535)
    throw InputError("invalid PPM dimensions in '" + name + "'");
  Image image(h, w);
  const std::size_t n = image.pixels.size();
  if (binary) {
    ++pos;  // single whitespace before raster
    const std::size_t sample_bytes = maxval < 256 ? 1 : 2;
    if (bytes.size() < pos + n * sample_bytes) throw InputError("truncated PPM raster in '" + name + "'");
    for (std::size_t i = 0; i < n; ++i) {
      unsigned v = sample_bytes == 1 ? bytes[pos + i] : (bytes[pos + 2 * i] << 8) | bytes[pos + 2 * i + 1];
      image.pixels[i] = static_cast<double>(v) / maxval;
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = next_token();
      if (v > maxval) throw InputError("PPM sample exceeds maxval in '" + name + "'");
      image.pixels[i] = static_cast<double>(v) / maxval;
    }
  }
  return image;
}

unsigned char to_byte(double v) {
  return static_cast<unsigned char>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

}  // namespace

Image load_image(const std::filesystem::path& path) {
  const auto bytes = read_all(path);
  static constexpr unsigned char kPngSig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPngSig, 8) == 0) return decode_png(bytes, path.string());
  if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '6' || bytes[1] == '3'))
    return decode_ppm(bytes, path.string());
  throw InputError("unsupported image format '" + path.string() + "' (PNG and PPM only)");
}

void save_ppm(const Image& image, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot write '" + path.string() + "'");
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (double v : image.pixels) out.put(static_cast<char>(to_byte(v)));
  if (!out) throw WriteError("failed writing '" + path.string() + "'");
}

void save_png(const Image& image, const std::filesystem::path& path) {
  std::unique_ptr<FILE, int (*)(FILE*)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  if (!fp) throw WriteError("cannot write '" + path.string() + "'");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, nullptr);
    throw WriteError("libpng initialization failed");
  }
  std::vector<png_byte> raw(image.pixels.size());
  std::transform(image.pixels.begin(), image.pixels.end(), raw.begin(), to_byte);
  std::vector<png_bytep> rows(image.height);
  for (std::size_t y = 0; y < image.height; ++y) rows[y] = raw.data() + y * image.width * 3;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw WriteError("failed encoding PNG '" + path.string() + "'");
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, image.width, image.height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

}  // namespace xfer
