#include "voebench/png_io.hpp"

#include <fcntl.h>
#include <png.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>

#include "voebench/error.hpp"

namespace voebench {

namespace {

void on_png_error(png_structp, png_const_charp msg) {
  throw Error(ErrorCode::ParseError, std::string("png: ") + msg);
}
void on_png_warning(png_structp, png_const_charp) {}

void append_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* out = static_cast<Bytes*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + n);
}
void no_flush(png_structp) {}

struct ReadCursor {
  const Bytes* src;
  std::size_t pos;
};

void read_bytes(png_structp png, png_bytep data, png_size_t n) {
  auto* cur = static_cast<ReadCursor*>(png_get_io_ptr(png));
  if (cur->pos + n > cur->src->size()) png_error(png, "truncated stream");
  std::memcpy(data, cur->src->data() + cur->pos, n);
  cur->pos += n;
}

template <typename T>
Bytes encode(const Plane<T>& img, int width, int color_type) {
  constexpr int depth = sizeof(T) * 8;
  Bytes out;
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png_create_info_struct(png);
  try {
    png_set_write_fn(png, &out, append_bytes, no_flush);
    // Speed matters more than size for thousands of frames.
    png_set_compression_level(png, 1);
    png_set_filter(png, 0, PNG_FILTER_SUB);
    png_set_IHDR(png, info, width, static_cast<png_uint_32>(img.rows()), depth, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    if (depth == 16) png_set_swap(png);
    for (Eigen::Index r = 0; r < img.rows(); ++r)
      png_write_row(png, reinterpret_cast<png_const_bytep>(img.data() + r * img.cols()));
    png_write_end(png, nullptr);
  } catch (...) {
    png_destroy_write_struct(&png, &info);
    throw;
  }
  png_destroy_write_struct(&png, &info);
  return out;
}

template <typename T>
Plane<T> decode(const Bytes& bytes, int channels, int color_type) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) throw Error(ErrorCode::ParseError, "not a PNG stream");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, on_png_error, on_png_warning);
  png_infop info = png_create_info_struct(png);
  ReadCursor cur{&bytes, 0};
  Plane<T> img;
  try {
    png_set_read_fn(png, &cur, read_bytes);
    png_read_info(png, info);
    const int w = static_cast<int>(png_get_image_width(png, info));
    const int h = static_cast<int>(png_get_image_height(png, info));
    if (png_get_color_type(png, info) != color_type || png_get_bit_depth(png, info) != sizeof(T) * 8 ||
        png_get_interlace_type(png, info) != PNG_INTERLACE_NONE)
      throw Error(ErrorCode::ParseError, "unexpected PNG pixel format");
    if (sizeof(T) == 2) png_set_swap(png);
    img.resize(h, static_cast<Eigen::Index>(w) * channels);
    for (int r = 0; r < h; ++r) png_read_row(png, reinterpret_cast<png_bytep>(img.data() + r * img.cols()), nullptr);
    png_read_end(png, nullptr);
  } catch (...) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw;
  }
  png_destroy_read_struct(&png, &info, nullptr);
  return img;
}

}  // namespace

Bytes encode_png_rgb(const Plane<std::uint8_t>& rgb) {
  return encode(rgb, static_cast<int>(rgb.cols() / 3), PNG_COLOR_TYPE_RGB);
}
Bytes encode_png_gray8(const Plane<std::uint8_t>& img) {
  return encode(img, static_cast<int>(img.cols()), PNG_COLOR_TYPE_GRAY);
}
Bytes encode_png_gray16(const Plane<std::uint16_t>& img) {
  return encode(img, static_cast<int>(img.cols()), PNG_COLOR_TYPE_GRAY);
}

Plane<std::uint8_t> decode_png_rgb(const Bytes& png) { return decode<std::uint8_t>(png, 3, PNG_COLOR_TYPE_RGB); }
Plane<std::uint8_t> decode_png_gray8(const Bytes& png) { return decode<std::uint8_t>(png, 1, PNG_COLOR_TYPE_GRAY); }
Plane<std::uint16_t> decode_png_gray16(const Bytes& png) { return decode<std::uint16_t>(png, 1, PNG_COLOR_TYPE_GRAY); }

Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open " + path.string());
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read failed: " + path.string());
  return out;
}

// Plain POSIX calls: datasets are hundreds of thousands of small files and the stream
// layer adds measurable per-file overhead.
void write_file(const std::filesystem::path& path, std::string_view bytes) {
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error(ErrorCode::IoFailure, "write failed: " + path.string() + ": " + std::strerror(errno));
  const char* p = bytes.data();
  std::size_t left = bytes.size();
  while (left > 0) {
    const ssize_t n = ::write(fd, p, left);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      const int err = errno;
      ::close(fd);
      throw Error(ErrorCode::IoFailure, "write failed: " + path.string() + ": " + std::strerror(err));
    }
    p += n;
    left -= static_cast<std::size_t>(n);
  }
  if (::close(fd) != 0) throw Error(ErrorCode::IoFailure, "write failed: " + path.string() + ": " + std::strerror(errno));
}

void write_file(const std::filesystem::path& path, const Bytes& bytes) {
  write_file(path, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace voebench
