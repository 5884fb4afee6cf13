// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/image_io.hpp"

#include <png.h>
#include <zlib.h>

#include <csetjmp>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>

// jpeglib.h needs size_t and FILE declared first.
#include <jpeglib.h>

#include "examflow/error.hpp"

namespace examflow {

namespace {

std::uint32_t be32(const std::uint8_t* p) {
  return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

// pHYs is not exposed by the simplified libpng read API, so walk the chunks.
double png_dpi(std::span<const std::uint8_t> bytes) {
  std::size_t pos = 8;
  while (pos + 12 <= bytes.size()) {
    const std::uint32_t len = be32(&bytes[pos]);
    if (pos + 12 + len > bytes.size()) break;
    const char* type = reinterpret_cast<const char*>(&bytes[pos + 4]);
    if (std::memcmp(type, "pHYs", 4) == 0 && len == 9) {
      const std::uint8_t* d = &bytes[pos + 8];
      const std::uint32_t ppu_x = be32(d);
      // pixels per metre only approximate a dpi value; 11811 ppm is 300 dpi
      if (d[8] == 1 && ppu_x > 0) {
        // pHYs stores whole pixels per metre; undo that rounding for integral dpi
        const double dpi = ppu_x * 0.0254;
        const double whole = std::round(dpi);
        return std::abs(dpi - whole) <= 0.5 * 0.0254 + 1e-9 ? whole : dpi;
      }
      return 0;
    }
    if (std::memcmp(type, "IDAT", 4) == 0) break;
    pos += 12 + len;
  }
  return 0;
}

PageImage decode_png(std::span<const std::uint8_t> bytes, double fallback_dpi) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw Error(Errc::InvalidImage, std::string("PNG: ") + image.message);

  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  png_color white{255, 255, 255};
  if (!png_image_finish_read(&image, &white, buf.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::InvalidImage, "PNG: " + msg);
  }

  double dpi = png_dpi(bytes);
  PageImage out(static_cast<int>(image.width), static_cast<int>(image.height), dpi > 0 ? dpi : fallback_dpi);
  if (channels == 1) {
    out.pixels = std::move(buf);
  } else {
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
      const double y = 0.299 * buf[3 * i] + 0.587 * buf[3 * i + 1] + 0.114 * buf[3 * i + 2];
      out.pixels[i] = static_cast<std::uint8_t>(y + 0.5);
    }
  }
  return out;
}

struct JpegErrorMgr {
  jpeg_error_mgr pub;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_on_error(j_common_ptr cinfo) {
  auto* err = reinterpret_cast<JpegErrorMgr*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

// Plain-C style: nothing with a destructor lives across the setjmp.
bool jpeg_decode_raw(const std::uint8_t* data, std::size_t size, bool header_only, JpegInfo* info,
                     std::uint8_t* (*alloc)(void*, std::size_t), void* ctx, char* message) {
  jpeg_decompress_struct cinfo;
  JpegErrorMgr err;
  cinfo.err = jpeg_std_error(&err.pub);
  err.pub.error_exit = jpeg_on_error;
  if (setjmp(err.jump)) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", err.message);
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, const_cast<unsigned char*>(data), static_cast<unsigned long>(size));
  jpeg_read_header(&cinfo, TRUE);
  info->width = static_cast<int>(cinfo.image_width);
  info->height = static_cast<int>(cinfo.image_height);
  info->components = cinfo.num_components;
  info->dpi = 0;
  if (cinfo.saw_JFIF_marker && cinfo.X_density > 0) {
    if (cinfo.density_unit == 1) info->dpi = cinfo.X_density;
    if (cinfo.density_unit == 2) info->dpi = cinfo.X_density * 2.54;
  }
  if (header_only) {
    jpeg_destroy_decompress(&cinfo);
    return true;
  }
  if (cinfo.jpeg_color_space == JCS_CMYK || cinfo.jpeg_color_space == JCS_YCCK) {
    std::snprintf(message, JMSG_LENGTH_MAX, "%s", "CMYK JPEG is not supported");
    jpeg_destroy_decompress(&cinfo);
    return false;
  }
  cinfo.out_color_space = JCS_GRAYSCALE;  // luma of YCbCr, i.e. Rec. 601
  jpeg_start_decompress(&cinfo);
  std::uint8_t* out = alloc(ctx, static_cast<std::size_t>(cinfo.output_width) * cinfo.output_height);
  while (cinfo.output_scanline < cinfo.output_height) {
    JSAMPROW row = out + static_cast<std::size_t>(cinfo.output_scanline) * cinfo.output_width;
    jpeg_read_scanlines(&cinfo, &row, 1);
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return true;
}

PageImage decode_jpeg(std::span<const std::uint8_t> bytes, double fallback_dpi) {
  JpegInfo info;
  std::vector<std::uint8_t> pixels;
  char message[JMSG_LENGTH_MAX] = {};
  auto alloc = [](void* ctx, std::size_t n) {
    auto* v = static_cast<std::vector<std::uint8_t>*>(ctx);
    v->resize(n);
    return v->data();
  };
  if (!jpeg_decode_raw(bytes.data(), bytes.size(), false, &info, alloc, &pixels, message))
    throw Error(Errc::InvalidImage, std::string("JPEG: ") + message);
  PageImage out;
  out.width = info.width;
  out.height = info.height;
  out.dpi = info.dpi > 0 ? info.dpi : fallback_dpi;
  out.pixels = std::move(pixels);
  out.validate();
  return out;
}

void png_on_error(png_structp png, png_const_charp msg) {
  auto* message = static_cast<std::string*>(png_get_error_ptr(png));
  // Only assigns into preallocated storage; see encode_png.
  message->assign(msg, std::min<std::size_t>(std::strlen(msg), message->capacity()));
  png_longjmp(png, 1);
}

void png_on_warning(png_structp, png_const_charp) {}

void png_on_write(png_structp png, png_bytep data, png_size_t length) {
  auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
  out->insert(out->end(), data, data + length);
}

void png_on_flush(png_structp) {}

bool png_encode_raw(const PageImage& img, const PngOptions& opt, std::vector<std::uint8_t>& out,
                    std::string& message) {
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &message, png_on_error, png_on_warning);
  if (!png) return false;
  png_infop info = png_create_info_struct(png);
  if (!info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    return false;
  }
  png_set_write_fn(png, &out, png_on_write, png_on_flush);
  png_set_IHDR(png, info, static_cast<png_uint_32>(img.width), static_cast<png_uint_32>(img.height), 8,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  const auto ppm = static_cast<png_uint_32>(img.dpi / 0.0254 + 0.5);
  png_set_pHYs(png, info, ppm, ppm, PNG_RESOLUTION_METER);
  png_set_compression_level(png, opt.compression_level);
  png_set_compression_strategy(png, opt.huffman_only ? Z_HUFFMAN_ONLY : Z_DEFAULT_STRATEGY);
  png_set_filter(png, PNG_FILTER_TYPE_BASE, opt.filter_rows ? PNG_ALL_FILTERS : PNG_FILTER_NONE);
  png_write_info(png, info);
  for (int y = 0; y < img.height; ++y) png_write_row(png, &img.pixels[static_cast<std::size_t>(y) * img.width]);
  png_write_end(png, info);
  png_destroy_write_struct(&png, &info);
  return true;
}

}  // namespace

ImageFormat sniff_format(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::uint8_t kPng[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), kPng, 8) == 0) return ImageFormat::png;
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return ImageFormat::jpeg;
  return ImageFormat::unknown;
}

PageImage decode_image(std::span<const std::uint8_t> bytes, double fallback_dpi) {
  switch (sniff_format(bytes)) {
    case ImageFormat::png: return decode_png(bytes, fallback_dpi);
    case ImageFormat::jpeg: return decode_jpeg(bytes, fallback_dpi);
    case ImageFormat::unknown: break;
  }
  throw Error(Errc::InvalidImage, "neither PNG nor JPEG");
}

PageImage read_image(const std::filesystem::path& path, double fallback_dpi) {
  const auto bytes = read_file(path);
  try {
    return decode_image(bytes, fallback_dpi);
  } catch (const Error& e) {
    throw Error(Errc::InvalidImage, path.string() + ": " + e.what());
  }
}

std::vector<std::uint8_t> encode_png(const PageImage& img, const PngOptions& options) {
  img.validate();
  std::vector<std::uint8_t> out;
  out.reserve(img.pixels.size() / 8 + 1024);
  std::string message;
  message.reserve(256);
  if (!png_encode_raw(img, options, out, message)) throw Error(Errc::InvalidImage, "PNG encode: " + message);
  return out;
}

void write_png(const PageImage& img, const std::filesystem::path& path, const PngOptions& options) {
  write_file_atomic(path, encode_png(img, options));
}

JpegInfo inspect_jpeg(std::span<const std::uint8_t> bytes) {
  if (sniff_format(bytes) != ImageFormat::jpeg) throw Error(Errc::InvalidImage, "not a JPEG stream");
  JpegInfo info;
  char message[JMSG_LENGTH_MAX] = {};
  if (!jpeg_decode_raw(bytes.data(), bytes.size(), true, &info, nullptr, nullptr, message))
    throw Error(Errc::InvalidImage, std::string("JPEG: ") + message);
  return info;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::Io, "read failed: " + path.string());
  return bytes;
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::OutputNotWritable, "cannot write " + tmp.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(Errc::OutputNotWritable, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::OutputNotWritable, "cannot rename into " + path.string() + ": " + ec.message());
}

}  // namespace examflow
