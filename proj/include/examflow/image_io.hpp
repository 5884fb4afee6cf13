// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "examflow/image.hpp"

namespace examflow {

enum class ImageFormat { png, jpeg, unknown };

ImageFormat sniff_format(std::span<const std::uint8_t> bytes) noexcept;

/// Decodes PNG or JPEG into luminance. Color is reduced with Rec. 601 weights;
/// transparent pixels are composited onto white. The resolution comes from the
/// pHYs chunk / JFIF density when present, otherwise `fallback_dpi`.
/// Throws Error(InvalidImage).
PageImage decode_image(std::span<const std::uint8_t> bytes, double fallback_dpi = 300.0);
PageImage read_image(const std::filesystem::path& path, double fallback_dpi = 300.0);

struct PngOptions {
  int compression_level = 6;  // zlib 0-9
  bool huffman_only = false;  // Z_HUFFMAN_ONLY: much faster on noisy scans
  bool filter_rows = true;    // adaptive row filters; off = filter type None
};

/// 8-bit grayscale PNG with a pHYs chunk and no timestamp, so identical images
/// always produce identical bytes.
std::vector<std::uint8_t> encode_png(const PageImage& img, const PngOptions& options = {});
void write_png(const PageImage& img, const std::filesystem::path& path, const PngOptions& options = {});

struct JpegInfo {
  int width = 0;
  int height = 0;
  int components = 0;
  double dpi = 0;  // 0 when the file carries no density
};

/// Header-only inspection, used to embed JPEG bytes into PDFs untouched.
JpegInfo inspect_jpeg(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace examflow
