// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "examflow/image.hpp"

namespace examflow::pdf {

/// JPEG stream embedded as-is (DCTDecode); geometry comes from its header.
struct JpegBytes {
  std::vector<std::uint8_t> data;
  double dpi = 0;  // 0: use the header density, else 300
};

/// One page: a full-bleed image. The page size in points is pixels * 72 / dpi.
struct PageSource {
  std::variant<PageImage, JpegBytes> content;

  static PageSource from_image(PageImage img) { return {std::move(img)}; }
  static PageSource from_jpeg(std::vector<std::uint8_t> bytes, double dpi = 0) {
    return {JpegBytes{std::move(bytes), dpi}};
  }
};

struct OutlineEntry {
  std::string label;
  std::size_t page_index = 0;
};

/// Largest page dimension PDF readers accept, in points.
inline constexpr double kMaxPagePoints = 14400.0;

struct WriterOptions {
  int compression_level = 6;
};

/// Streaming PDF 1.4 writer. Pages are written as they are added, so a batch
/// never has to be held in memory. Objects are numbered deterministically:
/// 1 catalog, 2 page tree, then (page, contents, image) per page, then outline.
class Writer {
public:
  explicit Writer(std::ostream& sink, WriterOptions options = {});

  /// Throws Error(OversizePage) / Error(InvalidImage).
  void add_page(const PageSource& page);

  /// Writes page tree, outline, xref and trailer. Throws Error(EmptyDocument)
  /// without pages. Returns the total byte count.
  std::size_t finish(std::span<const OutlineEntry> outline = {});

  std::size_t page_count() const { return page_objects_.size(); }

private:
  int begin_object(int number);
  void end_object();
  void write(std::string_view s);
  void write(std::span<const std::uint8_t> bytes);

  std::ostream& sink_;
  WriterOptions options_;
  std::size_t offset_ = 0;
  std::vector<std::size_t> offsets_;  // by object number, 0 = unused
  std::vector<int> page_objects_;
  bool finished_ = false;
};

/// Whole document in one call.
std::size_t write_pdf(std::span<const PageSource> pages, std::span<const OutlineEntry> outline, std::ostream& out);

/// write_pdf into `path` through a temporary file and rename.
std::size_t write_pdf_file(std::span<const PageSource> pages, std::span<const OutlineEntry> outline,
                           const std::filesystem::path& path);

/// Formats a real for PDF content: fixed notation, at most 4 decimals, no
/// trailing zeros, independent of the global locale.
std::string format_number(double v);

}  // namespace examflow::pdf
