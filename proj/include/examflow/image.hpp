// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstdint>
#include <vector>

namespace examflow {

/// Grayscale raster page, row-major, 0 = black, 255 = white.
struct PageImage {
  int width = 0;
  int height = 0;
  double dpi = 300.0;
  std::vector<std::uint8_t> pixels;

  PageImage() = default;
  PageImage(int w, int h, double resolution, std::uint8_t fill = 255);

  std::uint8_t at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  bool contains(int x, int y) const { return x >= 0 && y >= 0 && x < width && y < height; }

  double width_inches() const { return width / dpi; }
  double height_inches() const { return height / dpi; }

  /// Throws Error(InvalidImage) if the fields are inconsistent.
  void validate() const;

  bool operator==(const PageImage&) const = default;
};

inline int mm_to_px(double mm, double dpi) { return static_cast<int>(mm * dpi / 25.4 + 0.5); }

PageImage rotate180(const PageImage& img);
PageImage rotate90_cw(const PageImage& img);
PageImage rotate90_ccw(const PageImage& img);

/// Copies src onto dst with its top-left corner at (x, y), clipping at the edges.
void blit(PageImage& dst, const PageImage& src, int x, int y);

void fill_rect(PageImage& img, int x, int y, int w, int h, std::uint8_t value);

}  // namespace examflow
