// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/image.hpp"

#include <algorithm>
#include <cstring>
#include <string>

#include "examflow/error.hpp"

namespace examflow {

PageImage::PageImage(int w, int h, double resolution, std::uint8_t fill)
    : width(w), height(h), dpi(resolution), pixels(static_cast<std::size_t>(w) * h, fill) {
  validate();
}

void PageImage::validate() const {
  if (width <= 0 || height <= 0) throw Error(Errc::InvalidImage, "image dimensions must be positive");
  if (!(dpi > 0)) throw Error(Errc::InvalidImage, "resolution must be positive");
  if (pixels.size() != static_cast<std::size_t>(width) * height)
    throw Error(Errc::InvalidImage, "pixel buffer holds " + std::to_string(pixels.size()) + " bytes, expected " +
                                        std::to_string(static_cast<std::size_t>(width) * height));
}

PageImage rotate180(const PageImage& img) {
  PageImage out = img;
  std::reverse(out.pixels.begin(), out.pixels.end());
  return out;
}

PageImage rotate90_cw(const PageImage& img) {
  PageImage out(img.height, img.width, img.dpi);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(img.height - 1 - y, x) = img.at(x, y);
  return out;
}

PageImage rotate90_ccw(const PageImage& img) {
  PageImage out(img.height, img.width, img.dpi);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x) out.at(y, img.width - 1 - x) = img.at(x, y);
  return out;
}

void blit(PageImage& dst, const PageImage& src, int x, int y) {
  const int sx0 = std::max(0, -x), sy0 = std::max(0, -y);
  const int sx1 = std::min(src.width, dst.width - x), sy1 = std::min(src.height, dst.height - y);
  if (sx0 >= sx1) return;
  for (int sy = sy0; sy < sy1; ++sy) {
    std::memcpy(dst.pixels.data() + static_cast<std::size_t>(y + sy) * dst.width + (x + sx0),
                src.pixels.data() + static_cast<std::size_t>(sy) * src.width + sx0, static_cast<std::size_t>(sx1 - sx0));
  }
}

void fill_rect(PageImage& img, int x, int y, int w, int h, std::uint8_t value) {
  const int x0 = std::max(0, x), y0 = std::max(0, y);
  const int x1 = std::min(img.width, x + w), y1 = std::min(img.height, y + h);
  for (int yy = y0; yy < y1; ++yy)
    for (int xx = x0; xx < x1; ++xx) img.at(xx, yy) = value;
}

}  // namespace examflow
