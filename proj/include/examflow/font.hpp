// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <string_view>

#include "examflow/image.hpp"

namespace examflow {

/// 5x7 bitmap glyphs for printable ASCII; each glyph cell is 6x8 units.
/// Bytes outside printable ASCII (including UTF-8 sequences) render as '?'.
void draw_text(PageImage& img, int x, int y, std::string_view text, int scale, std::uint8_t ink = 0);

int text_width(std::string_view text, int scale);
inline int text_height(int scale) { return 8 * scale; }

}  // namespace examflow
