// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "examflow/expected.hpp"

namespace examflow::code39 {

/// Print geometry of a symbol. Defaults match `X=.5mm, ratio=2.25, H=0.5cm`.
struct Params {
  double module_width_mm = 0.5;
  double wide_narrow_ratio = 2.25;
  double bar_height_mm = 5.0;

  /// Throws Error(InvalidParams).
  void validate() const;
};

enum class ElementKind : std::uint8_t { bar, space };
enum class WidthClass : std::uint8_t { narrow, wide };

struct Element {
  ElementKind kind;
  WidthClass width;
  bool operator==(const Element&) const = default;
};

/// An encoded symbol: `*` + text + `*`, 9 elements per character, characters
/// separated by one narrow space.
struct BarPattern {
  std::vector<Element> elements;
  std::string symbols;  // including both `*`
};

/// One measured run along a scanline.
struct Run {
  ElementKind kind;
  double width;
};

enum class DecodeError : std::uint8_t {
  NoStartStop,
  BadElementCount,
  UnknownCharacter,
  AmbiguousWidths,
};

std::string_view to_string(DecodeError e) noexcept;

struct Decoded {
  std::string text;
  bool reversed = false;  // read right-to-left, i.e. the symbol was upside down
};

/// Wide and narrow cluster means must differ at least by this factor.
inline constexpr double kMinClusterSeparation = 1.4;

/// 9-bit element pattern of a character (MSB = first bar, 1 = wide); 0 if the
/// character is not encodable.
std::uint16_t char_pattern(char c) noexcept;

/// Inverse of char_pattern; '\0' for a pattern that matches no table row.
char pattern_char(std::uint16_t bits) noexcept;

/// Throws Error(UnencodableCharacter) on characters outside the Code 39 set or `*`.
BarPattern encode(std::string_view text, const Params& params = {});

/// Ideal widths: narrow -> narrow_width, wide -> narrow_width * ratio.
std::vector<Run> to_runs(const BarPattern& pattern, double narrow_width, double ratio);

/// Decodes a run sequence that is exactly one symbol (start to stop). Reversed
/// sequences are recognised and read right-to-left.
Expected<Decoded, DecodeError> decode(std::span<const Run> runs);

/// Finds and decodes the first symbol inside a longer run sequence, using the
/// quiet zones to delimit it. Handles both reading directions.
Expected<Decoded, DecodeError> find_symbol(std::span<const Run> runs);

}  // namespace examflow::code39
