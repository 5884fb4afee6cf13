// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/code39.hpp"

#include <algorithm>
#include <array>
#include <numeric>

#include "examflow/error.hpp"
#include "examflow/payload.hpp"

namespace examflow::code39 {

namespace {

constexpr std::string_view kAlphabet = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ-. $/+%*";

// One 9-bit pattern per kAlphabet entry; bit 8 is the first bar, 1 = wide.
constexpr std::array<std::uint16_t, 44> kPatterns = {
    0x034, 0x121, 0x061, 0x160, 0x031, 0x130, 0x070, 0x025, 0x124, 0x064,  // 0-9
    0x109, 0x049, 0x148, 0x019, 0x118, 0x058, 0x00D, 0x10C, 0x04C, 0x01C,  // A-J
    0x103, 0x043, 0x142, 0x013, 0x112, 0x052, 0x007, 0x106, 0x046, 0x016,  // K-T
    0x181, 0x0C1, 0x1C0, 0x091, 0x190, 0x0D0,                              // U-Z
    0x085, 0x184, 0x0C4, 0x0A8, 0x0A2, 0x08A, 0x02A,                       // - . space $ / + %
    0x094,                                                                 // *
};

constexpr std::uint16_t kStar = 0x094;

constexpr std::uint16_t reverse9(std::uint16_t bits) {
  std::uint16_t out = 0;
  for (int i = 0; i < 9; ++i)
    if (bits & (1u << i)) out |= static_cast<std::uint16_t>(1u << (8 - i));
  return out;
}

// `*` read backwards. It equals the pattern of 'P', which is why direction is
// settled by looking at both ends of a symbol rather than the first group alone.
constexpr std::uint16_t kStarReversed = reverse9(kStar);

constexpr double kMinQuietFraction = 0.3;

struct Clusters {
  double low = 0;
  double high = 0;
  double threshold = 0;
  bool separated = false;
};

// Optimal two-cluster split of one-dimensional data (exhaustive over the sorted
// split point, minimising within-cluster squared error).
Clusters two_means(std::vector<double> w) {
  Clusters c;
  if (w.size() < 2) return c;
  std::sort(w.begin(), w.end());
  const std::size_t n = w.size();
  std::vector<double> sum(n + 1, 0.0), sq(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    sum[i + 1] = sum[i] + w[i];
    sq[i + 1] = sq[i] + w[i] * w[i];
  }
  double best = -1;
  std::size_t split = 1;
  for (std::size_t k = 1; k < n; ++k) {
    const double l = sum[k], r = sum[n] - sum[k];
    const double sse = (sq[k] - l * l / k) + (sq[n] - sq[k] - r * r / (n - k));
    if (best < 0 || sse < best - 1e-12) {
      best = sse;
      split = k;
    }
  }
  c.low = sum[split] / split;
  c.high = (sum[n] - sum[split]) / (n - split);
  c.threshold = 0.5 * (c.low + c.high);
  c.separated = c.low > 0 && c.high >= kMinClusterSeparation * c.low;
  return c;
}

std::uint16_t group_bits(const std::vector<bool>& wide, std::size_t start) {
  std::uint16_t bits = 0;
  for (std::size_t m = 0; m < 9; ++m)
    if (wide[start + m]) bits |= static_cast<std::uint16_t>(1u << (8 - m));
  return bits;
}

// Classification used while hunting for start/stop candidates: the three widest
// of nine elements are wide.
std::uint16_t widest_three(std::span<const Run> runs, std::size_t start) {
  std::array<std::size_t, 9> idx;
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return runs[start + a].width > runs[start + b].width; });
  std::uint16_t bits = 0;
  for (int k = 0; k < 3; ++k) bits |= static_cast<std::uint16_t>(1u << (8 - idx[k]));
  return bits;
}

double span_width(std::span<const Run> runs, std::size_t start, std::size_t count) {
  double w = 0;
  for (std::size_t k = 0; k < count; ++k) w += runs[start + k].width;
  return w;
}

}  // namespace

std::string_view to_string(DecodeError e) noexcept {
  switch (e) {
    case DecodeError::NoStartStop: return "NoStartStop";
    case DecodeError::BadElementCount: return "BadElementCount";
    case DecodeError::UnknownCharacter: return "UnknownCharacter";
    case DecodeError::AmbiguousWidths: return "AmbiguousWidths";
  }
  return "Unknown";
}

void Params::validate() const {
  if (!(module_width_mm > 0)) throw Error(Errc::InvalidParams, "module width must be positive");
  if (!(bar_height_mm > 0)) throw Error(Errc::InvalidParams, "bar height must be positive");
  if (!(wide_narrow_ratio >= 2.0 && wide_narrow_ratio <= 3.0))
    throw Error(Errc::InvalidParams, "wide/narrow ratio must lie in [2, 3]");
}

std::uint16_t char_pattern(char c) noexcept {
  const auto pos = kAlphabet.find(c);
  return pos == std::string_view::npos || c == '\0' ? 0 : kPatterns[pos];
}

char pattern_char(std::uint16_t bits) noexcept {
  for (std::size_t i = 0; i < kPatterns.size(); ++i)
    if (kPatterns[i] == bits) return kAlphabet[i];
  return '\0';
}

BarPattern encode(std::string_view text, const Params& params) {
  params.validate();
  for (char c : text) {
    if (!is_code39_char(c))
      throw Error(Errc::UnencodableCharacter, std::string("character '") + c + "' has no Code 39 encoding");
  }
  BarPattern out;
  out.symbols.reserve(text.size() + 2);
  out.symbols.push_back('*');
  out.symbols.append(text);
  out.symbols.push_back('*');
  out.elements.reserve(10 * out.symbols.size() - 1);
  for (std::size_t s = 0; s < out.symbols.size(); ++s) {
    if (s > 0) out.elements.push_back({ElementKind::space, WidthClass::narrow});
    const std::uint16_t bits = char_pattern(out.symbols[s]);
    for (int m = 0; m < 9; ++m) {
      out.elements.push_back({m % 2 == 0 ? ElementKind::bar : ElementKind::space,
                              (bits >> (8 - m)) & 1u ? WidthClass::wide : WidthClass::narrow});
    }
  }
  return out;
}

std::vector<Run> to_runs(const BarPattern& pattern, double narrow_width, double ratio) {
  std::vector<Run> runs;
  runs.reserve(pattern.elements.size());
  for (const Element& e : pattern.elements)
    runs.push_back({e.kind, e.width == WidthClass::wide ? narrow_width * ratio : narrow_width});
  return runs;
}

Expected<Decoded, DecodeError> decode(std::span<const Run> runs) {
  const std::size_t n = runs.size();
  if (n < 19 || (n + 1) % 10 != 0) return Unexpected{DecodeError::BadElementCount};
  for (std::size_t k = 0; k < n; ++k) {
    const ElementKind expect = k % 2 == 0 ? ElementKind::bar : ElementKind::space;
    if (runs[k].kind != expect || !(runs[k].width > 0)) return Unexpected{DecodeError::BadElementCount};
  }

  // Bars and spaces are clustered separately: ink spread widens every bar and
  // narrows every space by roughly the same amount.
  std::vector<double> bars, spaces;
  for (std::size_t k = 0; k < n; ++k) {
    if (k % 10 == 9) continue;  // inter-character gap, width unconstrained
    (k % 2 == 0 ? bars : spaces).push_back(runs[k].width);
  }
  const Clusters bar_c = two_means(std::move(bars));
  const Clusters space_c = two_means(std::move(spaces));
  if (bar_c.separated != space_c.separated) return Unexpected{DecodeError::AmbiguousWidths};

  std::vector<bool> wide(n, false);
  if (bar_c.separated) {
    for (std::size_t k = 0; k < n; ++k) {
      if (k % 10 == 9) continue;
      const Clusters& c = k % 2 == 0 ? bar_c : space_c;
      wide[k] = runs[k].width > c.threshold;
    }
  }

  const std::size_t groups = (n + 1) / 10;
  auto read = [&](const std::vector<bool>& w) -> Expected<Decoded, DecodeError> {
    Decoded d;
    d.text.reserve(groups - 2);
    for (std::size_t g = 1; g + 1 < groups; ++g) {
      const char c = pattern_char(group_bits(w, 10 * g));
      if (c == '\0' || c == '*') return Unexpected{DecodeError::UnknownCharacter};
      d.text.push_back(c);
    }
    return d;
  };

  if (group_bits(wide, 0) == kStar && group_bits(wide, n - 9) == kStar) return read(wide);

  std::vector<bool> flipped(wide.rbegin(), wide.rend());
  if (group_bits(flipped, 0) == kStar && group_bits(flipped, n - 9) == kStar) {
    auto r = read(flipped);
    if (r) r->reversed = true;
    return r;
  }
  return Unexpected{DecodeError::NoStartStop};
}

Expected<Decoded, DecodeError> find_symbol(std::span<const Run> runs) {
  const std::size_t n = runs.size();
  DecodeError last = DecodeError::NoStartStop;
  auto is_terminator = [](std::uint16_t bits) { return bits == kStar || bits == kStarReversed; };

  for (std::size_t i = 0; i + 19 <= n; ++i) {
    if (runs[i].kind != ElementKind::bar) continue;
    const double first = span_width(runs, i, 9);
    if (i > 0 && runs[i - 1].width < kMinQuietFraction * first) continue;
    if (!is_terminator(widest_three(runs, i))) continue;

    for (std::size_t j = i + 10; j + 9 <= n; j += 10) {
      const double gap = runs[j - 1].width;
      if (gap >= kMinQuietFraction * first) break;  // quiet zone before a stop: not this symbol
      if (!is_terminator(widest_three(runs, j))) continue;
      const std::size_t end = j + 9;
      const double stop = span_width(runs, j, 9);
      if (end < n && runs[end].width < kMinQuietFraction * stop) continue;
      auto r = decode(runs.subspan(i, end - i));
      if (r) return r;
      last = r.error();
      break;
    }
  }
  return Unexpected{last};
}

}  // namespace examflow::code39
