// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

// Reference Code 39 decoder used only by tests. It works on n/w strings taken
// from the published symbology table and shares no code with the library.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace examflow::testkit {

inline const std::array<std::pair<char, const char*>, 44>& code39_reference_table() {
  static const std::array<std::pair<char, const char*>, 44> table = {{
      {'0', "nnnwwnwnn"}, {'1', "wnnwnnnnw"}, {'2', "nnwwnnnnw"}, {'3', "wnwwnnnnn"},
      {'4', "nnnwwnnnw"}, {'5', "wnnwwnnnn"}, {'6', "nnwwwnnnn"}, {'7', "nnnwnnwnw"},
      {'8', "wnnwnnwnn"}, {'9', "nnwwnnwnn"}, {'A', "wnnnnwnnw"}, {'B', "nnwnnwnnw"},
      {'C', "wnwnnwnnn"}, {'D', "nnnnwwnnw"}, {'E', "wnnnwwnnn"}, {'F', "nnwnwwnnn"},
      {'G', "nnnnnwwnw"}, {'H', "wnnnnwwnn"}, {'I', "nnwnnwwnn"}, {'J', "nnnnwwwnn"},
      {'K', "wnnnnnnww"}, {'L', "nnwnnnnww"}, {'M', "wnwnnnnwn"}, {'N', "nnnnwnnww"},
      {'O', "wnnnwnnwn"}, {'P', "nnwnwnnwn"}, {'Q', "nnnnnnwww"}, {'R', "wnnnnnwwn"},
      {'S', "nnwnnnwwn"}, {'T', "nnnnwnwwn"}, {'U', "wwnnnnnnw"}, {'V', "nwwnnnnnw"},
      {'W', "wwwnnnnnn"}, {'X', "nwnnwnnnw"}, {'Y', "wwnnwnnnn"}, {'Z', "nwwnwnnnn"},
      {'-', "nwnnnnwnw"}, {'.', "wwnnnnwnn"}, {' ', "nwwnnnwnn"}, {'$', "nwnwnwnnn"},
      {'/', "nwnwnnnwn"}, {'+', "nwnnnwnwn"}, {'%', "nnnwnwnwn"}, {'*', "nwnnwnwnn"},
  }};
  return table;
}

/// Decodes a list of n/w flags (no gaps) grouped in 9s. Returns the text between
/// the start and stop characters or nothing.
inline std::optional<std::string> oracle_decode_flags(const std::vector<char>& flags) {
  if (flags.size() % 9 != 0 || flags.size() < 18) return std::nullopt;
  std::string symbols;
  for (std::size_t i = 0; i < flags.size(); i += 9) {
    std::string group(flags.begin() + static_cast<long>(i), flags.begin() + static_cast<long>(i + 9));
    char found = 0;
    for (const auto& [c, pat] : code39_reference_table()) {
      if (group == pat) found = c;
    }
    if (!found) return std::nullopt;
    symbols.push_back(found);
  }
  if (symbols.front() != '*' || symbols.back() != '*') return std::nullopt;
  std::string inner = symbols.substr(1, symbols.size() - 2);
  if (inner.find('*') != std::string::npos) return std::nullopt;
  return inner;
}

/// Decodes ideal integer widths (narrow width exactly 1 unit, anything wider is
/// wide) with inter-character gaps present.
inline std::optional<std::string> oracle_decode_widths(const std::vector<double>& widths) {
  if ((widths.size() + 1) % 10 != 0) return std::nullopt;
  std::vector<char> flags;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i % 10 == 9) continue;  // gap
    flags.push_back(widths[i] > 1.5 ? 'w' : 'n');
  }
  return oracle_decode_flags(flags);
}

}  // namespace examflow::testkit
