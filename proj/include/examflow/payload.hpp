// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace examflow {

/// Identity of one printed page: who wrote it, which exercise, where in the exam.
///
/// Serialized as `student_id-exercise_no-page_no`, e.g. `372048-2-5`. The hyphen
/// is the field separator, so it never appears inside a student id.
struct PagePayload {
  std::string student_id;
  int exercise_no = 1;
  int page_no = 1;

  auto operator<=>(const PagePayload&) const = default;
};

/// True for the 43 data characters of Code 39 (digits, A-Z, space, `-.$/+%`).
bool is_code39_char(char c) noexcept;
bool is_code39_text(std::string_view text) noexcept;

/// A usable student id: nonempty, Code 39 encodable, hyphen-free.
bool is_valid_student_id(std::string_view id) noexcept;

/// Throws Error(InvalidPayload).
std::string serialize_payload(const PagePayload& payload);

/// Throws Error(MalformedPayload). Numbers must be canonical positive decimals
/// (no sign, no leading zero), so parse and serialize are mutual inverses.
PagePayload parse_payload(std::string_view text);

/// Non-throwing variant of parse_payload for per-scanline voting.
bool try_parse_payload(std::string_view text, PagePayload& out) noexcept;

}  // namespace examflow
