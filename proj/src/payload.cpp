// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/payload.hpp"

#include <charconv>
#include <cstring>

#include "examflow/error.hpp"

namespace examflow {

bool is_code39_char(char c) noexcept {
  if (c >= '0' && c <= '9') return true;
  if (c >= 'A' && c <= 'Z') return true;
  return c != '\0' && std::strchr("-. $/+%", c) != nullptr;
}

bool is_code39_text(std::string_view text) noexcept {
  for (char c : text)
    if (!is_code39_char(c)) return false;
  return true;
}

bool is_valid_student_id(std::string_view id) noexcept {
  return !id.empty() && id.find('-') == std::string_view::npos && is_code39_text(id);
}

std::string serialize_payload(const PagePayload& p) {
  if (p.student_id.empty()) throw Error(Errc::InvalidPayload, "empty student id");
  if (p.student_id.find('-') != std::string::npos)
    throw Error(Errc::InvalidPayload, "student id '" + p.student_id + "' contains the separator '-'");
  if (!is_code39_text(p.student_id))
    throw Error(Errc::InvalidPayload, "student id '" + p.student_id + "' is not Code 39 encodable");
  if (p.exercise_no < 1 || p.page_no < 1)
    throw Error(Errc::InvalidPayload, "exercise and page numbers must be >= 1");
  return p.student_id + "-" + std::to_string(p.exercise_no) + "-" + std::to_string(p.page_no);
}

namespace {

bool parse_positive(std::string_view field, int& out) {
  if (field.empty() || field.front() == '0') return false;
  for (char c : field)
    if (c < '0' || c > '9') return false;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), out);
  return ec == std::errc() && ptr == field.data() + field.size() && out >= 1;
}

}  // namespace

bool try_parse_payload(std::string_view text, PagePayload& out) noexcept {
  const std::size_t a = text.find('-');
  if (a == std::string_view::npos) return false;
  const std::size_t b = text.find('-', a + 1);
  if (b == std::string_view::npos || text.find('-', b + 1) != std::string_view::npos) return false;
  std::string_view id = text.substr(0, a);
  if (!is_valid_student_id(id)) return false;
  int exercise = 0, page = 0;
  if (!parse_positive(text.substr(a + 1, b - a - 1), exercise)) return false;
  if (!parse_positive(text.substr(b + 1), page)) return false;
  try {
    out.student_id.assign(id);
  } catch (...) {
    return false;
  }
  out.exercise_no = exercise;
  out.page_no = page;
  return true;
}

PagePayload parse_payload(std::string_view text) {
  PagePayload p;
  if (!try_parse_payload(text, p))
    throw Error(Errc::MalformedPayload, "'" + std::string(text) + "' is not student-exercise-page");
  return p;
}

}  // namespace examflow
