// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include <gtest/gtest.h>

#include <random>

#include "examflow/error.hpp"
#include "examflow/payload.hpp"

using namespace examflow;

namespace {

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

}  // namespace

TEST(Payload, SerializeFigureOneExample) {
  EXPECT_EQ(serialize_payload({"1234567", 1, 3}), "1234567-1-3");
}

TEST(Payload, SerializeRosterRowId) { EXPECT_EQ(serialize_payload({"372048", 2, 5}), "372048-2-5"); }

TEST(Payload, SerializeRejectsHyphenInId) {
  EXPECT_EQ(error_of([] { serialize_payload({"37-20", 1, 1}); }), Errc::InvalidPayload);
}

TEST(Payload, SerializeRejectsBadIds) {
  EXPECT_EQ(error_of([] { serialize_payload({"", 1, 1}); }), Errc::InvalidPayload);
  EXPECT_EQ(error_of([] { serialize_payload({"abc", 1, 1}); }), Errc::InvalidPayload);  // lowercase
  EXPECT_EQ(error_of([] { serialize_payload({"A*B", 1, 1}); }), Errc::InvalidPayload);
  EXPECT_EQ(error_of([] { serialize_payload({"A", 0, 1}); }), Errc::InvalidPayload);
  EXPECT_EQ(error_of([] { serialize_payload({"A", 1, -2}); }), Errc::InvalidPayload);
}

TEST(Payload, ParseFigureOneExample) {
  const PagePayload p = parse_payload("1234567-1-3");
  EXPECT_EQ(p.student_id, "1234567");
  EXPECT_EQ(p.exercise_no, 1);
  EXPECT_EQ(p.page_no, 3);
}

TEST(Payload, ParseRejectsMalformed) {
  for (const char* s : {"372048-15-0", "372048-1-1-1", "372048-1", "", "-1-1", "A--1", "A-x-1", "A-1-1x", "A-01-1",
                        "A-1-+1", "A- 1-1", "a-1-1", "A-99999999999-1"}) {
    EXPECT_EQ(error_of([&] { parse_payload(s); }), Errc::MalformedPayload) << s;
    PagePayload out;
    EXPECT_FALSE(try_parse_payload(s, out)) << s;
  }
}

TEST(Payload, CharsetMembership) {
  for (char c : std::string("0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ-. $/+%")) EXPECT_TRUE(is_code39_char(c)) << c;
  for (char c : std::string("*abc_#\n\t~")) EXPECT_FALSE(is_code39_char(c)) << c;
  EXPECT_TRUE(is_valid_student_id("372048"));
  EXPECT_TRUE(is_valid_student_id("A B.$/+%"));
  EXPECT_FALSE(is_valid_student_id("37-20"));
}

// parse . serialize = id over generated payloads.
TEST(PayloadProperty, ParseInvertsSerialize) {
  const std::string id_chars = "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ. $/+%";
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 5000; ++i) {
    PagePayload p;
    const int len = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int k = 0; k < len; ++k)
      p.student_id += id_chars[std::uniform_int_distribution<std::size_t>(0, id_chars.size() - 1)(rng)];
    p.exercise_no = std::uniform_int_distribution<int>(1, 999)(rng);
    p.page_no = std::uniform_int_distribution<int>(1, 9999)(rng);
    const std::string s = serialize_payload(p);
    EXPECT_TRUE(is_code39_text(s));
    EXPECT_EQ(parse_payload(s), p) << s;
  }
}
