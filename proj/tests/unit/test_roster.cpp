// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include <gtest/gtest.h>

#include <fstream>

#include "examflow/error.hpp"
#include "examflow/roster.hpp"
#include "synth.hpp"

using namespace examflow;

namespace {

// Listing 5, character for character.
constexpr const char* kListing5 = R"({
  "student_data" : {
    "file_path" : "./participants.csv",
    "fieldnames" : ["LastName", "FirstName", "StudentID", "Email"],
    "key" : "StudentID"
  }
})";

RosterConfig listing5() { return parse_student_data(kListing5, "/base"); }

void write_text(const std::filesystem::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  ADD_FAILURE() << "no error thrown";
  return Error(Errc::Io, "none");
}

}  // namespace

TEST(StudentData, Listing5) {
  const RosterConfig cfg = listing5();
  EXPECT_EQ(cfg.fieldnames, (std::vector<std::string>{"LastName", "FirstName", "StudentID", "Email"}));
  EXPECT_EQ(cfg.key, "StudentID");
  EXPECT_EQ(cfg.file_path.lexically_normal(), std::filesystem::path("/base/participants.csv"));
}

TEST(StudentData, RelativePathFollowsJsonFile) {
  testkit::TempDir dir;
  std::filesystem::create_directories(dir / "cfg");
  write_text(dir / "cfg/student_data.json", kListing5);
  write_text(dir / "cfg/participants.csv", "Vanaken;Hans;372048;hans.vanaken@some-uni.eu\n");
  const Roster r = load_roster(load_student_data(dir / "cfg/student_data.json"));
  ASSERT_EQ(r.students.size(), 1u);
  EXPECT_EQ(r.key_of(r.students[0]), "372048");
}

TEST(StudentData, RejectsBadSchemas) {
  EXPECT_EQ(error_of([] { parse_student_data("{"); }).code(), Errc::InvalidConfig);
  EXPECT_EQ(error_of([] { parse_student_data(R"({"other": {}})"); }).code(), Errc::InvalidConfig);
  EXPECT_EQ(error_of([] {
              parse_student_data(R"({"student_data": {"file_path": "a", "fieldnames": ["A"], "key": "B"}})");
            }).code(),
            Errc::InvalidConfig);
  EXPECT_EQ(error_of([] {
              parse_student_data(R"({"student_data": {"file_path": "a", "fieldnames": ["A", "A"], "key": "A"}})");
            }).code(),
            Errc::InvalidConfig);
  EXPECT_EQ(error_of([] {
              parse_student_data(R"({"student_data": {"file_path": 3, "fieldnames": ["A"], "key": "A"}})");
            }).code(),
            Errc::InvalidConfig);
}

TEST(Roster, VanakenRowKeysTo372048) {
  const Roster r = parse_roster(listing5(), "Vanaken;Hans;372048;hans.vanaken@some-uni.eu\n");
  ASSERT_EQ(r.students.size(), 1u);
  const auto& s = r.students[0];
  EXPECT_EQ(r.key_of(s), "372048");
  EXPECT_EQ(s.at("LastName"), "Vanaken");
  EXPECT_EQ(s.at("FirstName"), "Hans");
  EXPECT_EQ(s.at("Email"), "hans.vanaken@some-uni.eu");
}

TEST(Roster, KeepsFileOrderAndToleratesBomCrlfBlankLines) {
  const Roster r = parse_roster(listing5(), "\xEF\xBB\xBF" "B;b;2;x\r\n\r\nA;a;1;y\r\n   \nC;c;3;z");
  EXPECT_EQ(r.keys(), (std::vector<std::string>{"2", "1", "3"}));
  EXPECT_TRUE(r.contains("1"));
  EXPECT_FALSE(r.contains("4"));
  EXPECT_EQ(r.students[0].at("LastName"), "B");  // BOM stripped
  EXPECT_EQ(r.students[2].at("Email"), "z");      // no trailing newline
}

TEST(Roster, EmptyFileIsEmptyRoster) {
  EXPECT_TRUE(parse_roster(listing5(), "").students.empty());
  EXPECT_TRUE(parse_roster(listing5(), "\n\n").students.empty());
}

TEST(Roster, FieldCountMismatchNamesLine) {
  const Error e = error_of([] { parse_roster(listing5(), "A;a;1;x\nB;b;2\n"); });
  EXPECT_EQ(e.code(), Errc::FieldCountMismatch);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
  EXPECT_EQ(error_of([] { parse_roster(listing5(), "A;a;1;x;extra\n"); }).code(), Errc::FieldCountMismatch);
}

TEST(Roster, DuplicateKey) {
  const Error e = error_of([] { parse_roster(listing5(), "A;a;1;x\nB;b;1;y\n"); });
  EXPECT_EQ(e.code(), Errc::DuplicateKey);
  EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
}

TEST(Roster, InvalidKeys) {
  for (const char* key : {"", "a-b", "a/b", ".", "..", "lower", "x y!"}) {
    EXPECT_FALSE(is_valid_roster_key(key)) << key;
    EXPECT_EQ(error_of([&] { parse_roster(listing5(), std::string("A;a;") + key + ";x\n"); }).code(), Errc::InvalidKey)
        << key;
  }
  for (const char* key : {"372048", "AB12", "X.Y", "A B"}) EXPECT_TRUE(is_valid_roster_key(key)) << key;
}

TEST(Roster, MissingFileIsIo) {
  RosterConfig cfg = listing5();
  cfg.file_path = "/nonexistent/participants.csv";
  EXPECT_EQ(error_of([&] { load_roster(cfg); }).code(), Errc::Io);
}
