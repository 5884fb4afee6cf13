// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace examflow {

/// Schema of the roster file, as found under "student_data" in student_data.json.
struct RosterConfig {
  std::filesystem::path file_path;
  std::vector<std::string> fieldnames;
  std::string key;

  void validate() const;  // throws Error(InvalidConfig)
};

struct StudentRecord {
  std::map<std::string, std::string> values;

  const std::string& at(const std::string& field) const { return values.at(field); }
};

struct Roster {
  RosterConfig config;
  std::vector<StudentRecord> students;  // file order

  const std::string& key_of(const StudentRecord& r) const { return r.at(config.key); }
  std::vector<std::string> keys() const;
  bool contains(std::string_view key) const;
};

/// Parses student_data.json. A relative file_path is resolved against the
/// directory holding the JSON file. Throws Error(InvalidConfig).
RosterConfig load_student_data(const std::filesystem::path& json_path);
RosterConfig parse_student_data(std::string_view json_text, const std::filesystem::path& base_dir = {});

/// Semicolon-separated, no header, no quoting. Throws Error(FieldCountMismatch),
/// Error(DuplicateKey), Error(InvalidKey), Error(Io).
Roster load_roster(const RosterConfig& config);
Roster parse_roster(const RosterConfig& config, std::string_view text);

/// Key values also become directory names; besides the payload rules they must
/// not be "." or contain a path separator.
bool is_valid_roster_key(std::string_view key) noexcept;

}  // namespace examflow
