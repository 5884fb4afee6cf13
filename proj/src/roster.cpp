// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/roster.hpp"

#include <algorithm>
#include <set>

#include "examflow/error.hpp"
#include "examflow/image_io.hpp"
#include "examflow/payload.hpp"
#include "json.hpp"

namespace examflow {

void RosterConfig::validate() const {
  if (fieldnames.empty()) throw Error(Errc::InvalidConfig, "fieldnames must not be empty");
  std::set<std::string> seen;
  for (const auto& f : fieldnames) {
    if (f.empty()) throw Error(Errc::InvalidConfig, "empty field name");
    if (!seen.insert(f).second) throw Error(Errc::InvalidConfig, "duplicate field name '" + f + "'");
  }
  if (!seen.count(key)) throw Error(Errc::InvalidConfig, "key '" + key + "' is not one of the fieldnames");
}

std::vector<std::string> Roster::keys() const {
  std::vector<std::string> out;
  out.reserve(students.size());
  for (const auto& s : students) out.push_back(key_of(s));
  return out;
}

bool Roster::contains(std::string_view key) const {
  return std::any_of(students.begin(), students.end(), [&](const StudentRecord& s) { return key_of(s) == key; });
}

RosterConfig parse_student_data(std::string_view json_text, const std::filesystem::path& base_dir) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("student data is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("student_data") || !doc["student_data"].is_object())
    throw Error(Errc::InvalidConfig, "expected an object with a \"student_data\" member");
  const auto& sd = doc["student_data"];
  RosterConfig cfg;
  try {
    cfg.file_path = sd.at("file_path").get<std::string>();
    cfg.fieldnames = sd.at("fieldnames").get<std::vector<std::string>>();
    cfg.key = sd.at("key").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("student_data needs file_path, fieldnames, key: ") + e.what());
  }
  if (cfg.file_path.is_relative() && !base_dir.empty()) cfg.file_path = (base_dir / cfg.file_path).lexically_normal();
  cfg.validate();
  return cfg;
}

RosterConfig load_student_data(const std::filesystem::path& json_path) {
  const auto bytes = read_file(json_path);
  return parse_student_data(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                            json_path.parent_path());
}

bool is_valid_roster_key(std::string_view key) noexcept {
  return is_valid_student_id(key) && key.find('/') == std::string_view::npos && key != "." && key != "..";
}

Roster parse_roster(const RosterConfig& config, std::string_view text) {
  config.validate();
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  Roster roster;
  roster.config = config;
  std::set<std::string> keys;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t semi = line.find(';', start);
      fields.emplace_back(line.substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    if (fields.size() != config.fieldnames.size())
      throw Error(Errc::FieldCountMismatch, "line " + std::to_string(line_no) + ": " +
                                                std::to_string(fields.size()) + " fields, expected " +
                                                std::to_string(config.fieldnames.size()));
    StudentRecord rec;
    for (std::size_t i = 0; i < fields.size(); ++i) rec.values[config.fieldnames[i]] = fields[i];
    const std::string& key = rec.values[config.key];
    if (!is_valid_roster_key(key))
      throw Error(Errc::InvalidKey, "line " + std::to_string(line_no) + ": key '" + key +
                                        "' must be nonempty Code 39 text without '-' or '/'");
    if (!keys.insert(key).second)
      throw Error(Errc::DuplicateKey, "line " + std::to_string(line_no) + ": key '" + key + "' already used");
    roster.students.push_back(std::move(rec));
  }
  return roster;
}

Roster load_roster(const RosterConfig& config) {
  const auto bytes = read_file(config.file_path);
  return parse_roster(config, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace examflow
