// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "examflow/roster.hpp"

namespace examflow {

struct ScoreEntry {
  std::string student_id;
  int exercise_no = 1;
  double points = 0;
  std::string source;  // file name and line, for diagnostics
};

struct GradeBand {
  double min_fraction = 0;
  std::string label;
};

struct GradeScheme {
  std::vector<GradeBand> grades;         // strictly decreasing thresholds, best grade first
  std::map<int, double> exercise_maxima;  // exercise number -> max points

  /// Throws Error(InvalidConfig).
  void validate() const;
  double max_total() const;
  /// First band whose threshold is at most the fraction, or "(none)".
  const std::string& grade_for(double fraction) const;
  /// 0 = best band; grades.size() for "(none)".
  std::size_t rank_of(std::string_view label) const;
};

inline const std::string kNoGrade = "(none)";

/// {"exercise_maxima": {"1": 10, ...}, "grades": [{"min_fraction": 0.9, "label": "A"}, ...]}
GradeScheme parse_grade_scheme(std::string_view json_text);
GradeScheme load_grade_scheme(const std::filesystem::path& path);

/// `student_id;exercise_no;points` rows; an optional header row, blank lines,
/// CRLF and decimal commas are accepted. Throws Error(MalformedCsv).
std::vector<ScoreEntry> parse_score_csv(std::string_view text, std::string_view source_name);

struct StudentScore {
  std::string student_id;
  std::map<int, double> points;  // every exercise of the scheme
  std::set<int> missing;         // exercises with no entry (scored 0)
  double total = 0;
  double fraction = 0;
  std::string grade;
};

struct ScoreTable {
  std::vector<int> exercises;
  std::vector<StudentScore> rows;  // roster order

  /// scores.csv: `student_id;total;grade;<exercise...>;missing`
  std::string to_csv() const;
};

/// Throws Error(ConflictingEntry), Error(PointsOutOfRange), Error(UnknownStudent).
ScoreTable collect_scores(const std::vector<std::vector<ScoreEntry>>& sources, const Roster& roster,
                          const GradeScheme& scheme);
ScoreTable collect_scores(const std::vector<std::filesystem::path>& files, const Roster& roster,
                          const GradeScheme& scheme);

struct Histogram {
  std::vector<std::pair<std::string, std::size_t>> counts;  // scheme order, then "(none)" if used
  std::size_t total() const;
};

/// Throws Error(EmptyTable).
Histogram grade_histogram(const ScoreTable& table, const GradeScheme& scheme);
std::string render_text_histogram(const Histogram& h, int bar_width = 40);
std::string render_svg(const Histogram& h);

struct Distribution {
  Histogram histogram;
  std::string text;
  std::string svg;
};

Distribution emit_distribution(const ScoreTable& table, const GradeScheme& scheme);

/// Writes scores.csv and distribution.svg into out_dir; returns the text histogram.
std::string write_score_outputs(const ScoreTable& table, const GradeScheme& scheme, const std::filesystem::path& out_dir);

std::string format_points(double v);

}  // namespace examflow
