// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "examflow/payload.hpp"
#include "examflow/pdf.hpp"
#include "examflow/roster.hpp"

namespace examflow {

enum class MergeMode { student_wise, exercise_wise, exercise_aggregate };

std::string_view to_string(MergeMode m) noexcept;
/// "student", "exercise" or "aggregate". Throws Error(InvalidParams).
MergeMode parse_merge_mode(std::string_view s);

struct TreePage {
  PagePayload payload;
  std::filesystem::path path;  // absolute or relative to the cwd, as scanned
};

/// The filed pages of a split output tree, per student folder.
struct FiledTree {
  std::map<std::string, std::vector<TreePage>> students;  // pages sorted by page_no
  std::vector<std::string> empty_folders;
  std::vector<std::string> skipped;  // files that do not follow the filing layout
};

/// Reads split's layout; quarantine/, duplicates/ and dot-directories are not
/// student folders. Throws Error(InvalidTree) if root is not a directory.
FiledTree scan_tree(const std::filesystem::path& root);

struct GapWarning {
  std::string student_id;
  std::vector<int> missing_pages;  // between 1 and the highest filed page
};

struct MergedDocument {
  std::filesystem::path path;  // relative to the output directory
  std::vector<PagePayload> pages;
  std::vector<pdf::OutlineEntry> outline;
};

struct MergeReport {
  MergeMode mode = MergeMode::exercise_wise;
  std::vector<MergedDocument> documents;
  std::vector<GapWarning> gaps;
  std::vector<std::string> empty_folders;
  std::vector<std::string> skipped;

  std::size_t page_count() const;
  std::string to_json() const;
};

struct MergePlan {
  MergeMode mode = MergeMode::exercise_wise;
  std::filesystem::path input;
  std::filesystem::path output;
};

struct MergeOptions {
  const Roster* roster = nullptr;  // student order for aggregate documents; lexicographic without one
  unsigned jobs = 1;
  pdf::WriterOptions pdf;
  std::function<void(std::string_view)> progress;
};

/// Which documents a merge would produce, without touching the disk.
std::vector<MergedDocument> plan_documents(const FiledTree& tree, MergeMode mode, const Roster* roster = nullptr);

std::vector<GapWarning> find_gaps(const FiledTree& tree);

/// Writes the documents (each atomically) and <output>/merge-report.json.
/// Throws Error(InvalidTree), Error(OutputNotWritable).
MergeReport run_merge(const MergePlan& plan, const MergeOptions& options = {});

MergeReport merge_student_wise(const std::filesystem::path& tree, const std::filesystem::path& out,
                               const MergeOptions& options = {});
MergeReport merge_exercise_wise(const std::filesystem::path& tree, const std::filesystem::path& out,
                                const MergeOptions& options = {});
MergeReport merge_exercise_aggregate(const std::filesystem::path& tree, const std::filesystem::path& out,
                                     const MergeOptions& options = {});

}  // namespace examflow
