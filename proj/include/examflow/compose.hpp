// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "examflow/code39.hpp"
#include "examflow/image.hpp"
#include "examflow/image_io.hpp"
#include "examflow/payload.hpp"
#include "examflow/raster.hpp"
#include "examflow/roster.hpp"
#include "examflow/tools.hpp"

namespace examflow {

/// Macro names found in `##NAME##` form, in order of appearance. A name is an
/// identifier ([A-Za-z_][A-Za-z0-9_]*), so TeX parameter tokens like `##1`
/// are left alone.
std::vector<std::string> find_macros(std::string_view text);

/// Replaces every `##F##` by record.values[F] in a single left-to-right pass;
/// substituted values are never rescanned. Throws Error(UnknownMacro).
std::string substitute_macros(std::string_view text, const StudentRecord& record);

struct ExamTemplate {
  std::string source_text;
  std::vector<int> exercise_page_map;  // exercise number of each page, in page order
  raster::RegionOfInterest barcode_roi;
  std::string source_extension = ".tex";  // used for the per-student files in external mode

  int page_count() const { return static_cast<int>(exercise_page_map.size()); }

  /// Throws Error(InvalidTemplate).
  void validate(const RosterConfig& config) const;
};

/// "1,1,2,2,3" or with repeats "1x2,2x2,3". Throws Error(InvalidTemplate).
std::vector<int> parse_exercise_map(std::string_view text);

ExamTemplate load_template(const std::filesystem::path& source, std::vector<int> exercise_page_map,
                           raster::RegionOfInterest roi = {});

struct PageLayout {
  double width_mm = 210.0;  // A4 portrait
  double height_mm = 297.0;
  double dpi = 300.0;
  double margin_mm = 15.0;
};

/// One student's exam after substitution.
struct PersonalizedExam {
  std::string student_id;
  std::string text;
  std::vector<PagePayload> payloads;  // one per page
};

PersonalizedExam personalize(const ExamTemplate& tmpl, const Roster& roster, const StudentRecord& record);

/// Native page: substituted text as header, an identification line, a blank
/// answer area, and the page barcode centred in the template's barcode region.
PageImage render_exam_page(const PersonalizedExam& exam, int page_index, const ExamTemplate& tmpl,
                           const code39::Params& params, const PageLayout& layout);

/// All pages of a batch in print order (roster order x template page order),
/// rendered on demand.
class BatchPages {
public:
  BatchPages(const ExamTemplate& tmpl, const Roster& roster, code39::Params params, PageLayout layout);

  std::size_t size() const { return index_.size(); }
  const PagePayload& payload(std::size_t i) const;
  PageImage render(std::size_t i) const;
  const std::vector<PersonalizedExam>& exams() const { return exams_; }

private:
  const ExamTemplate* tmpl_;
  code39::Params params_;
  PageLayout layout_;
  std::vector<PersonalizedExam> exams_;
  std::vector<std::pair<std::size_t, int>> index_;  // (exam, page)
};

enum class GenerateMode { native, external };

struct ManifestStudent {
  std::string student_id;
  int page_count = 0;
  std::vector<std::string> payloads;
};

struct Manifest {
  GenerateMode mode = GenerateMode::native;
  std::string document;  // file name inside the output directory, empty if no pages
  std::vector<ManifestStudent> students;

  std::size_t total_pages() const;
  std::string to_json() const;
};

struct GenerateOptions {
  GenerateMode mode = GenerateMode::native;
  code39::Params params;
  PageLayout layout;
  std::filesystem::path out_dir;
  const ToolConfig* tools = nullptr;  // required in external mode
  bool emit_images = false;           // also write pages/page-NNNNN.png (native mode)
  PngOptions png;
  unsigned jobs = 1;
  std::function<void(std::string_view)> progress;
};

/// Writes <out>/batch.pdf and <out>/manifest.json (plus the per-student sources
/// in external mode). Throws Error(InvalidTemplate), Error(ToolNotFound),
/// Error(ToolFailed), Error(OutputNotWritable).
Manifest generate_batch(const ExamTemplate& tmpl, const Roster& roster, const GenerateOptions& options);

}  // namespace examflow
