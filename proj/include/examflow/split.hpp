// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "examflow/image.hpp"
#include "examflow/image_io.hpp"
#include "examflow/payload.hpp"
#include "examflow/raster.hpp"
#include "examflow/roster.hpp"
#include "examflow/tools.hpp"

namespace examflow {

/// An ordered, random-access list of scanned pages. Pages are produced on
/// demand so a batch of thousands of pages never has to sit in memory.
/// load() throws Error(UnreadablePage) for a page that cannot be decoded.
class PageList {
public:
  using Loader = std::function<PageImage(std::size_t)>;

  PageList() = default;
  PageList(std::size_t count, Loader loader, std::vector<std::string> labels = {});

  static PageList from_images(std::vector<PageImage> images);
  static PageList from_files(std::vector<std::filesystem::path> files, double fallback_dpi = 300.0);

  std::size_t size() const { return count_; }
  bool empty() const { return count_ == 0; }
  PageImage load(std::size_t i) const;
  /// Source file name or "page <i>".
  std::string label(std::size_t i) const;
  /// Materializes everything; fine for small batches and tests.
  std::vector<PageImage> load_all() const;

private:
  std::size_t count_ = 0;
  Loader loader_;
  std::vector<std::string> labels_;
};

struct IngestOptions {
  double dpi = 300.0;                  // rasterization density for PDF input
  std::filesystem::path work_dir;      // where rasterized pages go; empty = a fresh temp dir
};

/// A directory of PNG/JPEG files (lexicographic file name order) or a single
/// image or PDF file. PDFs go through the configured rasterizer.
/// Throws Error(RasterizerMissing), Error(ToolFailed), Error(Io).
PageList ingest_scan(const std::filesystem::path& source, const ToolConfig& tools, const IngestOptions& options = {});

/// Image files of a directory, sorted by file name.
std::vector<std::filesystem::path> list_image_files(const std::filesystem::path& dir);

struct FiledPage {
  PagePayload payload;
  std::filesystem::path path;  // relative to the output directory
  std::size_t input_index = 0;
  int orientation = 0;
  double skew_degrees = 0;
};

struct QuarantinedPage {
  std::size_t input_index = 0;
  std::string reason;  // NoInk, NoQuorum, UnknownStudent, UnreadablePage, ...
  std::string detail;
  std::optional<std::string> decoded;  // payload text, when the barcode itself was read
};

struct DuplicateGroup {
  PagePayload payload;
  std::optional<std::size_t> filed_index;  // empty when the filed copy predates this run
  std::vector<std::size_t> extra_indices;
};

struct SplitResult {
  std::size_t input_pages = 0;
  std::vector<FiledPage> filed;              // input order
  std::vector<QuarantinedPage> quarantined;  // input order
  std::vector<DuplicateGroup> duplicates;    // order of first extra

  std::size_t duplicate_extras() const;
  std::string to_json() const;
};

struct SplitOptions {
  raster::RegionOfInterest roi;
  double skew_budget_deg = 3.0;
  raster::LocateOptions locate;
  /// Filing format settings. Fast settings: scans are noisy and barely compress anyway.
  PngOptions png{1, true, false};
  unsigned jobs = 1;
  std::function<void(std::string_view)> progress;  // per-page failures and periodic counts
};

/// Decodes one page with the region of interest, then the full page; sideways
/// (landscape) pages are tried turned both ways. The returned image is the
/// page in upright orientation.
struct PageDecode {
  raster::DecodeReport report;
  PageImage upright;
};
PageDecode decode_page(PageImage page, const SplitOptions& options);

/// Files every page under <out>/<student_id>/, routes failures to
/// <out>/quarantine/ and repeats to <out>/duplicates/, and writes
/// <out>/split-report.json. Never overwrites a filed page.
/// Throws Error(OutputNotWritable).
SplitResult split_batch(const PageList& pages, const Roster& roster, const std::filesystem::path& out_dir,
                        const SplitOptions& options = {});

std::string filed_file_name(const PagePayload& p);  // "<sid>-<e>-<p>.png"

}  // namespace examflow
