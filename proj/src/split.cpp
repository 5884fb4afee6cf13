// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/split.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <memory>
#include <random>

#include "examflow/error.hpp"
#include "examflow/parallel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace examflow {

PageList::PageList(std::size_t count, Loader loader, std::vector<std::string> labels)
    : count_(count), loader_(std::move(loader)), labels_(std::move(labels)) {}

PageList PageList::from_images(std::vector<PageImage> images) {
  auto shared = std::make_shared<const std::vector<PageImage>>(std::move(images));
  return PageList(shared->size(), [shared](std::size_t i) { return (*shared)[i]; });
}

PageList PageList::from_files(std::vector<fs::path> files, double fallback_dpi) {
  std::vector<std::string> labels;
  for (const auto& f : files) labels.push_back(f.filename().string());
  auto shared = std::make_shared<const std::vector<fs::path>>(std::move(files));
  return PageList(
      shared->size(), [shared, fallback_dpi](std::size_t i) { return read_image((*shared)[i], fallback_dpi); },
      std::move(labels));
}

PageImage PageList::load(std::size_t i) const {
  if (i >= count_) throw Error(Errc::OutOfBounds, "page index " + std::to_string(i) + " out of range");
  try {
    return loader_(i);
  } catch (const Error& e) {
    if (e.code() == Errc::UnreadablePage) throw;
    throw Error(Errc::UnreadablePage, label(i) + ": " + e.what());
  } catch (const std::exception& e) {
    throw Error(Errc::UnreadablePage, label(i) + ": " + e.what());
  }
}

std::string PageList::label(std::size_t i) const {
  return i < labels_.size() ? labels_[i] : "page " + std::to_string(i);
}

std::vector<PageImage> PageList::load_all() const {
  std::vector<PageImage> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(load(i));
  return out;
}

namespace {

bool is_image_name(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

bool is_pdf(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pdf";
}

fs::path fresh_temp_dir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    char name[40];
    std::snprintf(name, sizeof name, "examflow-scan-%08x", rd());
    const fs::path p = fs::temp_directory_path() / name;
    std::error_code ec;
    if (fs::create_directory(p, ec)) return p;
  }
  throw Error(Errc::Io, "cannot create a temporary directory");
}

}  // namespace

std::vector<fs::path> list_image_files(const fs::path& dir) {
  std::vector<fs::path> files;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && is_image_name(entry.path())) files.push_back(entry.path());
  }
  if (ec) throw Error(Errc::Io, "cannot list " + dir.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename().string() < b.filename().string(); });
  return files;
}

PageList ingest_scan(const fs::path& source, const ToolConfig& tools, const IngestOptions& options) {
  std::error_code ec;
  if (fs::is_directory(source, ec)) return PageList::from_files(list_image_files(source), options.dpi);
  if (!fs::is_regular_file(source, ec)) throw Error(Errc::Io, "scan source not found: " + source.string());
  if (!is_pdf(source)) return PageList::from_files({source}, options.dpi);

  const ToolEntry* raster = tools.find(kRasterizer);
  if (!raster) throw Error(Errc::RasterizerMissing, "PDF input needs a 'rasterizer' entry in the tool config");
  if (resolve_executable(raster->path).empty())
    throw Error(Errc::RasterizerMissing, "rasterizer '" + raster->path + "' not found");

  // A temp dir we created is removed once the last copy of the page list goes.
  std::shared_ptr<const fs::path> workdir;
  if (options.work_dir.empty()) {
    workdir = std::shared_ptr<const fs::path>(new fs::path(fresh_temp_dir()), [](const fs::path* p) {
      std::error_code ignored;
      fs::remove_all(*p, ignored);
      delete p;
    });
  } else {
    fs::create_directories(options.work_dir, ec);
    workdir = std::make_shared<const fs::path>(fs::absolute(options.work_dir));
  }

  ToolVars vars;
  char dpi[32];
  std::snprintf(dpi, sizeof dpi, "%g", options.dpi);
  vars.scalars = {{"input", fs::absolute(source).string()},
                  {"outdir", workdir->string()},
                  {"prefix", (*workdir / "page").string()},
                  {"dpi", dpi}};
  run_tool(tools, kRasterizer, vars, *workdir);

  auto files = list_image_files(*workdir);
  PageList inner = PageList::from_files(files, options.dpi);
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < inner.size(); ++i) labels.push_back(inner.label(i));
  return PageList(
      inner.size(), [inner, workdir](std::size_t i) { return inner.load(i); }, std::move(labels));
}

std::string filed_file_name(const PagePayload& p) { return serialize_payload(p) + ".png"; }

std::size_t SplitResult::duplicate_extras() const {
  std::size_t n = 0;
  for (const auto& d : duplicates) n += d.extra_indices.size();
  return n;
}

std::string SplitResult::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["input_pages"] = input_pages;
  j["filed_count"] = filed.size();
  j["quarantined_count"] = quarantined.size();
  j["duplicate_extras"] = duplicate_extras();
  j["filed"] = ordered_json::array();
  for (const auto& f : filed) {
    j["filed"].push_back({{"payload", serialize_payload(f.payload)},
                          {"path", f.path.generic_string()},
                          {"input_index", f.input_index},
                          {"orientation", f.orientation},
                          {"skew_degrees", f.skew_degrees}});
  }
  j["quarantined"] = ordered_json::array();
  for (const auto& q : quarantined) {
    ordered_json e{{"input_index", q.input_index}, {"reason", q.reason}, {"detail", q.detail}};
    if (q.decoded) e["decoded"] = *q.decoded;
    j["quarantined"].push_back(std::move(e));
  }
  j["duplicates"] = ordered_json::array();
  for (const auto& d : duplicates) {
    j["duplicates"].push_back({{"payload", serialize_payload(d.payload)},
                               {"filed_index", d.filed_index ? ordered_json(*d.filed_index) : ordered_json(nullptr)},
                               {"extra_indices", d.extra_indices}});
  }
  return j.dump(2) + "\n";
}

PageDecode decode_page(PageImage page, const SplitOptions& options) {
  auto attempt = [&](const PageImage& img) {
    auto rep = raster::locate_and_decode(img, options.roi, options.skew_budget_deg, options.locate);
    if (!rep.ok()) {
      auto full = raster::locate_and_decode(img, raster::RegionOfInterest::full_page(), options.skew_budget_deg,
                                            options.locate);
      if (full.ok()) return full;
      // keep the tally of both passes, the more specific reason of the first
      for (const auto& [k, v] : full.failure_tally) rep.failure_tally[k] += v;
    }
    return rep;
  };
  auto upright = [](PageImage img, int orientation) { return orientation == 180 ? rotate180(img) : img; };

  if (page.width <= page.height) {
    auto rep = attempt(page);
    const int o = rep.ok() ? rep.orientation : 0;
    return {std::move(rep), upright(std::move(page), o)};
  }
  // Sideways scan: try both portrait readings.
  PageImage cw = rotate90_cw(page);
  auto rep = attempt(cw);
  if (rep.ok()) return {std::move(rep), upright(std::move(cw), rep.orientation)};
  PageImage ccw = rotate90_ccw(page);
  auto rep2 = attempt(ccw);
  if (rep2.ok()) return {std::move(rep2), upright(std::move(ccw), rep2.orientation)};
  for (const auto& [k, v] : rep2.failure_tally) rep.failure_tally[k] += v;
  return {std::move(rep), std::move(page)};
}

namespace {

struct Outcome {
  enum class Kind { decoded, failed, unreadable } kind = Kind::failed;
  std::optional<PagePayload> payload;
  int orientation = 0;
  double skew = 0;
  std::string reason;
  std::string detail;
  std::optional<std::string> decoded_text;
  std::vector<std::uint8_t> png;
};

std::string describe_failure(const raster::DecodeReport& rep) {
  std::string s = "no barcode consensus on any scanline sweep; votes:";
  for (const auto& [tag, n] : rep.failure_tally) s += " " + tag + "=" + std::to_string(n);
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::OutputNotWritable, "cannot create directory " + dir.string());
}

void write_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
  try {
    write_file_atomic(path, bytes);
  } catch (const Error& e) {
    throw Error(Errc::OutputNotWritable, e.what());
  }
}

void write_text(const fs::path& path, std::string_view text) {
  write_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::string index_name(std::size_t i) { return "page-" + std::to_string(i); }

}  // namespace

SplitResult split_batch(const PageList& pages, const Roster& roster, const fs::path& out_dir,
                        const SplitOptions& options) {
  options.roi.validate();
  if (options.skew_budget_deg < 0 || options.skew_budget_deg > 10)
    throw Error(Errc::InvalidParams, "skew budget must lie in [0, 10] degrees");
  ensure_dir(out_dir);

  SplitResult result;
  result.input_pages = pages.size();
  std::map<PagePayload, std::size_t> filed_at;     // payload -> input index, this run
  std::map<PagePayload, std::size_t> dup_group;    // payload -> index into result.duplicates
  std::size_t done = 0;

  auto work = [&](std::size_t i) {
    Outcome out;
    PageImage page;
    try {
      page = pages.load(i);
    } catch (const Error& e) {
      out.kind = Outcome::Kind::unreadable;
      out.reason = "UnreadablePage";
      out.detail = e.what();
      return out;
    }
    PageDecode d = decode_page(std::move(page), options);
    if (d.report.ok()) {
      const PagePayload& p = *d.report.payload;
      if (!roster.contains(p.student_id)) {
        out.kind = Outcome::Kind::failed;
        out.reason = "UnknownStudent";
        out.detail = "decoded '" + serialize_payload(p) + "' but student '" + p.student_id + "' is not in the roster";
        out.decoded_text = serialize_payload(p);
      } else {
        out.kind = Outcome::Kind::decoded;
        out.payload = p;
        out.orientation = d.report.orientation;
        out.skew = d.report.skew_degrees;
      }
    } else {
      out.kind = Outcome::Kind::failed;
      const auto reason = d.report.failure_reason.value_or(raster::ScanFailure::NoQuorum);
      out.reason = std::string(raster::to_string(reason));
      out.detail = describe_failure(d.report);
    }
    out.png = encode_png(d.upright, options.png);
    return out;
  };

  auto quarantine = [&](std::size_t i, Outcome& o) {
    const fs::path dir = out_dir / "quarantine";
    ensure_dir(dir);
    const std::string base = index_name(i);
    if (!o.png.empty()) write_bytes(dir / (base + ".png"), o.png);
    std::string text = o.reason + "\n" + o.detail + "\n" + "source: " + pages.label(i) + "\n";
    write_text(dir / (base + ".reason.txt"), text);
    result.quarantined.push_back({i, o.reason, o.detail, o.decoded_text});
    if (options.progress) options.progress("page " + std::to_string(i) + " quarantined: " + o.reason);
  };

  auto sink = [&](std::size_t i, Outcome o) {
    if (o.kind != Outcome::Kind::decoded) {
      quarantine(i, o);
    } else {
      const PagePayload& p = *o.payload;
      const fs::path rel = fs::path(p.student_id) / filed_file_name(p);
      const bool seen = filed_at.count(p) > 0;
      std::error_code ec;
      if (!seen && !fs::exists(out_dir / rel, ec)) {
        ensure_dir(out_dir / p.student_id);
        write_bytes(out_dir / rel, o.png);
        filed_at.emplace(p, i);
        result.filed.push_back({p, rel, i, o.orientation, o.skew});
      } else {
        ensure_dir(out_dir / "duplicates");
        write_bytes(out_dir / "duplicates" / (serialize_payload(p) + "." + index_name(i) + ".png"), o.png);
        auto it = dup_group.find(p);
        if (it == dup_group.end()) {
          DuplicateGroup g;
          g.payload = p;
          if (seen) g.filed_index = filed_at.at(p);
          it = dup_group.emplace(p, result.duplicates.size()).first;
          result.duplicates.push_back(std::move(g));
        }
        result.duplicates[it->second].extra_indices.push_back(i);
        if (options.progress)
          options.progress("page " + std::to_string(i) + " repeats " + serialize_payload(p) + ", kept in duplicates/");
      }
    }
    ++done;
    if (options.progress && done % 100 == 0)
      options.progress("processed " + std::to_string(done) + "/" + std::to_string(pages.size()) + " pages");
  };

  for_each_ordered(pages.size(), std::max(1u, options.jobs), work, sink);
  write_text(out_dir / "split-report.json", result.to_json());
  return result;
}

}  // namespace examflow
