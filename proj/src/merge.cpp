// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/merge.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "examflow/error.hpp"
#include "examflow/image_io.hpp"
#include "examflow/parallel.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace examflow {

std::string_view to_string(MergeMode m) noexcept {
  switch (m) {
    case MergeMode::student_wise: return "student";
    case MergeMode::exercise_wise: return "exercise";
    case MergeMode::exercise_aggregate: return "aggregate";
  }
  return "?";
}

MergeMode parse_merge_mode(std::string_view s) {
  if (s == "student") return MergeMode::student_wise;
  if (s == "exercise") return MergeMode::exercise_wise;
  if (s == "aggregate") return MergeMode::exercise_aggregate;
  throw Error(Errc::InvalidParams, "merge mode must be student, exercise or aggregate, not '" + std::string(s) + "'");
}

FiledTree scan_tree(const fs::path& root) {
  std::error_code ec;
  if (!fs::is_directory(root, ec)) throw Error(Errc::InvalidTree, "not a directory: " + root.string());
  FiledTree tree;
  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(root, ec)) {
    const std::string name = e.path().filename().string();
    if (!e.is_directory() || name.empty() || name[0] == '.' || name == "quarantine" || name == "duplicates") continue;
    dirs.push_back(e.path());
  }
  if (ec) throw Error(Errc::InvalidTree, "cannot list " + root.string() + ": " + ec.message());
  std::sort(dirs.begin(), dirs.end());

  for (const auto& dir : dirs) {
    const std::string sid = dir.filename().string();
    std::vector<TreePage> pages;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
      if (!e.is_regular_file()) continue;
      const fs::path& p = e.path();
      if (p.extension() != ".png") continue;  // merged PDFs may live here too
      PagePayload payload;
      if (!try_parse_payload(p.stem().string(), payload) || payload.student_id != sid) {
        tree.skipped.push_back((fs::path(sid) / p.filename()).generic_string());
        continue;
      }
      pages.push_back({payload, p});
    }
    if (pages.empty()) {
      tree.empty_folders.push_back(sid);
      continue;
    }
    std::sort(pages.begin(), pages.end(), [](const TreePage& a, const TreePage& b) {
      return std::tie(a.payload.page_no, a.payload.exercise_no) < std::tie(b.payload.page_no, b.payload.exercise_no);
    });
    tree.students.emplace(sid, std::move(pages));
  }
  std::sort(tree.skipped.begin(), tree.skipped.end());
  return tree;
}

std::vector<GapWarning> find_gaps(const FiledTree& tree) {
  std::vector<GapWarning> gaps;
  for (const auto& [sid, pages] : tree.students) {
    std::set<int> have;
    for (const auto& p : pages) have.insert(p.payload.page_no);
    GapWarning g{sid, {}};
    for (int n = 1; n < *have.rbegin(); ++n)
      if (!have.count(n)) g.missing_pages.push_back(n);
    if (!g.missing_pages.empty()) gaps.push_back(std::move(g));
  }
  return gaps;
}

namespace {

std::vector<std::string> student_order(const FiledTree& tree, const Roster* roster) {
  std::vector<std::string> order;
  std::set<std::string> placed;
  if (roster) {
    for (const auto& rec : roster->students) {
      const std::string& k = roster->key_of(rec);
      if (tree.students.count(k) && placed.insert(k).second) order.push_back(k);
    }
  }
  for (const auto& [sid, pages] : tree.students)  // map order: lexicographic
    if (placed.insert(sid).second) order.push_back(sid);
  return order;
}

}  // namespace

std::vector<MergedDocument> plan_documents(const FiledTree& tree, MergeMode mode, const Roster* roster) {
  std::vector<MergedDocument> docs;
  switch (mode) {
    case MergeMode::student_wise:
      for (const auto& [sid, pages] : tree.students) {
        MergedDocument d;
        d.path = sid + ".pdf";
        for (const auto& p : pages) d.pages.push_back(p.payload);
        docs.push_back(std::move(d));
      }
      break;
    case MergeMode::exercise_wise:
      for (const auto& [sid, pages] : tree.students) {
        std::map<int, MergedDocument> by_ex;
        for (const auto& p : pages) by_ex[p.payload.exercise_no].pages.push_back(p.payload);
        for (auto& [ex, d] : by_ex) {
          d.path = fs::path(sid) / (std::to_string(ex) + ".pdf");
          docs.push_back(std::move(d));
        }
      }
      break;
    case MergeMode::exercise_aggregate: {
      std::map<int, MergedDocument> by_ex;
      for (const auto& sid : student_order(tree, roster)) {
        for (const auto& p : tree.students.at(sid)) {
          MergedDocument& d = by_ex[p.payload.exercise_no];
          if (d.pages.empty() || d.pages.back().student_id != sid) d.outline.push_back({sid, d.pages.size()});
          d.pages.push_back(p.payload);
        }
      }
      for (auto& [ex, d] : by_ex) {
        d.path = "exercise-" + std::to_string(ex) + ".pdf";
        docs.push_back(std::move(d));
      }
      break;
    }
  }
  return docs;
}

std::size_t MergeReport::page_count() const {
  std::size_t n = 0;
  for (const auto& d : documents) n += d.pages.size();
  return n;
}

std::string MergeReport::to_json() const {
  using nlohmann::ordered_json;
  ordered_json j;
  j["mode"] = to_string(mode);
  j["document_count"] = documents.size();
  j["page_count"] = page_count();
  j["documents"] = ordered_json::array();
  for (const auto& d : documents) {
    ordered_json e{{"path", d.path.generic_string()}, {"page_count", d.pages.size()}};
    e["payloads"] = ordered_json::array();
    for (const auto& p : d.pages) e["payloads"].push_back(serialize_payload(p));
    if (!d.outline.empty()) {
      e["outline"] = ordered_json::array();
      for (const auto& o : d.outline) e["outline"].push_back({{"label", o.label}, {"page_index", o.page_index}});
    }
    j["documents"].push_back(std::move(e));
  }
  j["gaps"] = ordered_json::array();
  for (const auto& g : gaps) j["gaps"].push_back({{"student_id", g.student_id}, {"missing_pages", g.missing_pages}});
  j["empty_folders"] = empty_folders;
  j["skipped"] = skipped;
  return j.dump(2) + "\n";
}

MergeReport run_merge(const MergePlan& plan, const MergeOptions& options) {
  const FiledTree tree = scan_tree(plan.input);
  MergeReport report;
  report.mode = plan.mode;
  report.documents = plan_documents(tree, plan.mode, options.roster);
  report.gaps = find_gaps(tree);
  report.empty_folders = tree.empty_folders;
  report.skipped = tree.skipped;

  std::error_code ec;
  fs::create_directories(plan.output, ec);
  if (!fs::is_directory(plan.output, ec))
    throw Error(Errc::OutputNotWritable, "cannot create directory " + plan.output.string());

  std::map<PagePayload, fs::path> where;
  for (const auto& [sid, pages] : tree.students)
    for (const auto& p : pages) where.emplace(p.payload, p.path);

  if (options.progress) {
    for (const auto& sid : tree.empty_folders) options.progress("warning: student folder '" + sid + "' is empty, skipped");
    for (const auto& g : report.gaps) {
      std::string s = "warning: " + g.student_id + " is missing page";
      for (int n : g.missing_pages) s += " " + std::to_string(n);
      options.progress(s);
    }
  }

  auto work = [&](std::size_t i) {
    const MergedDocument& d = report.documents[i];
    const fs::path target = plan.output / d.path;
    fs::create_directories(target.parent_path(), ec);
    fs::path tmp = target;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(Errc::OutputNotWritable, "cannot write " + tmp.string());
      pdf::Writer writer(out, options.pdf);
      for (const auto& p : d.pages) writer.add_page(pdf::PageSource::from_image(read_image(where.at(p))));
      writer.finish(d.outline);
      out.flush();
      if (!out) throw Error(Errc::OutputNotWritable, "write failed: " + tmp.string());
    }
    std::error_code rec;
    fs::rename(tmp, target, rec);
    if (rec) throw Error(Errc::OutputNotWritable, "cannot rename into " + target.string());
    return true;
  };
  auto sink = [&](std::size_t i, bool) {
    if (options.progress) options.progress("wrote " + report.documents[i].path.generic_string());
  };
  for_each_ordered(report.documents.size(), std::max(1u, options.jobs), work, sink);

  const std::string json = report.to_json();
  write_file_atomic(plan.output / "merge-report.json",
                    std::span(reinterpret_cast<const std::uint8_t*>(json.data()), json.size()));
  return report;
}

MergeReport merge_student_wise(const fs::path& tree, const fs::path& out, const MergeOptions& options) {
  return run_merge({MergeMode::student_wise, tree, out}, options);
}
MergeReport merge_exercise_wise(const fs::path& tree, const fs::path& out, const MergeOptions& options) {
  return run_merge({MergeMode::exercise_wise, tree, out}, options);
}
MergeReport merge_exercise_aggregate(const fs::path& tree, const fs::path& out, const MergeOptions& options) {
  return run_merge({MergeMode::exercise_aggregate, tree, out}, options);
}

}  // namespace examflow
