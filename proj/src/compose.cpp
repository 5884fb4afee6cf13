// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/compose.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>

#include "examflow/error.hpp"
#include "examflow/font.hpp"
#include "examflow/parallel.hpp"
#include "examflow/pdf.hpp"
#include "json.hpp"

namespace examflow {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the macro starting at text[pos] ("##NAME##"), or 0.
std::size_t macro_at(std::string_view text, std::size_t pos, std::string_view& name) {
  if (text.substr(pos, 2) != "##") return 0;
  std::size_t i = pos + 2;
  if (i >= text.size() || !ident_start(text[i])) return 0;
  while (i < text.size() && ident_char(text[i])) ++i;
  if (text.substr(i, 2) != "##") return 0;
  name = text.substr(pos + 2, i - pos - 2);
  return i + 2 - pos;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

}  // namespace

std::vector<std::string> find_macros(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::string_view name;
    if (const std::size_t len = macro_at(text, i, name)) {
      out.emplace_back(name);
      i += len;
    } else {
      ++i;
    }
  }
  return out;
}

std::string substitute_macros(std::string_view text, const StudentRecord& record) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    std::string_view name;
    if (const std::size_t len = macro_at(text, i, name)) {
      auto it = record.values.find(std::string(name));
      if (it == record.values.end())
        throw Error(Errc::UnknownMacro, "##" + std::string(name) + "## does not name a roster field");
      out += it->second;
      i += len;
    } else {
      out.push_back(text[i++]);
    }
  }
  return out;
}

void ExamTemplate::validate(const RosterConfig& config) const {
  if (exercise_page_map.empty()) throw Error(Errc::InvalidTemplate, "the exercise/page map is empty");
  for (int e : exercise_page_map)
    if (e < 1) throw Error(Errc::InvalidTemplate, "exercise numbers start at 1");
  for (const auto& m : find_macros(source_text)) {
    if (std::find(config.fieldnames.begin(), config.fieldnames.end(), m) == config.fieldnames.end())
      throw Error(Errc::InvalidTemplate, "macro ##" + m + "## is not one of the fieldnames");
  }
  try {
    barcode_roi.validate();
  } catch (const Error& e) {
    throw Error(Errc::InvalidTemplate, e.what());
  }
}

std::vector<int> parse_exercise_map(std::string_view text) {
  std::vector<int> out;
  auto bad = [&] { return Error(Errc::InvalidTemplate, "bad exercise map '" + std::string(text) + "'"); };
  std::string_view rest = text;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    int exercise = 0, repeat = 1;
    const std::size_t x = item.find('x');
    std::string_view ex = item.substr(0, x);
    auto r = std::from_chars(ex.data(), ex.data() + ex.size(), exercise);
    if (r.ec != std::errc() || r.ptr != ex.data() + ex.size() || exercise < 1) throw bad();
    if (x != std::string_view::npos) {
      std::string_view rep = item.substr(x + 1);
      auto rr = std::from_chars(rep.data(), rep.data() + rep.size(), repeat);
      if (rr.ec != std::errc() || rr.ptr != rep.data() + rep.size() || repeat < 1) throw bad();
    }
    out.insert(out.end(), static_cast<std::size_t>(repeat), exercise);
  }
  if (out.empty()) throw bad();
  return out;
}

ExamTemplate load_template(const std::filesystem::path& source, std::vector<int> exercise_page_map,
                           raster::RegionOfInterest roi) {
  const auto bytes = read_file(source);
  ExamTemplate t;
  t.source_text.assign(bytes.begin(), bytes.end());
  t.exercise_page_map = std::move(exercise_page_map);
  t.barcode_roi = roi;
  if (source.has_extension()) t.source_extension = source.extension().string();
  return t;
}

PersonalizedExam personalize(const ExamTemplate& tmpl, const Roster& roster, const StudentRecord& record) {
  PersonalizedExam exam;
  exam.student_id = roster.key_of(record);
  exam.text = substitute_macros(tmpl.source_text, record);
  exam.payloads.reserve(tmpl.exercise_page_map.size());
  for (std::size_t p = 0; p < tmpl.exercise_page_map.size(); ++p)
    exam.payloads.push_back({exam.student_id, tmpl.exercise_page_map[p], static_cast<int>(p) + 1});
  return exam;
}

PageImage render_exam_page(const PersonalizedExam& exam, int page_index, const ExamTemplate& tmpl,
                           const code39::Params& params, const PageLayout& layout) {
  const PagePayload& payload = exam.payloads.at(static_cast<std::size_t>(page_index));
  const int w = mm_to_px(layout.width_mm, layout.dpi);
  const int h = mm_to_px(layout.height_mm, layout.dpi);
  PageImage page(w, h, layout.dpi);

  const int margin = mm_to_px(layout.margin_mm, layout.dpi);
  const int scale = std::max(1, static_cast<int>(layout.dpi / 100.0 + 0.5));
  const int line_h = text_height(scale) + scale * 3;
  const int header_bottom = static_cast<int>(h * 0.25);
  const int max_chars = std::max(1, (w - 2 * margin) / (6 * scale));

  int y = margin;
  const std::string id_line = "Student-id: " + exam.student_id + "    Exercise " +
                              std::to_string(payload.exercise_no) + "    Page " + std::to_string(payload.page_no) +
                              " / " + std::to_string(exam.payloads.size());
  draw_text(page, margin, y, id_line.substr(0, static_cast<std::size_t>(max_chars)), scale);
  y += 2 * line_h;
  for (const std::string& line : split_lines(exam.text)) {
    if (y + line_h > header_bottom) break;
    draw_text(page, margin, y, std::string_view(line).substr(0, static_cast<std::size_t>(max_chars)), scale);
    y += line_h;
  }
  fill_rect(page, margin, header_bottom, w - 2 * margin, std::max(1, scale / 2), 0);

  const PageImage strip =
      raster::render_barcode(code39::encode(serialize_payload(payload), params), params, layout.dpi);
  const auto& roi = tmpl.barcode_roi;
  const double cx = (roi.x + roi.w / 2) * w;
  const double cy = (roi.y + roi.h / 2) * h;
  if (strip.width > static_cast<int>(roi.w * w) || strip.height > static_cast<int>(roi.h * h))
    throw Error(Errc::InvalidTemplate, "barcode for '" + serialize_payload(payload) +
                                           "' does not fit in the barcode region");
  blit(page, strip, static_cast<int>(cx - strip.width / 2.0), static_cast<int>(cy - strip.height / 2.0));
  return page;
}

BatchPages::BatchPages(const ExamTemplate& tmpl, const Roster& roster, code39::Params params, PageLayout layout)
    : tmpl_(&tmpl), params_(params), layout_(layout) {
  tmpl.validate(roster.config);
  params.validate();
  exams_.reserve(roster.students.size());
  for (const auto& rec : roster.students) exams_.push_back(personalize(tmpl, roster, rec));
  for (std::size_t s = 0; s < exams_.size(); ++s)
    for (int p = 0; p < tmpl.page_count(); ++p) index_.emplace_back(s, p);
}

const PagePayload& BatchPages::payload(std::size_t i) const {
  const auto [s, p] = index_.at(i);
  return exams_[s].payloads[static_cast<std::size_t>(p)];
}

PageImage BatchPages::render(std::size_t i) const {
  const auto [s, p] = index_.at(i);
  return render_exam_page(exams_[s], p, *tmpl_, params_, layout_);
}

std::size_t Manifest::total_pages() const {
  std::size_t n = 0;
  for (const auto& s : students) n += static_cast<std::size_t>(s.page_count);
  return n;
}

std::string Manifest::to_json() const {
  nlohmann::ordered_json j;
  j["mode"] = mode == GenerateMode::native ? "native" : "external";
  j["document"] = document.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(document);
  j["total_pages"] = total_pages();
  j["students"] = nlohmann::ordered_json::array();
  for (const auto& s : students) {
    j["students"].push_back({{"student_id", s.student_id}, {"page_count", s.page_count}, {"payloads", s.payloads}});
  }
  return j.dump(2) + "\n";
}

namespace {

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw Error(Errc::OutputNotWritable, "cannot create directory " + dir.string());
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

Manifest manifest_for(const std::vector<PersonalizedExam>& exams, GenerateMode mode) {
  Manifest m;
  m.mode = mode;
  for (const auto& e : exams) {
    ManifestStudent s;
    s.student_id = e.student_id;
    s.page_count = static_cast<int>(e.payloads.size());
    for (const auto& p : e.payloads) s.payloads.push_back(serialize_payload(p));
    m.students.push_back(std::move(s));
  }
  return m;
}

void generate_native(const BatchPages& pages, const GenerateOptions& opt, Manifest& manifest) {
  if (pages.size() == 0) return;
  const auto pdf_path = opt.out_dir / "batch.pdf";
  auto tmp = pdf_path;
  tmp += ".tmp";
  if (opt.emit_images) ensure_dir(opt.out_dir / "pages");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::OutputNotWritable, "cannot write " + tmp.string());
    pdf::Writer writer(out);
    struct Rendered {
      PageImage image;
      std::vector<std::uint8_t> png;
    };
    for_each_ordered(
        pages.size(), opt.jobs,
        [&](std::size_t i) {
          Rendered r{pages.render(i), {}};
          if (opt.emit_images) r.png = encode_png(r.image, opt.png);
          return r;
        },
        [&](std::size_t i, Rendered r) {
          writer.add_page(pdf::PageSource::from_image(std::move(r.image)));
          if (opt.emit_images) {
            char name[32];
            std::snprintf(name, sizeof name, "page-%05zu.png", i + 1);
            write_file_atomic(opt.out_dir / "pages" / name, r.png);
          }
          if (opt.progress && (i + 1) % 50 == 0)
            opt.progress("rendered " + std::to_string(i + 1) + "/" + std::to_string(pages.size()) + " pages");
        });
    writer.finish();
    if (!out) throw Error(Errc::OutputNotWritable, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, pdf_path, ec);
  if (ec) throw Error(Errc::OutputNotWritable, "cannot rename into " + pdf_path.string());
  manifest.document = "batch.pdf";
}

void generate_external(const ExamTemplate& tmpl, const std::vector<PersonalizedExam>& exams,
                       const GenerateOptions& opt, Manifest& manifest) {
  if (!opt.tools) throw Error(Errc::ToolNotFound, "external mode needs a tool config");
  for (std::string_view name : {kTypesetter, kPdfConcat}) {
    const ToolEntry* e = opt.tools->find(name);
    if (!e) throw Error(Errc::ToolNotFound, "external mode needs a '" + std::string(name) + "' tool entry");
    if (resolve_executable(e->path).empty())
      throw Error(Errc::ToolNotFound, std::string(name) + ": executable '" + e->path + "' not found");
  }
  if (exams.empty()) return;

  const auto sources = std::filesystem::absolute(opt.out_dir / "sources");
  ensure_dir(sources);
  std::vector<std::string> outputs;
  for (const auto& exam : exams) {
    const auto src = sources / (exam.student_id + tmpl.source_extension);
    write_text_atomic(src, exam.text);
    ToolVars vars;
    vars.scalars = {{"input", src.string()},
                    {"outdir", sources.string()},
                    {"jobname", exam.student_id},
                    {"output", (sources / (exam.student_id + ".pdf")).string()}};
    run_tool(*opt.tools, kTypesetter, vars, sources);
    const auto produced = sources / (exam.student_id + ".pdf");
    if (!std::filesystem::exists(produced))
      throw Error(Errc::ToolFailed, "typesetter did not produce " + produced.string());
    outputs.push_back(produced.string());
    if (opt.progress) opt.progress("typeset " + exam.student_id);
  }
  ToolVars vars;
  vars.inputs = outputs;
  vars.scalars = {{"output", std::filesystem::absolute(opt.out_dir / "batch.pdf").string()},
                  {"outdir", std::filesystem::absolute(opt.out_dir).string()}};
  run_tool(*opt.tools, kPdfConcat, vars, opt.out_dir);
  if (!std::filesystem::exists(opt.out_dir / "batch.pdf"))
    throw Error(Errc::ToolFailed, "pdfconcat did not produce batch.pdf");
  manifest.document = "batch.pdf";
}

}  // namespace

Manifest generate_batch(const ExamTemplate& tmpl, const Roster& roster, const GenerateOptions& opt) {
  if (opt.out_dir.empty()) throw Error(Errc::OutputNotWritable, "no output directory given");
  ensure_dir(opt.out_dir);
  BatchPages pages(tmpl, roster, opt.params, opt.layout);
  Manifest manifest = manifest_for(pages.exams(), opt.mode);
  if (opt.mode == GenerateMode::native) generate_native(pages, opt, manifest);
  else generate_external(tmpl, pages.exams(), opt, manifest);
  write_text_atomic(opt.out_dir / "manifest.json", manifest.to_json());
  return manifest;
}

}  // namespace examflow
