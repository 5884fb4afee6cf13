// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "examflow/compose.hpp"
#include "examflow/error.hpp"
#include "examflow/split.hpp"
#include "json.hpp"
#include "pdf_validator.hpp"
#include "synth.hpp"

using namespace examflow;

namespace {

RosterConfig config() {
  RosterConfig c;
  c.fieldnames = {"LastName", "FirstName", "StudentID", "Email"};
  c.key = "StudentID";
  return c;
}

Roster three_students() {
  return parse_roster(config(),
                      "Vanaken;Hans;372048;hans.vanaken@some-uni.eu\n"
                      "Jansen;Marie;372049;marie.jansen@some-uni.eu\n"
                      "Peeters;Luc;372050;luc.peeters@some-uni.eu\n");
}

ExamTemplate fifteen_pages() {
  ExamTemplate t;
  t.source_text = "Name: ##FirstName## ##LastName##\nID: ##StudentID##\nMail: ##Email##\n";
  t.exercise_page_map = parse_exercise_map("1x5,2x5,3x5");
  return t;
}

StudentRecord vanaken() { return three_students().students[0]; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_script(const std::filesystem::path& p, const std::string& body) {
  std::ofstream(p) << "#!/bin/sh\n" << body;
  std::filesystem::permissions(p, std::filesystem::perms::owner_all);
}

Errc error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::Io;
}

}  // namespace

TEST(Macros, PaperExample) {
  EXPECT_EQ(substitute_macros("Name: ##FirstName## ##LastName##", vanaken()), "Name: Hans Vanaken");
}

TEST(Macros, NoMacrosIsIdentity) {
  for (const char* t : {"", "plain text", "# single # hashes #", "\\def\\x#1{##1}", "####", "## spaced ##"})
    EXPECT_EQ(substitute_macros(t, vanaken()), t);
}

TEST(Macros, UnknownMacro) {
  EXPECT_EQ(error_of([] { substitute_macros("##Nickname##", vanaken()); }), Errc::UnknownMacro);
  // case-sensitive
  EXPECT_EQ(error_of([] { substitute_macros("##FIRSTNAME##", vanaken()); }), Errc::UnknownMacro);
}

TEST(Macros, SubstitutedValuesAreNotRescanned) {
  StudentRecord r = vanaken();
  r.values["FirstName"] = "##LastName##";
  EXPECT_EQ(substitute_macros("##FirstName##/##LastName##", r), "##LastName##/Vanaken");
}

TEST(Macros, FindsIdentifiersOnly) {
  EXPECT_EQ(find_macros("a ##X## ##1 ##y_2## ##3z## ##X##"), (std::vector<std::string>{"X", "y_2", "X"}));
}

TEST(Macros, SubstitutionMatchesNaiveReplaceForDisjointValues) {
  // Oracle: repeated find/replace per field, valid when no value contains "##".
  const StudentRecord r = vanaken();
  const std::string text = "##Email## <##StudentID##> ##FirstName####LastName## ##Email##";
  std::string expect = text;
  for (const auto& [k, v] : r.values) {
    const std::string token = "##" + k + "##";
    for (std::size_t at; (at = expect.find(token)) != std::string::npos;) expect.replace(at, token.size(), v);
  }
  EXPECT_EQ(substitute_macros(text, r), expect);
}

TEST(ExerciseMap, Parses) {
  EXPECT_EQ(parse_exercise_map("1,1,2"), (std::vector<int>{1, 1, 2}));
  EXPECT_EQ(parse_exercise_map("1x2, 2x2,3"), (std::vector<int>{1, 1, 2, 2, 3}));
  for (const char* bad : {"", "0", "1,,2", "x2", "1x0", "a", "-1"})
    EXPECT_EQ(error_of([&] { parse_exercise_map(bad); }), Errc::InvalidTemplate) << bad;
}

TEST(Template, Validation) {
  const ExamTemplate ok = fifteen_pages();
  EXPECT_NO_THROW(ok.validate(config()));
  ExamTemplate t = ok;
  t.exercise_page_map.clear();
  EXPECT_EQ(error_of([&] { t.validate(config()); }), Errc::InvalidTemplate);
  t = ok;
  t.exercise_page_map[3] = 0;
  EXPECT_EQ(error_of([&] { t.validate(config()); }), Errc::InvalidTemplate);
  t = ok;
  t.source_text += "##Nickname##";
  EXPECT_EQ(error_of([&] { t.validate(config()); }), Errc::InvalidTemplate);
}

TEST(Template, SampleLoads) {
  const auto dir = std::filesystem::path(EXAMFLOW_SOURCE_DIR) / "samples";
  const ExamTemplate t = load_template(dir / "exam.tex", parse_exercise_map("1x5,2x5,3x5"));
  const Roster roster = load_roster(load_student_data(dir / "student_data.json"));
  EXPECT_NO_THROW(t.validate(roster.config));
  EXPECT_NE(personalize(t, roster, roster.students[0]).text.find("Hans Vanaken"), std::string::npos);
}

TEST(Batch, FortyFivePagesUniqueOrderedAndDecodable) {
  const Roster roster = three_students();
  const ExamTemplate tmpl = fifteen_pages();
  const BatchPages pages(tmpl, roster, {}, {});
  ASSERT_EQ(pages.size(), 45u);

  std::set<std::string> seen;
  SplitOptions sopt;
  sopt.roi = tmpl.barcode_roi;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    const PagePayload& p = pages.payload(i);
    // roster order x template page order
    EXPECT_EQ(p.student_id, roster.key_of(roster.students[i / 15]));
    EXPECT_EQ(p.page_no, static_cast<int>(i % 15) + 1);
    EXPECT_EQ(p.exercise_no, tmpl.exercise_page_map[i % 15]);
    EXPECT_TRUE(seen.insert(serialize_payload(p)).second);

    const PageImage img = pages.render(i);
    EXPECT_EQ(img.width, 2480);
    EXPECT_EQ(img.height, 3508);
    const PageDecode d = decode_page(img, sopt);
    ASSERT_TRUE(d.report.ok()) << i;
    EXPECT_EQ(*d.report.payload, p);
    EXPECT_EQ(d.report.orientation, 0);
  }
}

TEST(Batch, PersonalizationIsolation) {
  const Roster roster = three_students();
  const BatchPages pages(fifteen_pages(), roster, {}, {});
  const auto& exams = pages.exams();
  ASSERT_EQ(exams.size(), 3u);
  for (std::size_t a = 0; a < exams.size(); ++a)
    for (std::size_t b = 0; b < roster.students.size(); ++b)
      for (const auto& [field, value] : roster.students[b].values) {
        const bool present = exams[a].text.find(value) != std::string::npos;
        EXPECT_EQ(present, a == b) << exams[a].student_id << " vs " << value;
      }
}

TEST(Batch, PageRenderingIsDeterministic) {
  const Roster roster = three_students();
  const ExamTemplate tmpl = fifteen_pages();
  const BatchPages a(tmpl, roster, {}, {}), b(tmpl, roster, {}, {});
  EXPECT_EQ(a.render(17), b.render(17));
  EXPECT_NE(a.render(17), a.render(18));
}

TEST(Batch, BarcodeMustFitRegion) {
  ExamTemplate tmpl = fifteen_pages();
  tmpl.barcode_roi = {0.4, 0.9, 0.05, 0.05};
  const BatchPages pages(tmpl, three_students(), {}, {});
  EXPECT_EQ(error_of([&] { pages.render(0); }), Errc::InvalidTemplate);
}

TEST(Generate, NativeWritesValidPdfAndManifest) {
  testkit::TempDir dir;
  GenerateOptions opt;
  opt.out_dir = dir.path();
  opt.emit_images = true;
  opt.jobs = 2;
  ExamTemplate tmpl = fifteen_pages();
  tmpl.exercise_page_map = {1, 2};
  const Manifest m = generate_batch(tmpl, three_students(), opt);
  EXPECT_EQ(m.total_pages(), 6u);
  EXPECT_EQ(m.document, "batch.pdf");

  const auto check = testkit::check_pdf(slurp(dir / "batch.pdf"));
  ASSERT_TRUE(check.ok) << check.error;
  EXPECT_EQ(check.page_count, 6);
  EXPECT_TRUE(std::filesystem::exists(dir / "pages/page-00001.png"));
  EXPECT_TRUE(std::filesystem::exists(dir / "pages/page-00006.png"));
  EXPECT_FALSE(std::filesystem::exists(dir / "pages/page-00007.png"));

  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_EQ(j["mode"], "native");
  EXPECT_EQ(j["total_pages"], 6);
  EXPECT_EQ(j["students"][1]["student_id"], "372049");
  EXPECT_EQ(j["students"][1]["payloads"][1], "372049-2-2");
}

TEST(Generate, DeterministicAcrossJobs) {
  testkit::TempDir a, b;
  GenerateOptions opt;
  ExamTemplate tmpl = fifteen_pages();
  tmpl.exercise_page_map = {1, 1, 2};
  opt.out_dir = a.path();
  opt.jobs = 1;
  generate_batch(tmpl, three_students(), opt);
  opt.out_dir = b.path();
  opt.jobs = 3;
  generate_batch(tmpl, three_students(), opt);
  EXPECT_EQ(slurp(a / "batch.pdf"), slurp(b / "batch.pdf"));
  EXPECT_EQ(slurp(a / "manifest.json"), slurp(b / "manifest.json"));
}

TEST(Generate, EmptyRoster) {
  testkit::TempDir dir;
  GenerateOptions opt;
  opt.out_dir = dir.path();
  const Manifest m = generate_batch(fifteen_pages(), parse_roster(config(), ""), opt);
  EXPECT_EQ(m.total_pages(), 0u);
  EXPECT_TRUE(m.students.empty());
  EXPECT_FALSE(std::filesystem::exists(dir / "batch.pdf"));
  const auto j = nlohmann::json::parse(slurp(dir / "manifest.json"));
  EXPECT_TRUE(j["students"].empty());
  EXPECT_TRUE(j["document"].is_null());
}

TEST(Generate, ExternalModeRunsConfiguredTools) {
  testkit::TempDir dir;
  const auto bin = dir / "bin";
  std::filesystem::create_directories(bin);
  // Fake typesetter: "PDF" is the substituted source itself. Fake concat: cat.
  write_script(bin / "typeset.sh", "cp \"$1\" \"$2/$3.pdf\"\n");
  write_script(bin / "concat.sh", "out=\"$1\"; shift; cat \"$@\" > \"$out\"\n");
  ToolConfig tools;
  tools.tools["typesetter"] = {(bin / "typeset.sh").string(), {"{input}", "{outdir}", "{jobname}"}};
  tools.tools["pdfconcat"] = {(bin / "concat.sh").string(), {"{output}", "{inputs}"}};

  GenerateOptions opt;
  opt.mode = GenerateMode::external;
  opt.tools = &tools;
  opt.out_dir = dir / "out";
  const Manifest m = generate_batch(fifteen_pages(), three_students(), opt);
  EXPECT_EQ(m.total_pages(), 45u);
  const std::string src = slurp(dir / "out/sources/372049.tex");
  EXPECT_EQ(src, "Name: Marie Jansen\nID: 372049\nMail: marie.jansen@some-uni.eu\n");
  const std::string batch = slurp(dir / "out/batch.pdf");
  EXPECT_LT(batch.find("Hans"), batch.find("Marie"));
  EXPECT_LT(batch.find("Marie"), batch.find("Luc"));
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "out/manifest.json"))["mode"], "external");
}

TEST(Generate, ExternalModeErrors) {
  testkit::TempDir dir;
  GenerateOptions opt;
  opt.mode = GenerateMode::external;
  opt.out_dir = dir.path();
  EXPECT_EQ(error_of([&] { generate_batch(fifteen_pages(), three_students(), opt); }), Errc::ToolNotFound);

  ToolConfig tools;
  tools.tools["typesetter"] = {"/no/such/latexmk", {}};
  tools.tools["pdfconcat"] = {"/bin/true", {}};
  opt.tools = &tools;
  EXPECT_EQ(error_of([&] { generate_batch(fifteen_pages(), three_students(), opt); }), Errc::ToolNotFound);

  write_script(dir / "fail.sh", "echo 'LaTeX Error: File aufgabe.cls not found' >&2\nexit 12\n");
  tools.tools["typesetter"] = {(dir / "fail.sh").string(), {}};
  try {
    generate_batch(fifteen_pages(), three_students(), opt);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ToolFailed);
    EXPECT_NE(std::string(e.what()).find("aufgabe.cls"), std::string::npos);
  }

  // typesetter exits 0 but writes nothing
  tools.tools["typesetter"] = {"/bin/true", {}};
  EXPECT_EQ(error_of([&] { generate_batch(fifteen_pages(), three_students(), opt); }), Errc::ToolFailed);
}
