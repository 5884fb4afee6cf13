// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "examflow/cli.hpp"
#include "json.hpp"
#include "synth.hpp"

using namespace examflow;
using namespace examflow::cli;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err, screen;
};

Outcome run(const std::vector<std::string>& args, const std::string& keys = "", bool interactive = true) {
  std::istringstream in(keys);
  StreamKeys source(in);
  std::ostringstream out, err, screen;
  Terminal term{&source, &screen, interactive};
  const int code = run_cli(args, out, err, term);
  return {code, out.str(), err.str(), screen.str()};
}

KeyEvent key_of(const std::string& bytes) {
  std::istringstream in(bytes);
  StreamKeys keys(in);
  return next_key(keys);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) out[fs::relative(e.path(), root).string()] = slurp(e.path());
  return out;
}

const fs::path kSamples = fs::path(EXAMFLOW_SOURCE_DIR) / "samples";

std::vector<std::string> generate_flags(const fs::path& out) {
  return {"--config", (kSamples / "student_data.json").string(), "--template", (kSamples / "exam.tex").string(),
          "--exercise-map", "1,2", "--out", out.string(), "--emit-images", "--jobs", "1"};
}

std::vector<std::string> cat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

}  // namespace

TEST(Keys, Decoding) {
  EXPECT_EQ(key_of("\x1b[A").key, Key::up);
  EXPECT_EQ(key_of("\x1b[B").key, Key::down);
  EXPECT_EQ(key_of("\x1bOA").key, Key::up);
  EXPECT_EQ(key_of("\x1bOB").key, Key::down);
  EXPECT_EQ(key_of("\x1b[1;5B").key, Key::down);
  EXPECT_EQ(key_of("\x1b[C").key, Key::other);
  EXPECT_EQ(key_of("\x1b").key, Key::escape);
  EXPECT_EQ(key_of("q").key, Key::escape);
  EXPECT_EQ(key_of("\r").key, Key::enter);
  EXPECT_EQ(key_of("\n").key, Key::enter);
  EXPECT_EQ(key_of("k").key, Key::up);
  EXPECT_EQ(key_of("j").key, Key::down);
  EXPECT_EQ(key_of("3").key, Key::digit);
  EXPECT_EQ(key_of("3").digit, 3);
  EXPECT_EQ(key_of("x").key, Key::other);
  EXPECT_EQ(key_of("").key, Key::end_of_input);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run({"--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"generate", "--bogus"}).code, kExitUsage);
  EXPECT_EQ(run({"merge", "--in", "x"}).code, kExitUsage);  // --out missing
  EXPECT_EQ(run({"merge", "--in", "x", "--out", "y", "--mode", "sideways"}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
}

TEST(Cli, HelpDocumentsSubcommands) {
  const Outcome r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  for (const char* s : {"generate", "split", "merge", "scores"}) EXPECT_NE(r.out.find(s), std::string::npos) << s;
  const Outcome g = run({"generate", "--help"});
  EXPECT_EQ(g.code, kExitOk);
  for (const char* f : {"--config", "--tools", "--out", "--template", "--exercise-map", "--roi"})
    EXPECT_NE(g.out.find(f), std::string::npos) << f;
}

TEST(Cli, MergeOnEmptyTreeSucceeds) {
  testkit::TempDir dir;
  fs::create_directories(dir / "tree");
  const Outcome r = run({"merge", "--mode", "student", "--in", (dir / "tree").string(), "--out", (dir / "out").string(),
                     "--config", ""});
  EXPECT_EQ(r.code, kExitOk) << r.err;
  const auto j = nlohmann::json::parse(slurp(dir / "out/merge-report.json"));
  EXPECT_EQ(j["document_count"], 0);
}

TEST(Cli, PipelineErrorsExitOne) {
  testkit::TempDir dir;
  const Outcome r = run({"merge", "--in", (dir / "missing").string(), "--out", (dir / "out").string(), "--config", ""});
  EXPECT_EQ(r.code, kExitFailure);
  EXPECT_NE(r.err.find("InvalidTree"), std::string::npos);
  const Outcome g = run({"generate", "--config", (dir / "nope.json").string(), "--template", "t", "--exercise-map", "1",
                     "--out", (dir / "o").string()});
  EXPECT_EQ(g.code, kExitFailure);
}

TEST(Menu, NeedsTerminal) {
  const Outcome r = run({}, "", false);
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("NotATerminal"), std::string::npos);
  EXPECT_NE(r.err.find("subcommand"), std::string::npos);
}

TEST(Menu, EscapeRunsNothing) {
  testkit::TempDir dir;
  for (const char* keys : {"\x1b", "\x1b[B\x1b[Bq", ""}) {
    const Outcome r = run(cat({"menu"}, generate_flags(dir / "out")), keys);
    EXPECT_EQ(r.code, kExitOk);
    EXPECT_FALSE(fs::exists(dir / "out"));
    EXPECT_NE(r.screen.find(kTechniqueNames[0]), std::string::npos);
  }
}

TEST(Menu, ArrowsWrapAround) {
  testkit::TempDir dir;
  // up from the first entry lands on 4 (scores), which then fails on the missing scheme
  const Outcome r = run({"menu", "--out", (dir / "o").string(), "--config", (kSamples / "student_data.json").string()},
                    "\x1b[A\r");
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.screen.find("running 4"), std::string::npos);
}

TEST(Menu, TechniquesMatchSubcommandsByteForByte) {
  testkit::TempDir dir;
  // 1: generate
  const Outcome sub1 = run(cat({"generate"}, generate_flags(dir / "gen-sub")));
  ASSERT_EQ(sub1.code, kExitOk) << sub1.err;
  const Outcome menu1 = run(cat({"menu"}, generate_flags(dir / "gen-menu")), "\r");
  ASSERT_EQ(menu1.code, kExitOk) << menu1.err;
  EXPECT_TRUE(fs::exists(dir / "gen-sub/batch.pdf"));
  EXPECT_TRUE(fs::exists(dir / "gen-sub/manifest.json"));
  EXPECT_EQ(tree(dir / "gen-sub"), tree(dir / "gen-menu"));

  // 2: split the rendered pages of technique 1
  const std::vector<std::string> split_flags{"--config", (kSamples / "student_data.json").string(), "--scan",
                                             (dir / "gen-sub/pages").string(), "--jobs", "2"};
  const Outcome sub2 = run(cat(cat({"split"}, split_flags), {"--out", (dir / "split-sub").string()}));
  ASSERT_EQ(sub2.code, kExitOk) << sub2.err;
  EXPECT_NE(sub2.out.find("filed 6"), std::string::npos) << sub2.out;
  const Outcome menu2 = run(cat(cat({"menu"}, split_flags), {"--out", (dir / "split-menu").string()}), "\x1b[B\r");
  ASSERT_EQ(menu2.code, kExitOk) << menu2.err;
  EXPECT_EQ(tree(dir / "split-sub"), tree(dir / "split-menu"));
  EXPECT_EQ(tree(dir / "split-sub").count("372048/372048-2-2.png"), 1u);

  // 3: merge, chosen by digit
  const Outcome sub3 = run({"merge", "--mode", "aggregate", "--in", (dir / "split-sub").string(), "--out",
                        (dir / "merge-sub").string(), "--config", (kSamples / "student_data.json").string()});
  ASSERT_EQ(sub3.code, kExitOk) << sub3.err;
  const Outcome menu3 = run({"menu", "--merge-mode", "aggregate", "--merge-in", (dir / "split-sub").string(), "--out",
                         (dir / "merge-menu").string(), "--config", (kSamples / "student_data.json").string()},
                        "3\r");
  ASSERT_EQ(menu3.code, kExitOk) << menu3.err;
  EXPECT_EQ(tree(dir / "merge-sub"), tree(dir / "merge-menu"));
  EXPECT_TRUE(fs::exists(dir / "merge-sub/exercise-2.pdf"));

  // 4: scores
  const std::string corrections = (kSamples / "corrections").string();
  const Outcome sub4 = run({"scores", "--in", corrections, "--scheme", (kSamples / "grade_scheme.json").string(), "--out",
                        (dir / "scores-sub").string(), "--config", (kSamples / "student_data.json").string()});
  ASSERT_EQ(sub4.code, kExitOk) << sub4.err;
  const Outcome menu4 = run({"menu", "--scores-in", corrections, "--scheme", (kSamples / "grade_scheme.json").string(),
                         "--out", (dir / "scores-menu").string(), "--config", (kSamples / "student_data.json").string()},
                        "j\x1bOB\x1b[B\r");
  ASSERT_EQ(menu4.code, kExitOk) << menu4.err;
  EXPECT_EQ(tree(dir / "scores-sub"), tree(dir / "scores-menu"));
  EXPECT_EQ(sub4.out, menu4.out);
}
