// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/cli.hpp"

#include <poll.h>
#include <termios.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "examflow/compose.hpp"
#include "examflow/error.hpp"
#include "examflow/merge.hpp"
#include "examflow/parallel.hpp"
#include "examflow/roster.hpp"
#include "examflow/scores.hpp"
#include "examflow/split.hpp"
#include "examflow/tools.hpp"

namespace fs = std::filesystem;

namespace examflow::cli {

namespace {

// A technique was started without what it needs; same exit code as a bad flag.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

raster::RegionOfInterest parse_roi(const std::string& text) {
  if (text.empty()) return {};
  double v[4];
  char tail = 0;
  if (std::sscanf(text.c_str(), "%lf,%lf,%lf,%lf%c", &v[0], &v[1], &v[2], &v[3], &tail) != 4)
    throw UsageError("--roi expects x,y,w,h as page fractions, got '" + text + "'");
  raster::RegionOfInterest roi{v[0], v[1], v[2], v[3]};
  roi.validate();
  return roi;
}

ToolConfig tools_for(const Options& o) {
  if (!o.tools.empty()) return load_tool_config(o.tools);
  std::error_code ec;
  if (fs::is_regular_file("toolconfig.json", ec)) return load_tool_config("toolconfig.json");
  return {};
}

Roster roster_for(const Options& o) {
  if (o.config.empty()) throw UsageError("--config is required");
  return load_roster(load_student_data(o.config));
}

unsigned jobs_for(const Options& o) { return o.jobs > 0 ? o.jobs : default_jobs(); }

void require(bool present, const char* flag, const char* technique) {
  if (!present) throw UsageError(std::string(technique) + " needs " + flag);
}

std::function<void(std::string_view)> progress_to(std::ostream& err) {
  return [&err](std::string_view msg) { err << "examflow: " << msg << "\n" << std::flush; };
}

int generate(const Options& o, std::ostream& out, std::ostream& err) {
  require(!o.template_path.empty(), "--template", "generate");
  require(!o.exercise_map.empty(), "--exercise-map", "generate");
  require(!o.out.empty(), "--out", "generate");
  const Roster roster = roster_for(o);
  const ExamTemplate tmpl = load_template(o.template_path, parse_exercise_map(o.exercise_map), parse_roi(o.roi));

  GenerateOptions g;
  if (o.generate_mode == "native") g.mode = GenerateMode::native;
  else if (o.generate_mode == "external") g.mode = GenerateMode::external;
  else throw UsageError("--mode must be native or external");
  g.params = {o.module_width_mm, o.ratio, o.bar_height_mm};
  g.params.validate();
  g.layout.dpi = o.dpi;
  g.out_dir = o.out;
  const ToolConfig tools = tools_for(o);
  g.tools = &tools;
  g.emit_images = o.emit_images;
  g.jobs = jobs_for(o);
  g.progress = progress_to(err);
  const Manifest m = generate_batch(tmpl, roster, g);
  out << "generated " << m.total_pages() << " pages for " << m.students.size() << " students";
  if (!m.document.empty()) out << " -> " << (o.out / m.document).string();
  out << "\n";
  return kExitOk;
}

int split(const Options& o, std::ostream& out, std::ostream& err) {
  require(!o.scan.empty(), "--scan", "split");
  require(!o.out.empty(), "--out", "split");
  const Roster roster = roster_for(o);
  const ToolConfig tools = tools_for(o);
  IngestOptions ingest;
  ingest.dpi = o.dpi;
  const PageList pages = ingest_scan(o.scan, tools, ingest);

  SplitOptions s;
  s.roi = parse_roi(o.roi);
  s.skew_budget_deg = o.skew_budget;
  s.jobs = jobs_for(o);
  s.progress = progress_to(err);
  const SplitResult r = split_batch(pages, roster, o.out, s);
  out << "filed " << r.filed.size() << ", quarantined " << r.quarantined.size() << ", duplicates "
      << r.duplicate_extras() << " of " << r.input_pages << " pages\n";
  return kExitOk;
}

int merge(const Options& o, std::ostream& out, std::ostream& err) {
  require(!o.merge_in.empty(), "--in", "merge");
  require(!o.out.empty(), "--out", "merge");
  MergePlan plan{parse_merge_mode(o.merge_mode), o.merge_in, o.out};
  std::optional<Roster> roster;
  std::error_code ec;
  if (!o.config.empty() && fs::is_regular_file(o.config, ec)) roster = roster_for(o);
  MergeOptions m;
  m.roster = roster ? &*roster : nullptr;
  m.jobs = jobs_for(o);
  m.progress = progress_to(err);
  const MergeReport r = run_merge(plan, m);
  out << "wrote " << r.documents.size() << " documents (" << r.page_count() << " pages), " << r.gaps.size()
      << " students with gaps\n";
  return kExitOk;
}

int scores(const Options& o, std::ostream& out, std::ostream&) {
  require(!o.scheme.empty(), "--scheme", "scores");
  require(!o.out.empty(), "--out", "scores");
  const Roster roster = roster_for(o);
  const GradeScheme scheme = load_grade_scheme(o.scheme);
  std::vector<fs::path> files;
  for (const auto& in : o.score_inputs) {
    std::error_code ec;
    if (fs::is_directory(in, ec)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(in))
        if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(in);
    }
  }
  const ScoreTable table = collect_scores(files, roster, scheme);
  out << write_score_outputs(table, scheme, o.out);
  return kExitOk;
}

}  // namespace

int StreamKeys::read(int) {
  const int c = in_.get();
  return c == std::char_traits<char>::eof() ? -1 : c;
}

KeyEvent next_key(KeySource& keys) {
  const int c = keys.read(-1);
  if (c < 0) return {Key::end_of_input};
  if (c == '\r' || c == '\n') return {Key::enter};
  if (c == 'q' || c == 'Q') return {Key::escape};
  if (c == 'k') return {Key::up};
  if (c == 'j') return {Key::down};
  if (c >= '0' && c <= '9') return {Key::digit, c - '0'};
  if (c != 0x1b) return {Key::other};
  // ESC: a lone press, or the start of ESC [ A / ESC O A style sequences.
  const int c2 = keys.read(50);
  if (c2 != '[' && c2 != 'O') return {Key::escape};
  int c3 = keys.read(50);
  while (c3 >= '0' && c3 <= '9') c3 = keys.read(50);  // parameters, e.g. ESC [ 1 ; 5 A
  if (c3 == ';') {
    do c3 = keys.read(50);
    while (c3 >= '0' && c3 <= '9');
  }
  if (c3 == 'A') return {Key::up};
  if (c3 == 'B') return {Key::down};
  return {Key::other};
}

int run_technique(int id, const Options& options, std::ostream& out, std::ostream& err) {
  try {
    switch (id) {
      case 1: return generate(options, out, err);
      case 2: return split(options, out, err);
      case 3: return merge(options, out, err);
      case 4: return scores(options, out, err);
      default: throw UsageError("technique must be 1, 2, 3 or 4");
    }
  } catch (const UsageError& e) {
    err << "examflow: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "examflow: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "examflow: " << e.what() << "\n";
    return kExitFailure;
  }
}

int run_menu(const Options& options, Terminal& term, std::ostream& out, std::ostream& err) {
  if (!term.interactive || !term.keys || !term.screen) {
    err << "examflow: " << Error(Errc::NotATerminal, "the menu needs an interactive terminal").what()
        << "\nuse a subcommand instead: generate, split, merge, scores (see --help)\n";
    return kExitUsage;
  }
  std::ostream& screen = *term.screen;
  constexpr int n = 4;
  int current = 0;
  auto draw = [&] {
    screen << "\x1b[2J\x1b[H"
           << "examflow - choose a technique (arrow keys, Enter to run, Esc to leave)\n\n";
    for (int i = 0; i < n; ++i) {
      if (i == current) screen << "\x1b[7m> " << (i + 1) << "  " << kTechniqueNames[i] << "\x1b[0m\n";
      else screen << "  " << (i + 1) << "  " << kTechniqueNames[i] << "\n";
    }
    screen << std::flush;
  };
  draw();
  for (;;) {
    const KeyEvent k = next_key(*term.keys);
    switch (k.key) {
      case Key::up: current = (current + n - 1) % n; break;
      case Key::down: current = (current + 1) % n; break;
      case Key::digit:
        if (k.digit >= 1 && k.digit <= n) current = k.digit - 1;
        break;
      case Key::enter:
        screen << "\nrunning " << (current + 1) << ": " << kTechniqueNames[current] << "\n" << std::flush;
        return run_technique(current + 1, options, out, err);
      case Key::escape:
      case Key::end_of_input:
        screen << "\n" << std::flush;
        return kExitOk;
      case Key::other: break;
    }
    draw();
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal& term) {
  Options o;
  CLI::App app{"Barcode-stamped exam pipeline: generate personalised exams, split scanned batches by "
               "their Code 39 barcodes, merge pages per student or exercise, and collect scores.\n"
               "Without a subcommand the interactive menu starts."};
  app.name("examflow");
  app.require_subcommand(0, 1);

  auto common = [&](CLI::App* s) {
    s->add_option("--config", o.config, "student_data.json describing the roster")->capture_default_str();
    s->add_option("--tools", o.tools, "toolconfig.json with external commands (default: ./toolconfig.json if present)");
    s->add_option("--out", o.out, "output directory");
    s->add_option("--jobs", o.jobs, "worker threads (default: EXAMFLOW_JOBS, else logical CPUs)")
        ->check(CLI::PositiveNumber);
  };
  auto generate_flags = [&](CLI::App* s) {
    s->add_option("--template", o.template_path, "exam source with ##FIELD## macros");
    s->add_option("--exercise-map", o.exercise_map, "exercise of each page, e.g. 1,1,2,3 or 1x2,2,3");
    s->add_option("--dpi", o.dpi, "page raster density (also used to rasterize PDF scans)")->capture_default_str();
    s->add_option("--mode", o.generate_mode, "native or external")
        ->check(CLI::IsMember({"native", "external"}))
        ->capture_default_str();
    s->add_flag("--emit-images", o.emit_images, "also write every page as pages/page-NNNNN.png");
    s->add_option("--module-width", o.module_width_mm, "narrow bar width in mm")->capture_default_str();
    s->add_option("--ratio", o.ratio, "wide/narrow ratio, 2 to 3")->capture_default_str();
    s->add_option("--bar-height", o.bar_height_mm, "bar height in mm")->capture_default_str();
  };
  auto roi_flag = [&](CLI::App* s) {
    s->add_option("--roi", o.roi, "barcode region x,y,w,h as page fractions (default 0,0.85,1,0.15)");
  };
  auto split_flags = [&](CLI::App* s) {
    s->add_option("--scan", o.scan, "scanned PDF, image, or directory of page images");
    s->add_option("--skew-budget", o.skew_budget, "largest skew to search, degrees (0-10)")
        ->check(CLI::Range(0.0, 10.0))
        ->capture_default_str();
  };
  auto merge_flags = [&](CLI::App* s, const std::string& mode_flag) {
    s->add_option("--in", o.merge_in, "split output tree");
    s->add_option(mode_flag, o.merge_mode, "student, exercise or aggregate")
        ->check(CLI::IsMember({"student", "exercise", "aggregate"}))
        ->capture_default_str();
  };
  auto scores_flags = [&](CLI::App* s, const std::string& in_flag) {
    s->add_option(in_flag, o.score_inputs, "corrector CSV files or directories of them");
    s->add_option("--scheme", o.scheme, "grade scheme JSON");
  };

  CLI::App* gen = app.add_subcommand("generate", "1: generate the personalised exam batch");
  common(gen);
  generate_flags(gen);
  roi_flag(gen);
  gen->get_option("--template")->required();
  gen->get_option("--exercise-map")->required();
  gen->get_option("--out")->required();

  CLI::App* spl = app.add_subcommand("split", "2: decode and file a scanned batch");
  common(spl);
  split_flags(spl);
  roi_flag(spl);
  spl->add_option("--dpi", o.dpi, "rasterization density for PDF scans")->capture_default_str();
  spl->get_option("--scan")->required();
  spl->get_option("--out")->required();

  CLI::App* mrg = app.add_subcommand("merge", "3: merge filed pages into PDFs");
  common(mrg);
  merge_flags(mrg, "--mode");
  mrg->get_option("--in")->required();
  mrg->get_option("--out")->required();

  CLI::App* sco = app.add_subcommand("scores", "4: collect corrector scores and plot grades");
  common(sco);
  scores_flags(sco, "--in");
  sco->get_option("--scheme")->required();
  sco->get_option("--out")->required();

  CLI::App* menu = app.add_subcommand("menu", "interactive menu over techniques 1-4 (the default)");
  common(menu);
  generate_flags(menu);
  roi_flag(menu);
  split_flags(menu);
  merge_flags(menu, "--merge-mode");
  menu->add_option("--merge-in", o.merge_in, "split output tree for technique 3");
  scores_flags(menu, "--scores-in");
  menu->get_option("--scheme")->description("grade scheme JSON for technique 4");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (gen->parsed()) return run_technique(1, o, out, err);
  if (spl->parsed()) return run_technique(2, o, out, err);
  if (mrg->parsed()) return run_technique(3, o, out, err);
  if (sco->parsed()) return run_technique(4, o, out, err);
  return run_menu(o, term, out, err);
}

namespace {

// Raw keyboard input on a terminal; ISIG stays on so Ctrl-C still works.
class TtyKeys final : public KeySource {
public:
  explicit TtyKeys(int fd) : fd_(fd) {}
  ~TtyKeys() override {
    if (raw_) tcsetattr(fd_, TCSANOW, &saved_);
  }
  TtyKeys(const TtyKeys&) = delete;
  TtyKeys& operator=(const TtyKeys&) = delete;

  int read(int timeout_ms) override {
    if (!raw_ && tcgetattr(fd_, &saved_) == 0) {
      termios t = saved_;
      t.c_lflag &= static_cast<tcflag_t>(~(ICANON | ECHO));
      t.c_cc[VMIN] = 1;
      t.c_cc[VTIME] = 0;
      raw_ = tcsetattr(fd_, TCSANOW, &t) == 0;
    }
    pollfd p{fd_, POLLIN, 0};
    if (poll(&p, 1, timeout_ms) <= 0) return -1;
    unsigned char c;
    return ::read(fd_, &c, 1) == 1 ? c : -1;
  }

private:
  int fd_;
  termios saved_{};
  bool raw_ = false;
};

}  // namespace

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  TtyKeys keys(STDIN_FILENO);
  Terminal term{&keys, &std::cout, isatty(STDIN_FILENO) && isatty(STDOUT_FILENO)};
  return run_cli(args, std::cout, std::cerr, term);
}

}  // namespace examflow::cli
