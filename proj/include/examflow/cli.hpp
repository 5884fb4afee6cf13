// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace examflow::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Byte source for the menu. read() returns the next byte, or -1 when nothing
/// arrives within timeout_ms (negative: wait forever) or the input ended.
class KeySource {
public:
  virtual ~KeySource() = default;
  virtual int read(int timeout_ms) = 0;
};

class StreamKeys final : public KeySource {
public:
  explicit StreamKeys(std::istream& in) : in_(in) {}
  int read(int) override;

private:
  std::istream& in_;
};

enum class Key { up, down, enter, escape, digit, other, end_of_input };

struct KeyEvent {
  Key key = Key::other;
  int digit = 0;
};

/// Decodes one key press: arrow escape sequences (CSI and SS3), Enter,
/// a lone Escape, 'q', j/k, and digits.
KeyEvent next_key(KeySource& keys);

/// What the menu talks to. `interactive` is false when stdin/stdout are not a terminal.
struct Terminal {
  KeySource* keys = nullptr;
  std::ostream* screen = nullptr;
  bool interactive = false;
};

/// Technique settings shared by subcommands and the menu.
struct Options {
  std::filesystem::path config = "student_data.json";
  std::filesystem::path tools;  // empty: ./toolconfig.json if present
  std::filesystem::path out;
  unsigned jobs = 0;  // 0: EXAMFLOW_JOBS, else logical CPUs

  // generate
  std::filesystem::path template_path;
  std::string exercise_map;
  std::string roi;  // "x,y,w,h" page fractions; empty = bottom band default
  double dpi = 300;
  std::string generate_mode = "native";
  bool emit_images = false;
  double module_width_mm = 0.5;
  double ratio = 2.25;
  double bar_height_mm = 5.0;

  // split
  std::filesystem::path scan;
  double skew_budget = 3.0;

  // merge
  std::filesystem::path merge_in;
  std::string merge_mode = "exercise";

  // scores
  std::vector<std::filesystem::path> score_inputs;
  std::filesystem::path scheme;
};

inline const char* const kTechniqueNames[] = {"Generate personalised exams", "Split scanned batch",
                                              "Merge filed pages", "Collect scores"};

/// Runs technique 1..4 with the given settings. Returns an exit code;
/// diagnostics go to err, results (histogram, summaries) to out.
int run_technique(int id, const Options& options, std::ostream& out, std::ostream& err);

/// Arrow-key menu; Enter runs the highlighted technique, Escape or q leaves.
int run_menu(const Options& options, Terminal& term, std::ostream& out, std::ostream& err);

/// Whole command line (args excluding the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, Terminal& term);

/// Process entry point: wires stdin/stdout and the real terminal.
int main_entry(int argc, char** argv);

}  // namespace examflow::cli
