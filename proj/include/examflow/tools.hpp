// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace examflow {

/// One external command from toolconfig.json.
///
///     "typesetter": { "path": "latexmk", "args": ["-pdf", "-outdir={outdir}", "{input}"] }
///
/// Placeholders in args: {input}, {output}, {outdir}, {jobname}, {dpi}. An
/// argument that is exactly "{inputs}" expands to one argument per input.
struct ToolEntry {
  std::string path;
  std::vector<std::string> args;
};

struct ToolConfig {
  std::map<std::string, ToolEntry> tools;

  const ToolEntry* find(std::string_view name) const;
};

/// Well-known entry names.
inline constexpr std::string_view kTypesetter = "typesetter";
inline constexpr std::string_view kRasterizer = "rasterizer";
inline constexpr std::string_view kPdfConcat = "pdfconcat";

/// Accepts either the entries at top level or nested under "tools".
ToolConfig parse_tool_config(std::string_view json_text);
ToolConfig load_tool_config(const std::filesystem::path& path);

/// Absolute path of an executable: as given when it contains '/', else looked up
/// on PATH. Empty when not found or not executable.
std::filesystem::path resolve_executable(std::string_view path);

struct ToolVars {
  std::map<std::string, std::string> scalars;  // name without braces
  std::vector<std::string> inputs;             // for {inputs}
};

std::vector<std::string> expand_args(const ToolEntry& entry, const ToolVars& vars);

struct ProcessResult {
  int exit_code = -1;
  std::string output;  // stdout and stderr interleaved
};

/// fork/exec without a shell; output captured. Throws Error(ToolNotFound).
ProcessResult run_process(const std::filesystem::path& exe, const std::vector<std::string>& args,
                          const std::filesystem::path& cwd = {});

/// Resolves and runs a configured tool. Throws Error(ToolNotFound) or
/// Error(ToolFailed) with the captured output on a nonzero exit.
ProcessResult run_tool(const ToolConfig& config, std::string_view name, const ToolVars& vars,
                       const std::filesystem::path& cwd = {});

}  // namespace examflow
