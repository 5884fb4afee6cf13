// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace examflow {

enum class Errc {
  InvalidPayload,
  MalformedPayload,
  UnencodableCharacter,
  InvalidParams,
  ResolutionTooLow,
  OutOfBounds,
  InvalidRegion,
  InvalidImage,
  FieldCountMismatch,
  DuplicateKey,
  InvalidKey,
  InvalidConfig,
  UnknownMacro,
  InvalidTemplate,
  ToolNotFound,
  ToolFailed,
  RasterizerMissing,
  UnreadablePage,
  OutputNotWritable,
  InvalidTree,
  EmptyDocument,
  OversizePage,
  ConflictingEntry,
  PointsOutOfRange,
  UnknownStudent,
  EmptyTable,
  MalformedCsv,
  NotATerminal,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error tag next to the message.
class Error : public std::runtime_error {
public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Errc code() const noexcept { return code_; }

private:
  Errc code_;
};

}  // namespace examflow
