// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/error.hpp"

namespace examflow {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidPayload: return "InvalidPayload";
    case Errc::MalformedPayload: return "MalformedPayload";
    case Errc::UnencodableCharacter: return "UnencodableCharacter";
    case Errc::InvalidParams: return "InvalidParams";
    case Errc::ResolutionTooLow: return "ResolutionTooLow";
    case Errc::OutOfBounds: return "OutOfBounds";
    case Errc::InvalidRegion: return "InvalidRegion";
    case Errc::InvalidImage: return "InvalidImage";
    case Errc::FieldCountMismatch: return "FieldCountMismatch";
    case Errc::DuplicateKey: return "DuplicateKey";
    case Errc::InvalidKey: return "InvalidKey";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::UnknownMacro: return "UnknownMacro";
    case Errc::InvalidTemplate: return "InvalidTemplate";
    case Errc::ToolNotFound: return "ToolNotFound";
    case Errc::ToolFailed: return "ToolFailed";
    case Errc::RasterizerMissing: return "RasterizerMissing";
    case Errc::UnreadablePage: return "UnreadablePage";
    case Errc::OutputNotWritable: return "OutputNotWritable";
    case Errc::InvalidTree: return "InvalidTree";
    case Errc::EmptyDocument: return "EmptyDocument";
    case Errc::OversizePage: return "OversizePage";
    case Errc::ConflictingEntry: return "ConflictingEntry";
    case Errc::PointsOutOfRange: return "PointsOutOfRange";
    case Errc::UnknownStudent: return "UnknownStudent";
    case Errc::EmptyTable: return "EmptyTable";
    case Errc::MalformedCsv: return "MalformedCsv";
    case Errc::NotATerminal: return "NotATerminal";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace examflow
