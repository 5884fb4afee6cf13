// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "examflow/code39.hpp"
#include "examflow/expected.hpp"
#include "examflow/image.hpp"
#include "examflow/payload.hpp"

namespace examflow::raster {

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
};

/// Rectangle in page fractions. x + w <= 1, y + h <= 1, w * h > 0.
struct RegionOfInterest {
  double x = 0.0;
  double y = 0.85;
  double w = 1.0;
  double h = 0.15;

  void validate() const;  // throws Error(InvalidRegion)
  RegionOfInterest rotated180() const { return {1.0 - x - w, 1.0 - y - h, w, h}; }

  static RegionOfInterest full_page() { return {0.0, 0.0, 1.0, 1.0}; }
};

/// Why a scanline (or a whole page) yielded no payload.
enum class ScanFailure : std::uint8_t {
  NoInk,
  NoStartStop,
  BadElementCount,
  UnknownCharacter,
  AmbiguousWidths,
  MalformedPayload,
  NoQuorum,
};

std::string_view to_string(ScanFailure f) noexcept;
ScanFailure from_decode_error(code39::DecodeError e) noexcept;

struct Vote {
  std::optional<std::string> text;  // decoded payload text on success
  std::optional<ScanFailure> failure;
  bool reversed = false;
};

struct DecodeReport {
  std::optional<PagePayload> payload;
  int orientation = 0;      // 0 or 180 (region mapping that produced the quorum)
  double skew_degrees = 0;  // scanline angle of the deciding sweep step
  std::vector<Vote> votes;  // the deciding step, or the last step tried on failure
  std::optional<ScanFailure> failure_reason;
  std::map<std::string, int> failure_tally;  // every vote cast, by outcome tag

  bool ok() const { return payload.has_value(); }
};

/// Integer line traversal: 8-connected, both endpoints included, one point per
/// step of the major axis. Minor coordinate = round-half-up of the exact value.
std::vector<Point> bresenham_line(Point p0, Point p1);

/// Throws Error(OutOfBounds) if an endpoint lies outside the image.
std::vector<std::uint8_t> sample_scanline(const PageImage& img, Point p0, Point p1);

/// 3-tap median; removes isolated impulse pixels while keeping edges in place.
std::vector<std::uint8_t> despeckle(std::span<const std::uint8_t> seq);

/// Otsu threshold. Below this separation between the dark and light class means
/// the line is treated as blank (sensor noise only).
inline constexpr double kMinInkContrast = 48.0;

/// Run-length encodes a luminance sequence into bar/space runs, trimming the
/// light margins. Fails with NoInk on blank or unimodal input.
Expected<std::vector<code39::Run>, ScanFailure> binarize(std::span<const std::uint8_t> seq);

/// Narrow element width in whole pixels for the given resolution.
int narrow_px(const code39::Params& params, double dpi);

/// Renders a symbol as a white strip with 10-module quiet zones on either side.
/// Throws Error(ResolutionTooLow).
PageImage render_barcode(const code39::BarPattern& pattern, const code39::Params& params, double dpi);

struct LocateOptions {
  double line_spacing_mm = 0.5;  // distance between parallel scanlines
  int min_lines = 15;
  double angle_step_deg = 0.5;
  int quorum = 3;
  bool despeckle = true;
};

/// Sweeps scanline angles 0, +step, -step, ... up to +-skew_budget. At each
/// angle both the region and its 180-degree image are scanned; the first one
/// whose votes reach a qualified majority decides.
DecodeReport locate_and_decode(const PageImage& img, const RegionOfInterest& roi, double skew_budget_deg,
                               const LocateOptions& options = {});

/// Majority vote: the most frequent text wins if it has at least `quorum` votes
/// and strictly more than any other text.
std::optional<std::string> majority(const std::vector<Vote>& votes, int quorum);

}  // namespace examflow::raster
