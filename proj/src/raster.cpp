// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/raster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <numbers>

#include "examflow/error.hpp"

namespace examflow::raster {

void RegionOfInterest::validate() const {
  const double eps = 1e-9;
  if (x < 0 || y < 0 || w <= 0 || h <= 0 || x + w > 1 + eps || y + h > 1 + eps)
    throw Error(Errc::InvalidRegion, "region must lie inside the page with positive area");
}

std::string_view to_string(ScanFailure f) noexcept {
  switch (f) {
    case ScanFailure::NoInk: return "NoInk";
    case ScanFailure::NoStartStop: return "NoStartStop";
    case ScanFailure::BadElementCount: return "BadElementCount";
    case ScanFailure::UnknownCharacter: return "UnknownCharacter";
    case ScanFailure::AmbiguousWidths: return "AmbiguousWidths";
    case ScanFailure::MalformedPayload: return "MalformedPayload";
    case ScanFailure::NoQuorum: return "NoQuorum";
  }
  return "Unknown";
}

ScanFailure from_decode_error(code39::DecodeError e) noexcept {
  switch (e) {
    case code39::DecodeError::NoStartStop: return ScanFailure::NoStartStop;
    case code39::DecodeError::BadElementCount: return ScanFailure::BadElementCount;
    case code39::DecodeError::UnknownCharacter: return ScanFailure::UnknownCharacter;
    case code39::DecodeError::AmbiguousWidths: return ScanFailure::AmbiguousWidths;
  }
  return ScanFailure::NoStartStop;
}

std::vector<Point> bresenham_line(Point p0, Point p1) {
  const int dx = p1.x - p0.x;
  const int dy = p1.y - p0.y;
  const bool x_major = std::abs(dx) >= std::abs(dy);
  const int n = x_major ? std::abs(dx) : std::abs(dy);
  const int major_step = (x_major ? dx : dy) >= 0 ? 1 : -1;
  const long long minor_delta = x_major ? dy : dx;

  std::vector<Point> out;
  out.reserve(static_cast<std::size_t>(n) + 1);
  int major = x_major ? p0.x : p0.y;
  int minor = x_major ? p0.y : p0.x;
  // acc tracks 2*i*delta + n - 2n*(minor - minor0); minor advances whenever it
  // leaves [0, 2n), which is floor((2*i*delta + n) / 2n) in closed form.
  long long acc = n;
  const long long two_n = 2LL * n;
  for (int i = 0; i <= n; ++i) {
    out.push_back(x_major ? Point{major, minor} : Point{minor, major});
    major += major_step;
    acc += 2 * minor_delta;
    if (acc >= two_n) {
      ++minor;
      acc -= two_n;
    } else if (acc < 0) {
      --minor;
      acc += two_n;
    }
  }
  return out;
}

std::vector<std::uint8_t> sample_scanline(const PageImage& img, Point p0, Point p1) {
  if (!img.contains(p0.x, p0.y) || !img.contains(p1.x, p1.y))
    throw Error(Errc::OutOfBounds, "scanline endpoint outside the image");
  const auto points = bresenham_line(p0, p1);
  std::vector<std::uint8_t> out;
  out.reserve(points.size());
  for (const Point& p : points) out.push_back(img.at(p.x, p.y));
  return out;
}

std::vector<std::uint8_t> despeckle(std::span<const std::uint8_t> seq) {
  std::vector<std::uint8_t> out(seq.begin(), seq.end());
  for (std::size_t i = 1; i + 1 < seq.size(); ++i) {
    const std::uint8_t a = seq[i - 1], b = seq[i], c = seq[i + 1];
    out[i] = std::max(std::min(a, b), std::min(std::max(a, b), c));
  }
  return out;
}

Expected<std::vector<code39::Run>, ScanFailure> binarize(std::span<const std::uint8_t> seq) {
  if (seq.empty()) return Unexpected{ScanFailure::NoInk};
  std::array<std::size_t, 256> hist{};
  for (std::uint8_t v : seq) ++hist[v];

  const double total = static_cast<double>(seq.size());
  double sum_all = 0;
  for (int v = 0; v < 256; ++v) sum_all += v * static_cast<double>(hist[v]);

  double best_var = 0, w0 = 0, sum0 = 0;
  int threshold = -1;
  double best_m0 = 0, best_m1 = 0;
  for (int t = 0; t < 255; ++t) {
    w0 += static_cast<double>(hist[t]);
    sum0 += t * static_cast<double>(hist[t]);
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double m0 = sum0 / w0, m1 = (sum_all - sum0) / w1;
    const double var = w0 * w1 * (m0 - m1) * (m0 - m1);
    if (var > best_var) {
      best_var = var;
      threshold = t;
      best_m0 = m0;
      best_m1 = m1;
    }
  }
  if (threshold < 0 || best_m1 - best_m0 < kMinInkContrast) return Unexpected{ScanFailure::NoInk};

  const auto dark = [&](std::uint8_t v) { return v <= threshold; };
  std::size_t first = 0, last = seq.size();
  while (first < seq.size() && !dark(seq[first])) ++first;
  while (last > first && !dark(seq[last - 1])) --last;
  if (first == last) return Unexpected{ScanFailure::NoInk};

  std::vector<code39::Run> runs;
  std::size_t i = first;
  while (i < last) {
    const bool d = dark(seq[i]);
    std::size_t j = i;
    while (j < last && dark(seq[j]) == d) ++j;
    runs.push_back({d ? code39::ElementKind::bar : code39::ElementKind::space, static_cast<double>(j - i)});
    i = j;
  }
  return runs;
}

int narrow_px(const code39::Params& params, double dpi) {
  return std::max(1, static_cast<int>(std::lround(params.module_width_mm * dpi / 25.4)));
}

PageImage render_barcode(const code39::BarPattern& pattern, const code39::Params& params, double dpi) {
  params.validate();
  if (dpi < 72 || params.module_width_mm * dpi / 25.4 < 1.0)
    throw Error(Errc::ResolutionTooLow, "narrow element would be narrower than one pixel at " +
                                            std::to_string(dpi) + " dpi");
  const int narrow = narrow_px(params, dpi);
  const int wide = std::max(narrow + 1, static_cast<int>(std::lround(params.module_width_mm *
                                                                     params.wide_narrow_ratio * dpi / 25.4)));
  const int quiet = 10 * narrow;
  int body = 0;
  for (const auto& e : pattern.elements) body += e.width == code39::WidthClass::wide ? wide : narrow;
  const int height = std::max(1, static_cast<int>(std::lround(params.bar_height_mm * dpi / 25.4)));

  PageImage strip(body + 2 * quiet, height, dpi, 255);
  int x = quiet;
  for (const auto& e : pattern.elements) {
    const int w = e.width == code39::WidthClass::wide ? wide : narrow;
    if (e.kind == code39::ElementKind::bar) fill_rect(strip, x, 0, w, height, 0);
    x += w;
  }
  return strip;
}

std::optional<std::string> majority(const std::vector<Vote>& votes, int quorum) {
  std::map<std::string, int> counts;
  for (const Vote& v : votes)
    if (v.text) ++counts[*v.text];
  const std::string* best = nullptr;
  int best_n = 0, runner_up = 0;
  for (const auto& [text, n] : counts) {
    if (n > best_n) {
      runner_up = best_n;
      best_n = n;
      best = &text;
    } else if (n > runner_up) {
      runner_up = n;
    }
  }
  if (!best || best_n < quorum || best_n == runner_up) return std::nullopt;
  return *best;
}

namespace {

struct PixelRect {
  int x0, y0, x1, y1;  // half-open
};

PixelRect to_pixels(const RegionOfInterest& roi, const PageImage& img) {
  PixelRect r;
  r.x0 = std::clamp(static_cast<int>(std::floor(roi.x * img.width)), 0, img.width - 1);
  r.y0 = std::clamp(static_cast<int>(std::floor(roi.y * img.height)), 0, img.height - 1);
  r.x1 = std::clamp(static_cast<int>(std::ceil((roi.x + roi.w) * img.width)), r.x0 + 1, img.width);
  r.y1 = std::clamp(static_cast<int>(std::ceil((roi.y + roi.h) * img.height)), r.y0 + 1, img.height);
  return r;
}

Vote read_line(const PageImage& img, Point a, Point b, bool filter) {
  Vote v;
  auto samples = sample_scanline(img, a, b);
  if (filter) samples = despeckle(samples);
  auto runs = binarize(samples);
  if (!runs) {
    v.failure = runs.error();
    return v;
  }
  auto decoded = code39::find_symbol(*runs);
  if (!decoded) {
    v.failure = from_decode_error(decoded.error());
    return v;
  }
  PagePayload p;
  if (!try_parse_payload(decoded->text, p)) {
    v.failure = ScanFailure::MalformedPayload;
    return v;
  }
  v.text = std::move(decoded->text);
  v.reversed = decoded->reversed;
  return v;
}

// Casts parallel lines at `angle` across the rectangle; each line spans the
// rectangle's width and is clipped to the image.
std::vector<Vote> sweep(const PageImage& img, const PixelRect& r, double angle_deg, const LocateOptions& opt) {
  const double spacing = std::max(1.0, opt.line_spacing_mm * img.dpi / 25.4);
  const int height = r.y1 - r.y0;
  const int lines = std::max(opt.min_lines, static_cast<int>(std::ceil(height / spacing)));
  const double slope = std::tan(angle_deg * std::numbers::pi / 180.0);
  const double cx = 0.5 * (r.x0 + r.x1 - 1);
  const double xa = r.x0, xb = r.x1 - 1;
  const double ymax = img.height - 1;

  std::vector<Vote> votes;
  votes.reserve(static_cast<std::size_t>(lines));
  for (int k = 0; k < lines; ++k) {
    const double cy = r.y0 + (k + 0.5) * height / lines;
    double x_lo = xa, x_hi = xb;
    if (slope != 0) {
      // x range for which cy + (x - cx) * slope stays inside [0, ymax]
      double t1 = cx + (0 - cy) / slope, t2 = cx + (ymax - cy) / slope;
      if (t1 > t2) std::swap(t1, t2);
      x_lo = std::max(x_lo, std::ceil(t1));
      x_hi = std::min(x_hi, std::floor(t2));
    } else if (cy < 0 || cy > ymax) {
      continue;
    }
    if (x_hi - x_lo < 1) continue;
    auto y_at = [&](double x) {
      return std::clamp(static_cast<int>(std::lround(cy + (x - cx) * slope)), 0, img.height - 1);
    };
    const Point a{static_cast<int>(x_lo), y_at(x_lo)};
    const Point b{static_cast<int>(x_hi), y_at(x_hi)};
    votes.push_back(read_line(img, a, b, opt.despeckle));
  }
  return votes;
}

}  // namespace

DecodeReport locate_and_decode(const PageImage& img, const RegionOfInterest& roi, double skew_budget_deg,
                               const LocateOptions& opt) {
  img.validate();
  roi.validate();
  if (skew_budget_deg < 0 || skew_budget_deg > 10)
    throw Error(Errc::InvalidParams, "skew budget must lie in [0, 10] degrees");

  std::vector<double> angles{0.0};
  for (int k = 1; k * opt.angle_step_deg <= skew_budget_deg + 1e-9; ++k) {
    angles.push_back(k * opt.angle_step_deg);
    angles.push_back(-k * opt.angle_step_deg);
  }

  const std::array<std::pair<int, PixelRect>, 2> regions = {
      std::pair{0, to_pixels(roi, img)}, std::pair{180, to_pixels(roi.rotated180(), img)}};
  const bool symmetric = regions[0].second.x0 == regions[1].second.x0 &&
                         regions[0].second.y0 == regions[1].second.y0 &&
                         regions[0].second.x1 == regions[1].second.x1 &&
                         regions[0].second.y1 == regions[1].second.y1;

  DecodeReport report;
  bool all_blank = true;
  for (double angle : angles) {
    for (const auto& [orientation, rect] : regions) {
      if (orientation == 180 && symmetric) continue;
      auto votes = sweep(img, rect, angle, opt);
      for (const Vote& v : votes) {
        const std::string tag = v.text ? "decoded" : std::string(to_string(*v.failure));
        ++report.failure_tally[tag];
        if (!v.failure || *v.failure != ScanFailure::NoInk) all_blank = false;
      }
      auto winner = majority(votes, opt.quorum);
      report.votes = std::move(votes);
      report.orientation = orientation;
      report.skew_degrees = angle;
      if (winner) {
        report.payload = parse_payload(*winner);
        return report;
      }
    }
  }
  report.failure_reason = all_blank ? ScanFailure::NoInk : ScanFailure::NoQuorum;
  return report;
}

}  // namespace examflow::raster
