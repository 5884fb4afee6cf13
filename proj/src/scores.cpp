// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/scores.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "examflow/error.hpp"
#include "examflow/image_io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace examflow {

namespace {

// Sums of decimal points (0.1 + 0.2 ...) land a hair below the exact fraction.
constexpr double kFractionSlack = 1e-9;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_int(std::string_view s, int& out) {
  auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

bool parse_points(std::string_view s, double& out) {
  std::string buf(s);
  std::replace(buf.begin(), buf.end(), ',', '.');
  auto r = std::from_chars(buf.data(), buf.data() + buf.size(), out);
  return r.ec == std::errc() && r.ptr == buf.data() + buf.size() && std::isfinite(out);
}

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string format_points(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  std::string s = buf;
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  if (s == "-0") s = "0";
  return s;
}

void GradeScheme::validate() const {
  if (grades.empty()) throw Error(Errc::InvalidConfig, "grade scheme has no grades");
  if (exercise_maxima.empty()) throw Error(Errc::InvalidConfig, "grade scheme has no exercise maxima");
  for (const auto& [ex, max] : exercise_maxima) {
    if (ex < 1) throw Error(Errc::InvalidConfig, "exercise numbers start at 1");
    if (!(max > 0) || !std::isfinite(max))
      throw Error(Errc::InvalidConfig, "maximum for exercise " + std::to_string(ex) + " must be positive");
  }
  std::set<std::string> labels;
  for (std::size_t i = 0; i < grades.size(); ++i) {
    const auto& g = grades[i];
    if (!(g.min_fraction >= 0 && g.min_fraction <= 1))
      throw Error(Errc::InvalidConfig, "grade threshold for '" + g.label + "' must lie in [0, 1]");
    if (i > 0 && !(g.min_fraction < grades[i - 1].min_fraction))
      throw Error(Errc::InvalidConfig, "grade thresholds must be strictly decreasing");
    if (g.label.empty() || g.label == kNoGrade) throw Error(Errc::InvalidConfig, "bad grade label '" + g.label + "'");
    if (g.label.find_first_of(";\n\r") != std::string::npos)
      throw Error(Errc::InvalidConfig, "grade label '" + g.label + "' contains a separator");
    if (!labels.insert(g.label).second) throw Error(Errc::InvalidConfig, "duplicate grade label '" + g.label + "'");
  }
}

double GradeScheme::max_total() const {
  double s = 0;
  for (const auto& [ex, max] : exercise_maxima) s += max;
  return s;
}

const std::string& GradeScheme::grade_for(double fraction) const {
  for (const auto& g : grades)
    if (fraction + kFractionSlack >= g.min_fraction) return g.label;
  return kNoGrade;
}

std::size_t GradeScheme::rank_of(std::string_view label) const {
  for (std::size_t i = 0; i < grades.size(); ++i)
    if (grades[i].label == label) return i;
  return grades.size();
}

GradeScheme parse_grade_scheme(std::string_view json_text) {
  GradeScheme s;
  try {
    const auto j = nlohmann::json::parse(json_text);
    for (const auto& [key, value] : j.at("exercise_maxima").items()) {
      int ex = 0;
      if (!parse_int(key, ex)) throw Error(Errc::InvalidConfig, "exercise key '" + key + "' is not a number");
      s.exercise_maxima[ex] = value.get<double>();
    }
    for (const auto& g : j.at("grades")) s.grades.push_back({g.at("min_fraction").get<double>(), g.at("label").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidConfig, std::string("grade scheme: ") + e.what());
  }
  s.validate();
  return s;
}

GradeScheme load_grade_scheme(const fs::path& path) {
  const auto bytes = read_file(path);
  return parse_grade_scheme(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<ScoreEntry> parse_score_csv(std::string_view text, std::string_view source_name) {
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<ScoreEntry> out;
  int line_no = 0;
  bool first_row = true;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    const std::string where = std::string(source_name) + ":" + std::to_string(line_no);

    std::vector<std::string_view> f;
    std::size_t start = 0;
    for (;;) {
      const std::size_t sc = line.find(';', start);
      f.push_back(trim(line.substr(start, sc == std::string_view::npos ? sc : sc - start)));
      if (sc == std::string_view::npos) break;
      start = sc + 1;
    }
    if (f.size() != 3) throw Error(Errc::MalformedCsv, where + ": expected student_id;exercise_no;points");
    ScoreEntry e;
    e.student_id = std::string(f[0]);
    e.source = where;
    const bool ok = !e.student_id.empty() && parse_int(f[1], e.exercise_no) && e.exercise_no >= 1 &&
                    parse_points(f[2], e.points);
    const bool header = first_row && !ok;
    first_row = false;
    if (header) continue;
    if (!ok) throw Error(Errc::MalformedCsv, where + ": bad student id, exercise number or points");
    out.push_back(std::move(e));
  }
  return out;
}

ScoreTable collect_scores(const std::vector<std::vector<ScoreEntry>>& sources, const Roster& roster,
                          const GradeScheme& scheme) {
  scheme.validate();
  std::map<std::pair<std::string, int>, const ScoreEntry*> merged;
  for (const auto& src : sources) {
    for (const auto& e : src) {
      if (!roster.contains(e.student_id))
        throw Error(Errc::UnknownStudent, e.source + ": '" + e.student_id + "' is not in the roster");
      auto max = scheme.exercise_maxima.find(e.exercise_no);
      if (max == scheme.exercise_maxima.end())
        throw Error(Errc::PointsOutOfRange,
                    e.source + ": exercise " + std::to_string(e.exercise_no) + " has no maximum in the grade scheme");
      if (e.points < 0 || e.points > max->second)
        throw Error(Errc::PointsOutOfRange, e.source + ": " + format_points(e.points) + " points outside [0, " +
                                                format_points(max->second) + "]");
      auto [it, inserted] = merged.emplace(std::make_pair(e.student_id, e.exercise_no), &e);
      if (!inserted && it->second->points != e.points) {
        // Name the sources in a fixed order so the message does not depend on input order.
        std::string a = it->second->source + " (" + format_points(it->second->points) + ")";
        std::string b = e.source + " (" + format_points(e.points) + ")";
        if (b < a) std::swap(a, b);
        throw Error(Errc::ConflictingEntry, e.student_id + " exercise " + std::to_string(e.exercise_no) +
                                                ": " + a + " vs " + b);
      }
    }
  }

  ScoreTable t;
  for (const auto& [ex, max] : scheme.exercise_maxima) t.exercises.push_back(ex);
  const double max_total = scheme.max_total();
  for (const auto& rec : roster.students) {
    StudentScore s;
    s.student_id = roster.key_of(rec);
    for (int ex : t.exercises) {
      auto it = merged.find({s.student_id, ex});
      if (it == merged.end()) {
        s.points[ex] = 0;
        s.missing.insert(ex);
      } else {
        s.points[ex] = it->second->points;
        s.total += it->second->points;
      }
    }
    s.fraction = s.total / max_total;
    s.grade = scheme.grade_for(s.fraction);
    t.rows.push_back(std::move(s));
  }
  return t;
}

ScoreTable collect_scores(const std::vector<fs::path>& files, const Roster& roster, const GradeScheme& scheme) {
  std::vector<std::vector<ScoreEntry>> sources;
  for (const auto& f : files) {
    const auto bytes = read_file(f);
    sources.push_back(parse_score_csv(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                                      f.filename().string()));
  }
  return collect_scores(sources, roster, scheme);
}

std::string ScoreTable::to_csv() const {
  std::string out = "student_id;total;grade";
  for (int ex : exercises) out += ";" + std::to_string(ex);
  out += ";missing\n";
  for (const auto& r : rows) {
    out += r.student_id + ";" + format_points(r.total) + ";" + r.grade;
    for (int ex : exercises) out += ";" + format_points(r.points.at(ex));
    out += ";";
    bool first = true;
    for (int ex : r.missing) {
      if (!first) out += ",";
      out += std::to_string(ex);
      first = false;
    }
    out += "\n";
  }
  return out;
}

std::size_t Histogram::total() const {
  std::size_t n = 0;
  for (const auto& [label, c] : counts) n += c;
  return n;
}

Histogram grade_histogram(const ScoreTable& table, const GradeScheme& scheme) {
  if (table.rows.empty()) throw Error(Errc::EmptyTable, "no students to plot");
  Histogram h;
  for (const auto& g : scheme.grades) h.counts.emplace_back(g.label, 0);
  std::size_t none = 0;
  for (const auto& r : table.rows) {
    const std::size_t rank = scheme.rank_of(r.grade);
    if (rank < h.counts.size()) ++h.counts[rank].second;
    else ++none;
  }
  if (none) h.counts.emplace_back(kNoGrade, none);
  return h;
}

std::string render_text_histogram(const Histogram& h, int bar_width) {
  std::size_t label_w = 5, peak = 0;
  for (const auto& [label, c] : h.counts) {
    label_w = std::max(label_w, label.size());
    peak = std::max(peak, c);
  }
  std::string out;
  for (const auto& [label, c] : h.counts) {
    const int len = peak ? static_cast<int>(std::lround(static_cast<double>(c) * bar_width / peak)) : 0;
    out += label + std::string(label_w - label.size(), ' ') + " | " + std::string(static_cast<std::size_t>(len), '#') +
           (len ? " " : "") + std::to_string(c) + "\n";
  }
  out += std::string(label_w, ' ') + " | total " + std::to_string(h.total()) + "\n";
  return out;
}

std::string render_svg(const Histogram& h) {
  constexpr int bar_w = 60, gap = 20, plot_h = 300, top = 40, left = 50, bottom = 40;
  const int n = static_cast<int>(h.counts.size());
  const int width = left + n * (bar_w + gap) + gap;
  const int height = top + plot_h + bottom;
  std::size_t peak = 0;
  for (const auto& [label, c] : h.counts) peak = std::max(peak, c);

  std::string s;
  s += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) + "\" height=\"" +
       std::to_string(height) + "\" viewBox=\"0 0 " + std::to_string(width) + " " + std::to_string(height) + "\">\n";
  s += "  <title>Grade distribution (" + std::to_string(h.total()) + " students)</title>\n";
  s += "  <rect x=\"0\" y=\"0\" width=\"" + std::to_string(width) + "\" height=\"" + std::to_string(height) +
       "\" fill=\"white\"/>\n";
  s += "  <line x1=\"" + std::to_string(left) + "\" y1=\"" + std::to_string(top + plot_h) + "\" x2=\"" +
       std::to_string(width - gap / 2) + "\" y2=\"" + std::to_string(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i < n; ++i) {
    const auto& [label, c] = h.counts[static_cast<std::size_t>(i)];
    const double bh = peak ? static_cast<double>(c) * plot_h / static_cast<double>(peak) : 0.0;
    const int x = left + gap + i * (bar_w + gap);
    const std::string y = format_points(top + plot_h - bh);
    s += "  <rect class=\"bar\" data-label=\"" + xml_escape(label) + "\" data-count=\"" + std::to_string(c) +
         "\" x=\"" + std::to_string(x) + "\" y=\"" + y + "\" width=\"" + std::to_string(bar_w) + "\" height=\"" +
         format_points(bh) + "\" fill=\"steelblue\"/>\n";
    s += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + std::to_string(top + plot_h + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\">" + xml_escape(label) + "</text>\n";
    s += "  <text x=\"" + std::to_string(x + bar_w / 2) + "\" y=\"" + format_points(top + plot_h - bh - 6) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" + std::to_string(c) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

Distribution emit_distribution(const ScoreTable& table, const GradeScheme& scheme) {
  Distribution d;
  d.histogram = grade_histogram(table, scheme);
  d.text = render_text_histogram(d.histogram);
  d.svg = render_svg(d.histogram);
  return d;
}

std::string write_score_outputs(const ScoreTable& table, const GradeScheme& scheme, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (!fs::is_directory(out_dir, ec)) throw Error(Errc::OutputNotWritable, "cannot create " + out_dir.string());
  auto put = [&](const fs::path& p, const std::string& s) {
    write_file_atomic(p, std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
  };
  put(out_dir / "scores.csv", table.to_csv());
  if (table.rows.empty()) return {};
  const Distribution d = emit_distribution(table, scheme);
  put(out_dir / "distribution.svg", d.svg);
  return d.text;
}

}  // namespace examflow
