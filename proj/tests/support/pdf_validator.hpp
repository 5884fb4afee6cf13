// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#pragma once

// Structural PDF checker for tests. Walks the byte stream the way a reader
// would: header, startxref, xref table, trailer, then every object the xref
// points at. It does not share any code with the writer.

#include <cctype>
#include <cstdlib>
#include <map>
#include <string>
#include <string_view>

namespace examflow::testkit {

struct PdfCheck {
  bool ok = false;
  std::string error;
  int object_count = 0;
  int page_count = 0;     // /Type /Page objects found through the xref
  int pages_count = -1;   // /Count of the page tree root
  int outline_items = 0;  // objects carrying /Title
};

namespace detail {

inline std::size_t skip_ws(std::string_view s, std::size_t i) {
  while (i < s.size() && (s[i] == ' ' || s[i] == '\n' || s[i] == '\r' || s[i] == '\t')) ++i;
  return i;
}

inline bool read_uint(std::string_view s, std::size_t& i, long& out) {
  i = skip_ws(s, i);
  std::size_t start = i;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i == start) return false;
  out = std::strtol(std::string(s.substr(start, i - start)).c_str(), nullptr, 10);
  return true;
}

// Text of the object header dictionary (up to `stream` or `endobj`).
inline std::string_view object_head(std::string_view s, std::size_t off) {
  std::size_t stream = s.find("stream", off);
  std::size_t endobj = s.find("endobj", off);
  std::size_t end = std::min(stream, endobj);
  if (end == std::string_view::npos) return {};
  return s.substr(off, end - off);
}

inline bool has_name_token(std::string_view head, std::string_view key, std::string_view value) {
  std::size_t pos = 0;
  while ((pos = head.find(key, pos)) != std::string_view::npos) {
    std::size_t v = skip_ws(head, pos + key.size());
    if (head.substr(v, value.size()) == value) {
      std::size_t after = v + value.size();
      if (after >= head.size() || !std::isalnum(static_cast<unsigned char>(head[after]))) return true;
    }
    pos += key.size();
  }
  return false;
}

}  // namespace detail

inline PdfCheck check_pdf(std::string_view s) {
  using namespace detail;
  PdfCheck r;
  auto fail = [&](std::string msg) {
    r.ok = false;
    r.error = std::move(msg);
    return r;
  };
  if (s.substr(0, 7) != "%PDF-1.") return fail("bad header");
  std::size_t sx = s.rfind("startxref");
  if (sx == std::string_view::npos) return fail("no startxref");
  std::size_t i = sx + 9;
  long xref_off = 0;
  if (!read_uint(s, i, xref_off)) return fail("bad startxref value");
  if (s.substr(skip_ws(s, i), 5) != "%%EOF") return fail("missing %%EOF");
  if (xref_off < 0 || static_cast<std::size_t>(xref_off) + 4 > s.size() ||
      s.substr(static_cast<std::size_t>(xref_off), 4) != "xref")
    return fail("startxref does not point at xref");

  i = static_cast<std::size_t>(xref_off) + 4;
  std::map<long, long> offsets;
  long total_entries = 0;
  while (true) {
    std::size_t probe = skip_ws(s, i);
    if (s.substr(probe, 7) == "trailer") {
      i = probe + 7;
      break;
    }
    long first = 0, count = 0;
    if (!read_uint(s, i, first) || !read_uint(s, i, count)) return fail("bad xref subsection");
    i = skip_ws(s, i);
    for (long k = 0; k < count; ++k) {
      if (i + 20 > s.size()) return fail("truncated xref");
      std::string_view entry = s.substr(i, 20);
      if (entry[10] != ' ' || entry[16] != ' ' || (entry[17] != 'n' && entry[17] != 'f'))
        return fail("malformed xref entry");
      if (!((entry[18] == ' ' && entry[19] == '\n') || (entry[18] == '\r' && entry[19] == '\n') ||
            (entry[18] == ' ' && entry[19] == '\r')))
        return fail("xref entry not 20 bytes");
      long off = std::strtol(std::string(entry.substr(0, 10)).c_str(), nullptr, 10);
      if (entry[17] == 'n') offsets[first + k] = off;
      i += 20;
    }
    total_entries = std::max(total_entries, first + count);
  }

  std::size_t tdict = s.find("<<", i);
  std::size_t tend = s.find("startxref", i);
  if (tdict == std::string_view::npos || tend == std::string_view::npos) return fail("no trailer dict");
  std::string_view trailer = s.substr(tdict, tend - tdict);
  std::size_t sz = trailer.find("/Size");
  long size = 0;
  std::size_t j = sz + 5;
  if (sz == std::string_view::npos || !read_uint(trailer, j, size)) return fail("no /Size");
  if (size != total_entries) return fail("/Size disagrees with xref");
  std::size_t rt = trailer.find("/Root");
  long root = 0;
  j = rt + 5;
  if (rt == std::string_view::npos || !read_uint(trailer, j, root)) return fail("no /Root");

  for (const auto& [num, off] : offsets) {
    if (off < 0 || static_cast<std::size_t>(off) >= s.size()) return fail("offset out of range");
    std::size_t p = static_cast<std::size_t>(off);
    long n = -1, gen = -1;
    if (!read_uint(s, p, n) || !read_uint(s, p, gen)) return fail("offset not at object header");
    p = skip_ws(s, p);
    if (n != num || s.substr(p, 3) != "obj")
      return fail("xref offset for object " + std::to_string(num) + " does not point at its header");
    ++r.object_count;
    std::string_view head = object_head(s, p + 3);
    if (has_name_token(head, "/Type", "/Page") && !has_name_token(head, "/Type", "/Pages")) ++r.page_count;
    if (head.find("/Title") != std::string_view::npos) ++r.outline_items;
  }

  auto root_it = offsets.find(root);
  if (root_it == offsets.end()) return fail("root object missing");
  std::string_view catalog = object_head(s, static_cast<std::size_t>(root_it->second));
  std::size_t pg = catalog.find("/Pages");
  long pages_obj = 0;
  j = pg + 6;
  if (pg == std::string_view::npos || !read_uint(catalog, j, pages_obj)) return fail("catalog without /Pages");
  auto pages_it = offsets.find(pages_obj);
  if (pages_it == offsets.end()) return fail("page tree missing");
  std::string_view pages = object_head(s, static_cast<std::size_t>(pages_it->second));
  std::size_t c = pages.find("/Count");
  long count = 0;
  j = c + 6;
  if (c == std::string_view::npos || !read_uint(pages, j, count)) return fail("page tree without /Count");
  r.pages_count = static_cast<int>(count);
  std::size_t kids = pages.find("/Kids");
  if (kids == std::string_view::npos) return fail("page tree without /Kids");
  std::size_t kb = pages.find('[', kids), ke = pages.find(']', kids);
  int refs = 0;
  for (std::size_t k = kb; k < ke; ++k)
    if (pages[k] == 'R') ++refs;
  if (refs != count || r.page_count != count) return fail("page count disagreement");
  r.ok = true;
  return r;
}

}  // namespace examflow::testkit
