// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The examflow Authors

#include "examflow/pdf.hpp"

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "examflow/error.hpp"
#include "examflow/image_io.hpp"

namespace examflow::pdf {

namespace {

std::vector<std::uint8_t> deflate(std::span<const std::uint8_t> data, int level) {
  uLongf size = compressBound(static_cast<uLong>(data.size()));
  std::vector<std::uint8_t> out(size);
  if (compress2(out.data(), &size, data.data(), static_cast<uLong>(data.size()), level) != Z_OK)
    throw Error(Errc::InvalidImage, "deflate failed");
  out.resize(size);
  return out;
}

// PDF literal string; non-ASCII bytes are written as octal escapes.
std::string pdf_string(std::string_view text) {
  std::string out = "(";
  for (unsigned char c : text) {
    if (c == '(' || c == ')' || c == '\\') {
      out.push_back('\\');
      out.push_back(static_cast<char>(c));
    } else if (c < 0x20 || c > 0x7E) {
      char buf[5];
      std::snprintf(buf, sizeof buf, "\\%03o", c);
      out += buf;
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  out.push_back(')');
  return out;
}

std::string ref(int n) { return std::to_string(n) + " 0 R"; }

}  // namespace

std::string format_number(double v) {
  if (std::abs(v) < 5e-5) return "0";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 4);
  std::string s(buf, end);
  while (!s.empty() && s.back() == '0') s.pop_back();
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

Writer::Writer(std::ostream& sink, WriterOptions options) : sink_(sink), options_(options), offsets_(3, 0) {
  // Binary comment marks the file as binary for transfer tools.
  write("%PDF-1.4\n%\xE2\xE3\xCF\xD3\n");
}

void Writer::write(std::string_view s) {
  sink_.write(s.data(), static_cast<std::streamsize>(s.size()));
  offset_ += s.size();
}

void Writer::write(std::span<const std::uint8_t> bytes) {
  sink_.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  offset_ += bytes.size();
}

int Writer::begin_object(int number) {
  if (offsets_.size() <= static_cast<std::size_t>(number)) offsets_.resize(static_cast<std::size_t>(number) + 1, 0);
  offsets_[static_cast<std::size_t>(number)] = offset_;
  write(std::to_string(number) + " 0 obj\n");
  return number;
}

void Writer::end_object() { write("endobj\n"); }

void Writer::add_page(const PageSource& page) {
  if (finished_) throw Error(Errc::InvalidConfig, "writer already finished");

  int px_w = 0, px_h = 0;
  double dpi = 0;
  std::string color_space = "/DeviceGray";
  std::string filter;
  std::vector<std::uint8_t> compressed;
  const std::vector<std::uint8_t>* stream = nullptr;

  if (const auto* img = std::get_if<PageImage>(&page.content)) {
    img->validate();
    px_w = img->width;
    px_h = img->height;
    dpi = img->dpi;
    filter = "/FlateDecode";
    compressed = deflate(img->pixels, options_.compression_level);
    stream = &compressed;
  } else {
    const auto& jpeg = std::get<JpegBytes>(page.content);
    const JpegInfo info = inspect_jpeg(jpeg.data);
    px_w = info.width;
    px_h = info.height;
    dpi = jpeg.dpi > 0 ? jpeg.dpi : (info.dpi > 0 ? info.dpi : 300.0);
    if (info.components == 3) color_space = "/DeviceRGB";
    else if (info.components != 1) throw Error(Errc::InvalidImage, "only gray and RGB JPEGs can be embedded");
    filter = "/DCTDecode";
    stream = &jpeg.data;
  }

  const double w_pt = px_w * 72.0 / dpi;
  const double h_pt = px_h * 72.0 / dpi;
  if (!(w_pt > 0 && h_pt > 0)) throw Error(Errc::InvalidImage, "page has no extent");
  if (w_pt > kMaxPagePoints || h_pt > kMaxPagePoints)
    throw Error(Errc::OversizePage, "page is " + format_number(w_pt) + " x " + format_number(h_pt) +
                                        " pt, limit is 14400");

  const int page_obj = 3 + 3 * static_cast<int>(page_objects_.size());
  const int contents_obj = page_obj + 1;
  const int image_obj = page_obj + 2;
  const std::string w = format_number(w_pt), h = format_number(h_pt);

  begin_object(page_obj);
  write("<< /Type /Page /Parent 2 0 R /MediaBox [0 0 " + w + " " + h + "] /Resources << /XObject << /Im0 " +
        ref(image_obj) + " >> >> /Contents " + ref(contents_obj) + " >>\n");
  end_object();

  const std::string content = "q " + w + " 0 0 " + h + " 0 0 cm /Im0 Do Q\n";
  begin_object(contents_obj);
  write("<< /Length " + std::to_string(content.size()) + " >>\nstream\n");
  write(content);
  write("endstream\n");
  end_object();

  begin_object(image_obj);
  write("<< /Type /XObject /Subtype /Image /Width " + std::to_string(px_w) + " /Height " + std::to_string(px_h) +
        " /ColorSpace " + color_space + " /BitsPerComponent 8 /Filter " + filter + " /Length " +
        std::to_string(stream->size()) + " >>\nstream\n");
  write(*stream);
  write("\nendstream\n");
  end_object();

  page_objects_.push_back(page_obj);
}

std::size_t Writer::finish(std::span<const OutlineEntry> outline) {
  if (finished_) throw Error(Errc::InvalidConfig, "writer already finished");
  if (page_objects_.empty()) throw Error(Errc::EmptyDocument, "a PDF needs at least one page");
  for (const auto& e : outline)
    if (e.page_index >= page_objects_.size())
      throw Error(Errc::InvalidConfig, "outline entry '" + e.label + "' points past the last page");
  finished_ = true;

  const int first_free = 3 + 3 * static_cast<int>(page_objects_.size());
  const int outline_root = outline.empty() ? 0 : first_free;

  begin_object(1);
  write("<< /Type /Catalog /Pages 2 0 R");
  if (outline_root) write(" /Outlines " + ref(outline_root) + " /PageMode /UseOutlines");
  write(" >>\n");
  end_object();

  begin_object(2);
  std::string kids;
  for (std::size_t i = 0; i < page_objects_.size(); ++i) kids += (i ? " " : "") + ref(page_objects_[i]);
  write("<< /Type /Pages /Kids [" + kids + "] /Count " + std::to_string(page_objects_.size()) + " >>\n");
  end_object();

  if (outline_root) {
    const int n = static_cast<int>(outline.size());
    begin_object(outline_root);
    write("<< /Type /Outlines /First " + ref(outline_root + 1) + " /Last " + ref(outline_root + n) +
          " /Count " + std::to_string(n) + " >>\n");
    end_object();
    for (int i = 0; i < n; ++i) {
      const int obj = outline_root + 1 + i;
      begin_object(obj);
      std::string d = "<< /Title " + pdf_string(outline[static_cast<std::size_t>(i)].label) + " /Parent " +
                      ref(outline_root);
      if (i > 0) d += " /Prev " + ref(obj - 1);
      if (i + 1 < n) d += " /Next " + ref(obj + 1);
      d += " /Dest [" + ref(page_objects_[outline[static_cast<std::size_t>(i)].page_index]) + " /Fit] >>\n";
      write(d);
      end_object();
    }
  }

  const std::size_t xref_at = offset_;
  write("xref\n0 " + std::to_string(offsets_.size()) + "\n");
  write("0000000000 65535 f \n");
  for (std::size_t i = 1; i < offsets_.size(); ++i) {
    char entry[21];
    std::snprintf(entry, sizeof entry, "%010zu 00000 n \n", offsets_[i]);
    write(std::string_view(entry, 20));
  }
  write("trailer\n<< /Size " + std::to_string(offsets_.size()) + " /Root 1 0 R >>\nstartxref\n" +
        std::to_string(xref_at) + "\n%%EOF\n");
  sink_.flush();
  return offset_;
}

std::size_t write_pdf(std::span<const PageSource> pages, std::span<const OutlineEntry> outline, std::ostream& out) {
  if (pages.empty()) throw Error(Errc::EmptyDocument, "a PDF needs at least one page");
  Writer writer(out);
  for (const auto& p : pages) writer.add_page(p);
  return writer.finish(outline);
}

std::size_t write_pdf_file(std::span<const PageSource> pages, std::span<const OutlineEntry> outline,
                           const std::filesystem::path& path) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  std::size_t n = 0;
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::OutputNotWritable, "cannot write " + tmp.string());
    try {
      n = write_pdf(pages, outline, out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    if (!out) throw Error(Errc::OutputNotWritable, "write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error(Errc::OutputNotWritable, "cannot rename into " + path.string());
  return n;
}

}  // namespace examflow::pdf
