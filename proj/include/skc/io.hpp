// Copyright 2026 The skc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <zlib.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "skc/coreset.hpp"
#include "skc/errors.hpp"
#include "skc/weighted_set.hpp"

namespace skc {

/// Line-by-line reader over a byte stream. Gzip input (magic 1f 8b) is
/// inflated on the fly; concatenated gzip members are read back to back.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(&in) { prime(); }

  explicit LineReader(const std::string& path) {
    owned_ = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*owned_) throw IoError("cannot open " + path);
    in_ = owned_.get();
    prime();
  }

  LineReader(const LineReader&) = delete;
  LineReader& operator=(const LineReader&) = delete;

  ~LineReader() {
    if (gz_) inflateEnd(&zs_);
  }

  bool gzip() const noexcept { return gz_; }

  /// 1-based number of the line last returned.
  std::size_t line_number() const noexcept { return line_no_; }

  /// Next line without its terminator ("\n" or "\r\n").
  bool getline(std::string& line) {
    line.clear();
    bool any = false;
    for (;;) {
      if (pos_ == len_) {
        if (!fill()) break;
      }
      any = true;
      const char* begin = out_.data() + pos_;
      const void* nl = std::memchr(begin, '\n', len_ - pos_);
      if (nl) {
        const std::size_t n = static_cast<std::size_t>(static_cast<const char*>(nl) - begin);
        line.append(begin, n);
        pos_ += n + 1;
        ++line_no_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return true;
      }
      line.append(begin, len_ - pos_);
      pos_ = len_;
    }
    if (!any) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }

 private:
  static constexpr std::size_t kChunk = 1 << 16;

  void prime() {
    in_buf_.resize(kChunk);
    out_.resize(kChunk);
    in_->read(in_buf_.data(), static_cast<std::streamsize>(kChunk));
    const auto n = static_cast<std::size_t>(in_->gcount());
    if (in_->bad()) throw IoError("read failure");
    if (n >= 2 && static_cast<unsigned char>(in_buf_[0]) == 0x1f && static_cast<unsigned char>(in_buf_[1]) == 0x8b) {
      gz_ = true;
      std::memset(&zs_, 0, sizeof zs_);
      if (inflateInit2(&zs_, 15 + 32) != Z_OK) throw IoError("zlib init failed");
      zs_.next_in = reinterpret_cast<Bytef*>(in_buf_.data());
      zs_.avail_in = static_cast<uInt>(n);
    } else {
      std::swap(in_buf_, out_);
      pos_ = 0;
      len_ = n;
    }
  }

  bool fill() {
    pos_ = len_ = 0;
    if (!gz_) {
      in_->read(out_.data(), static_cast<std::streamsize>(kChunk));
      if (in_->bad()) throw IoError("read failure");
      len_ = static_cast<std::size_t>(in_->gcount());
      return len_ > 0;
    }
    for (;;) {
      if (zs_.avail_in == 0) {
        in_->read(in_buf_.data(), static_cast<std::streamsize>(kChunk));
        if (in_->bad()) throw IoError("read failure");
        const auto n = static_cast<std::size_t>(in_->gcount());
        if (n == 0) {
          if (!member_done_) throw IoError("truncated gzip stream");
          return false;
        }
        zs_.next_in = reinterpret_cast<Bytef*>(in_buf_.data());
        zs_.avail_in = static_cast<uInt>(n);
      }
      if (member_done_) {
        inflateReset(&zs_);
        member_done_ = false;
      }
      zs_.next_out = reinterpret_cast<Bytef*>(out_.data());
      zs_.avail_out = static_cast<uInt>(kChunk);
      const int ret = inflate(&zs_, Z_NO_FLUSH);
      if (ret == Z_STREAM_END) {
        member_done_ = true;
      } else if (ret != Z_OK && ret != Z_BUF_ERROR) {
        throw IoError(std::string("gzip: ") + (zs_.msg ? zs_.msg : "inflate failed"));
      }
      len_ = kChunk - zs_.avail_out;
      if (len_ > 0) return true;
    }
  }

  std::unique_ptr<std::ifstream> owned_;
  std::istream* in_ = nullptr;
  std::vector<char> in_buf_;
  std::vector<char> out_;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  std::size_t line_no_ = 0;
  bool gz_ = false;
  bool member_done_ = false;
  z_stream zs_{};
};

enum class FormatKind { pairs, triplets, dense_csv };

inline const char* to_string(FormatKind k) {
  switch (k) {
    case FormatKind::pairs: return "pairs";
    case FormatKind::triplets: return "triplets";
    case FormatKind::dense_csv: return "dense_csv";
  }
  return "?";
}

inline FormatKind parse_format_kind(std::string_view s) {
  if (s == "pairs") return FormatKind::pairs;
  if (s == "triplets") return FormatKind::triplets;
  if (s == "dense_csv") return FormatKind::dense_csv;
  throw InvalidArgument("unknown format '" + std::string(s) + "'");
}

struct StreamFormat {
  FormatKind kind = FormatKind::pairs;
  /// Required for pairs and triplets. For dense_csv, 0 infers it from the first row.
  Index dim = 0;
  int index_base = 0;

  void validate() const {
    if (index_base != 0 && index_base != 1) throw InvalidArgument("StreamFormat: index_base must be 0 or 1");
    if (kind != FormatKind::dense_csv && dim < 1) throw InvalidArgument("StreamFormat: dim is required");
  }
};

struct WeightedPoint {
  SparseVector point;
  double weight = 1.0;
};

namespace detail {

inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

inline std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(s[i])) ++i;
    const std::size_t b = i;
    while (i < s.size() && !is_space(s[i])) ++i;
    if (i > b) out.push_back(s.substr(b, i - b));
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

inline bool skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

inline double parse_double(std::string_view tok, std::size_t line) {
  if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
  double v = 0.0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("bad number '" + std::string(tok) + "'", line);
  }
  if (!std::isfinite(v)) throw ParseError("non-finite value '" + std::string(tok) + "'", line);
  return v;
}

inline std::uint64_t parse_uint(std::string_view tok, std::size_t line) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty()) {
    throw ParseError("bad index '" + std::string(tok) + "'", line);
  }
  return v;
}

inline Index parse_index(std::string_view tok, const StreamFormat& fmt, std::size_t line) {
  std::uint64_t j = parse_uint(tok, line);
  if (fmt.index_base == 1) {
    if (j == 0) throw ParseError("index 0 with index_base 1", line);
    --j;
  }
  if (j >= fmt.dim) {
    throw ParseError("index " + std::string(tok) + " out of range for dim " + std::to_string(fmt.dim), line);
  }
  return j;
}

inline double parse_weight(std::string_view tok, std::size_t line) {
  const double w = parse_double(tok.substr(2), line);
  if (!(w > 0.0)) throw ParseError("weight must be positive", line);
  return w;
}

inline SparseVector make_point(Index dim, std::vector<Entry> entries, std::size_t line) {
  try {
    return SparseVector::from_unsorted(dim, std::move(entries));
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), line);
  }
}

/// One pairs-format line: optional leading w=<weight>, then j:val tokens.
inline WeightedPoint parse_pairs_line(std::string_view line, const StreamFormat& fmt, std::size_t line_no) {
  auto toks = split_ws(line);
  WeightedPoint out;
  std::size_t first = 0;
  if (!toks.empty() && toks[0].starts_with("w=")) {
    out.weight = parse_weight(toks[0], line_no);
    first = 1;
  }
  std::vector<Entry> entries;
  entries.reserve(toks.size() - first);
  for (std::size_t i = first; i < toks.size(); ++i) {
    const auto colon = toks[i].find(':');
    if (colon == std::string_view::npos) throw ParseError("expected j:val, got '" + std::string(toks[i]) + "'", line_no);
    entries.push_back({parse_index(toks[i].substr(0, colon), fmt, line_no),
                       parse_double(toks[i].substr(colon + 1), line_no)});
  }
  out.point = make_point(fmt.dim, std::move(entries), line_no);
  return out;
}

}  // namespace detail

/// Lazy point reader. Holds one line (or one triplet row group) at a time.
class PointReader {
 public:
  PointReader(std::istream& in, StreamFormat fmt) : lines_(std::make_unique<LineReader>(in)), fmt_(fmt) {
    fmt_.validate();
  }

  PointReader(const std::string& path, StreamFormat fmt)
      : lines_(std::make_unique<LineReader>(path)), fmt_(fmt) {
    fmt_.validate();
  }

  /// Dimension; for dense_csv with inferred dim it is known after the first point.
  Index dim() const noexcept { return fmt_.dim; }
  std::size_t line_number() const noexcept { return lines_->line_number(); }

  std::optional<WeightedPoint> next() {
    switch (fmt_.kind) {
      case FormatKind::pairs: return next_pairs();
      case FormatKind::triplets: return next_triplets();
      case FormatKind::dense_csv: return next_csv();
    }
    return std::nullopt;
  }

  class iterator {
   public:
    using iterator_category = std::input_iterator_tag;
    using value_type = WeightedPoint;
    using difference_type = std::ptrdiff_t;
    using pointer = const WeightedPoint*;
    using reference = const WeightedPoint&;

    iterator() = default;
    explicit iterator(PointReader* r) : r_(r) { ++*this; }
    reference operator*() const { return *cur_; }
    pointer operator->() const { return &*cur_; }
    iterator& operator++() {
      cur_ = r_->next();
      if (!cur_) r_ = nullptr;
      return *this;
    }
    void operator++(int) { ++*this; }
    friend bool operator==(const iterator& a, const iterator& b) { return a.r_ == b.r_; }

   private:
    PointReader* r_ = nullptr;
    std::optional<WeightedPoint> cur_;
  };

  iterator begin() { return iterator(this); }
  iterator end() { return iterator(); }

 private:
  std::optional<WeightedPoint> next_pairs() {
    while (lines_->getline(line_)) {
      if (detail::skippable(line_)) continue;
      return detail::parse_pairs_line(line_, fmt_, lines_->line_number());
    }
    return std::nullopt;
  }

  struct Triplet {
    std::uint64_t row;
    Entry entry;
    std::size_t line;
  };

  std::optional<Triplet> read_triplet() {
    while (lines_->getline(line_)) {
      if (detail::skippable(line_)) continue;
      const std::size_t ln = lines_->line_number();
      auto toks = detail::split_ws(line_);
      if (toks.size() != 3) throw ParseError("expected 'row col val'", ln);
      return Triplet{detail::parse_uint(toks[0], ln),
                     {detail::parse_index(toks[1], fmt_, ln), detail::parse_double(toks[2], ln)}, ln};
    }
    return std::nullopt;
  }

  std::optional<WeightedPoint> next_triplets() {
    if (!lookahead_) lookahead_ = read_triplet();
    if (!lookahead_) return std::nullopt;
    const std::uint64_t row = lookahead_->row;
    const std::size_t first_line = lookahead_->line;
    std::vector<Entry> entries;
    while (lookahead_ && lookahead_->row == row) {
      entries.push_back(lookahead_->entry);
      lookahead_ = read_triplet();
    }
    return WeightedPoint{detail::make_point(fmt_.dim, std::move(entries), first_line), 1.0};
  }

  std::optional<WeightedPoint> next_csv() {
    while (lines_->getline(line_)) {
      if (detail::skippable(line_)) continue;
      const std::size_t ln = lines_->line_number();
      std::vector<Entry> entries;
      std::string_view rest(line_);
      Index col = 0;
      for (;;) {
        const auto comma = rest.find(',');
        const double v = detail::parse_double(detail::trim(rest.substr(0, comma)), ln);
        if (v != 0.0) entries.push_back({col, v});
        ++col;
        if (comma == std::string_view::npos) break;
        rest.remove_prefix(comma + 1);
      }
      if (fmt_.dim == 0) fmt_.dim = col;
      if (col != fmt_.dim) {
        throw ParseError("row has " + std::to_string(col) + " columns, expected " + std::to_string(fmt_.dim), ln);
      }
      return WeightedPoint{detail::make_point(fmt_.dim, std::move(entries), ln), 1.0};
    }
    return std::nullopt;
  }

  std::unique_ptr<LineReader> lines_;
  StreamFormat fmt_;
  std::string line_;
  std::optional<Triplet> lookahead_;
};

inline WeightedSet read_all(PointReader& reader) {
  std::vector<SparseVector> pts;
  std::vector<double> ws;
  while (auto p = reader.next()) {
    pts.push_back(std::move(p->point));
    ws.push_back(p->weight);
  }
  if (reader.dim() == 0) throw ParseError("empty input, cannot infer dim", 0);
  return WeightedSet(reader.dim(), std::move(pts), std::move(ws));
}

inline WeightedSet read_points(std::istream& in, const StreamFormat& fmt) {
  PointReader r(in, fmt);
  return read_all(r);
}

inline WeightedSet read_points_file(const std::string& path, const StreamFormat& fmt) {
  PointReader r(path, fmt);
  return read_all(r);
}

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw InvalidArgument("format_double failed");
  return std::string(buf, p);
}

namespace detail {

inline void write_entries(std::ostream& os, const SparseVector& p, int index_base) {
  for (std::size_t i = 0; i < p.nnz(); ++i) {
    const Entry e = p.entry(i);
    os << ' ' << (e.index + static_cast<Index>(index_base)) << ':' << format_double(e.value);
  }
}

}  // namespace detail

/// Pairs format, one point per line. w= is written only when needed.
inline void write_points(std::ostream& os, const WeightedSet& set, int index_base = 0) {
  for (std::size_t i = 0; i < set.size(); ++i) {
    const bool with_w = set.weight(i) != 1.0 || set.point(i).empty();
    std::ostringstream line;
    if (with_w) line << "w=" << format_double(set.weight(i));
    detail::write_entries(line, set.point(i), index_base);
    std::string s = line.str();
    if (!with_w) s.erase(0, 1);
    os << s << '\n';
  }
  if (!os) throw IoError("write failed");
}

inline constexpr std::string_view kCoresetMagic = "#skc-coreset";

/// Header line, one w=... line per point, then one #prov line per point
/// when provenance is present.
inline void write_coreset(std::ostream& os, const Coreset& s) {
  os << kCoresetMagic << " dim=" << s.base.dim() << " count=" << s.size()
     << " additive=" << format_double(s.base.additive()) << " epsilon=" << format_double(s.epsilon)
     << " built_for_k=" << s.built_for_k << " method=" << s.method << " depth=" << s.depth
     << " provenance=" << (s.provenance ? 1 : 0) << '\n';
  for (std::size_t i = 0; i < s.size(); ++i) {
    os << "w=" << format_double(s.base.weight(i));
    detail::write_entries(os, s.base.point(i), 0);
    os << '\n';
  }
  if (s.provenance) {
    for (const auto& terms : *s.provenance) {
      os << "#prov";
      for (const auto& t : terms) os << ' ' << t.index << ':' << format_double(t.coeff);
      os << '\n';
    }
  }
  os.flush();
  if (!os) throw IoError("write failed");
}

inline void write_coreset_file(const std::string& path, const Coreset& s) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open " + path + " for writing");
  write_coreset(os, s);
}

inline Coreset read_coreset(std::istream& in) {
  LineReader lines(in);
  std::string line;
  if (!lines.getline(line)) throw ParseError("empty coreset file", 1);
  auto toks = detail::split_ws(line);
  if (toks.empty() || toks[0] != kCoresetMagic) throw ParseError("missing " + std::string(kCoresetMagic) + " header", 1);

  std::optional<Index> dim;
  std::optional<std::size_t> count;
  double additive = 0.0;
  Coreset out;
  bool has_prov = false;
  for (std::size_t i = 1; i < toks.size(); ++i) {
    const auto eq = toks[i].find('=');
    if (eq == std::string_view::npos) throw ParseError("bad header field '" + std::string(toks[i]) + "'", 1);
    const auto key = toks[i].substr(0, eq);
    const auto val = toks[i].substr(eq + 1);
    if (key == "dim") dim = detail::parse_uint(val, 1);
    else if (key == "count") count = detail::parse_uint(val, 1);
    else if (key == "additive") additive = detail::parse_double(val, 1);
    else if (key == "epsilon") out.epsilon = detail::parse_double(val, 1);
    else if (key == "built_for_k") out.built_for_k = detail::parse_uint(val, 1);
    else if (key == "method") out.method = std::string(val);
    else if (key == "depth") out.depth = detail::parse_uint(val, 1);
    else if (key == "provenance") has_prov = detail::parse_uint(val, 1) != 0;
  }
  if (!dim || *dim == 0 || !count) throw ParseError("header needs dim and count", 1);

  const StreamFormat fmt{FormatKind::pairs, *dim, 0};
  std::vector<SparseVector> pts;
  std::vector<double> ws;
  Provenance prov;
  while (lines.getline(line)) {
    const std::size_t ln = lines.line_number();
    std::string_view sv = detail::trim(line);
    if (sv.starts_with("#prov")) {
      std::vector<ConvexTerm> terms;
      for (auto tok : detail::split_ws(sv.substr(5))) {
        const auto colon = tok.find(':');
        if (colon == std::string_view::npos) throw ParseError("bad provenance term", ln);
        terms.push_back({detail::parse_uint(tok.substr(0, colon), ln), detail::parse_double(tok.substr(colon + 1), ln)});
      }
      prov.push_back(std::move(terms));
      continue;
    }
    if (detail::skippable(sv)) continue;
    if (!prov.empty()) throw ParseError("point line after provenance block", ln);
    auto wp = detail::parse_pairs_line(sv, fmt, ln);
    pts.push_back(std::move(wp.point));
    ws.push_back(wp.weight);
  }
  if (pts.size() != *count) {
    throw ParseError("header count " + std::to_string(*count) + " but " + std::to_string(pts.size()) + " points", 0);
  }
  if (has_prov && prov.size() != pts.size()) throw ParseError("provenance block has wrong length", 0);
  if (!has_prov && !prov.empty()) throw ParseError("unexpected provenance block", 0);
  try {
    out.base = WeightedSet(*dim, std::move(pts), std::move(ws), additive);
  } catch (const InvalidArgument& e) {
    throw ParseError(e.what(), 0);
  }
  if (has_prov) out.provenance = std::move(prov);
  return out;
}

inline Coreset read_coreset_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return read_coreset(in);
}

}  // namespace skc
