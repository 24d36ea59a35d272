#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "bowkit/error.hpp"

namespace bowkit {

enum class ParseMode { kLenient, kStrict };

struct Document {
  std::string docid;
  std::string text;
};

struct Topic {
  std::string qid;
  std::string title;
  std::string description;
  std::string narrative;
};

inline bool operator==(const Document& a, const Document& b) { return a.docid == b.docid && a.text == b.text; }
inline bool operator==(const Topic& a, const Topic& b) {
  return a.qid == b.qid && a.title == b.title && a.description == b.description && a.narrative == b.narrative;
}

namespace detail {

inline std::string_view trim_view(std::string_view v) {
  while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r' || v.front() == '\n'))
    v.remove_prefix(1);
  while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r' || v.back() == '\n'))
    v.remove_suffix(1);
  return v;
}

inline char lower_ascii(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }

inline bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

struct TagInfo {
  std::size_t begin = 0;  // index of '<'
  std::size_t end = 0;    // one past '>'
  std::string name;       // lowercased
  bool closing = false;
};

enum class TagScan { kFound, kNone, kIncomplete };

// Finds the next markup tag at or after `from`. Tag names are matched
// case-insensitively and anything between the name and '>' (attributes) is
// ignored. kIncomplete means a candidate tag runs past the end of the
// buffer; `incomplete_at` is its '<' so the caller can refill and retry.
inline TagScan find_tag(std::string_view buf, std::size_t from, TagInfo& out, std::size_t& incomplete_at) {
  std::size_t i = from;
  while (true) {
    i = buf.find('<', i);
    if (i == std::string_view::npos) return TagScan::kNone;
    std::size_t j = i + 1;
    bool closing = false;
    if (j < buf.size() && buf[j] == '/') {
      closing = true;
      ++j;
    }
    std::size_t name_begin = j;
    while (j < buf.size() && is_name_char(buf[j])) ++j;
    if (j == buf.size()) {
      incomplete_at = i;
      return TagScan::kIncomplete;
    }
    if (j == name_begin) {  // "<" followed by junk: literal text
      i = i + 1;
      continue;
    }
    std::size_t close = buf.find('>', j);
    if (close == std::string_view::npos) {
      incomplete_at = i;
      return TagScan::kIncomplete;
    }
    out.begin = i;
    out.end = close + 1;
    out.closing = closing;
    out.name.clear();
    for (std::size_t k = name_begin; k < j; ++k) out.name.push_back(lower_ascii(buf[k]));
    return TagScan::kFound;
  }
}

struct SubBlock {
  bool found = false;
  bool duplicated = false;
  std::string inner;
};

// In-memory search for `<name>...</name>` inside an already-extracted block.
inline SubBlock find_sub_block(std::string_view content, std::string_view name) {
  SubBlock out;
  std::size_t pos = 0;
  TagInfo tag;
  std::size_t ignored;
  std::size_t open_end = std::string_view::npos;
  while (find_tag(content, pos, tag, ignored) == TagScan::kFound) {
    pos = tag.end;
    if (tag.name != name) continue;
    if (tag.closing) {
      if (open_end != std::string_view::npos && !out.found) {
        out.found = true;
        out.inner = std::string(content.substr(open_end, tag.begin - open_end));
      }
      open_end = std::string_view::npos;
    } else {
      if (out.found) {
        out.duplicated = true;
        break;
      }
      open_end = tag.end;
    }
  }
  return out;
}

struct RawBlock {
  std::string content;
  std::uint64_t offset = 0;  // byte offset of the block's open tag
};

// Streaming scanner for `<tag>...</tag>` blocks. Single pass; the buffer
// holds at most one partial block plus a refill chunk, so memory stays
// bounded by block size regardless of file size. A nested open tag or EOF
// inside a block reports the enclosing block as unclosed and recovers.
class BlockScanner {
 public:
  BlockScanner(std::istream& in, std::string tag, ParseMode mode, std::vector<ParseIssue>& issues)
      : in_(in), tag_(std::move(tag)), mode_(mode), issues_(issues) {}

  bool next(RawBlock& out) {
    while (true) {
      TagInfo tag;
      std::size_t incomplete_at = 0;
      const TagScan scan = find_tag(buf_, pos_, tag, incomplete_at);
      if (scan == TagScan::kIncomplete) {
        pos_ = incomplete_at;
        if (!refill()) {  // EOF: the dangling '<...' is literal text
          pos_ = buf_.size();
          if (finish_eof()) continue;
          return false;
        }
        continue;
      }
      if (scan == TagScan::kNone) {
        pos_ = buf_.size();
        if (!refill()) {
          if (finish_eof()) continue;
          return false;
        }
        continue;
      }
      pos_ = tag.end;
      if (tag.name != tag_) continue;  // unrelated tag, possibly block content
      if (!inside_) {
        if (tag.closing) continue;  // stray close tag outside any block
        inside_ = true;
        block_offset_ = base_ + tag.begin;
        content_start_ = tag.end;
        continue;
      }
      if (tag.closing) {
        out.content.assign(buf_, content_start_, tag.begin - content_start_);
        out.offset = block_offset_;
        inside_ = false;
        compact(pos_);
        return true;
      }
      // new open tag while inside: previous block never closed
      report(block_offset_, "unclosed <" + tag_ + ">");
      block_offset_ = base_ + tag.begin;
      content_start_ = tag.end;
    }
  }

 private:
  static constexpr std::size_t kChunk = 64 * 1024;

  bool refill() {
    compact(inside_ ? content_start_ : pos_);
    const std::size_t old = buf_.size();
    buf_.resize(old + kChunk);
    in_.read(buf_.data() + old, static_cast<std::streamsize>(kChunk));
    const std::size_t got = static_cast<std::size_t>(in_.gcount());
    buf_.resize(old + got);
    if (!bom_checked_) {
      bom_checked_ = true;
      if (buf_.size() >= 3 && buf_[0] == '\xEF' && buf_[1] == '\xBB' && buf_[2] == '\xBF') pos_ = 3;
    }
    return got > 0;
  }

  // At EOF with a block still open: report it and rescan the tail, since an
  // inner open tag may start a well-formed block we skipped past.
  bool finish_eof() {
    if (!inside_) return false;
    report(block_offset_, "unclosed <" + tag_ + "> at end of input");
    inside_ = false;
    pos_ = content_start_;
    return true;
  }

  void compact(std::size_t keep_from) {
    if (keep_from == 0) return;
    buf_.erase(0, keep_from);
    base_ += keep_from;
    pos_ -= std::min(pos_, keep_from);
    if (inside_) content_start_ -= keep_from;
  }

  void report(std::uint64_t offset, std::string message) {
    if (mode_ == ParseMode::kStrict)
      throw ParseError(message + " (byte offset " + std::to_string(offset) + ")", offset);
    issues_.push_back({offset, std::move(message)});
  }

  std::istream& in_;
  std::string tag_;
  ParseMode mode_;
  std::vector<ParseIssue>& issues_;
  std::string buf_;
  std::size_t pos_ = 0;
  std::uint64_t base_ = 0;
  bool inside_ = false;
  std::uint64_t block_offset_ = 0;
  std::size_t content_start_ = 0;
  bool bom_checked_ = false;
};

}  // namespace detail

/// Pull parser for `<doc>` collections. Lenient mode records issues and
/// skips bad blocks; strict mode throws at the first problem.
class DocumentParser {
 public:
  explicit DocumentParser(std::istream& in, ParseMode mode = ParseMode::kLenient)
      : mode_(mode), scanner_(in, "doc", mode, issues_) {}

  std::optional<Document> next() {
    detail::RawBlock block;
    while (scanner_.next(block)) {
      const auto docno = detail::find_sub_block(block.content, "docno");
      if (!docno.found || docno.duplicated) {
        report(block.offset, docno.found ? "multiple <docno> in <doc>" : "missing <docno> in <doc>");
        continue;
      }
      const auto text = detail::find_sub_block(block.content, "text");
      if (!text.found || text.duplicated) {
        report(block.offset, text.found ? "multiple <text> in <doc>" : "missing <text> in <doc>");
        continue;
      }
      Document doc;
      doc.docid = std::string(detail::trim_view(docno.inner));
      if (doc.docid.empty()) {
        report(block.offset, "empty <docno>");
        continue;
      }
      doc.text = std::move(text.inner);
      return doc;
    }
    return std::nullopt;
  }

  const std::vector<ParseIssue>& issues() const { return issues_; }

 private:
  void report(std::uint64_t offset, std::string message) {
    if (mode_ == ParseMode::kStrict)
      throw ParseError(message + " (byte offset " + std::to_string(offset) + ")", offset);
    issues_.push_back({offset, std::move(message)});
  }

  ParseMode mode_;
  std::vector<ParseIssue> issues_;
  detail::BlockScanner scanner_;
};

inline std::vector<Document> parse_documents(std::istream& in, ParseMode mode = ParseMode::kLenient,
                                             std::vector<ParseIssue>* issues = nullptr) {
  DocumentParser parser(in, mode);
  std::vector<Document> docs;
  while (auto doc = parser.next()) docs.push_back(std::move(*doc));
  if (issues) issues->insert(issues->end(), parser.issues().begin(), parser.issues().end());
  return docs;
}

inline std::vector<Topic> parse_topics(std::istream& in, ParseMode mode = ParseMode::kLenient,
                                       std::vector<ParseIssue>* issues_out = nullptr) {
  std::vector<ParseIssue> issues;
  detail::BlockScanner scanner(in, "top", mode, issues);
  std::vector<Topic> topics;
  std::set<std::string> seen_qids;
  const auto report = [&](std::uint64_t offset, std::string message) {
    if (mode == ParseMode::kStrict)
      throw ParseError(message + " (byte offset " + std::to_string(offset) + ")", offset);
    issues.push_back({offset, std::move(message)});
  };
  detail::RawBlock block;
  while (scanner.next(block)) {
    const auto num = detail::find_sub_block(block.content, "num");
    if (!num.found || num.duplicated) {
      report(block.offset, num.found ? "multiple <num> in <top>" : "missing <num> in <top>");
      continue;
    }
    const auto title = detail::find_sub_block(block.content, "title");
    if (!title.found || title.duplicated) {
      report(block.offset, title.found ? "multiple <title> in <top>" : "missing <title> in <top>");
      continue;
    }
    Topic topic;
    topic.qid = std::string(detail::trim_view(num.inner));
    topic.title = std::string(detail::trim_view(title.inner));
    if (topic.qid.empty()) {
      report(block.offset, "empty <num>");
      continue;
    }
    if (topic.title.empty()) {
      report(block.offset, "empty <title>");
      continue;
    }
    if (!seen_qids.insert(topic.qid).second) {
      report(block.offset, "duplicate topic qid '" + topic.qid + "'");
      continue;
    }
    topic.description = std::string(detail::trim_view(detail::find_sub_block(block.content, "desc").inner));
    topic.narrative = std::string(detail::trim_view(detail::find_sub_block(block.content, "narr").inner));
    topics.push_back(std::move(topic));
  }
  if (issues_out) issues_out->insert(issues_out->end(), issues.begin(), issues.end());
  return topics;
}

/// Relevance judgments. Binarized view: relevant(qid) = grades > 0.
class Qrels {
 public:
  void set(const std::string& qid, const std::string& docid, int grade) { by_query_[qid][docid] = grade; }

  bool contains(const std::string& qid, const std::string& docid) const {
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return false;
    return q->second.count(docid) != 0;
  }

  int grade(const std::string& qid, const std::string& docid) const {
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return 0;
    auto d = q->second.find(docid);
    return d == q->second.end() ? 0 : d->second;
  }

  std::set<std::string> relevant(const std::string& qid) const {
    std::set<std::string> out;
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return out;
    for (const auto& [docid, g] : q->second)
      if (g > 0) out.insert(docid);
    return out;
  }

  std::size_t num_relevant(const std::string& qid) const {
    std::size_t n = 0;
    auto q = by_query_.find(qid);
    if (q == by_query_.end()) return 0;
    for (const auto& [docid, g] : q->second)
      if (g > 0) ++n;
    return n;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (const auto& [qid, docs] : by_query_) n += docs.size();
    return n;
  }

  const std::map<std::string, std::map<std::string, int>>& by_query() const { return by_query_; }

 private:
  std::map<std::string, std::map<std::string, int>> by_query_;
};

struct QrelsParseResult {
  Qrels qrels;
  std::size_t duplicates = 0;
  std::vector<ParseIssue> issues;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) fields.push_back(line.substr(start, i - start));
  }
  return fields;
}

}  // namespace detail

// Lines `qid iteration docid grade`; the iteration column is carried by the
// format but unused. Duplicate (qid,docid) pairs: last wins, counted.
inline QrelsParseResult parse_qrels(std::istream& in, ParseMode mode = ParseMode::kLenient) {
  QrelsParseResult result;
  std::string line;
  std::uint64_t lineno = 0;
  const auto report = [&](std::string message) {
    if (mode == ParseMode::kStrict) throw ParseError("line " + std::to_string(lineno) + ": " + message, lineno);
    result.issues.push_back({lineno, std::move(message)});
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = detail::trim_view(line);
    if (lineno == 1 && v.size() >= 3 && v.substr(0, 3) == "\xEF\xBB\xBF") v.remove_prefix(3);
    if (v.empty() || v.front() == '#') continue;
    const auto fields = detail::split_ws(v);
    if (fields.size() != 4) {
      report("expected 4 fields, got " + std::to_string(fields.size()));
      continue;
    }
    int grade = 0;
    const auto [p, ec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), grade);
    if (ec != std::errc() || p != fields[3].data() + fields[3].size()) {
      report("non-integer grade '" + std::string(fields[3]) + "'");
      continue;
    }
    if (grade < 0) {
      report("negative grade " + std::to_string(grade));
      continue;
    }
    const std::string qid(fields[0]);
    const std::string docid(fields[2]);
    if (result.qrels.contains(qid, docid)) ++result.duplicates;
    result.qrels.set(qid, docid, grade);
  }
  return result;
}

struct RunEntry {
  std::string qid;
  std::string docid;
  std::uint32_t rank = 0;
  double score = 0.0;
  std::string tag;
};

inline bool operator==(const RunEntry& a, const RunEntry& b) {
  return a.qid == b.qid && a.docid == b.docid && a.rank == b.rank && a.score == b.score && a.tag == b.tag;
}

namespace detail {

inline std::string format_score(double score) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, score);
  return std::string(buf, res.ptr);
}

}  // namespace detail

// TREC run lines `qid Q0 docid rank score tag`. Validates the RunEntry
// invariants before writing anything; scores render in shortest exact form
// so parse(write(E)) == E.
inline void write_run(const std::vector<RunEntry>& entries, std::ostream& out) {
  std::map<std::string, std::uint32_t> last_rank;
  std::map<std::string, double> last_score;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : entries) {
    if (e.qid.empty() || e.docid.empty()) throw Error("run entry with empty qid or docid");
    auto it = last_rank.find(e.qid);
    const std::uint32_t expected = (it == last_rank.end()) ? 1 : it->second + 1;
    if (e.rank != expected)
      throw Error("non-contiguous rank for qid '" + e.qid + "': got " + std::to_string(e.rank) + ", expected " +
                  std::to_string(expected));
    if (it != last_rank.end() && e.score > last_score[e.qid])
      throw Error("score increases with rank for qid '" + e.qid + "' at rank " + std::to_string(e.rank));
    if (!seen.insert({e.qid, e.docid}).second)
      throw Error("duplicate (qid, docid) in run: ('" + e.qid + "', '" + e.docid + "')");
    last_rank[e.qid] = e.rank;
    last_score[e.qid] = e.score;
  }
  for (const auto& e : entries)
    out << e.qid << " Q0 " << e.docid << " " << e.rank << " " << detail::format_score(e.score) << " " << e.tag
        << "\n";
}

inline std::vector<RunEntry> parse_run(std::istream& in, ParseMode mode = ParseMode::kLenient,
                                       std::vector<ParseIssue>* issues_out = nullptr) {
  std::vector<RunEntry> entries;
  std::vector<ParseIssue> issues;
  std::string line;
  std::uint64_t lineno = 0;
  const auto report = [&](std::string message) {
    if (mode == ParseMode::kStrict) throw ParseError("line " + std::to_string(lineno) + ": " + message, lineno);
    issues.push_back({lineno, std::move(message)});
  };
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view v = detail::trim_view(line);
    if (lineno == 1 && v.size() >= 3 && v.substr(0, 3) == "\xEF\xBB\xBF") v.remove_prefix(3);
    if (v.empty() || v.front() == '#') continue;
    const auto fields = detail::split_ws(v);
    if (fields.size() != 6) {
      report("expected 6 fields, got " + std::to_string(fields.size()));
      continue;
    }
    RunEntry e;
    e.qid = std::string(fields[0]);
    e.docid = std::string(fields[2]);
    e.tag = std::string(fields[5]);
    std::uint32_t rank = 0;
    auto [rp, rec] = std::from_chars(fields[3].data(), fields[3].data() + fields[3].size(), rank);
    if (rec != std::errc() || rp != fields[3].data() + fields[3].size() || rank < 1) {
      report("bad rank '" + std::string(fields[3]) + "'");
      continue;
    }
    e.rank = rank;
    double score = 0.0;
    auto [sp, sec] = std::from_chars(fields[4].data(), fields[4].data() + fields[4].size(), score);
    if (sec != std::errc() || sp != fields[4].data() + fields[4].size()) {
      report("bad score '" + std::string(fields[4]) + "'");
      continue;
    }
    e.score = score;
    entries.push_back(std::move(e));
  }
  if (issues_out) issues_out->insert(issues_out->end(), issues.begin(), issues.end());
  return entries;
}

// Every regular file under `dir`, recursively, in sorted path order — the
// deterministic corpus enumeration the indexer relies on.
inline std::vector<std::filesystem::path> list_corpus_files(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir) || !fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir))
    if (entry.is_regular_file()) files.push_back(entry.path());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });
  return files;
}

}  // namespace bowkit
