#pragma once

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bowkit/corpus.hpp"
#include "bowkit/error.hpp"
#include "bowkit/hash.hpp"
#include "bowkit/textpipe.hpp"

namespace bowkit {

struct Posting {
  std::uint32_t ordinal = 0;
  std::uint32_t tf = 0;
};

inline bool operator==(const Posting& a, const Posting& b) { return a.ordinal == b.ordinal && a.tf == b.tf; }

/// Collection-wide counts. total_tokens counts terms that survived the whole
/// pipeline (the Σ doclen the scorers divide by); raw_tokens counts what the
/// tokenizer emitted before normalization, stopping, and stemming, since
/// published collection statistics rarely say which variant they report.
struct CollectionStats {
  std::uint64_t num_docs = 0;
  std::uint64_t raw_tokens = 0;
  std::uint64_t total_tokens = 0;
  std::uint64_t unique_terms = 0;
  double avg_doclen = 0.0;
};

inline bool operator==(const CollectionStats& a, const CollectionStats& b) {
  return a.num_docs == b.num_docs && a.raw_tokens == b.raw_tokens && a.total_tokens == b.total_tokens &&
         a.unique_terms == b.unique_terms && a.avg_doclen == b.avg_doclen;
}

class IndexBuilder;
class InvertedIndex;
inline InvertedIndex load_index(const std::filesystem::path& dir);
inline InvertedIndex build_index(const std::vector<Document>& docs, PipelineConfig config, unsigned threads);

/// Immutable bag-of-words inverted index: docid table with per-document
/// lengths, term lexicon with (df, cf) and ordinal-sorted postings, and the
/// PipelineConfig every query must reproduce.
class InvertedIndex {
 public:
  struct TermData {
    std::uint64_t cf = 0;
    std::vector<Posting> postings;  // ordinal ascending, no duplicates

    std::uint32_t df() const { return static_cast<std::uint32_t>(postings.size()); }
    bool operator==(const TermData& other) const { return cf == other.cf && postings == other.postings; }
  };

  struct TermInfo {
    std::uint32_t df = 0;
    std::uint64_t cf = 0;
    const std::vector<Posting>* postings = nullptr;
  };

  const PipelineConfig& config() const { return config_; }
  const CollectionStats& stats() const { return stats_; }
  std::uint64_t num_docs() const { return docids_.size(); }

  const std::string& docid(std::uint32_t ordinal) const {
    check_ordinal(ordinal);
    return docids_[ordinal];
  }

  std::uint64_t doclen(std::uint32_t ordinal) const {
    check_ordinal(ordinal);
    return doclens_[ordinal];
  }

  std::optional<std::uint32_t> ordinal_of(const std::string& docid) const {
    auto it = ordinals_.find(docid);
    if (it == ordinals_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<TermInfo> lookup(const std::string& term) const {
    auto it = lexicon_.find(term);
    if (it == lexicon_.end()) return std::nullopt;
    return TermInfo{it->second.df(), it->second.cf, &it->second.postings};
  }

  /// Full lexicon in term order — deterministic enumeration for resource
  /// generation, persistence, and equality checks.
  const std::map<std::string, TermData>& lexicon() const { return lexicon_; }

  bool operator==(const InvertedIndex& other) const {
    return docids_ == other.docids_ && doclens_ == other.doclens_ && lexicon_ == other.lexicon_ &&
           stats_ == other.stats_ && config_.canonical_text() == other.config_.canonical_text();
  }

  void save(const std::filesystem::path& dir) const;

 private:
  InvertedIndex() = default;

  void check_ordinal(std::uint32_t ordinal) const {
    if (ordinal >= docids_.size())
      throw Error("document ordinal " + std::to_string(ordinal) + " out of range (collection has " +
                  std::to_string(docids_.size()) + " documents)");
  }

  void rebuild_ordinals() {
    ordinals_.clear();
    ordinals_.reserve(docids_.size());
    for (std::uint32_t i = 0; i < docids_.size(); ++i) ordinals_.emplace(docids_[i], i);
  }

  void finalize_stats() {
    stats_.num_docs = docids_.size();
    stats_.unique_terms = lexicon_.size();
    stats_.total_tokens = 0;
    for (const auto len : doclens_) stats_.total_tokens += len;
    stats_.avg_doclen =
        stats_.num_docs == 0 ? 0.0 : static_cast<double>(stats_.total_tokens) / static_cast<double>(stats_.num_docs);
  }

  std::vector<std::string> docids_;
  std::vector<std::uint64_t> doclens_;
  std::unordered_map<std::string, std::uint32_t> ordinals_;
  std::map<std::string, TermData> lexicon_;
  CollectionStats stats_;
  PipelineConfig config_;

  friend class IndexBuilder;
  friend InvertedIndex load_index(const std::filesystem::path& dir);
  friend InvertedIndex build_index(const std::vector<Document>& docs, PipelineConfig config, unsigned threads);
};

/// Streaming one-pass builder: feed documents in the order that defines
/// their ordinals, then finish().
class IndexBuilder {
 public:
  explicit IndexBuilder(PipelineConfig config) { index_.config_ = std::move(config); }

  void add(const Document& doc) {
    if (doc.docid.empty()) throw Error("document with empty docid");
    const auto ordinal = static_cast<std::uint32_t>(index_.docids_.size());
    if (!index_.ordinals_.emplace(doc.docid, ordinal).second) throw Error("duplicate docid '" + doc.docid + "'");
    index_.docids_.push_back(doc.docid);
    index_.stats_.raw_tokens += tokenize(doc.text).size();
    const auto terms = index_.config_.apply(doc.text);
    index_.doclens_.push_back(terms.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    for (const auto& [term, count] : tf) {
      auto& entry = index_.lexicon_[term];
      entry.cf += count;
      entry.postings.push_back({ordinal, count});
    }
  }

  std::size_t docs_added() const { return index_.docids_.size(); }

  InvertedIndex finish() {
    if (index_.docids_.empty()) throw Error("cannot build an index from zero documents");
    // postings were appended per document out of term order; restore ordinal order
    for (auto& [term, entry] : index_.lexicon_)
      std::sort(entry.postings.begin(), entry.postings.end(),
                [](const Posting& a, const Posting& b) { return a.ordinal < b.ordinal; });
    index_.finalize_stats();
    return std::move(index_);
  }

 private:
  InvertedIndex index_;
};

namespace detail {

struct PartialIndex {
  std::map<std::string, InvertedIndex::TermData> lexicon;
  std::vector<std::uint64_t> doclens;
  std::uint64_t raw_tokens = 0;
};

inline void build_partition(const std::vector<Document>& docs, std::size_t begin, std::size_t end,
                            const PipelineConfig& config, PartialIndex& out) {
  out.doclens.reserve(end - begin);
  for (std::size_t i = begin; i < end; ++i) {
    out.raw_tokens += tokenize(docs[i].text).size();
    const auto terms = config.apply(docs[i].text);
    out.doclens.push_back(terms.size());
    std::unordered_map<std::string, std::uint32_t> tf;
    for (const auto& t : terms) ++tf[t];
    for (const auto& [term, count] : tf) {
      auto& entry = out.lexicon[term];
      entry.cf += count;
      entry.postings.push_back({static_cast<std::uint32_t>(i), count});
    }
  }
  for (auto& [term, entry] : out.lexicon)
    std::sort(entry.postings.begin(), entry.postings.end(),
              [](const Posting& a, const Posting& b) { return a.ordinal < b.ordinal; });
}

}  // namespace detail

/// Builds the index over `docs` (ordinal = position). With threads > 1 the
/// documents are partitioned into contiguous ranges indexed concurrently and
/// merged in range order; because ordinals come from document positions, the
/// result is identical to the serial build regardless of scheduling.
inline InvertedIndex build_index(const std::vector<Document>& docs, PipelineConfig config, unsigned threads) {
  if (docs.empty()) throw Error("cannot build an index from zero documents");
  const std::size_t per_thread_min = 64;
  const auto usable = static_cast<unsigned>(std::min<std::size_t>(threads, docs.size() / per_thread_min + 1));
  if (usable <= 1) {
    IndexBuilder builder(std::move(config));
    for (const auto& doc : docs) builder.add(doc);
    return builder.finish();
  }

  InvertedIndex index;
  index.config_ = std::move(config);
  index.docids_.reserve(docs.size());
  for (const auto& doc : docs) {
    if (doc.docid.empty()) throw Error("document with empty docid");
    if (!index.ordinals_.emplace(doc.docid, static_cast<std::uint32_t>(index.docids_.size())).second)
      throw Error("duplicate docid '" + doc.docid + "'");
    index.docids_.push_back(doc.docid);
  }

  std::vector<detail::PartialIndex> parts(usable);
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> failures(usable);
  const std::size_t chunk = (docs.size() + usable - 1) / usable;
  for (unsigned t = 0; t < usable; ++t) {
    const std::size_t begin = std::min<std::size_t>(t * chunk, docs.size());
    const std::size_t end = std::min<std::size_t>(begin + chunk, docs.size());
    workers.emplace_back([&, t, begin, end] {
      try {
        detail::build_partition(docs, begin, end, index.config_, parts[t]);
      } catch (...) {
        failures[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);

  for (auto& part : parts) {
    index.doclens_.insert(index.doclens_.end(), part.doclens.begin(), part.doclens.end());
    index.stats_.raw_tokens += part.raw_tokens;
    for (auto& [term, partial] : part.lexicon) {
      auto& entry = index.lexicon_[term];
      entry.cf += partial.cf;
      // partitions cover ascending ordinal ranges, so appending keeps order
      entry.postings.insert(entry.postings.end(), partial.postings.begin(), partial.postings.end());
    }
  }
  index.finalize_stats();
  return index;
}

inline InvertedIndex build_index(const std::vector<Document>& docs, PipelineConfig config) {
  return build_index(docs, std::move(config), 1);
}

// ---------------------------------------------------------------------------
// Persistence: a directory holding metadata.txt (format version, content
// checksum, canonical pipeline description, collection statistics) plus
// little-endian binary doctable/lexicon/postings files and, when the
// pipeline uses them, the stoplist and stem-rule resources verbatim.
// ---------------------------------------------------------------------------

namespace detail {

inline constexpr std::string_view kIndexMagic = "bowkit-index";
inline constexpr int kIndexVersion = 1;

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

struct ByteReader {
  std::string data;  // owned: readers outlive the read_file temporaries
  std::size_t pos = 0;
  std::string file;

  void need(std::size_t n) const {
    if (pos + n > data.size()) throw IndexTruncatedError("index file " + file + " is truncated");
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data[pos++])) << (8 * i);
    return v;
  }
  std::string bytes(std::size_t n) {
    need(n);
    std::string out(data.substr(pos, n));
    pos += n;
    return out;
  }
  void expect_end() const {
    if (pos != data.size()) throw IndexError("index file " + file + " has trailing bytes");
  }
};

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error("write failed for " + path.string());
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IndexError("cannot read index file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Files that exist are hashed (name then contents) in this fixed order.
inline std::uint64_t index_checksum(const std::filesystem::path& dir) {
  std::uint64_t h = kFnvOffset;
  for (const char* name : {"doctable.bin", "lexicon.bin", "postings.bin", "stoplist.txt", "stemrules.tsv"}) {
    const auto path = dir / name;
    if (!std::filesystem::exists(path)) continue;
    h = fnv1a64(name, h);
    h = fnv1a64(read_file(path), h);
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

}  // namespace detail

inline void InvertedIndex::save(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  const fs::path parent = dir.has_parent_path() ? dir.parent_path() : fs::path(".");
  std::error_code ec;
  fs::create_directories(parent, ec);
  const fs::path tmp = parent / (dir.filename().string() + ".tmp-" + std::to_string(::getpid()));
  fs::remove_all(tmp, ec);
  if (!fs::create_directories(tmp)) throw Error("cannot create directory " + tmp.string());

  try {
    std::string doctable;
    detail::put_u64(doctable, docids_.size());
    for (std::size_t i = 0; i < docids_.size(); ++i) {
      detail::put_u32(doctable, static_cast<std::uint32_t>(docids_[i].size()));
      doctable += docids_[i];
      detail::put_u64(doctable, doclens_[i]);
    }
    detail::write_file(tmp / "doctable.bin", doctable);

    std::string lexicon;
    std::string postings;
    detail::put_u64(lexicon, lexicon_.size());
    for (const auto& [term, entry] : lexicon_) {
      detail::put_u32(lexicon, static_cast<std::uint32_t>(term.size()));
      lexicon += term;
      detail::put_u32(lexicon, entry.df());
      detail::put_u64(lexicon, entry.cf);
      detail::put_u64(lexicon, postings.size());  // byte offset of this term's postings
      for (const auto& p : entry.postings) {
        detail::put_u32(postings, p.ordinal);
        detail::put_u32(postings, p.tf);
      }
    }
    detail::write_file(tmp / "lexicon.bin", lexicon);
    detail::write_file(tmp / "postings.bin", postings);

    if (config_.stoplist) {
      std::ostringstream out;
      config_.stoplist->save(out);
      detail::write_file(tmp / "stoplist.txt", out.str());
    }
    if (config_.stemmer) {
      std::ostringstream out;
      config_.stemmer->save(out);
      detail::write_file(tmp / "stemrules.tsv", out.str());
    }

    std::ostringstream meta;
    meta << "format: " << detail::kIndexMagic << " " << detail::kIndexVersion << "\n";
    meta << "checksum: fnv64:" << detail::hex64(detail::index_checksum(tmp)) << "\n";
    meta << "docs: " << stats_.num_docs << "\n";
    meta << "raw_tokens: " << stats_.raw_tokens << "\n";
    meta << "total_tokens: " << stats_.total_tokens << "\n";
    meta << "unique_terms: " << stats_.unique_terms << "\n";
    std::istringstream pipeline(config_.canonical_text());
    std::string line;
    while (std::getline(pipeline, line)) meta << "pipeline." << line << "\n";
    detail::write_file(tmp / "metadata.txt", meta.str());

    fs::remove_all(dir, ec);
    fs::rename(tmp, dir);
  } catch (...) {
    fs::remove_all(tmp, ec);
    throw;
  }
}

inline InvertedIndex load_index(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::exists(dir / "metadata.txt"))
    throw IndexError("not an index directory (missing metadata.txt): " + dir.string());

  std::map<std::string, std::string> meta;
  std::vector<std::string> pipeline_lines;
  {
    std::istringstream in(detail::read_file(dir / "metadata.txt"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      if (line.rfind("pipeline.", 0) == 0) {
        pipeline_lines.push_back(line.substr(9));
        continue;
      }
      const auto colon = line.find(": ");
      if (colon == std::string::npos) throw IndexError("malformed metadata line: " + line);
      meta[line.substr(0, colon)] = line.substr(colon + 2);
    }
  }

  const auto require = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) throw IndexError(std::string("metadata missing field '") + key + "'");
    return it->second;
  };

  {
    std::istringstream fmt(require("format"));
    std::string magic;
    int version = -1;
    fmt >> magic >> version;
    if (magic != detail::kIndexMagic) throw IndexError("not a recognized index format: " + require("format"));
    if (version != detail::kIndexVersion)
      throw IndexVersionError("index format version " + std::to_string(version) + " unsupported (expected " +
                              std::to_string(detail::kIndexVersion) + ")");
  }

  const std::string expected = "fnv64:" + detail::hex64(detail::index_checksum(dir));
  if (require("checksum") != expected)
    throw IndexChecksumError("index checksum mismatch: metadata says " + require("checksum") + ", files hash to " +
                             expected);

  InvertedIndex index;

  {
    detail::ByteReader r{detail::read_file(dir / "doctable.bin"), 0, "doctable.bin"};
    const std::uint64_t n = r.u64();
    index.docids_.reserve(n);
    index.doclens_.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint32_t len = r.u32();
      index.docids_.push_back(r.bytes(len));
      index.doclens_.push_back(r.u64());
    }
    r.expect_end();
  }

  {
    detail::ByteReader lex{detail::read_file(dir / "lexicon.bin"), 0, "lexicon.bin"};
    detail::ByteReader post{detail::read_file(dir / "postings.bin"), 0, "postings.bin"};
    const std::uint64_t n = lex.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
      const std::uint32_t term_len = lex.u32();
      std::string term = lex.bytes(term_len);
      InvertedIndex::TermData entry;
      const std::uint32_t df = lex.u32();
      entry.cf = lex.u64();
      const std::uint64_t offset = lex.u64();
      if (offset != post.pos) throw IndexError("corrupt postings locator for term '" + term + "'");
      entry.postings.reserve(df);
      for (std::uint32_t p = 0; p < df; ++p) {
        Posting posting;
        posting.ordinal = post.u32();
        posting.tf = post.u32();
        entry.postings.push_back(posting);
      }
      index.lexicon_.emplace(std::move(term), std::move(entry));
    }
    lex.expect_end();
    post.expect_end();
  }

  PipelineConfig config;
  for (const auto& line : pipeline_lines) {
    if (line.rfind("digits=", 0) == 0) {
      const std::string value = line.substr(7);
      if (value == "keep")
        config.digits = DigitPolicy::kKeep;
      else if (value == "drop")
        config.digits = DigitPolicy::kDrop;
      else
        throw IndexError("unknown digit policy '" + value + "' in index metadata");
    } else if (line.rfind("stoplist=", 0) == 0 && line != "stoplist=none") {
      std::istringstream in(detail::read_file(dir / "stoplist.txt"));
      config.stoplist = StopList::load(in);
    } else if (line.rfind("stemmer=", 0) == 0 && line != "stemmer=none") {
      std::istringstream in(detail::read_file(dir / "stemrules.tsv"));
      config.stemmer = StemRuleSet::load(in);
    }
  }
  {
    std::string canonical;
    for (const auto& line : pipeline_lines) canonical += line + "\n";
    if (config.canonical_text() != canonical)
      throw IndexChecksumError("pipeline resources do not match index metadata");
    index.config_ = std::move(config);
  }

  index.rebuild_ordinals();
  index.finalize_stats();

  const auto check_count = [&](const char* key, std::uint64_t actual) {
    if (std::to_string(actual) != require(key))
      throw IndexError(std::string("metadata field '") + key + "' disagrees with index contents");
  };
  std::uint64_t raw = 0;
  {
    const std::string& v = require("raw_tokens");
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), raw);
    if (ec != std::errc() || p != v.data() + v.size()) throw IndexError("malformed raw_tokens in metadata");
  }
  index.stats_.raw_tokens = raw;
  check_count("docs", index.stats_.num_docs);
  check_count("total_tokens", index.stats_.total_tokens);
  check_count("unique_terms", index.stats_.unique_terms);
  return index;
}

}  // namespace bowkit
