#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bowkit/error.hpp"
#include "bowkit/hash.hpp"
#include "bowkit/unicode.hpp"

namespace bowkit {

inline constexpr char32_t kZwnj = 0x200C;
inline constexpr char32_t kZwj = 0x200D;

/// Splits text into raw tokens: maximal runs of letters, marks and digits.
/// ZWJ/ZWNJ do not break a run (Indic scripts use them word-internally);
/// normalize() strips them afterwards. Everything else separates tokens.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t start = i;
    const char32_t cp = uni::decode(text, i);
    if (uni::is_token_char(cp) || cp == kZwnj || cp == kZwj) {
      current.append(text.substr(start, i - start));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

enum class DigitPolicy { kKeep, kDrop };

/// Token -> index term: strip ZWJ/ZWNJ, simple-lowercase, NFC, then apply
/// the digit policy (an all-digit token becomes empty under kDrop).
/// Idempotent; the strip-fold-compose order matters for that.
inline std::string normalize(std::string_view token, DigitPolicy digits = DigitPolicy::kKeep) {
  std::u32string cps;
  cps.reserve(token.size());
  std::size_t i = 0;
  while (i < token.size()) {
    const char32_t cp = uni::decode(token, i);
    if (cp == kZwnj || cp == kZwj) continue;
    cps.push_back(uni::simple_lower(cp));
  }
  std::string term = uni::nfc(uni::encode(cps));
  if (digits == DigitPolicy::kDrop && !term.empty()) {
    bool all_digits = true;
    for (std::size_t j = 0; j < term.size();) {
      if (!uni::is_number(uni::decode(term, j))) {
        all_digits = false;
        break;
      }
    }
    if (all_digits) return std::string();
  }
  return term;
}

class StopList {
 public:
  StopList() = default;

  // Entries are normalized on insertion, so membership checks always see
  // the same form the pipeline produces.
  void insert(std::string_view term) {
    std::string t = normalize(term);
    if (!t.empty()) terms_.insert(std::move(t));
  }

  bool contains(const std::string& term) const { return terms_.count(term) != 0; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  std::vector<std::string> sorted_terms() const {
    std::vector<std::string> out(terms_.begin(), terms_.end());
    std::sort(out.begin(), out.end());
    return out;
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& t : sorted_terms()) {
      h = fnv1a64(t, h);
      h = fnv1a64("\n", h);
    }
    return h;
  }

  // One term per line; '#' lines are comments, blanks ignored.
  static StopList load(std::istream& in) {
    StopList sl;
    std::string line;
    while (std::getline(in, line)) {
      std::string_view v = trim(line);
      if (v.empty() || v.front() == '#') continue;
      sl.insert(v);
    }
    return sl;
  }

  static StopList load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open stoplist file: " + path);
    return load(in);
  }

  void save(std::ostream& out) const {
    for (const auto& t : sorted_terms()) out << t << "\n";
  }

 private:
  static std::string_view trim(std::string_view v) {
    while (!v.empty() && (v.front() == ' ' || v.front() == '\t' || v.front() == '\r')) v.remove_prefix(1);
    while (!v.empty() && (v.back() == ' ' || v.back() == '\t' || v.back() == '\r')) v.remove_suffix(1);
    return v;
  }

  std::unordered_set<std::string> terms_;
};

inline std::vector<std::string> apply_stoplist(const std::vector<std::string>& terms, const StopList& stoplist) {
  std::vector<std::string> out;
  out.reserve(terms.size());
  for (const auto& t : terms)
    if (!stoplist.contains(t)) out.push_back(t);
  return out;
}

struct StemRule {
  std::string suffix;
  std::uint32_t min_stem_len = 1;
  std::uint32_t suffix_cp_len = 0;  // derived
};

/// Ordered suffix-strip rules. Canonical order (longest suffix first, then
/// lexicographic) makes "longest match" a property of the data, and the
/// first rule that fits is the only one applied — no iteration to fixpoint.
class StemRuleSet {
 public:
  StemRuleSet() = default;

  StemRuleSet(std::vector<std::pair<std::string, std::uint32_t>> rules, std::uint32_t default_min_stem_len)
      : default_min_stem_len_(default_min_stem_len) {
    if (default_min_stem_len_ < 1) throw UsageError("min_stem_len must be positive");
    for (auto& [suffix, min_len] : rules) add_rule(std::move(suffix), min_len);
    canonicalize();
  }

  std::uint32_t default_min_stem_len() const { return default_min_stem_len_; }
  const std::vector<StemRule>& rules() const { return rules_; }
  std::size_t size() const { return rules_.size(); }
  bool empty() const { return rules_.empty(); }

  // Single pass: the first canonical-order rule whose suffix matches and
  // leaves >= min_stem_len codepoints fires; zero or one rule ever does.
  std::string stem(std::string_view term) const {
    if (rules_.empty()) return std::string(term);
    const std::size_t term_cp_len = uni::codepoint_count(term);
    for (const auto& rule : rules_) {
      if (rule.suffix_cp_len >= term_cp_len) continue;
      if (term_cp_len - rule.suffix_cp_len < rule.min_stem_len) continue;
      if (term.ends_with(rule.suffix)) return std::string(term.substr(0, term.size() - rule.suffix.size()));
    }
    return std::string(term);
  }

  std::uint64_t content_hash() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& r : rules_) {
      h = fnv1a64(r.suffix, h);
      h = fnv1a64("\t" + std::to_string(r.min_stem_len) + "\n", h);
    }
    h = fnv1a64("!" + std::to_string(default_min_stem_len_), h);
    return h;
  }

  // Lines `suffix<TAB>min_stem_len` (the column may be omitted to take the
  // file default); optional header `! min_stem_len_default N`.
  static StemRuleSet load(std::istream& in) {
    StemRuleSet rs;
    std::string line;
    std::uint64_t lineno = 0;
    bool saw_rule = false;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      if (line.front() == '!') {
        if (saw_rule) throw ParseError("line " + std::to_string(lineno) + ": header after rules", lineno);
        std::istringstream iss(line.substr(1));
        std::string key;
        long value = 0;
        if (!(iss >> key >> value) || key != "min_stem_len_default" || value < 1)
          throw ParseError("line " + std::to_string(lineno) + ": bad header", lineno);
        rs.default_min_stem_len_ = static_cast<std::uint32_t>(value);
        continue;
      }
      std::string suffix = line;
      std::uint32_t min_len = rs.default_min_stem_len_;
      if (auto tab = line.find('\t'); tab != std::string::npos) {
        suffix = line.substr(0, tab);
        const std::string num = line.substr(tab + 1);
        try {
          const long v = std::stol(num);
          if (v < 1 || std::to_string(v) != num) throw std::invalid_argument(num);
          min_len = static_cast<std::uint32_t>(v);
        } catch (const std::exception&) {
          throw ParseError("line " + std::to_string(lineno) + ": bad min_stem_len '" + num + "'", lineno);
        }
      }
      try {
        rs.add_rule(std::move(suffix), min_len);
      } catch (const Error& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
      }
      saw_rule = true;
    }
    rs.canonicalize();
    return rs;
  }

  static StemRuleSet load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open stem rules file: " + path);
    return load(in);
  }

  void save(std::ostream& out) const {
    out << "! min_stem_len_default " << default_min_stem_len_ << "\n";
    for (const auto& r : rules_) out << r.suffix << "\t" << r.min_stem_len << "\n";
  }

  void save_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write stem rules file: " + path);
    save(out);
  }

 private:
  void add_rule(std::string suffix, std::uint32_t min_len) {
    if (suffix.empty()) throw Error("empty suffix");
    if (min_len < 1) throw Error("min_stem_len must be positive");
    for (const auto& r : rules_)
      if (r.suffix == suffix) throw Error("duplicate suffix '" + suffix + "'");
    StemRule rule;
    rule.suffix_cp_len = static_cast<std::uint32_t>(uni::codepoint_count(suffix));
    rule.suffix = std::move(suffix);
    rule.min_stem_len = min_len;
    rules_.push_back(std::move(rule));
  }

  void canonicalize() {
    std::sort(rules_.begin(), rules_.end(), [](const StemRule& a, const StemRule& b) {
      if (a.suffix_cp_len != b.suffix_cp_len) return a.suffix_cp_len > b.suffix_cp_len;
      return a.suffix < b.suffix;
    });
  }

  std::vector<StemRule> rules_;
  std::uint32_t default_min_stem_len_ = 1;
};

inline std::string stem(std::string_view term, const StemRuleSet& rules) { return rules.stem(term); }

/// The transform chain bound to an index at build time. Two configs are
/// interchangeable iff their canonical texts are byte-equal; resource
/// content (not paths) feeds the canonical form via FNV-64 digests.
struct PipelineConfig {
  DigitPolicy digits = DigitPolicy::kKeep;
  std::optional<StopList> stoplist;
  std::optional<StemRuleSet> stemmer;

  std::string canonical_text() const {
    std::ostringstream out;
    out << "casefold=1\n";
    out << "digits=" << (digits == DigitPolicy::kKeep ? "keep" : "drop") << "\n";
    out << "nfc=1\n";
    if (stemmer) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stemmer->content_hash()));
      out << "stemmer=fnv64:" << buf << "/" << stemmer->size() << "/" << stemmer->default_min_stem_len() << "\n";
    } else {
      out << "stemmer=none\n";
    }
    if (stoplist) {
      char buf[17];
      std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(stoplist->content_hash()));
      out << "stoplist=fnv64:" << buf << "/" << stoplist->size() << "\n";
    } else {
      out << "stoplist=none\n";
    }
    out << "zwstrip=1\n";
    return out.str();
  }

  bool has_stemmer() const { return stemmer.has_value(); }
  bool has_stoplist() const { return stoplist.has_value(); }

  // tokenize -> normalize (empties dropped) -> stop -> stem
  std::vector<std::string> apply(std::string_view text) const {
    std::vector<std::string> terms;
    for (const auto& token : tokenize(text)) {
      std::string term = normalize(token, digits);
      if (term.empty()) continue;
      if (stoplist && stoplist->contains(term)) continue;
      if (stemmer) term = stemmer->stem(term);
      terms.push_back(std::move(term));
    }
    return terms;
  }

  // Same chain for a single already-tokenized unit; empty result means the
  // token was dropped.
  std::string apply_token(std::string_view token) const {
    std::string term = normalize(token, digits);
    if (term.empty()) return term;
    if (stoplist && stoplist->contains(term)) return std::string();
    if (stemmer) return stemmer->stem(term);
    return term;
  }
};

inline bool operator==(const PipelineConfig& a, const PipelineConfig& b) {
  return a.canonical_text() == b.canonical_text();
}

/// Top-k terms by collection frequency, ties broken lexicographically.
/// Output is candidate material for a human-curated stoplist.
inline std::vector<std::pair<std::string, std::uint64_t>> top_frequency_terms(
    const std::unordered_map<std::string, std::uint64_t>& table, long k) {
  if (k <= 0) throw UsageError("top_frequency_terms: k must be positive");
  std::vector<std::pair<std::string, std::uint64_t>> rows(table.begin(), table.end());
  std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (rows.size() > static_cast<std::size_t>(k)) rows.resize(static_cast<std::size_t>(k));
  return rows;
}

/// Statistical suffix discovery: a suffix becomes a rule when stripping it
/// from >= min_freq lexicon terms lands on another lexicon term.
inline StemRuleSet learn_suffix_rules(const std::unordered_set<std::string>& lexicon, long max_suffix_len,
                                      long min_freq, long min_stem_len) {
  if (lexicon.empty()) throw Error("learn_suffix_rules: empty lexicon");
  if (max_suffix_len < 1) throw UsageError("learn_suffix_rules: max_suffix_len must be positive");
  if (min_freq < 1) throw UsageError("learn_suffix_rules: min_freq must be positive");
  if (min_stem_len < 1) throw UsageError("learn_suffix_rules: min_stem_len must be positive");

  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& term : lexicon) {
    const std::u32string cps = uni::decode_all(term);
    const long cp_len = static_cast<long>(cps.size());
    for (long slen = 1; slen <= max_suffix_len && cp_len - slen >= min_stem_len; ++slen) {
      std::u32string stem_cps(cps.begin(), cps.end() - slen);
      if (!lexicon.count(uni::encode(stem_cps))) continue;
      std::u32string suffix_cps(cps.end() - slen, cps.end());
      ++counts[uni::encode(suffix_cps)];
    }
  }
  std::vector<std::pair<std::string, std::uint32_t>> rules;
  for (const auto& [suffix, count] : counts)
    if (count >= static_cast<std::uint64_t>(min_freq)) rules.emplace_back(suffix, static_cast<std::uint32_t>(min_stem_len));
  return StemRuleSet(std::move(rules), static_cast<std::uint32_t>(min_stem_len));
}

}  // namespace bowkit
