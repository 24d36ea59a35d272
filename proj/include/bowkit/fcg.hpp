#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "bowkit/error.hpp"
#include "bowkit/ranking.hpp"
#include "bowkit/textpipe.hpp"

namespace bowkit {

/// Inflectional paradigms for frequent-case query expansion: an ordered list
/// of (match suffix, variant suffixes). The first paradigm whose match
/// suffix ends the term fires; an empty match suffix matches every term.
class ParadigmSet {
 public:
  struct Paradigm {
    std::string match_suffix;             // empty = match-all
    std::vector<std::string> variants;    // suffixes appended to the stripped term
  };

  ParadigmSet() = default;

  void add(std::string match_suffix, std::vector<std::string> variants) {
    if (variants.empty()) throw Error("paradigm with empty variant list");
    std::set<std::string> seen;
    for (const auto& v : variants)
      if (!seen.insert(v).second) throw Error("duplicate variant suffix '" + v + "' in paradigm");
    paradigms_.push_back({std::move(match_suffix), std::move(variants)});
  }

  const std::vector<Paradigm>& paradigms() const { return paradigms_; }
  std::size_t size() const { return paradigms_.size(); }
  bool empty() const { return paradigms_.empty(); }

  // Lines `match_suffix<TAB>variant1,variant2,...`; `*` is the match-all
  // condition and `0` the empty variant suffix. File order is match order.
  static ParadigmSet load(std::istream& in) {
    ParadigmSet out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos)
        throw ParseError("line " + std::to_string(lineno) + ": expected `match<TAB>variants`", lineno);
      std::string match = line.substr(0, tab);
      if (match == "*") match.clear();
      std::vector<std::string> variants;
      std::string_view rest = std::string_view(line).substr(tab + 1);
      bool more = !rest.empty();
      while (more) {
        const auto comma = rest.find(',');
        const std::string_view piece = rest.substr(0, comma);
        if (piece.empty())
          throw ParseError("line " + std::to_string(lineno) + ": empty variant (write 0 for the empty suffix)",
                           lineno);
        variants.emplace_back(piece == "0" ? std::string_view() : piece);
        more = comma != std::string_view::npos;
        if (more) rest.remove_prefix(comma + 1);
      }
      try {
        out.add(std::move(match), std::move(variants));
      } catch (const Error& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what(), lineno);
      }
    }
    return out;
  }

  static ParadigmSet load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open paradigm file: " + path);
    return load(in);
  }

 private:
  std::vector<Paradigm> paradigms_;
};

/// All inflectional variants of `term` under the first matching paradigm,
/// always including `term` itself. No match (or no paradigms) → {term}.
inline std::set<std::string> generate_variants(const std::string& term, const ParadigmSet& paradigms) {
  std::set<std::string> out{term};
  for (const auto& p : paradigms.paradigms()) {
    if (!std::string_view(term).ends_with(p.match_suffix)) continue;
    const std::string_view base = std::string_view(term).substr(0, term.size() - p.match_suffix.size());
    for (const auto& v : p.variants) out.insert(std::string(base) + v);
    break;  // first match wins
  }
  return out;
}

/// Equal-weight expansion: every variant of an original term inherits its
/// qtf; weights of a variant reachable from several originals add.
inline Query expand_query(const Query& query, const ParadigmSet& paradigms) {
  Query out;
  out.qid = query.qid;
  out.fields = query.fields;
  out.pipeline_canonical = query.pipeline_canonical;
  out.fcg_expanded = true;
  for (const auto& [term, qtf] : query.terms)
    for (const auto& variant : generate_variants(term, paradigms)) out.terms[variant] += qtf;
  return out;
}

/// build_query followed by paradigm expansion when a ParadigmSet is given.
inline Query build_query(const Topic& topic, std::string_view fields, const PipelineConfig& config,
                         const std::optional<ParadigmSet>& paradigms) {
  Query query = build_query(topic, fields, config);
  if (paradigms) query = expand_query(query, *paradigms);
  return query;
}

}  // namespace bowkit
