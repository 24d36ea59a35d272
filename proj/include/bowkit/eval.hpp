#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "bowkit/corpus.hpp"
#include "bowkit/error.hpp"

namespace bowkit {

/// AP = (1/m_j) Σ over ranks r holding a relevant doc of
/// (relevant docs within ranks 1..r) / r. Relevant docs never retrieved
/// contribute nothing; the denominator is always the full m_j.
inline double average_precision(const std::vector<std::string>& ranked, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw Error("query has no relevant documents");
  double sum = 0.0;
  std::size_t rel_seen = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (relevant.count(ranked[r]) == 0) continue;
    ++rel_seen;
    sum += static_cast<double>(rel_seen) / static_cast<double>(r + 1);
  }
  return sum / static_cast<double>(relevant.size());
}

/// P@k = relevant docs in the top k, over k — ranks past the end of the
/// list count as non-relevant.
inline double precision_at_k(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                             std::size_t k) {
  if (k < 1) throw UsageError("k must be >= 1");
  std::size_t hits = 0;
  const std::size_t depth = std::min(k, ranked.size());
  for (std::size_t r = 0; r < depth; ++r)
    if (relevant.count(ranked[r]) != 0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

inline double recall(const std::vector<std::string>& ranked, const std::set<std::string>& relevant) {
  if (relevant.empty()) throw Error("query has no relevant documents");
  std::size_t hits = 0;
  for (const auto& d : ranked)
    if (relevant.count(d) != 0) ++hits;
  return static_cast<double>(hits) / static_cast<double>(relevant.size());
}

/// Fraction of the collection's non-relevant documents that were retrieved.
inline double fallout(const std::vector<std::string>& ranked, const std::set<std::string>& relevant,
                      std::uint64_t collection_size) {
  if (collection_size <= relevant.size())
    throw Error("collection size must exceed the number of relevant documents for fallout");
  std::size_t nonrel = 0;
  for (const auto& d : ranked)
    if (relevant.count(d) == 0) ++nonrel;
  return static_cast<double>(nonrel) / static_cast<double>(collection_size - relevant.size());
}

struct EvalOptions {
  std::vector<std::uint32_t> pk = {5, 10, 100};
  std::optional<std::uint64_t> collection_size;  // enables fallout
};

struct QueryMetrics {
  std::string qid;
  std::uint64_t num_relevant = 0;  // m_j from the judgments
  std::uint64_t num_retrieved = 0;
  double ap = 0.0;
  std::map<std::uint32_t, double> p_at_k;
  double recall = 0.0;
  std::optional<double> fallout;
};

inline bool operator==(const QueryMetrics& a, const QueryMetrics& b) {
  return a.qid == b.qid && a.num_relevant == b.num_relevant && a.num_retrieved == b.num_retrieved && a.ap == b.ap &&
         a.p_at_k == b.p_at_k && a.recall == b.recall && a.fallout == b.fallout;
}

/// Per-query rows (sorted by qid) for every judged query with at least one
/// relevant document, plus arithmetic-mean aggregates. Queries whose
/// judgments hold no relevant document are excluded from the averages and
/// only counted.
struct MetricsReport {
  std::vector<QueryMetrics> per_query;
  std::uint64_t queries_evaluated = 0;
  std::uint64_t queries_no_relevant = 0;
  double map = 0.0;
  std::map<std::uint32_t, double> mean_p_at_k;
  double mean_recall = 0.0;
  std::optional<double> mean_fallout;
};

inline bool operator==(const MetricsReport& a, const MetricsReport& b) {
  return a.per_query == b.per_query && a.queries_evaluated == b.queries_evaluated &&
         a.queries_no_relevant == b.queries_no_relevant && a.map == b.map && a.mean_p_at_k == b.mean_p_at_k &&
         a.mean_recall == b.mean_recall && a.mean_fallout == b.mean_fallout;
}

/// Scores a run against judgments. Evaluated queries are exactly those in
/// the qrels with m_j ≥ 1; a judged query absent from the run scores 0
/// across the board and stays in the averages. Run-only queries are ignored.
inline MetricsReport evaluate(const std::vector<RunEntry>& run, const Qrels& qrels, const EvalOptions& options = {}) {
  std::map<std::string, std::vector<std::pair<std::uint32_t, std::string>>> by_query;
  for (const auto& e : run) by_query[e.qid].push_back({e.rank, e.docid});

  MetricsReport report;
  for (const auto& [qid, judged] : qrels.by_query()) {
    const std::set<std::string> relevant = qrels.relevant(qid);
    if (relevant.empty()) {
      ++report.queries_no_relevant;
      continue;
    }
    std::vector<std::string> ranked;
    if (auto it = by_query.find(qid); it != by_query.end()) {
      auto entries = it->second;
      std::stable_sort(entries.begin(), entries.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; });
      std::set<std::string> seen;
      for (auto& [rank, docid] : entries) {
        if (!seen.insert(docid).second)
          throw Error("duplicate docid '" + docid + "' for query '" + qid + "' in run");
        ranked.push_back(std::move(docid));
      }
    }
    QueryMetrics row;
    row.qid = qid;
    row.num_relevant = relevant.size();
    row.num_retrieved = ranked.size();
    row.ap = average_precision(ranked, relevant);
    for (const auto k : options.pk) row.p_at_k[k] = precision_at_k(ranked, relevant, k);
    row.recall = recall(ranked, relevant);
    if (options.collection_size) row.fallout = fallout(ranked, relevant, *options.collection_size);
    report.per_query.push_back(std::move(row));
  }

  if (report.per_query.empty()) throw Error("zero evaluable queries");
  report.queries_evaluated = report.per_query.size();

  const double q = static_cast<double>(report.queries_evaluated);
  for (const auto& row : report.per_query) {
    report.map += row.ap;
    for (const auto& [k, p] : row.p_at_k) report.mean_p_at_k[k] += p;
    report.mean_recall += row.recall;
    if (row.fallout) report.mean_fallout = report.mean_fallout.value_or(0.0) + *row.fallout;
  }
  report.map /= q;
  for (auto& [k, p] : report.mean_p_at_k) p /= q;
  report.mean_recall /= q;
  if (report.mean_fallout) *report.mean_fallout /= q;
  return report;
}

inline double mean_average_precision(const std::vector<RunEntry>& run, const Qrels& qrels) {
  return evaluate(run, qrels).map;
}

// ---------------------------------------------------------------------------
// Rendering: an aligned table for humans, and a tab-delimited form whose
// numbers are written in shortest round-trip notation so that parsing the
// output reproduces the report exactly.
// ---------------------------------------------------------------------------

inline std::string render_text(const MetricsReport& report) {
  std::ostringstream out;
  std::size_t qid_width = 3;
  for (const auto& row : report.per_query) qid_width = std::max(qid_width, row.qid.size());
  const std::string all_label = "ALL (" + std::to_string(report.queries_evaluated) + " queries)";
  qid_width = std::max(qid_width, all_label.size());

  out << std::left << std::setw(static_cast<int>(qid_width)) << "qid" << std::right;
  out << std::setw(10) << "relevant" << std::setw(11) << "retrieved" << std::setw(10) << "AP";
  for (const auto& [k, p] : report.mean_p_at_k) out << std::setw(10) << ("P@" + std::to_string(k));
  out << std::setw(10) << "recall";
  if (report.mean_fallout) out << std::setw(10) << "fallout";
  out << "\n";

  const auto emit = [&](const std::string& label, std::uint64_t rel, std::uint64_t retr, double ap,
                        const std::map<std::uint32_t, double>& pk, double rec, const std::optional<double>& fo) {
    out << std::left << std::setw(static_cast<int>(qid_width)) << label << std::right;
    out << std::setw(10) << rel << std::setw(11) << retr;
    out << std::setw(10) << std::fixed << std::setprecision(4) << ap;
    for (const auto& [k, p] : pk) out << std::setw(10) << p;
    out << std::setw(10) << rec;
    if (fo) out << std::setw(10) << *fo;
    out.unsetf(std::ios::fixed);
    out << "\n";
  };

  std::uint64_t total_rel = 0;
  std::uint64_t total_retr = 0;
  for (const auto& row : report.per_query) {
    total_rel += row.num_relevant;
    total_retr += row.num_retrieved;
    emit(row.qid, row.num_relevant, row.num_retrieved, row.ap, row.p_at_k, row.recall, row.fallout);
  }
  emit(all_label, total_rel, total_retr, report.map, report.mean_p_at_k, report.mean_recall, report.mean_fallout);
  out << "MAP: " << std::fixed << std::setprecision(4) << report.map << "\n";
  if (report.queries_no_relevant > 0)
    out << "queries with no relevant documents (not averaged): " << report.queries_no_relevant << "\n";
  return out.str();
}

inline std::string render_delim(const MetricsReport& report) {
  std::ostringstream out;
  out << "# queries_with_no_relevant\t" << report.queries_no_relevant << "\n";
  out << "qid\tnum_relevant\tnum_retrieved\tap";
  for (const auto& [k, p] : report.mean_p_at_k) out << "\tp@" << k;
  out << "\trecall";
  if (report.mean_fallout) out << "\tfallout";
  out << "\n";
  const auto emit = [&](const std::string& label, std::uint64_t rel, std::uint64_t retr, double ap,
                        const std::map<std::uint32_t, double>& pk, double rec, const std::optional<double>& fo) {
    out << label << "\t" << rel << "\t" << retr << "\t" << detail::format_score(ap);
    for (const auto& [k, p] : pk) out << "\t" << detail::format_score(p);
    out << "\t" << detail::format_score(rec);
    if (fo) out << "\t" << detail::format_score(*fo);
    out << "\n";
  };
  std::uint64_t total_rel = 0;
  std::uint64_t total_retr = 0;
  for (const auto& row : report.per_query) {
    total_rel += row.num_relevant;
    total_retr += row.num_retrieved;
    emit(row.qid, row.num_relevant, row.num_retrieved, row.ap, row.p_at_k, row.recall, row.fallout);
  }
  emit("ALL", total_rel, total_retr, report.map, report.mean_p_at_k, report.mean_recall, report.mean_fallout);
  return out.str();
}

/// Reads the render_delim form back; numbers round-trip exactly.
inline MetricsReport parse_delim_report(std::istream& in) {
  MetricsReport report;
  std::string line;
  std::vector<std::uint32_t> pk_columns;
  bool has_fallout = false;
  bool header_seen = false;
  std::uint64_t lineno = 0;

  const auto split_tabs = [](const std::string& s) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    while (true) {
      const auto tab = s.find('\t', start);
      fields.push_back(s.substr(start, tab == std::string::npos ? tab : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    return fields;
  };
  const auto parse_u64 = [&](const std::string& s) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError("line " + std::to_string(lineno) + ": bad count '" + s + "'", lineno);
    return v;
  };
  const auto parse_f64 = [&](const std::string& s) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
      throw ParseError("line " + std::to_string(lineno) + ": bad number '" + s + "'", lineno);
    return v;
  };

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto fields = split_tabs(line);
      if (fields.size() == 2 && fields[0] == "# queries_with_no_relevant")
        report.queries_no_relevant = parse_u64(fields[1]);
      continue;
    }
    const auto fields = split_tabs(line);
    if (!header_seen) {
      if (fields.empty() || fields[0] != "qid")
        throw ParseError("line " + std::to_string(lineno) + ": expected header row", lineno);
      for (std::size_t i = 4; i < fields.size(); ++i) {
        if (fields[i].rfind("p@", 0) == 0)
          pk_columns.push_back(static_cast<std::uint32_t>(parse_u64(fields[i].substr(2))));
        else if (fields[i] == "fallout")
          has_fallout = true;
      }
      header_seen = true;
      continue;
    }
    const std::size_t expected = 4 + pk_columns.size() + 1 + (has_fallout ? 1 : 0);
    if (fields.size() != expected)
      throw ParseError("line " + std::to_string(lineno) + ": expected " + std::to_string(expected) + " fields",
                       lineno);
    std::size_t col = 1;
    const std::uint64_t rel = parse_u64(fields[col++]);
    const std::uint64_t retr = parse_u64(fields[col++]);
    const double ap = parse_f64(fields[col++]);
    std::map<std::uint32_t, double> pk;
    for (const auto k : pk_columns) pk[k] = parse_f64(fields[col++]);
    const double rec = parse_f64(fields[col++]);
    std::optional<double> fo;
    if (has_fallout) fo = parse_f64(fields[col++]);
    if (fields[0] == "ALL") {
      report.map = ap;
      report.mean_p_at_k = std::move(pk);
      report.mean_recall = rec;
      report.mean_fallout = fo;
    } else {
      QueryMetrics row;
      row.qid = fields[0];
      row.num_relevant = rel;
      row.num_retrieved = retr;
      row.ap = ap;
      row.p_at_k = std::move(pk);
      row.recall = rec;
      row.fallout = fo;
      report.per_query.push_back(std::move(row));
    }
  }
  if (!header_seen) throw ParseError("no report header found", 0);
  report.queries_evaluated = report.per_query.size();
  return report;
}

}  // namespace bowkit
