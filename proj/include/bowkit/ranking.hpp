#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bowkit/corpus.hpp"
#include "bowkit/error.hpp"
#include "bowkit/index.hpp"
#include "bowkit/textpipe.hpp"

namespace bowkit {

/// Free parameters of the retrieval models. k1/b feed tfidf and bm25, mu the
/// Dirichlet-prior model, lambda the Hiemstra model, c the DFR length
/// normalization.
struct ModelParams {
  double k1 = 1.2;
  double b = 0.75;
  double mu = 2500.0;
  double lambda = 0.15;
  double c = 1.0;

  void validate() const {
    if (!(k1 >= 0.0)) throw UsageError("k1 must be >= 0");
    if (!(b >= 0.0 && b <= 1.0)) throw UsageError("b must be in [0, 1]");
    if (!(mu > 0.0)) throw UsageError("mu must be > 0");
    if (!(lambda > 0.0 && lambda < 1.0)) throw UsageError("lambda must be in (0, 1)");
    if (!(c > 0.0)) throw UsageError("c must be > 0");
  }
};

enum class Model { kTfIdf, kBm25, kDirichletLm, kHiemstraLm, kInExpB2 };

inline constexpr std::string_view kModelIds[] = {"tfidf", "bm25", "dirichlet_lm", "hiemstra_lm", "in_expb2"};

inline Model parse_model(std::string_view id) {
  if (id == "tfidf") return Model::kTfIdf;
  if (id == "bm25") return Model::kBm25;
  if (id == "dirichlet_lm") return Model::kDirichletLm;
  if (id == "hiemstra_lm") return Model::kHiemstraLm;
  if (id == "in_expb2") return Model::kInExpB2;
  throw UsageError("unknown model id '" + std::string(id) +
                   "' (expected one of: tfidf bm25 dirichlet_lm hiemstra_lm in_expb2)");
}

inline std::string_view model_id(Model m) { return kModelIds[static_cast<int>(m)]; }

// ---------------------------------------------------------------------------
// Per-term weights. Symbols: tf = term frequency in the document, df =
// number of documents containing the term, F = collection frequency, N =
// number of documents, dl = document length, avdl = mean document length,
// total_tokens = collection length. A document's score for a query is
// Σ over query terms of qtf · w(term, doc).
// ---------------------------------------------------------------------------

/// Pivoted-length-normalized tf times a smoothed idf:
/// w = [tf / (tf + k1·(1−b+b·dl/avdl))] · ln(1 + N/df)
inline double score_tfidf(std::uint64_t tf, std::uint64_t df, std::uint64_t dl, const ModelParams& params,
                          std::uint64_t N, double avdl) {
  if (df == 0 || N == 0) throw Error("tfidf weight undefined for df=0 or N=0");
  const double K = params.k1 * (1.0 - params.b + params.b * static_cast<double>(dl) / avdl);
  const double tf_part = static_cast<double>(tf) / (static_cast<double>(tf) + K);
  return tf_part * std::log(1.0 + static_cast<double>(N) / static_cast<double>(df));
}

/// Okapi weight with the idf form that stays positive for df close to N:
/// w = ln((N−df+0.5)/(df+0.5) + 1) · tf·(k1+1) / (tf + k1·(1−b+b·dl/avdl))
inline double score_bm25(std::uint64_t tf, std::uint64_t df, std::uint64_t dl, const ModelParams& params,
                         std::uint64_t N, double avdl) {
  if (df == 0 || N == 0) throw Error("bm25 weight undefined for df=0 or N=0");
  const double idf =
      std::log((static_cast<double>(N) - static_cast<double>(df) + 0.5) / (static_cast<double>(df) + 0.5) + 1.0);
  const double K = params.k1 * (1.0 - params.b + params.b * static_cast<double>(dl) / avdl);
  return idf * static_cast<double>(tf) * (params.k1 + 1.0) / (static_cast<double>(tf) + K);
}

/// Dirichlet-prior smoothed query likelihood, matching terms only:
/// w = ln((tf + mu·F/total_tokens) / (dl + mu))
inline double score_dirichlet(std::uint64_t tf, std::uint64_t F, std::uint64_t dl, const ModelParams& params,
                              std::uint64_t total_tokens) {
  if (total_tokens == 0) throw Error("dirichlet weight undefined for an empty collection");
  const double prior = params.mu * static_cast<double>(F) / static_cast<double>(total_tokens);
  return std::log((static_cast<double>(tf) + prior) / (static_cast<double>(dl) + params.mu));
}

/// Linear-interpolation language model in odds form:
/// w = ln(1 + lambda·tf·total_tokens / ((1−lambda)·F·dl))
inline double score_hiemstra(std::uint64_t tf, std::uint64_t F, std::uint64_t dl, const ModelParams& params,
                             std::uint64_t total_tokens) {
  if (F == 0) throw Error("hiemstra weight undefined for F=0");
  if (dl == 0) throw Error("hiemstra weight undefined for an empty document");
  return std::log(1.0 + params.lambda * static_cast<double>(tf) * static_cast<double>(total_tokens) /
                            ((1.0 - params.lambda) * static_cast<double>(F) * static_cast<double>(dl)));
}

/// Divergence-from-randomness In_expB2: inverse expected document frequency
/// with Bernoulli after-effect and length normalization 2.
/// tfn = tf·log2(1 + c·avdl/dl); n_e = N·(1 − ((N−1)/N)^F);
/// w = (F+1)/(df·(tfn+1)) · tfn · log2((N+1)/(n_e+0.5))
inline double score_in_expb2(std::uint64_t tf, std::uint64_t df, std::uint64_t F, std::uint64_t dl,
                             const ModelParams& params, std::uint64_t N, double avdl) {
  if (df == 0 || N == 0) throw Error("in_expb2 weight undefined for df=0 or N=0");
  if (dl == 0) throw Error("in_expb2 weight undefined for an empty document");
  const double n = static_cast<double>(N);
  const double tfn = static_cast<double>(tf) * std::log2(1.0 + params.c * avdl / static_cast<double>(dl));
  const double n_e = n * (1.0 - std::pow((n - 1.0) / n, static_cast<double>(F)));
  const double B = (static_cast<double>(F) + 1.0) / (static_cast<double>(df) * (tfn + 1.0));
  return B * tfn * std::log2((n + 1.0) / (n_e + 0.5));
}

/// Dispatch on model id with the statistics every formula might need.
inline double score_term(Model model, const ModelParams& params, std::uint64_t tf, std::uint64_t df, std::uint64_t F,
                         std::uint64_t dl, std::uint64_t N, double avdl, std::uint64_t total_tokens) {
  switch (model) {
    case Model::kTfIdf:
      return score_tfidf(tf, df, dl, params, N, avdl);
    case Model::kBm25:
      return score_bm25(tf, df, dl, params, N, avdl);
    case Model::kDirichletLm:
      return score_dirichlet(tf, F, dl, params, total_tokens);
    case Model::kHiemstraLm:
      return score_hiemstra(tf, F, dl, params, total_tokens);
    case Model::kInExpB2:
      return score_in_expb2(tf, df, F, dl, params, N, avdl);
  }
  throw Error("unhandled model");
}

struct ScoredDoc {
  std::uint32_t ordinal = 0;
  double score = 0.0;
};

inline bool operator==(const ScoredDoc& a, const ScoredDoc& b) {
  return a.ordinal == b.ordinal && a.score == b.score;
}

/// A processed bag-of-words query: term → query term frequency, plus the
/// canonical text of the pipeline that produced the terms so search can
/// refuse an index built under a different one.
struct Query {
  std::string qid;
  std::map<std::string, std::uint32_t> terms;  // sorted: deterministic accumulation order
  std::string fields = "T";
  bool fcg_expanded = false;
  std::string pipeline_canonical;
};

class EmptyQueryError : public Error {
 public:
  explicit EmptyQueryError(const std::string& qid)
      : Error("empty query for topic '" + qid + "' (no terms survived the pipeline)"), qid_(qid) {}
  const std::string& qid() const { return qid_; }

 private:
  std::string qid_;
};

inline std::string validate_fields(std::string_view fields) {
  if (fields == "T" || fields == "TD" || fields == "TDN") return std::string(fields);
  throw UsageError("fields must be one of T, TD, TDN (got '" + std::string(fields) + "')");
}

/// Concatenates the topic fields selected by `fields`, runs them through
/// `config`, and counts query term frequencies.
inline Query build_query(const Topic& topic, std::string_view fields, const PipelineConfig& config) {
  Query query;
  query.qid = topic.qid;
  query.fields = validate_fields(fields);
  std::string text = topic.title;
  if (query.fields.size() >= 2) text += " " + topic.description;
  if (query.fields.size() >= 3) text += " " + topic.narrative;
  for (const auto& term : config.apply(text)) ++query.terms[term];
  if (query.terms.empty()) throw EmptyQueryError(topic.qid);
  query.pipeline_canonical = config.canonical_text();
  return query;
}

/// Scores every document containing at least one query term and returns the
/// top k by (score descending, ordinal ascending). Query terms missing from
/// the lexicon are skipped. The query must carry the index's own pipeline.
inline std::vector<ScoredDoc> search(const InvertedIndex& index, const Query& query, Model model,
                                     const ModelParams& params, std::size_t k) {
  if (k < 1) throw UsageError("k must be >= 1");
  params.validate();
  if (query.pipeline_canonical != index.config().canonical_text())
    throw PipelineMismatchError("query pipeline does not match index pipeline\n--- query:\n" +
                                query.pipeline_canonical + "--- index:\n" + index.config().canonical_text());
  if (query.fcg_expanded && index.config().has_stemmer())
    throw Error(
        "inflectional variant expansion requires an index of plain word forms; "
        "this index was built with a stemmer");

  const CollectionStats& stats = index.stats();
  std::unordered_map<std::uint32_t, double> accumulator;
  for (const auto& [term, qtf] : query.terms) {
    const auto info = index.lookup(term);
    if (!info) continue;
    for (const Posting& posting : *info->postings) {
      const double w = score_term(model, params, posting.tf, info->df, info->cf, index.doclen(posting.ordinal),
                                  stats.num_docs, stats.avg_doclen, stats.total_tokens);
      accumulator[posting.ordinal] += static_cast<double>(qtf) * w;
    }
  }

  std::vector<ScoredDoc> results;
  results.reserve(accumulator.size());
  for (const auto& [ordinal, score] : accumulator) results.push_back({ordinal, score});
  std::sort(results.begin(), results.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.ordinal < b.ordinal;
  });
  if (results.size() > k) results.resize(k);
  return results;
}

/// Renders a result list as run entries (ranks 1..n) for the given tag.
inline std::vector<RunEntry> make_run_entries(const InvertedIndex& index, const std::string& qid,
                                              const std::vector<ScoredDoc>& results, const std::string& tag) {
  std::vector<RunEntry> entries;
  entries.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i)
    entries.push_back({qid, index.docid(results[i].ordinal), static_cast<std::uint32_t>(i + 1), results[i].score, tag});
  return entries;
}

}  // namespace bowkit
