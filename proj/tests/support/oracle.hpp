#pragma once

// Independent reference implementations used to cross-check the library.
//
// Everything here is a direct transcription of the definitions the library
// claims to implement: term-weight closed forms evaluated in long double,
// a brute-force ranker that enumerates every document and recomputes all
// collection statistics from raw token lists, and set-arithmetic retrieval
// metrics. No code is shared with the headers under include/ beyond the
// standard library.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

struct Params {
    long double k1 = 1.2L;
    long double b = 0.75L;
    long double mu = 2500.0L;
    long double lambda = 0.15L;
    long double c = 1.0L;
};

inline long double w_tfidf(long double tf, long double df, long double dl,
                           long double n_docs, long double avdl, const Params& p) {
    long double k = p.k1 * (1.0L - p.b + p.b * dl / avdl);
    return (tf / (tf + k)) * std::log(1.0L + n_docs / df);
}

inline long double w_bm25(long double tf, long double df, long double dl,
                          long double n_docs, long double avdl, const Params& p) {
    long double idf = std::log((n_docs - df + 0.5L) / (df + 0.5L) + 1.0L);
    long double k = p.k1 * (1.0L - p.b + p.b * dl / avdl);
    return idf * tf * (p.k1 + 1.0L) / (tf + k);
}

inline long double w_dirichlet(long double tf, long double cf, long double dl,
                               long double total_tokens, const Params& p) {
    return std::log((tf + p.mu * cf / total_tokens) / (dl + p.mu));
}

inline long double w_hiemstra(long double tf, long double cf, long double dl,
                              long double total_tokens, const Params& p) {
    return std::log(1.0L + p.lambda * tf * total_tokens /
                    ((1.0L - p.lambda) * cf * dl));
}

inline long double w_in_expb2(long double tf, long double df, long double cf,
                              long double dl, long double n_docs, long double avdl,
                              const Params& p) {
    long double tfn = tf * std::log2(1.0L + p.c * avdl / dl);
    long double n_e = n_docs * (1.0L - std::pow((n_docs - 1.0L) / n_docs, cf));
    long double big_b = (cf + 1.0L) / (df * (tfn + 1.0L));
    return big_b * tfn * std::log2((n_docs + 1.0L) / (n_e + 0.5L));
}

// ---------------------------------------------------------------------------
// Brute-force ranking over raw token lists.

struct RefCorpus {
    std::vector<std::string> docids;
    std::vector<std::vector<std::string>> tokens;  // post-pipeline terms per doc
};

struct RefStats {
    std::uint64_t n_docs = 0;
    std::uint64_t total_tokens = 0;
    long double avdl = 0.0L;
    std::vector<std::uint64_t> doclen;
    std::map<std::string, std::uint64_t> df;
    std::map<std::string, std::uint64_t> cf;
    std::vector<std::map<std::string, std::uint64_t>> tf;  // per doc
};

inline RefStats compute_stats(const RefCorpus& corpus) {
    RefStats s;
    s.n_docs = corpus.tokens.size();
    s.tf.resize(corpus.tokens.size());
    for (std::size_t d = 0; d < corpus.tokens.size(); ++d) {
        for (const auto& t : corpus.tokens[d]) {
            ++s.tf[d][t];
            ++s.cf[t];
        }
        s.doclen.push_back(corpus.tokens[d].size());
        s.total_tokens += corpus.tokens[d].size();
        for (const auto& [t, n] : s.tf[d]) {
            (void)n;
            ++s.df[t];
        }
    }
    s.avdl = s.n_docs ? static_cast<long double>(s.total_tokens) / s.n_docs : 0.0L;
    return s;
}

inline long double weigh(const std::string& model, long double tf, long double df,
                         long double cf, long double dl, const RefStats& s,
                         const Params& p) {
    long double n = static_cast<long double>(s.n_docs);
    long double total = static_cast<long double>(s.total_tokens);
    if (model == "tfidf") return w_tfidf(tf, df, dl, n, s.avdl, p);
    if (model == "bm25") return w_bm25(tf, df, dl, n, s.avdl, p);
    if (model == "dirichlet_lm") return w_dirichlet(tf, cf, dl, total, p);
    if (model == "hiemstra_lm") return w_hiemstra(tf, cf, dl, total, p);
    if (model == "in_expb2") return w_in_expb2(tf, df, cf, dl, n, s.avdl, p);
    throw std::runtime_error("oracle: unknown model " + model);
}

struct Ranked {
    std::size_t ordinal;
    long double score;
};

// Scores every document holding at least one query term; unknown query terms
// contribute nothing. Ties broken by ascending ordinal. Returns the top k
// (k == 0 means all candidates).
inline std::vector<Ranked> brute_force_search(const RefStats& s,
                                              const std::map<std::string, std::uint32_t>& query,
                                              const std::string& model, const Params& p,
                                              std::size_t k) {
    std::vector<Ranked> out;
    for (std::size_t d = 0; d < s.tf.size(); ++d) {
        long double score = 0.0L;
        bool matched = false;
        for (const auto& [term, qtf] : query) {
            auto it = s.tf[d].find(term);
            if (it == s.tf[d].end()) continue;
            auto dfit = s.df.find(term);
            if (dfit == s.df.end()) continue;
            matched = true;
            long double w = weigh(model, static_cast<long double>(it->second),
                                  static_cast<long double>(dfit->second),
                                  static_cast<long double>(s.cf.at(term)),
                                  static_cast<long double>(s.doclen[d]), s, p);
            score += static_cast<long double>(qtf) * w;
        }
        if (matched) out.push_back({d, score});
    }
    std::sort(out.begin(), out.end(), [](const Ranked& a, const Ranked& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.ordinal < b.ordinal;
    });
    if (k != 0 && out.size() > k) out.resize(k);
    return out;
}

// Smallest relative gap between adjacent distinct scores in a ranking; used
// to confirm generated fixtures keep orderings far from floating-point noise.
inline long double min_adjacent_gap(const std::vector<Ranked>& ranked) {
    long double best = 1e30L;
    for (std::size_t i = 1; i < ranked.size(); ++i) {
        long double a = ranked[i - 1].score, b = ranked[i].score;
        if (a == b) continue;
        long double denom = std::max({std::fabs(a), std::fabs(b), 1e-30L});
        best = std::min(best, std::fabs(a - b) / denom);
    }
    return best;
}

// ---------------------------------------------------------------------------
// Retrieval metrics from first principles.

inline long double average_precision(const std::vector<std::string>& ranked_docids,
                                     const std::set<std::string>& relevant) {
    if (relevant.empty()) throw std::runtime_error("oracle: no relevant documents");
    long double hits = 0.0L, sum = 0.0L;
    for (std::size_t i = 0; i < ranked_docids.size(); ++i) {
        if (relevant.count(ranked_docids[i])) {
            hits += 1.0L;
            sum += hits / static_cast<long double>(i + 1);
        }
    }
    return sum / static_cast<long double>(relevant.size());
}

inline long double precision_at_k(const std::vector<std::string>& ranked_docids,
                                  const std::set<std::string>& relevant, std::size_t k) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked_docids.size() && i < k; ++i) {
        if (relevant.count(ranked_docids[i])) ++hits;
    }
    return static_cast<long double>(hits) / static_cast<long double>(k);
}

inline long double recall(const std::vector<std::string>& ranked_docids,
                          const std::set<std::string>& relevant) {
    std::size_t hits = 0;
    for (const auto& d : ranked_docids) {
        if (relevant.count(d)) ++hits;
    }
    return static_cast<long double>(hits) / static_cast<long double>(relevant.size());
}

inline long double fallout(const std::vector<std::string>& ranked_docids,
                           const std::set<std::string>& relevant,
                           std::uint64_t collection_size) {
    std::size_t nonrel = 0;
    for (const auto& d : ranked_docids) {
        if (!relevant.count(d)) ++nonrel;
    }
    return static_cast<long double>(nonrel) /
           static_cast<long double>(collection_size - relevant.size());
}

// ---------------------------------------------------------------------------
// Deterministic random corpora for cross-checks.

inline std::vector<std::string> make_vocab(std::size_t size) {
    std::vector<std::string> v;
    v.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        std::string t = "term";
        t += static_cast<char>('a' + (i / 26) % 26);
        t += static_cast<char>('a' + i % 26);
        if (i >= 26 * 26) t += std::to_string(i);
        v.push_back(t);
    }
    return v;
}

inline RefCorpus make_random_corpus(std::mt19937_64& rng, std::size_t n_docs,
                                    std::size_t vocab_size, std::size_t min_len,
                                    std::size_t max_len) {
    auto vocab = make_vocab(vocab_size);
    RefCorpus corpus;
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    // Zipf-flavored pick: low-index terms occur more often, giving realistic
    // df/cf spreads without ever producing an empty document.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (std::size_t d = 0; d < n_docs; ++d) {
        corpus.docids.push_back("D" + std::to_string(1000 + d));
        std::vector<std::string> toks;
        std::size_t len = len_dist(rng);
        for (std::size_t i = 0; i < len; ++i) {
            double x = u(rng);
            auto idx = static_cast<std::size_t>(x * x * static_cast<double>(vocab_size));
            if (idx >= vocab_size) idx = vocab_size - 1;
            toks.push_back(vocab[idx]);
        }
        corpus.tokens.push_back(std::move(toks));
    }
    return corpus;
}

}  // namespace oracle
