// Term-weight formulas, query construction, and top-k search, cross-checked
// against the long-double reference implementations in tests/support.

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bowkit/index.hpp"
#include "bowkit/ranking.hpp"
#include "bowkit/textpipe.hpp"
#include "catch_amalgamated.hpp"
#include "support/oracle.hpp"
#include "support/testutil.hpp"

using namespace bowkit;

namespace {

double rel_diff(double got, long double want) {
    const long double denom = std::max<long double>(std::fabs(want), 1e-30L);
    return static_cast<double>(std::fabs(static_cast<long double>(got) - want) / denom);
}

InvertedIndex animal_index() {
    std::vector<Document> docs{
        {"A1", "cat chases rat"},
        {"A2", "rat chases cat"},
        {"A3", "cat naps in the sun"},
        {"A4", "dog chases cat and rat"},
        {"A5", "birds sing at dawn"},
        {"A6", "the dog naps"},
    };
    return build_index(docs, PipelineConfig{});
}

Query make_query(std::map<std::string, std::uint32_t> terms, const InvertedIndex& index) {
    Query q;
    q.qid = "q";
    q.terms = std::move(terms);
    q.pipeline_canonical = index.config().canonical_text();
    return q;
}

}  // namespace

TEST_CASE("term weights reproduce fixed reference values", "[ranking]") {
    ModelParams p;
    CHECK(rel_diff(score_tfidf(3, 2, 100, p, 10, 100.0), 1.27982819230575357L) < 1e-12);
    CHECK(rel_diff(score_bm25(3, 2, 100, p, 10, 100.0), 2.32823570716662432L) < 1e-12);
    ModelParams lm;
    lm.mu = 100.0;
    CHECK(rel_diff(score_dirichlet(2, 5, 10, lm, 1000), -3.78418963391826116L) < 1e-12);
    CHECK(rel_diff(score_hiemstra(2, 5, 10, p, 1000), 2.08676758177190884L) < 1e-12);
    CHECK(rel_diff(score_in_expb2(3, 8, 10, 50, p, 100, 100.0), 3.78016365428856048L) < 1e-12);
}

TEST_CASE("term weights match the reference formulas on random inputs", "[ranking]") {
    std::mt19937_64 rng(515u);
    std::uniform_int_distribution<std::uint64_t> tf_d(1, 40);
    std::uniform_int_distribution<std::uint64_t> n_d(2, 5000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    int checked = 0;
    while (checked < 800) {
        const std::uint64_t tf = tf_d(rng);
        const std::uint64_t n = n_d(rng);
        std::uniform_int_distribution<std::uint64_t> df_d(1, n);
        const std::uint64_t df = df_d(rng);
        const std::uint64_t big_f = tf + static_cast<std::uint64_t>(unit(rng) * 500);
        const std::uint64_t dl = tf + static_cast<std::uint64_t>(unit(rng) * 300);
        const double avdl = 1.0 + unit(rng) * 400.0;
        const std::uint64_t total = big_f + dl + static_cast<std::uint64_t>(unit(rng) * 100000);
        ModelParams p;
        p.k1 = 0.2 + unit(rng) * 2.5;
        p.b = unit(rng);
        p.mu = 50.0 + unit(rng) * 4000.0;
        p.lambda = 0.05 + unit(rng) * 0.9;
        p.c = 0.25 + unit(rng) * 3.0;
        oracle::Params op{p.k1, p.b, p.mu, p.lambda, p.c};

        const long double n_ld = static_cast<long double>(n);
        struct Pair {
            double got;
            long double want;
        };
        const Pair pairs[] = {
            {score_tfidf(tf, df, dl, p, n, avdl), oracle::w_tfidf(tf, df, dl, n_ld, avdl, op)},
            {score_bm25(tf, df, dl, p, n, avdl), oracle::w_bm25(tf, df, dl, n_ld, avdl, op)},
            {score_dirichlet(tf, big_f, dl, p, total),
             oracle::w_dirichlet(tf, big_f, dl, total, op)},
            {score_hiemstra(tf, big_f, dl, p, total),
             oracle::w_hiemstra(tf, big_f, dl, total, op)},
            {score_in_expb2(tf, df, big_f, dl, p, n, avdl),
             oracle::w_in_expb2(tf, df, big_f, dl, n_ld, avdl, op)},
        };
        bool usable = true;
        for (const auto& pair : pairs) {
            if (std::fabs(pair.want) < 1e-3L) usable = false;  // keep relative error meaningful
        }
        if (!usable) continue;
        for (const auto& pair : pairs) {
            CHECK(rel_diff(pair.got, pair.want) < 1e-9);
        }
        ++checked;
    }
}

TEST_CASE("weight domain violations raise errors", "[ranking]") {
    ModelParams p;
    CHECK_THROWS_AS(score_tfidf(1, 0, 10, p, 10, 10.0), Error);
    CHECK_THROWS_AS(score_bm25(1, 1, 10, p, 0, 10.0), Error);
    CHECK_THROWS_AS(score_dirichlet(1, 1, 10, p, 0), Error);
    CHECK_THROWS_AS(score_hiemstra(1, 0, 10, p, 100), Error);
    CHECK_THROWS_AS(score_hiemstra(1, 1, 0, p, 100), Error);
    CHECK_THROWS_AS(score_in_expb2(1, 1, 1, 0, p, 10, 10.0), Error);
}

TEST_CASE("model parameters validate their ranges", "[ranking]") {
    ModelParams p;
    CHECK(p.k1 == 1.2);
    CHECK(p.b == 0.75);
    CHECK(p.mu == 2500.0);
    CHECK(p.lambda == 0.15);
    CHECK(p.c == 1.0);
    CHECK_NOTHROW(p.validate());

    auto reject = [](auto mutate) {
        ModelParams bad;
        mutate(bad);
        CHECK_THROWS_AS(bad.validate(), UsageError);
    };
    reject([](ModelParams& m) { m.k1 = -0.1; });
    reject([](ModelParams& m) { m.b = 1.5; });
    reject([](ModelParams& m) { m.b = -0.5; });
    reject([](ModelParams& m) { m.mu = 0.0; });
    reject([](ModelParams& m) { m.lambda = 0.0; });
    reject([](ModelParams& m) { m.lambda = 1.0; });
    reject([](ModelParams& m) { m.c = 0.0; });
}

TEST_CASE("model names parse and render", "[ranking]") {
    CHECK(parse_model("tfidf") == Model::kTfIdf);
    CHECK(parse_model("bm25") == Model::kBm25);
    CHECK(parse_model("dirichlet_lm") == Model::kDirichletLm);
    CHECK(parse_model("hiemstra_lm") == Model::kHiemstraLm);
    CHECK(parse_model("in_expb2") == Model::kInExpB2);
    for (auto id : kModelIds) CHECK(model_id(parse_model(id)) == id);
    CHECK_THROWS_AS(parse_model("pagerank"), Error);
}

TEST_CASE("queries build from selected topic fields", "[ranking]") {
    Topic topic;
    topic.qid = "42";
    topic.title = "Monsoon flooding";
    topic.description = "rivers flooding villages";
    topic.narrative = "reports of flooding damage";
    PipelineConfig config;

    auto t = build_query(topic, "T", config);
    CHECK(t.qid == "42");
    CHECK(t.fields == "T");
    CHECK(t.terms == std::map<std::string, std::uint32_t>{{"monsoon", 1}, {"flooding", 1}});
    CHECK(t.pipeline_canonical == config.canonical_text());
    CHECK_FALSE(t.fcg_expanded);

    auto td = build_query(topic, "TD", config);
    CHECK(td.terms == std::map<std::string, std::uint32_t>{
                          {"monsoon", 1}, {"flooding", 2}, {"rivers", 1}, {"villages", 1}});

    auto tdn = build_query(topic, "TDN", config);
    CHECK(tdn.terms.at("flooding") == 3);
    CHECK(tdn.terms.at("reports") == 1);
    CHECK(tdn.terms.at("damage") == 1);

    CHECK_THROWS_AS(build_query(topic, "D", config), UsageError);
    CHECK_THROWS_AS(build_query(topic, "TDX", config), UsageError);
    CHECK_THROWS_AS(build_query(topic, "t", config), UsageError);
}

TEST_CASE("queries apply the pipeline and reject empty results", "[ranking]") {
    Topic topic;
    topic.qid = "7";
    topic.title = "The Of And";
    PipelineConfig config;
    std::istringstream stops("the\nof\nand\n");
    config.stoplist = StopList::load(stops);
    try {
        build_query(topic, "T", config);
        FAIL("expected EmptyQueryError");
    } catch (const EmptyQueryError& e) {
        CHECK(e.qid() == "7");
        CHECK(std::string(e.what()).find("'7'") != std::string::npos);
    }

    topic.title = "The Flooding Rivers";
    config.stemmer = StemRuleSet({{"ing", 4}, {"s", 3}}, 3);
    auto q = build_query(topic, "T", config);
    CHECK(q.terms == std::map<std::string, std::uint32_t>{{"flood", 1}, {"river", 1}});
}

TEST_CASE("search scores only documents that share a query term", "[ranking]") {
    auto index = animal_index();
    auto q = make_query({{"rat", 1}}, index);
    for (auto model : {Model::kTfIdf, Model::kBm25, Model::kDirichletLm, Model::kHiemstraLm,
                       Model::kInExpB2}) {
        auto results = search(index, q, model, ModelParams{}, 100);
        REQUIRE(results.size() == 3);  // A1, A2, A4 contain "rat"
        std::set<std::string> docids;
        for (const auto& r : results) docids.insert(index.docid(r.ordinal));
        CHECK(docids == std::set<std::string>{"A1", "A2", "A4"});
    }
}

TEST_CASE("unknown query terms are skipped silently", "[ranking]") {
    auto index = animal_index();
    auto with_unknown = make_query({{"cat", 1}, {"unicorn", 3}}, index);
    auto without = make_query({{"cat", 1}}, index);
    auto a = search(index, with_unknown, Model::kBm25, ModelParams{}, 10);
    auto b = search(index, without, Model::kBm25, ModelParams{}, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].ordinal == b[i].ordinal);
        CHECK(a[i].score == b[i].score);
    }

    auto only_unknown = make_query({{"unicorn", 1}}, index);
    CHECK(search(index, only_unknown, Model::kBm25, ModelParams{}, 10).empty());
}

TEST_CASE("ties break by document ordinal", "[ranking]") {
    // A1 and A2 are bag-of-words identical, so every model scores them equally.
    auto index = animal_index();
    auto q = make_query({{"cat", 1}, {"chases", 1}, {"rat", 1}}, index);
    for (auto model : {Model::kTfIdf, Model::kBm25, Model::kDirichletLm, Model::kHiemstraLm,
                       Model::kInExpB2}) {
        auto results = search(index, q, model, ModelParams{}, 100);
        REQUIRE(results.size() >= 2);
        std::optional<std::size_t> pos1, pos2;
        for (std::size_t i = 0; i < results.size(); ++i) {
            if (index.docid(results[i].ordinal) == "A1") pos1 = i;
            if (index.docid(results[i].ordinal) == "A2") pos2 = i;
        }
        REQUIRE(pos1.has_value());
        REQUIRE(pos2.has_value());
        CHECK(results[*pos1].score == results[*pos2].score);
        CHECK(*pos2 == *pos1 + 1);  // exact tie: adjacent, broken by ordinal
    }
}

TEST_CASE("k truncates a stable prefix", "[ranking]") {
    auto index = animal_index();
    auto q = make_query({{"cat", 2}, {"dog", 1}}, index);
    auto all = search(index, q, Model::kBm25, ModelParams{}, 1000);  // k beyond N: everything
    REQUIRE(all.size() >= 3);
    for (std::size_t k = 1; k <= all.size(); ++k) {
        auto some = search(index, q, Model::kBm25, ModelParams{}, k);
        REQUIRE(some.size() == k);
        for (std::size_t i = 0; i < k; ++i) {
            CHECK(some[i].ordinal == all[i].ordinal);
            CHECK(some[i].score == all[i].score);
        }
    }
    CHECK_THROWS_AS(search(index, q, Model::kBm25, ModelParams{}, 0), UsageError);
}

TEST_CASE("scaling query term frequencies preserves the order", "[ranking]") {
    auto index = animal_index();
    auto base = make_query({{"cat", 1}, {"naps", 1}}, index);
    auto scaled = make_query({{"cat", 3}, {"naps", 3}}, index);
    for (auto model : {Model::kTfIdf, Model::kBm25, Model::kDirichletLm, Model::kHiemstraLm,
                       Model::kInExpB2}) {
        auto a = search(index, base, model, ModelParams{}, 100);
        auto b = search(index, scaled, model, ModelParams{}, 100);
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].ordinal == b[i].ordinal);
            CHECK(b[i].score == Catch::Approx(3.0 * a[i].score).epsilon(1e-12));
        }
    }
}

TEST_CASE("search rejects mismatched pipelines naming both sides", "[ranking]") {
    auto index = animal_index();
    Query q;
    q.qid = "x";
    q.terms = {{"cat", 1}};
    PipelineConfig other;
    other.digits = DigitPolicy::kDrop;
    q.pipeline_canonical = other.canonical_text();
    try {
        search(index, q, Model::kBm25, ModelParams{}, 10);
        FAIL("expected PipelineMismatchError");
    } catch (const PipelineMismatchError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("digits=drop") != std::string::npos);
        CHECK(msg.find("digits=keep") != std::string::npos);
    }
}

TEST_CASE("expanded queries are refused on stemmed indexes", "[ranking]") {
    PipelineConfig config;
    config.stemmer = StemRuleSet({{"s", 3}}, 3);
    auto index = build_index({{"D1", "cats and dogs"}}, config);
    Query q;
    q.qid = "x";
    q.terms = {{"cat", 1}};
    q.fcg_expanded = true;
    q.pipeline_canonical = index.config().canonical_text();
    try {
        search(index, q, Model::kBm25, ModelParams{}, 10);
        FAIL("expected Error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("stemmer") != std::string::npos);
    }
}

TEST_CASE("invalid parameters are rejected before searching", "[ranking]") {
    auto index = animal_index();
    auto q = make_query({{"cat", 1}}, index);
    ModelParams bad;
    bad.lambda = 1.0;
    CHECK_THROWS_AS(search(index, q, Model::kBm25, bad, 10), UsageError);
}

TEST_CASE("search agrees with full-enumeration reference ranking", "[ranking]") {
    std::mt19937_64 rng(808u);
    auto corpus = oracle::make_random_corpus(rng, 60, 40, 3, 50);
    auto stats = oracle::compute_stats(corpus);

    std::vector<Document> docs;
    for (std::size_t d = 0; d < corpus.docids.size(); ++d) {
        std::string text;
        for (const auto& t : corpus.tokens[d]) {
            text += t;
            text += ' ';
        }
        docs.push_back({corpus.docids[d], text});
    }
    auto index = build_index(docs, PipelineConfig{});

    auto vocab = oracle::make_vocab(40);
    std::uniform_int_distribution<std::size_t> pick(0, vocab.size() - 1);
    std::uniform_int_distribution<std::uint32_t> qtf_d(1, 3);
    std::uniform_int_distribution<int> nterms_d(1, 4);
    const char* model_names[] = {"tfidf", "bm25", "dirichlet_lm", "hiemstra_lm", "in_expb2"};

    for (int iter = 0; iter < 12; ++iter) {
        std::map<std::string, std::uint32_t> terms;
        const int nterms = nterms_d(rng);
        for (int t = 0; t < nterms; ++t) terms[vocab[pick(rng)]] = qtf_d(rng);
        auto q = make_query(terms, index);
        for (const char* name : model_names) {
            auto expected = oracle::brute_force_search(stats, terms, name, oracle::Params{}, 0);
            REQUIRE(oracle::min_adjacent_gap(expected) > 1e-9L);
            auto got = search(index, q, parse_model(name), ModelParams{}, 10000);
            REQUIRE(got.size() == expected.size());
            for (std::size_t i = 0; i < got.size(); ++i) {
                CHECK(got[i].ordinal == expected[i].ordinal);
                CHECK(rel_diff(got[i].score, expected[i].score) < 1e-9);
            }
        }
    }
}

TEST_CASE("result lists convert to run entries", "[ranking]") {
    auto index = animal_index();
    auto q = make_query({{"cat", 1}}, index);
    auto results = search(index, q, Model::kBm25, ModelParams{}, 3);
    auto entries = make_run_entries(index, "q9", results, "mytag");
    REQUIRE(entries.size() == results.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(entries[i].qid == "q9");
        CHECK(entries[i].rank == i + 1);
        CHECK(entries[i].docid == index.docid(results[i].ordinal));
        CHECK(entries[i].score == results[i].score);
        CHECK(entries[i].tag == "mytag");
    }
    CHECK(make_run_entries(index, "q9", {}, "t").empty());

    std::ostringstream out;
    CHECK_NOTHROW(write_run(entries, out));  // sorted scores satisfy the writer
}
