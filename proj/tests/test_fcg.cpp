// Inflectional-variant query expansion: paradigm files, variant generation,
// and the collapse relationship with the paired suffix-stripping rules.

#include <set>
#include <sstream>
#include <string>

#include "bowkit/fcg.hpp"
#include "bowkit/index.hpp"
#include "catch_amalgamated.hpp"
#include "support/testutil.hpp"

using namespace bowkit;

namespace {

ParadigmSet load_text(const std::string& text) {
    std::istringstream in(text);
    return ParadigmSet::load(in);
}

}  // namespace

TEST_CASE("variant generation covers the canonical example", "[fcg]") {
    auto paradigms = load_text("*\t0,s,med,mer,ming\n");
    CHECK(generate_variants("stem", paradigms) ==
          std::set<std::string>{"stem", "stems", "stemmed", "stemmer", "stemming"});
}

TEST_CASE("the first matching paradigm wins", "[fcg]") {
    auto paradigms = load_text(
        "ies\t0,y,ies\n"
        "s\t0,s\n"
        "*\t0,s,ed\n");
    // "stories" matches "ies" first: base "stor" + {"", "y", "ies"}.
    CHECK(generate_variants("stories", paradigms) ==
          std::set<std::string>{"stories", "stor", "story"});
    // "cats" skips "ies", matches "s": base "cat" + {"", "s"}.
    CHECK(generate_variants("cats", paradigms) == std::set<std::string>{"cats", "cat"});
    // "dog" reaches the catch-all.
    CHECK(generate_variants("dog", paradigms) == std::set<std::string>{"dog", "dogs", "doged"});
}

TEST_CASE("the original term always survives expansion", "[fcg]") {
    // The paradigm replaces "ies" with forms that do not regenerate the input.
    auto paradigms = load_text("ies\ty\n");
    CHECK(generate_variants("stories", paradigms) ==
          std::set<std::string>{"stories", "story"});
    // No paradigm matches at all.
    auto narrow = load_text("zzz\t0,s\n");
    CHECK(generate_variants("cat", narrow) == std::set<std::string>{"cat"});
    // Empty paradigm set.
    CHECK(generate_variants("cat", ParadigmSet{}) == std::set<std::string>{"cat"});
}

TEST_CASE("gujarati paradigms operate on utf-8 suffixes", "[fcg]") {
    auto paradigms = ParadigmSet::load_file(
        (testutil::data_dir() / "paradigms.gu.tsv").string());
    CHECK(generate_variants("રમ", paradigms) ==
          std::set<std::string>{"રમ", "રમો", "રમાં", "રમને"});
}

TEST_CASE("paradigm files reject malformed lines", "[fcg]") {
    CHECK_THROWS_AS(load_text("no tab here\n"), ParseError);
    CHECK_THROWS_AS(load_text("s\t\n"), ParseError);          // empty variant list
    CHECK_THROWS_AS(load_text("s\t0,,s\n"), ParseError);      // empty piece
    CHECK_THROWS_AS(load_text("s\ts,0,s\n"), ParseError);     // duplicate variant
    CHECK_THROWS_AS(load_text("s\t0,0\n"), ParseError);       // duplicate empty variant
    CHECK_THROWS_AS(ParadigmSet::load_file("/nonexistent/p.tsv"), Error);
    try {
        load_text("ok\t0,s\nbad\t0,0\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    // Comments and blank lines are fine; `*` maps to the match-all condition.
    auto ok = load_text("# paradigms\n\n*\t0,s\n");
    CHECK(ok.size() == 1);
    CHECK(ok.paradigms()[0].match_suffix.empty());
}

TEST_CASE("expansion adds variant weights and flags the query", "[fcg]") {
    auto paradigms = load_text("*\t0,s\n");
    Query q;
    q.qid = "22";
    q.fields = "TD";
    q.pipeline_canonical = "x";
    q.terms = {{"cat", 2}, {"cats", 1}};
    auto expanded = expand_query(q, paradigms);
    CHECK(expanded.qid == "22");
    CHECK(expanded.fields == "TD");
    CHECK(expanded.pipeline_canonical == "x");
    CHECK(expanded.fcg_expanded);
    // "cat" contributes {cat, cats} at weight 2; "cats" contributes
    // {cats, catss} at weight 1; overlapping variants accumulate.
    CHECK(expanded.terms ==
          std::map<std::string, std::uint32_t>{{"cat", 2}, {"cats", 3}, {"catss", 1}});
}

TEST_CASE("query building with paradigms expands after the pipeline", "[fcg]") {
    Topic topic;
    topic.qid = "31";
    topic.title = "Flooding rivers";
    PipelineConfig config;
    auto paradigms = std::optional<ParadigmSet>(load_text("s\t0,s\n"));
    auto q = build_query(topic, "T", config, paradigms);
    CHECK(q.fcg_expanded);
    // generate_variants("rivers") is the set {rivers, river}: the original is
    // not double-counted when a variant regenerates it.
    CHECK(q.terms == std::map<std::string, std::uint32_t>{
                         {"flooding", 1}, {"rivers", 1}, {"river", 1}});
    auto plain = build_query(topic, "T", config, std::nullopt);
    CHECK_FALSE(plain.fcg_expanded);
    CHECK(plain.terms == std::map<std::string, std::uint32_t>{{"flooding", 1}, {"rivers", 1}});
}

TEST_CASE("paired paradigms and stem rules collapse to one class", "[fcg]") {
    auto paradigms = ParadigmSet::load_file((testutil::data_dir() / "paradigms.en.tsv").string());
    auto rules = StemRuleSet::load_file((testutil::data_dir() / "stemrules.en.tsv").string());
    for (const std::string base : {"stem", "walk", "chase", "farm", "rain"}) {
        CHECK(rules.stem(base) == base);  // bases are stem fixed points
        for (const auto& variant : generate_variants(base, paradigms)) {
            INFO(base << " -> " << variant);
            CHECK(rules.stem(variant) == base);
        }
    }

    auto gu_paradigms =
        ParadigmSet::load_file((testutil::data_dir() / "paradigms.gu.tsv").string());
    auto gu_rules = StemRuleSet::load_file((testutil::data_dir() / "stemrules.gu.tsv").string());
    for (const std::string base : {"રમ", "ઘર", "ખેત"}) {
        CHECK(gu_rules.stem(base) == base);
        for (const auto& variant : generate_variants(base, gu_paradigms)) {
            INFO(base << " -> " << variant);
            CHECK(gu_rules.stem(variant) == base);
        }
    }
}

TEST_CASE("expanded queries match plain-form indexes", "[fcg]") {
    std::vector<Document> docs{
        {"D1", "the farmer farms"},
        {"D2", "farming in the rain"},
        {"D3", "farmed land and farms"},
        {"D4", "city markets"},
    };
    auto index = build_index(docs, PipelineConfig{});
    Topic topic;
    topic.qid = "5";
    topic.title = "farming";
    auto paradigms = std::optional<ParadigmSet>(load_text("ing\t0,ing,s,ed\n"));
    auto q = build_query(topic, "T", PipelineConfig{}, paradigms);
    CHECK(q.terms == std::map<std::string, std::uint32_t>{
                         {"farming", 1}, {"farm", 1}, {"farms", 1}, {"farmed", 1}});
    auto results = search(index, q, Model::kBm25, ModelParams{}, 10);
    // All three farming documents match through some variant; D4 cannot.
    REQUIRE(results.size() == 3);
    std::set<std::string> docids;
    for (const auto& r : results) docids.insert(index.docid(r.ordinal));
    CHECK(docids == std::set<std::string>{"D1", "D2", "D3"});

    auto unexpanded = build_query(topic, "T", PipelineConfig{}, std::nullopt);
    CHECK(search(index, unexpanded, Model::kBm25, ModelParams{}, 10).size() == 1);  // D2 only
}
