// Stop-list, stemmer, pipeline-config, and vocabulary-statistics tests.

#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bowkit/textpipe.hpp"
#include "catch_amalgamated.hpp"
#include "support/testutil.hpp"

using namespace bowkit;

TEST_CASE("stop list normalizes entries and lookups", "[textpipe]") {
    std::istringstream in("The\nOF\n# comment\n\n  and \nthe\n");
    auto list = StopList::load(in);
    CHECK(list.size() == 3);
    CHECK(list.contains("the"));
    CHECK(list.contains("of"));
    CHECK(list.contains("and"));
    CHECK_FALSE(list.contains("The"));  // lookups expect pipeline-normalized terms
    CHECK_FALSE(list.contains("cat"));
    CHECK(list.sorted_terms() == std::vector<std::string>{"and", "of", "the"});
}

TEST_CASE("stop list save/load round-trips and hashes by content", "[textpipe]") {
    std::istringstream in("beta\nalpha\n");
    auto list = StopList::load(in);
    std::ostringstream saved;
    list.save(saved);
    CHECK(saved.str() == "alpha\nbeta\n");

    std::istringstream again(saved.str());
    auto reloaded = StopList::load(again);
    CHECK(reloaded.sorted_terms() == list.sorted_terms());
    CHECK(reloaded.content_hash() == list.content_hash());

    std::istringstream other("alpha\ngamma\n");
    CHECK(StopList::load(other).content_hash() != list.content_hash());
}

TEST_CASE("stop list file loading errors on missing path", "[textpipe]") {
    CHECK_THROWS_AS(StopList::load_file("/nonexistent/stoplist.txt"), Error);
    auto list = StopList::load_file((testutil::data_dir() / "stoplist.en.txt").string());
    CHECK(list.contains("the"));
    CHECK(list.contains("with"));
}

TEST_CASE("stemmer strips the longest matching suffix once", "[textpipe]") {
    StemRuleSet rules({{"ing", 3}, {"s", 3}, {"ning", 3}}, 3);
    CHECK(rules.stem("walks") == "walk");
    CHECK(rules.stem("walking") == "walk");
    CHECK(rules.stem("running") == "run");      // "ning" beats "ing" by length
    CHECK(rules.stem("walk") == "walk");        // no suffix matches
    CHECK(rules.stem("sing") == "sing");        // stem "s" would be too short
    CHECK(rules.stem("s") == "s");
    CHECK(rules.stem("") == "");
    CHECK(rules.stem("glass") == "glas");       // strips one 's' only
}

TEST_CASE("stemmer counts code points, not bytes", "[textpipe]") {
    StemRuleSet rules({{"ો", 2}, {"ાં", 2}, {"ને", 2}}, 2);
    CHECK(rules.stem("રમતો") == "રમત");
    CHECK(rules.stem("રમતાં") == "રમત");
    CHECK(rules.stem("રમતને") == "રમત");
    CHECK(rules.stem("રમો") == "રમ");
    CHECK(rules.stem("રો") == "રો");  // stripping would leave a single code point
    CHECK(rules.stem("રમ") == "રમ");
}

TEST_CASE("stemmer construction rejects bad rules", "[textpipe]") {
    CHECK_THROWS_AS(StemRuleSet({{"", 3}}, 3), Error);
    CHECK_THROWS_AS(StemRuleSet({{"s", 0}}, 3), Error);
    CHECK_THROWS_AS(StemRuleSet({{"s", 3}, {"s", 2}}, 3), Error);  // duplicate suffix
    CHECK_THROWS_AS(StemRuleSet({}, 0), UsageError);
    CHECK_NOTHROW(StemRuleSet({}, 1));
}

TEST_CASE("stem rule files parse headers, defaults, and comments", "[textpipe]") {
    std::istringstream in(
        "# learned rules\n"
        "! min_stem_len_default 4\n"
        "ing\t3\n"
        "ed\n"
        "s\n");
    auto rules = StemRuleSet::load(in);
    CHECK(rules.size() == 3);
    CHECK(rules.default_min_stem_len() == 4);
    CHECK(rules.stem("walking") == "walk");  // explicit minimum 3
    CHECK(rules.stem("walked") == "walk");   // default minimum 4; "walk" is exactly 4
    CHECK(rules.stem("cats") == "cats");     // stem "cat" would be below the default
}

TEST_CASE("stem rule min length boundaries are inclusive", "[textpipe]") {
    std::istringstream in("! min_stem_len_default 4\ned\n");
    auto rules = StemRuleSet::load(in);
    CHECK(rules.stem("walked") == "walk");   // stem length 4 == minimum: allowed
    CHECK(rules.stem("waked") == "waked");   // stem length 3 < minimum: left alone
}

TEST_CASE("stem rule files reject malformed lines", "[textpipe]") {
    auto load = [](const std::string& text) {
        std::istringstream in(text);
        return StemRuleSet::load(in);
    };
    CHECK_THROWS_AS(load("ing\t0\n"), ParseError);
    CHECK_THROWS_AS(load("ing\tx\n"), ParseError);
    CHECK_THROWS_AS(load("s\n! min_stem_len_default 2\n"), ParseError);  // header after rules
    CHECK_THROWS_AS(load("! min_stem_len_default 0\n"), ParseError);
    CHECK_THROWS_AS(load("! wrong_key 3\n"), ParseError);
    CHECK_THROWS_AS(load("s\ns\t2\n"), ParseError);  // duplicate suffix
    CHECK_THROWS_AS(StemRuleSet::load_file("/nonexistent/rules.tsv"), Error);
    try {
        load("ing\t3\nbad\t-1\n");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.position() == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("stem rule save/load round-trips content and hash", "[textpipe]") {
    StemRuleSet rules({{"ing", 3}, {"ed", 3}, {"s", 2}}, 3);
    std::ostringstream saved;
    rules.save(saved);
    std::istringstream again(saved.str());
    auto reloaded = StemRuleSet::load(again);
    CHECK(reloaded.size() == rules.size());
    CHECK(reloaded.content_hash() == rules.content_hash());
    CHECK(reloaded.default_min_stem_len() == rules.default_min_stem_len());
    for (const char* term : {"walks", "walking", "walked", "ab", "abs"}) {
        CHECK(reloaded.stem(term) == rules.stem(term));
    }
    StemRuleSet other({{"ing", 3}, {"ed", 3}, {"s", 3}}, 3);
    CHECK(other.content_hash() != rules.content_hash());
}

TEST_CASE("pipeline canonical text pins every stage", "[textpipe]") {
    PipelineConfig base;
    CHECK(base.canonical_text() ==
          "casefold=1\ndigits=keep\nnfc=1\nstemmer=none\nstoplist=none\nzwstrip=1\n");

    PipelineConfig drop;
    drop.digits = DigitPolicy::kDrop;
    CHECK(drop.canonical_text().find("digits=drop\n") != std::string::npos);
    CHECK_FALSE(base == drop);

    std::istringstream s1("the\nof\n");
    PipelineConfig with_stop;
    with_stop.stoplist = StopList::load(s1);
    const auto text = with_stop.canonical_text();
    CHECK(text.find("stoplist=fnv64:") != std::string::npos);
    CHECK(text.find("/2\n") != std::string::npos);

    // Same stop list content from a different source compares equal.
    std::istringstream s2("of\nthe\nTHE\n");
    PipelineConfig with_stop2;
    with_stop2.stoplist = StopList::load(s2);
    CHECK(with_stop == with_stop2);
}

TEST_CASE("pipeline applies stop filtering before stemming", "[textpipe]") {
    // "running" stems to "run", which is stop-listed; surviving it proves the
    // stop filter saw the unstemmed form.
    PipelineConfig config;
    std::istringstream stops("run\nthe\n");
    config.stoplist = StopList::load(stops);
    config.stemmer = StemRuleSet({{"ning", 3}}, 3);
    auto terms = config.apply("The running water");
    CHECK(terms == std::vector<std::string>{"run", "water"});
}

TEST_CASE("pipeline drops tokens that normalize to nothing", "[textpipe]") {
    PipelineConfig config;
    config.digits = DigitPolicy::kDrop;
    CHECK(config.apply("120 students, 40 schools") ==
          std::vector<std::string>{"students", "schools"});
    CHECK(config.apply("‍ ‌").empty());
    CHECK(config.apply("").empty());
}

TEST_CASE("pipeline apply_token matches apply on single tokens", "[textpipe]") {
    PipelineConfig config;
    std::istringstream stops("the\n");
    config.stoplist = StopList::load(stops);
    config.stemmer = StemRuleSet({{"s", 3}}, 3);
    for (const char* token : {"The", "cats", "2010", "રમતો", "x"}) {
        auto full = config.apply(token);
        auto single = config.apply_token(token);
        if (full.empty()) {
            CHECK(single.empty());
        } else {
            REQUIRE(full.size() == 1);
            CHECK(full[0] == single);
        }
    }
}

TEST_CASE("top frequency terms sort by count then term", "[textpipe]") {
    std::unordered_map<std::string, std::uint64_t> table{
        {"the", 50}, {"of", 30}, {"and", 30}, {"cat", 2}, {"ant", 2}, {"zebra", 1}};
    auto rows = top_frequency_terms(table, 4);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0] == std::pair<std::string, std::uint64_t>{"the", 50});
    CHECK(rows[1] == std::pair<std::string, std::uint64_t>{"and", 30});
    CHECK(rows[2] == std::pair<std::string, std::uint64_t>{"of", 30});
    CHECK(rows[3] == std::pair<std::string, std::uint64_t>{"ant", 2});

    CHECK(top_frequency_terms(table, 100).size() == table.size());
    CHECK_THROWS_AS(top_frequency_terms(table, 0), UsageError);
    CHECK_THROWS_AS(top_frequency_terms(table, -3), UsageError);
}

TEST_CASE("suffix rule learning counts support correctly", "[textpipe]") {
    // "s" is supported by walks->walk, talks->talk, rains->rain (3 hits).
    // "ed" is supported by walked->walk, talked->talk (2 hits).
    // "ks" would need "wal"/"tal" in the lexicon; they are absent.
    std::unordered_set<std::string> lexicon{"walk", "walks",  "walked", "talk",
                                            "talks", "talked", "rain",   "rains"};
    auto r3 = learn_suffix_rules(lexicon, 4, 3, 3);
    CHECK(r3.size() == 1);  // only "s" reaches 3 supporting pairs
    CHECK(r3.stem("walks") == "walk");
    CHECK(r3.stem("walked") == "walked");

    auto r2 = learn_suffix_rules(lexicon, 4, 2, 3);
    CHECK(r2.size() == 2);  // "s" and "ed"
    CHECK(r2.stem("walked") == "walk");

    CHECK_THROWS_AS(learn_suffix_rules({}, 4, 2, 3), Error);
    CHECK_THROWS_AS(learn_suffix_rules(lexicon, 0, 2, 3), UsageError);
    CHECK_THROWS_AS(learn_suffix_rules(lexicon, 4, 0, 3), UsageError);
    CHECK_THROWS_AS(learn_suffix_rules(lexicon, 4, 2, 0), UsageError);
}

TEST_CASE("learned rules respect the minimum stem length", "[textpipe]") {
    // With min_stem_len 4, "rains" cannot support "s" (stem "rain" is fine at 4,
    // but "talk"/"walk" are exactly 4 too) while 5 disqualifies all of them.
    std::unordered_set<std::string> lexicon{"walk", "walks", "talk", "talks"};
    auto r4 = learn_suffix_rules(lexicon, 2, 2, 4);
    CHECK(r4.size() == 1);
    CHECK(r4.stem("walks") == "walk");
    auto r5 = learn_suffix_rules(lexicon, 2, 2, 5);
    CHECK(r5.size() == 0);
    CHECK(r5.stem("walks") == "walks");
}
