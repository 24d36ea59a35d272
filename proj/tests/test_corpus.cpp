// Document/topic/qrels/run parsing and writing.

#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bowkit/corpus.hpp"
#include "catch_amalgamated.hpp"
#include "support/testutil.hpp"

using namespace bowkit;

namespace {

std::ifstream open_fixture(const char* rel) {
    std::ifstream in(testutil::data_dir() / rel, std::ios::binary);
    REQUIRE(in.is_open());
    return in;
}

}  // namespace

TEST_CASE("documents parse from uppercase-tagged files", "[corpus]") {
    auto in = open_fixture("docs/a.trec");
    std::vector<ParseIssue> issues;
    auto docs = parse_documents(in, ParseMode::kLenient, &issues);
    REQUIRE(docs.size() == 2);
    CHECK(issues.empty());
    CHECK(docs[0].docid == "FIX-001");
    CHECK(docs[0].text.find("harvesting crops in the monsoon rain") != std::string::npos);
    CHECK(docs[1].docid == "FIX-002");
    CHECK(docs[1].text.find("cotton exports") != std::string::npos);
}

TEST_CASE("documents parse past junk, attributes, and padded ids", "[corpus]") {
    auto in = open_fixture("docs/sub/b.trec");
    std::vector<ParseIssue> issues;
    auto docs = parse_documents(in, ParseMode::kLenient, &issues);
    REQUIRE(docs.size() == 1);
    CHECK(issues.empty());
    CHECK(docs[0].docid == "FIX-003");  // whitespace inside <docno> is trimmed
    CHECK(docs[0].text.find("120 students") != std::string::npos);
}

TEST_CASE("lenient parsing skips bad blocks and records issues", "[corpus]") {
    auto in = open_fixture("docs_malformed/bad.trec");
    std::vector<ParseIssue> issues;
    auto docs = parse_documents(in, ParseMode::kLenient, &issues);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].docid == "BAD-002");
    REQUIRE(issues.size() == 2);
    CHECK(issues[0].message.find("missing <docno>") != std::string::npos);
    CHECK(issues[1].message.find("unclosed <doc>") != std::string::npos);
}

TEST_CASE("strict parsing throws on the first bad block", "[corpus]") {
    auto in = open_fixture("docs_malformed/bad.trec");
    CHECK_THROWS_AS(parse_documents(in, ParseMode::kStrict), ParseError);
    try {
        auto again = open_fixture("docs_malformed/bad.trec");
        parse_documents(again, ParseMode::kStrict);
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find("missing <docno>") != std::string::npos);
        CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
}

TEST_CASE("pull parsing yields documents incrementally", "[corpus]") {
    auto in = open_fixture("docs/a.trec");
    DocumentParser parser(in);
    auto first = parser.next();
    REQUIRE(first.has_value());
    CHECK(first->docid == "FIX-001");
    auto second = parser.next();
    REQUIRE(second.has_value());
    CHECK(second->docid == "FIX-002");
    CHECK_FALSE(parser.next().has_value());
    CHECK_FALSE(parser.next().has_value());  // stays exhausted
}

TEST_CASE("documents larger than one scanner chunk survive intact", "[corpus]") {
    std::string big(300'000, 'x');
    for (std::size_t i = 0; i < big.size(); i += 97) big[i] = ' ';
    std::ostringstream src;
    src << "<DOC>\n<DOCNO>BIG-1</DOCNO>\n<TEXT>" << big << "</TEXT>\n</DOC>\n"
        << "<DOC>\n<DOCNO>BIG-2</DOCNO>\n<TEXT>after the large one</TEXT>\n</DOC>\n";
    std::istringstream in(src.str());
    auto docs = parse_documents(in);
    REQUIRE(docs.size() == 2);
    CHECK(docs[0].docid == "BIG-1");
    CHECK(docs[0].text == big);
    CHECK(docs[1].docid == "BIG-2");
}

TEST_CASE("incomplete tags at buffer edges are literal text", "[corpus]") {
    std::istringstream in("stray < bracket\n<DOC><DOCNO>X1</DOCNO><TEXT>a < b and c</TEXT></DOC>");
    auto docs = parse_documents(in);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].docid == "X1");
    CHECK(docs[0].text == "a < b and c");
}

TEST_CASE("topics parse with optional fields and padding", "[corpus]") {
    auto in = open_fixture("topics.trec");
    auto topics = parse_topics(in);
    REQUIRE(topics.size() == 3);
    CHECK(topics[0].qid == "901");
    CHECK(topics[0].title == "monsoon floods");
    CHECK(topics[0].description == "flooding of rivers during monsoon rains");
    CHECK(topics[0].narrative.find("flooded villages") != std::string::npos);
    CHECK(topics[1].qid == "902");
    CHECK(topics[1].narrative.empty());
    CHECK(topics[2].qid == "903");
}

TEST_CASE("topics with duplicate or missing parts are skipped leniently", "[corpus]") {
    std::istringstream in(
        "<top><num>1</num><title>first</title></top>\n"
        "<top><num>1</num><title>replayed qid</title></top>\n"
        "<top><title>no number</title></top>\n"
        "<top><num>2</num><title>  </title></top>\n"
        "<top><num>3</num><title>last good</title></top>\n");
    std::vector<ParseIssue> issues;
    auto topics = parse_topics(in, ParseMode::kLenient, &issues);
    REQUIRE(topics.size() == 2);
    CHECK(topics[0].qid == "1");
    CHECK(topics[1].qid == "3");
    REQUIRE(issues.size() == 3);
    CHECK(issues[0].message.find("duplicate topic qid '1'") != std::string::npos);
    CHECK(issues[1].message.find("missing <num>") != std::string::npos);
    CHECK(issues[2].message.find("empty <title>") != std::string::npos);

    std::istringstream strict_in("<top><title>no number</title></top>\n");
    CHECK_THROWS_AS(parse_topics(strict_in, ParseMode::kStrict), ParseError);
}

TEST_CASE("qrels parse grades, comments, and duplicates", "[corpus]") {
    auto in = open_fixture("qrels.txt");
    auto result = parse_qrels(in);
    CHECK(result.issues.empty());
    CHECK(result.duplicates == 1);  // 903/FIX-003 judged twice
    CHECK(result.qrels.size() == 5);
    CHECK(result.qrels.grade("901", "FIX-001") == 1);
    CHECK(result.qrels.grade("901", "FIX-002") == 0);
    CHECK(result.qrels.grade("902", "FIX-002") == 2);
    CHECK(result.qrels.contains("901", "FIX-002"));
    CHECK_FALSE(result.qrels.contains("901", "FIX-003"));
    CHECK(result.qrels.grade("nonexistent", "FIX-001") == 0);
    CHECK(result.qrels.relevant("901") == std::set<std::string>{"FIX-001"});
    CHECK(result.qrels.num_relevant("902") == 1);
    CHECK(result.qrels.num_relevant("unknown") == 0);
}

TEST_CASE("qrels duplicates keep the last grade", "[corpus]") {
    std::istringstream in("7 0 D1 1\n7 0 D1 0\n7 0 D2 2\n");
    auto result = parse_qrels(in);
    CHECK(result.duplicates == 1);
    CHECK(result.qrels.grade("7", "D1") == 0);
    CHECK(result.qrels.relevant("7") == std::set<std::string>{"D2"});
}

TEST_CASE("qrels reject malformed lines per mode", "[corpus]") {
    std::istringstream in(
        "# header comment\n"
        "\n"
        "1 0 D1 1\n"
        "1 0 D2\n"
        "1 0 D3 x\n"
        "1 0 D4 -2\n"
        "1 0 D5 1\n");
    auto result = parse_qrels(in);
    CHECK(result.qrels.size() == 2);
    REQUIRE(result.issues.size() == 3);
    CHECK(result.issues[0].message.find("expected 4 fields") != std::string::npos);
    CHECK(result.issues[0].position == 4);
    CHECK(result.issues[1].message.find("non-integer grade") != std::string::npos);
    CHECK(result.issues[2].message.find("negative grade") != std::string::npos);

    std::istringstream strict_in("1 0 D1 banana\n");
    CHECK_THROWS_AS(parse_qrels(strict_in, ParseMode::kStrict), ParseError);
}

TEST_CASE("run files write validated and re-parse exactly", "[corpus]") {
    std::vector<RunEntry> entries{
        {"q1", "D9", 1, 2.5, "tagA"},
        {"q1", "D2", 2, 1.0625, "tagA"},
        {"q1", "D5", 3, 1.0625, "tagA"},  // equal scores at increasing rank are fine
        {"q2", "D9", 1, 0.1, "tagA"},
        {"q2", "D1", 2, -3.25, "tagA"},   // negative scores occur with log weights
    };
    std::ostringstream out;
    write_run(entries, out);
    const std::string text = out.str();
    CHECK(text.find("q1 Q0 D9 1 2.5 tagA\n") != std::string::npos);
    CHECK(text.find("q2 Q0 D1 2 -3.25 tagA\n") != std::string::npos);
    CHECK(text.find("0.1 ") != std::string::npos);  // shortest form, not 0.100000

    std::istringstream back(text);
    auto parsed = parse_run(back);
    CHECK(parsed == entries);
}

TEST_CASE("run score text survives exact round-trips at full precision", "[corpus]") {
    std::mt19937_64 rng(2026u);
    std::uniform_real_distribution<double> dist(-50.0, 50.0);
    std::vector<RunEntry> entries;
    for (std::uint32_t i = 0; i < 500; ++i) {
        double score = dist(rng) / 7.0;
        // keep scores non-increasing so the writer accepts them
        entries.push_back({"q", "D" + std::to_string(i), i + 1,
                           -static_cast<double>(i) - std::fabs(score) * 1e-6, "t"});
    }
    std::ostringstream out;
    write_run(entries, out);
    std::istringstream back(out.str());
    auto parsed = parse_run(back);
    REQUIRE(parsed.size() == entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        CHECK(parsed[i].score == entries[i].score);  // bit-exact
    }
}

TEST_CASE("run writer rejects invariant violations", "[corpus]") {
    std::ostringstream out;
    CHECK_THROWS_AS(write_run({{"q1", "D1", 2, 1.0, "t"}}, out), Error);  // rank must start at 1
    CHECK_THROWS_AS(write_run({{"q1", "D1", 1, 1.0, "t"}, {"q1", "D2", 3, 0.5, "t"}}, out),
                    Error);  // gap in ranks
    CHECK_THROWS_AS(write_run({{"q1", "D1", 1, 1.0, "t"}, {"q1", "D2", 2, 2.0, "t"}}, out),
                    Error);  // score increases with rank
    CHECK_THROWS_AS(write_run({{"q1", "D1", 1, 1.0, "t"}, {"q1", "D1", 2, 0.5, "t"}}, out),
                    Error);  // duplicate docid within query
    CHECK_THROWS_AS(write_run({{"", "D1", 1, 1.0, "t"}}, out), Error);
    // Ranks restart per query.
    std::ostringstream ok;
    CHECK_NOTHROW(write_run({{"q1", "D1", 1, 1.0, "t"}, {"q2", "D1", 1, 5.0, "t"}}, ok));
}

TEST_CASE("run parsing reports malformed lines", "[corpus]") {
    std::istringstream in(
        "q1 Q0 D1 1 2.5 tag\n"
        "q1 Q0 D2 2 2.1\n"
        "q1 Q0 D3 0 2.0 tag\n"
        "q1 Q0 D4 three 1.9 tag\n"
        "q1 Q0 D5 4 fast tag\n"
        "q1 Q0 D6 5 1.5 tag\n");
    std::vector<ParseIssue> issues;
    auto entries = parse_run(in, ParseMode::kLenient, &issues);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].docid == "D1");
    CHECK(entries[1].docid == "D6");
    REQUIRE(issues.size() == 4);
    CHECK(issues[0].message.find("expected 6 fields") != std::string::npos);
    CHECK(issues[1].message.find("bad rank '0'") != std::string::npos);
    CHECK(issues[2].message.find("bad rank 'three'") != std::string::npos);
    CHECK(issues[3].message.find("bad score 'fast'") != std::string::npos);

    std::istringstream strict_in("q1 Q0 D1 1 nan-ish tag extra\n");
    CHECK_THROWS_AS(parse_run(strict_in, ParseMode::kStrict), ParseError);
}

TEST_CASE("corpus file listing is recursive and sorted", "[corpus]") {
    auto files = list_corpus_files(testutil::data_dir() / "docs");
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "a.trec");
    CHECK(files[1].filename() == "b.trec");
    CHECK(files[1].parent_path().filename() == "sub");
    CHECK_THROWS_AS(list_corpus_files(testutil::data_dir() / "no_such_dir"), Error);
    try {
        list_corpus_files(testutil::data_dir() / "no_such_dir");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("no_such_dir") != std::string::npos);
    }
}
