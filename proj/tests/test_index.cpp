// Inverted-index construction, statistics, accessors, persistence, and
// corruption detection.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bowkit/corpus.hpp"
#include "bowkit/index.hpp"
#include "bowkit/textpipe.hpp"
#include "catch_amalgamated.hpp"
#include "support/testutil.hpp"

using namespace bowkit;

namespace {

std::vector<Document> tiny_docs() {
    return {
        {"D1", "The cat sat on the mat"},
        {"D2", "the cat chases the rat"},
        {"D3", "dogs and cats"},
    };
}

PipelineConfig stop_and_stem() {
    PipelineConfig config;
    std::istringstream stops("the\nand\non\n");
    config.stoplist = StopList::load(stops);
    config.stemmer = StemRuleSet({{"s", 3}}, 3);
    return config;
}

// Independent FNV-1a64 used to forge consistent checksums when tampering.
std::uint64_t fnv64(const std::string& bytes, std::uint64_t h) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string forge_checksum(const std::filesystem::path& dir) {
    std::uint64_t h = 14695981039346656037ULL;
    for (const char* name : {"doctable.bin", "lexicon.bin", "postings.bin", "stoplist.txt",
                             "stemrules.tsv"}) {
        auto p = dir / name;
        if (!std::filesystem::exists(p)) continue;
        h = fnv64(name, h);
        h = fnv64(testutil::slurp(p), h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

void patch_metadata(const std::filesystem::path& dir, const std::string& key,
                    const std::string& value) {
    std::istringstream in(testutil::slurp(dir / "metadata.txt"));
    std::ostringstream out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(key + ":", 0) == 0) {
            out << key << ": " << value << "\n";
        } else {
            out << line << "\n";
        }
    }
    testutil::spit(dir / "metadata.txt", out.str());
}

void reseal(const std::filesystem::path& dir) {
    patch_metadata(dir, "checksum", "fnv64:" + forge_checksum(dir));
}

}  // namespace

TEST_CASE("index statistics and accessors on a tiny collection", "[index]") {
    auto index = build_index(tiny_docs(), PipelineConfig{});
    CHECK(index.num_docs() == 3);
    CHECK(index.stats().num_docs == 3);
    CHECK(index.stats().raw_tokens == 14);
    CHECK(index.stats().total_tokens == 14);
    CHECK(index.stats().unique_terms == 10);
    CHECK(index.stats().avg_doclen == Catch::Approx(14.0 / 3.0).epsilon(1e-15));

    CHECK(index.docid(0) == "D1");
    CHECK(index.docid(2) == "D3");
    CHECK(index.doclen(0) == 6);
    CHECK(index.doclen(1) == 5);
    CHECK(index.doclen(2) == 3);
    REQUIRE(index.ordinal_of("D2").has_value());
    CHECK(*index.ordinal_of("D2") == 1);
    CHECK_FALSE(index.ordinal_of("ZZ-404").has_value());
    CHECK_THROWS_AS(index.docid(3), Error);
    CHECK_THROWS_AS(index.doclen(99), Error);

    auto the = index.lookup("the");
    REQUIRE(the.has_value());
    CHECK(the->df == 2);
    CHECK(the->cf == 4);
    REQUIRE(the->postings != nullptr);
    CHECK(*the->postings == std::vector<Posting>{{0, 2}, {1, 2}});

    auto cat = index.lookup("cat");
    REQUIRE(cat.has_value());
    CHECK(cat->df == 2);  // "cats" is a different term without a stemmer
    CHECK_FALSE(index.lookup("zebra").has_value());
    CHECK_FALSE(index.lookup("Cat").has_value());  // lexicon stores normalized terms
}

TEST_CASE("pipeline configuration shapes the lexicon", "[index]") {
    auto index = build_index(tiny_docs(), stop_and_stem());
    CHECK(index.stats().raw_tokens == 14);    // tokenizer output is unaffected
    CHECK(index.stats().total_tokens == 8);   // stop words removed
    CHECK(index.doclen(0) == 3);
    CHECK(index.doclen(2) == 2);

    auto cat = index.lookup("cat");
    REQUIRE(cat.has_value());
    CHECK(cat->df == 3);  // "cats" folded in
    CHECK(cat->cf == 3);
    CHECK(index.lookup("dog").has_value());
    CHECK_FALSE(index.lookup("dogs").has_value());
    CHECK_FALSE(index.lookup("the").has_value());
}

TEST_CASE("documents that filter to nothing keep their slot", "[index]") {
    PipelineConfig config;
    std::istringstream stops("the\nand\non\n");
    config.stoplist = StopList::load(stops);
    auto index = build_index({{"D1", "the and on"}, {"D2", "cat"}}, config);
    CHECK(index.num_docs() == 2);
    CHECK(index.doclen(0) == 0);
    CHECK(index.doclen(1) == 1);
    CHECK(index.docid(0) == "D1");
    CHECK(index.stats().total_tokens == 1);
}

TEST_CASE("index construction rejects bad inputs", "[index]") {
    CHECK_THROWS_AS(build_index({}, PipelineConfig{}), Error);
    CHECK_THROWS_AS(build_index({{"D1", "a"}, {"D1", "b"}}, PipelineConfig{}), Error);
    try {
        build_index({{"D1", "a"}, {"D1", "b"}}, PipelineConfig{});
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("D1") != std::string::npos);
    }
    CHECK_THROWS_AS(build_index({{"", "a"}}, PipelineConfig{}), Error);

    IndexBuilder builder{PipelineConfig{}};
    CHECK_THROWS_AS(builder.finish(), Error);  // zero documents
}

TEST_CASE("streaming builder and batch build agree", "[index]") {
    auto docs = tiny_docs();
    IndexBuilder builder{stop_and_stem()};
    for (const auto& d : docs) builder.add(d);
    CHECK(builder.docs_added() == docs.size());
    auto streamed = builder.finish();
    auto batch = build_index(docs, stop_and_stem());
    CHECK(streamed == batch);
}

TEST_CASE("parallel build is identical to serial", "[index]") {
    std::mt19937_64 rng(77u);
    std::vector<Document> docs;
    std::uniform_int_distribution<int> word(0, 25);
    std::uniform_int_distribution<int> len(1, 30);
    for (int i = 0; i < 400; ++i) {
        std::string text;
        const int n = len(rng);
        for (int w = 0; w < n; ++w) {
            text += "w" + std::to_string(word(rng)) + " ";
        }
        docs.push_back({"P" + std::to_string(i), text});
    }
    auto serial = build_index(docs, PipelineConfig{}, 1);
    for (unsigned threads : {2u, 3u, 8u, 64u}) {
        auto parallel = build_index(docs, PipelineConfig{}, threads);
        CHECK(parallel == serial);
    }
}

TEST_CASE("save then load reproduces the index exactly", "[index]") {
    testutil::TempDir tmp("index_roundtrip");
    auto index = build_index(tiny_docs(), stop_and_stem());
    auto dir = tmp / "idx";
    index.save(dir);

    CHECK(std::filesystem::exists(dir / "metadata.txt"));
    CHECK(std::filesystem::exists(dir / "stoplist.txt"));
    CHECK(std::filesystem::exists(dir / "stemrules.tsv"));

    auto loaded = load_index(dir);
    CHECK(loaded == index);
    CHECK(loaded.config().canonical_text() == index.config().canonical_text());
    CHECK(loaded.stats() == index.stats());
    auto cat = loaded.lookup("cat");
    REQUIRE(cat.has_value());
    CHECK(cat->df == 3);

    auto baseline = build_index(tiny_docs(), PipelineConfig{});
    auto dir2 = tmp / "idx2";
    baseline.save(dir2);
    CHECK_FALSE(std::filesystem::exists(dir2 / "stoplist.txt"));
    CHECK(load_index(dir2) == baseline);
}

TEST_CASE("saving over an existing index replaces it atomically", "[index]") {
    testutil::TempDir tmp("index_replace");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), PipelineConfig{}).save(dir);
    auto second = build_index({{"only", "one document here"}}, PipelineConfig{});
    second.save(dir);
    auto loaded = load_index(dir);
    CHECK(loaded.num_docs() == 1);
    CHECK(loaded == second);
}

TEST_CASE("loading a non-index directory fails clearly", "[index]") {
    testutil::TempDir tmp("index_notdir");
    CHECK_THROWS_AS(load_index(tmp / "missing"), IndexError);
    std::filesystem::create_directories(tmp / "empty");
    try {
        load_index(tmp / "empty");
        FAIL("expected IndexError");
    } catch (const IndexError& e) {
        CHECK(std::string(e.what()).find("metadata.txt") != std::string::npos);
    }
}

TEST_CASE("corrupted index files are rejected by checksum", "[index]") {
    testutil::TempDir tmp("index_corrupt");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), PipelineConfig{}).save(dir);

    auto bytes = testutil::slurp(dir / "postings.bin");
    REQUIRE(!bytes.empty());
    bytes[bytes.size() / 2] ^= 0x40;
    testutil::spit(dir / "postings.bin", bytes);
    CHECK_THROWS_AS(load_index(dir), IndexChecksumError);
}

TEST_CASE("truncated index files are detected", "[index]") {
    testutil::TempDir tmp("index_truncated");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), PipelineConfig{}).save(dir);

    auto bytes = testutil::slurp(dir / "postings.bin");
    REQUIRE(bytes.size() > 4);
    testutil::spit(dir / "postings.bin", bytes.substr(0, bytes.size() - 4));
    reseal(dir);  // keep the checksum valid so truncation itself is what fails
    CHECK_THROWS_AS(load_index(dir), IndexTruncatedError);
}

TEST_CASE("unsupported index versions are refused", "[index]") {
    testutil::TempDir tmp("index_version");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), PipelineConfig{}).save(dir);
    patch_metadata(dir, "format", "bowkit-index 999");
    CHECK_THROWS_AS(load_index(dir), IndexVersionError);
    patch_metadata(dir, "format", "something-else 1");
    CHECK_THROWS_AS(load_index(dir), IndexError);
}

TEST_CASE("metadata that disagrees with the data files is refused", "[index]") {
    testutil::TempDir tmp("index_meta");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), PipelineConfig{}).save(dir);
    patch_metadata(dir, "docs", "7");
    reseal(dir);
    CHECK_THROWS_AS(load_index(dir), IndexError);
}

TEST_CASE("pipeline resources are bound to the index by content", "[index]") {
    testutil::TempDir tmp("index_resources");
    auto dir = tmp / "idx";
    build_index(tiny_docs(), stop_and_stem()).save(dir);

    // Swap the stop list for different content and re-seal the checksum: the
    // stored pipeline digest no longer matches the resource.
    testutil::spit(dir / "stoplist.txt", "completely\ndifferent\nwords\n");
    reseal(dir);
    CHECK_THROWS_AS(load_index(dir), IndexChecksumError);
}

TEST_CASE("larger round-trip with many terms", "[index]") {
    std::mt19937_64 rng(1234u);
    std::vector<Document> docs;
    std::uniform_int_distribution<int> word(0, 400);
    std::uniform_int_distribution<int> len(1, 60);
    for (int i = 0; i < 300; ++i) {
        std::string text;
        const int n = len(rng);
        for (int w = 0; w < n; ++w) text += "tok" + std::to_string(word(rng)) + " ";
        docs.push_back({"R" + std::to_string(i), text});
    }
    auto index = build_index(docs, PipelineConfig{}, 4);
    testutil::TempDir tmp("index_large");
    auto dir = tmp / "idx";
    index.save(dir);
    CHECK(load_index(dir) == index);
}
