#include "ares/chain.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ares/errors.hpp"
#include "ares/rng.hpp"
#include "doctest.h"
#include "support/helpers.hpp"

using namespace ares;
using testsupport::make_chain;

namespace {

bool mentions(const ValidationResult& r, const std::string& needle) {
    return std::any_of(r.violations.begin(), r.violations.end(), [&](const std::string& v) {
        return v.find(needle) != std::string::npos;
    });
}

ReasoningChain random_chain(std::mt19937_64& g) {
    int n = 1 + static_cast<int>(rng::below(g, 5));
    int m = 1 + static_cast<int>(rng::below(g, 5));
    std::vector<double> priors;
    for (int i = 0; i < n; ++i) priors.push_back(rng::uniform01(g));
    ReasoningChain chain = make_chain(n, m, priors);
    chain.id = "rand-" + std::to_string(g());
    for (Claim& c : chain.claims) {
        c.text += " / claim text with spaces, \"quotes\" and unicode \xC3\xA9";
        if (c.kind == ClaimKind::derived) {
            switch (rng::below(g, 3)) {
                case 0: c.truth_label = TruthLabel::sound; break;
                case 1: c.truth_label = TruthLabel::unsound; break;
                default: c.truth_label = std::nullopt; break;
            }
        }
    }
    return chain;
}

}  // namespace

TEST_CASE("well-formed chain validates") {
    ReasoningChain chain = make_chain(3, 2, {1.0, 1.0, 1.0});
    ValidationResult r = validate_chain(chain);
    CHECK(r.ok);
    CHECK(r.violations.empty());
}

TEST_CASE("priors length mismatch is reported") {
    ReasoningChain chain = make_chain(3, 2, {1.0, 1.0});
    ValidationResult r = validate_chain(chain);
    CHECK_FALSE(r.ok);
    CHECK(mentions(r, "priors length mismatch"));
}

TEST_CASE("derived claim before a base claim is an ordering violation") {
    ReasoningChain chain = make_chain(3, 2, {1.0, 1.0, 1.0});
    std::swap(chain.claims[1].kind, chain.claims[3].kind);  // derived at index 2
    ValidationResult r = validate_chain(chain);
    CHECK_FALSE(r.ok);
    CHECK(mentions(r, "ordering"));
}

TEST_CASE("chain without base claims reports empty priors") {
    ReasoningChain chain = make_chain(0, 2, std::vector<double>{});
    ValidationResult r = validate_chain(chain);
    CHECK_FALSE(r.ok);
    CHECK(mentions(r, "empty priors"));
}

TEST_CASE("chain without derived claims is rejected") {
    ReasoningChain chain = make_chain(2, 0, {0.5, 0.5});
    ValidationResult r = validate_chain(chain);
    CHECK_FALSE(r.ok);
    CHECK(mentions(r, "at least one derived claim"));
}

TEST_CASE("out-of-range and NaN priors are rejected") {
    ReasoningChain chain = make_chain(2, 1, {1.5, 0.5});
    CHECK(mentions(validate_chain(chain), "out of [0,1]"));
    chain.priors = {0.5, std::nan("")};
    CHECK(mentions(validate_chain(chain), "out of [0,1]"));
    chain.priors = {0.5, -0.1};
    CHECK(mentions(validate_chain(chain), "out of [0,1]"));
}

TEST_CASE("non-consecutive claim ids are rejected") {
    ReasoningChain chain = make_chain(2, 1, {1.0, 1.0});
    chain.claims[2].id = 7;
    CHECK(mentions(validate_chain(chain), "consecutive"));
}

TEST_CASE("base claims may not carry an unsound label") {
    ReasoningChain chain = make_chain(2, 1, {1.0, 1.0});
    chain.claims[0].truth_label = TruthLabel::unsound;
    CHECK(mentions(validate_chain(chain), "labeled unsound"));
}

TEST_CASE("mismatched n and m counters are rejected") {
    ReasoningChain chain = make_chain(2, 2, {1.0, 1.0});
    chain.n = 3;
    CHECK(mentions(validate_chain(chain), "base claims"));
    chain.n = 2;
    chain.m = 1;
    CHECK(mentions(validate_chain(chain), "derived claims"));
}

TEST_CASE("validation collects multiple violations") {
    ReasoningChain chain = make_chain(3, 2, {2.0});
    chain.claims[0].id = 9;
    ValidationResult r = validate_chain(chain);
    CHECK(r.violations.size() >= 3);
}

TEST_CASE("jsonl round-trip preserves every field") {
    ReasoningChain chain = make_chain(3, 3, {1.0, 0.25, 0.5});
    chain.id = "rt-1";
    chain.claims[3].truth_label = TruthLabel::sound;
    chain.claims[4].truth_label = TruthLabel::unsound;
    // claims[5] stays unlabeled -> null in the file
    ReasoningChain back = chain_from_jsonl(chain_to_jsonl(chain));
    CHECK(back == chain);
}

TEST_CASE("jsonl round-trip is identity on random chains") {
    auto g = rng::stream(20260815);
    for (int i = 0; i < 100; ++i) {
        ReasoningChain chain = random_chain(g);
        CAPTURE(chain.id);
        CHECK(chain_from_jsonl(chain_to_jsonl(chain)) == chain);
    }
}

TEST_CASE("jsonl field layout is the documented one") {
    ReasoningChain chain = make_chain(1, 1, {0.5});
    chain.id = "layout";
    chain.claims[1].truth_label = TruthLabel::sound;
    std::string line = chain_to_jsonl(chain);
    CHECK(line.find("\"id\":\"layout\"") != std::string::npos);
    CHECK(line.find("\"n\":1") != std::string::npos);
    CHECK(line.find("\"base_claims\":[\"b1\"]") != std::string::npos);
    CHECK(line.find("\"derived_claims\":[\"d1\"]") != std::string::npos);
    CHECK(line.find("\"priors\":[0.5]") != std::string::npos);
    CHECK(line.find("\"labels\":[true]") != std::string::npos);
}

TEST_CASE("malformed chain lines raise ParseError") {
    CHECK_THROWS_AS(chain_from_jsonl("{not json"), ParseError);
    CHECK_THROWS_AS(chain_from_jsonl("{\"id\":\"x\"}"), ParseError);
    // one label too many
    CHECK_THROWS_AS(
        chain_from_jsonl(R"({"id":"x","n":1,"base_claims":["b"],"derived_claims":["d"],)"
                         R"("priors":[1.0],"labels":[true,false]})"),
        ParseError);
}

TEST_CASE("chain files round-trip and skip blank lines") {
    auto g = rng::stream(7);
    std::vector<ReasoningChain> chains;
    for (int i = 0; i < 10; ++i) chains.push_back(random_chain(g));
    std::string path = testsupport::temp_path("chains");
    write_chain_file(path, chains);
    CHECK(read_chain_file(path) == chains);

    std::ofstream(path, std::ios::app) << "\n\n";
    CHECK(read_chain_file(path) == chains);
    std::filesystem::remove(path);
}

TEST_CASE("file errors carry the offending path and line") {
    CHECK_THROWS_AS(read_chain_file("/nonexistent/nope.jsonl"), IoError);
    std::string path = testsupport::temp_path("badchains");
    std::ofstream(path) << "{}\n";
    try {
        read_chain_file(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(std::string(e.what()).find(path + ":1") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("claim accessors use 1-based indices") {
    ReasoningChain chain = make_chain(2, 2, {1.0, 1.0});
    CHECK(chain.base_claim(1).text == "b1");
    CHECK(chain.base_claim(2).text == "b2");
    CHECK(chain.derived_claim(1).text == "d1");
    CHECK(chain.derived_claim(2).text == "d2");
}
