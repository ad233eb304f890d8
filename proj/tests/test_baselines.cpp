#include "ares/baselines.hpp"

#include <fstream>
#include <memory>

#include "ares/datagen.hpp"
#include "ares/errors.hpp"
#include "ares/estimator.hpp"
#include "doctest.h"
#include "support/helpers.hpp"

using namespace ares;
using namespace testsupport;

namespace {

class FakeJudge : public ChainJudge {
  public:
    explicit FakeJudge(std::string reply) : reply_(std::move(reply)) {}
    std::string complete(const std::string& prompt) override {
        last_prompt = prompt;
        return reply_;
    }
    std::string last_prompt;

  private:
    std::string reply_;
};

std::string shipped_judge_template() {
    std::ifstream in(std::string(PROMPTS_DIR) + "/judge_chain.txt");
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("fully grounded chains score all ones under the preceding-claims detector") {
    ReasoningChain chain = straight_claimtree(4);
    RuleOracle oracle;
    CHECK(entail_prev(chain, oracle) == std::vector<double>{1.0, 1.0, 1.0, 1.0});
    // Base claims alone cannot establish the intermediate tokens.
    CHECK(entail_base(chain, oracle) == std::vector<double>{1.0, 0.0, 0.0, 0.0});
}

TEST_CASE("a withheld rule zeroes its own step but downstream propagation is missed") {
    ReasoningChain chain = straight_claimtree(4, 2);
    RuleOracle oracle;
    // Step 3 consumes step 2's product, which sits in the premise prefix
    // whether or not step 2 was sound — the detector cannot see the poison.
    CHECK(entail_prev(chain, oracle) == std::vector<double>{1.0, 0.0, 1.0, 1.0});
    SamplingConfig config;
    StabilityReport report = estimate_stability(chain, std::make_shared<RuleOracle>(), config);
    CHECK(detect_errors(report, 0.5) ==
          std::vector<TruthLabel>{TruthLabel::sound, TruthLabel::unsound, TruthLabel::unsound,
                                  TruthLabel::unsound});
}

TEST_CASE("both premise conventions coincide on the first derived step") {
    HashModel model;
    for (int n = 1; n <= 4; ++n) {
        for (int m = 1; m <= 3; ++m) {
            ReasoningChain chain = make_chain(n, m);
            CHECK(entail_prev(chain, model).at(0) == entail_base(chain, model).at(0));
        }
    }
}

TEST_CASE("each detector spends exactly one entailment call per derived claim") {
    ReasoningChain chain = make_chain(3, 5);
    FixedModel fixed(1.0);
    entail_prev(chain, fixed);
    CHECK(fixed.calls == 5);
    FixedModel fixed2(1.0);
    entail_base(chain, fixed2);
    CHECK(fixed2.calls == 5);
    // All the queries are distinct, so a cache cannot collapse them.
    CachedModel cached(std::make_shared<FixedModel>(1.0));
    entail_prev(chain, cached);
    CHECK(cached.unique_calls() == 5);
    CHECK(cached.hits() == 0);
}

TEST_CASE("model failures and invalid chains surface as errors") {
    ReasoningChain chain = make_chain(2, 2);
    FlakyModel flaky(1);
    CHECK_THROWS_AS(entail_prev(chain, flaky), TransportError);
    RuleOracle oracle;
    CHECK_THROWS_AS(entail_prev(make_chain(2, 0), oracle), DomainError);
    CHECK_THROWS_AS(entail_base(make_chain(2, 0), oracle), DomainError);
}

TEST_CASE("without propagation the thresholded scores match the certified labels") {
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        TreeSpec spec;
        spec.depth = 4;
        spec.inserted_benign = 2;
        spec.seed = seed;
        auto [chain, system] = gen_benign_insertions(spec);
        RuleOracle oracle(system);
        std::vector<double> scores = entail_prev(chain, oracle);
        SamplingConfig config;
        StabilityReport report =
            estimate_stability(chain, std::make_shared<RuleOracle>(system), config);
        std::vector<TruthLabel> certified = detect_errors(report, 0.5);
        REQUIRE(scores.size() == certified.size());
        for (std::size_t k = 0; k < scores.size(); ++k) {
            CHECK((scores[k] < 0.5 ? TruthLabel::unsound : TruthLabel::sound) == certified[k]);
        }
    }
}

TEST_CASE("the judge prompt embeds the numbered chain and the verdict count") {
    ReasoningChain chain = make_chain(2, 2);
    std::string prompt = render_judge_prompt(shipped_judge_template(), chain);
    CHECK(prompt.find("{{") == std::string::npos);
    CHECK(prompt.find("Claim 1 (given): b1") != std::string::npos);
    CHECK(prompt.find("Claim 2 (given): b2") != std::string::npos);
    CHECK(prompt.find("Claim 3 (derived step 1): d1") != std::string::npos);
    CHECK(prompt.find("Claim 4 (derived step 2): d2") != std::string::npos);
    CHECK(prompt.find("exactly 2 lines") != std::string::npos);
    CHECK(prompt.find("1 through 2") != std::string::npos);
}

TEST_CASE("well-formed verdict lists parse positionally") {
    ReasoningChain chain = make_chain(2, 2);
    FakeJudge judge("1: YES\n2: NO");
    CHECK(llm_judge(chain, judge, shipped_judge_template()) == std::vector<double>{1.0, 0.0});
    CHECK(judge.last_prompt.find("d2") != std::string::npos);

    // Chatter around the verdicts is tolerated; separator and case are loose.
    CHECK(parse_judge_verdicts("Sure, here you go:\n  1: yes\nbecause of rule use\n2. NO\nDone.",
                               2) == std::vector<double>{1.0, 0.0});
    CHECK(parse_judge_verdicts("1:NO", 1) == std::vector<double>{0.0});
}

TEST_CASE("verdict-count mismatches carry the raw reply") {
    CHECK_THROWS_AS(parse_judge_verdicts("1: YES\n2: NO\n3: YES", 2), MalformedJudgment);
    CHECK_THROWS_AS(parse_judge_verdicts("", 2), MalformedJudgment);
    CHECK_THROWS_AS(parse_judge_verdicts("the chain looks fine to me", 1), MalformedJudgment);
    try {
        parse_judge_verdicts("1: YES", 2);
        FAIL("expected MalformedJudgment");
    } catch (const MalformedJudgment& e) {
        CHECK(e.raw_reply == "1: YES");
        CHECK(std::string(e.what()).find("expected 2") != std::string::npos);
    }
}

TEST_CASE("misnumbered verdict lists are rejected even at the right count") {
    CHECK_THROWS_AS(parse_judge_verdicts("2: YES\n1: NO", 2), MalformedJudgment);
    CHECK_THROWS_AS(parse_judge_verdicts("1: YES\n1: NO", 2), MalformedJudgment);
    CHECK_THROWS_AS(parse_judge_verdicts("10: YES", 1), MalformedJudgment);
    CHECK_THROWS_AS(parse_judge_verdicts("99999999999999999999: YES", 1), MalformedJudgment);
}
