#pragma once

// Comparison detectors. Entail-Prev and Entail-Base score each derived claim
// with a single entailment call against a fixed premise prefix; the LLM judge
// asks one whole-chain question and parses a verdict list. None of them carry
// a statistical certificate.

#include <string>
#include <vector>

#include "ares/chain.hpp"
#include "ares/entailment.hpp"

namespace ares {

// score_k = E((C_1..C_{n+k-1}), C_{n+k}): every preceding claim is in the
// premise, sound or not. Exactly one model call per derived claim.
std::vector<double> entail_prev(const ReasoningChain& chain, EntailmentModel& model);

// score_k = E((C_1..C_n), C_{n+k}): derived claims never enter the premise.
std::vector<double> entail_base(const ReasoningChain& chain, EntailmentModel& model);

// Source of raw completions for whole-chain judgments.
class ChainJudge {
  public:
    virtual ~ChainJudge() = default;
    virtual std::string complete(const std::string& prompt) = 0;
};

// Substitutes {{n}}, {{m}}, and {{chain}} (the numbered claim list) into a
// prompt template.
std::string render_judge_prompt(const std::string& prompt_template, const ReasoningChain& chain);

// Extracts verdict lines of the form "3: YES" / "3. no" (case-insensitive,
// leading whitespace allowed). The reply must contain exactly one verdict per
// derived claim, numbered 1..m in order; otherwise MalformedJudgment carries
// the raw reply for audit.
std::vector<double> parse_judge_verdicts(const std::string& reply, int m);

// One completion request for the whole chain, one YES/NO verdict per derived
// claim. Transport failures propagate; unusable replies raise
// MalformedJudgment rather than guessing.
std::vector<double> llm_judge(const ReasoningChain& chain, ChainJudge& judge,
                              const std::string& prompt_template);

}  // namespace ares
