#pragma once

// Deterministic entailment oracle for the two synthetic claim grammars:
// symbol-rewriting chains ("Rule: AZ -> DG ...", "I have AZ, I use rule
// (AZ -> DG) to derive DG, now I have DG") and recipe-step chains ("Only
// after the necessary preceding steps (...), ...", "Because we have completed
// all previous steps (...), ...").  Claim texts are matched against strict
// line templates; paraphrases are rejected so the oracle stays a ground-truth
// instrument rather than a fuzzy matcher.

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "ares/entailment.hpp"

namespace ares {

// Ground-truth side channel describing the generated world: which symbols
// exist initially, which rewrite rules exist, and per-step requirements.
// Rule edges reference symbols (or step names), never claim indices.
struct RuleSystem {
    std::vector<std::string> tokens_held;                     // initial symbols
    std::vector<std::pair<std::string, std::string>> rules;   // from -> to
    std::map<std::string, std::vector<std::string>> prerequisites;  // step -> steps
    std::map<std::string, std::vector<std::string>> ingredients;    // step -> symbols

    bool operator==(const RuleSystem&) const = default;
};

// The seven line templates the oracle understands.
enum class ClaimForm {
    rule_statement,      // Rule: A -> B (meaning that if I have A, I can derive B)
    token_holding,       // I have A
    symbol_derivation,   // I have A, I use rule (A -> B) to derive B, now I have B
    step_rule,           // Only after the necessary preceding steps (P), And if ...
    ingredient_holding,  // We have X.
    start_marker,        // We now START.
    step_completion,     // Because we have completed all previous steps (P), ...
};

struct ParsedClaim {
    ClaimForm form;
    std::string symbol;                    // token_holding / ingredient_holding
    std::string from, to;                  // rule_statement / symbol_derivation
    std::string step;                      // step_rule / step_completion
    std::vector<std::string> prereqs;      // step_rule / step_completion
    std::vector<std::string> ingredients;  // step_completion (empty when absent)
    std::string prereq_raw;                // exact substring inside the parens
    std::string ingredient_raw;
};

// Parses one claim line; throws ParseError when it matches no template or
// its repeated fields disagree (e.g. the rule named inside a derivation does
// not rewrite the symbols the sentence claims).
ParsedClaim parse_claim(const std::string& text);

// Splits/joins requirement lists the way the grammar prints them.
std::vector<std::string> split_requirement_list(const std::string& raw);
std::string join_requirement_list(const std::vector<std::string>& items);

// Renders the rule claim a derivation step implicitly invokes; the oracle
// demands this exact text among the premises.
std::string rule_claim_text(const std::string& from, const std::string& to);
std::string step_rule_text(const std::string& prereq_raw, const std::string& step);

// Other claim renderers shared with the generators.
std::string token_claim_text(const std::string& symbol);
std::string derivation_claim_text(const std::string& from, const std::string& to);
std::string ingredient_claim_text(const std::string& symbol);
std::string start_claim_text();
std::string step_completion_text(const std::string& prereq_raw, const std::string& ingredient_raw,
                                 bool has_ingredients, const std::string& step);

// Returns 1 iff (a) the rule the hypothesis invokes appears verbatim among
// the premises and (b) every requirement the step consumes — its input token,
// prerequisite steps, and ingredients, unioned with any requirements the
// system records for the step — is established by a premise claim; else 0.
// Pure and thread-safe. An empty system makes the check purely text-based.
EntailmentScore oracle_entails(const RuleSystem& system, const EntailmentQuery& query);

class RuleOracle : public EntailmentModel {
  public:
    explicit RuleOracle(RuleSystem system = {}) : system_(std::move(system)) {}
    EntailmentScore score(const EntailmentQuery& query) override {
        return oracle_entails(system_, query);
    }

  private:
    RuleSystem system_;
};

// Sidecar (de)serialization so generated rule systems travel with chain files.
std::string rule_system_to_json(const RuleSystem& system);
RuleSystem rule_system_from_json(const std::string& text);
// Whole-file maps: chain id -> system.
std::map<std::string, RuleSystem> read_rule_systems(const std::string& path);
void write_rule_systems(const std::string& path, const std::map<std::string, RuleSystem>& systems);

}  // namespace ares
