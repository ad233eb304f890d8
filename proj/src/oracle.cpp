#include "ares/oracle.hpp"

#include <fstream>
#include <set>
#include <string_view>

#include "ares/errors.hpp"
#include "json.hpp"

namespace ares {

namespace {

// Line-template fragments. Spacing is load-bearing: the no-ingredient step
// completion really does put two spaces after the prerequisite list.
constexpr std::string_view kRulePrefix = "Rule: ";
constexpr std::string_view kArrow = " -> ";
constexpr std::string_view kRuleMeaning = " (meaning that if I have ";
constexpr std::string_view kRuleDerive = ", I can derive ";
constexpr std::string_view kTokenPrefix = "I have ";
constexpr std::string_view kUseRule = ", I use rule (";
constexpr std::string_view kRuleClose = ") to derive ";
constexpr std::string_view kNowHave = ", now I have ";
constexpr std::string_view kStepRulePrefix = "Only after the necessary preceding steps (";
constexpr std::string_view kStepRuleMid = "), And if we have all the ingredients, we can then ";
constexpr std::string_view kIngredientPrefix = "We have ";
constexpr std::string_view kStartText = "We now START.";
constexpr std::string_view kCompPrefix = "Because we have completed all previous steps (";
constexpr std::string_view kCompIngredients = "), and have all necessary ingredients (";
constexpr std::string_view kCompDo = "), we can now do the step ";
constexpr std::string_view kCompDoBare = "),  we can now do the step ";
constexpr std::string_view kCompTail = ". And now we have completed this step ";
constexpr std::string_view kListJoin = ", and ";

[[noreturn]] void bad(const std::string& text, const char* why) {
    throw ParseError(std::string("claim does not match the synthetic grammar (") + why + "): \"" +
                     text + "\"");
}

// Returns the segment of `rest` before the first occurrence of `delim` and
// advances `rest` past the delimiter.
std::string_view take_until(std::string_view& rest, std::string_view delim, const std::string& text,
                            const char* why) {
    std::size_t pos = rest.find(delim);
    if (pos == std::string_view::npos) bad(text, why);
    std::string_view head = rest.substr(0, pos);
    rest.remove_prefix(pos + delim.size());
    return head;
}

std::string_view strip_final_period(std::string_view rest, const std::string& text,
                                    const char* why) {
    if (rest.empty() || rest.back() != '.') bad(text, why);
    rest.remove_suffix(1);
    return rest;
}

ParsedClaim parse_rule_statement(const std::string& text) {
    std::string_view rest = text;
    rest.remove_prefix(kRulePrefix.size());
    std::string_view from = take_until(rest, kArrow, text, "missing '->'");
    std::string_view to = take_until(rest, kRuleMeaning, text, "missing meaning clause");
    std::string_view from2 = take_until(rest, kRuleDerive, text, "missing derive clause");
    if (rest.empty() || rest.back() != ')') bad(text, "missing closing paren");
    rest.remove_suffix(1);
    if (from.empty() || to.empty()) bad(text, "empty symbol");
    if (from != from2 || to != rest) bad(text, "rule symbols disagree with meaning clause");
    ParsedClaim out;
    out.form = ClaimForm::rule_statement;
    out.from = std::string(from);
    out.to = std::string(to);
    return out;
}

ParsedClaim parse_symbol_derivation(const std::string& text) {
    std::string_view rest = text;
    rest.remove_prefix(kTokenPrefix.size());
    std::string_view held = take_until(rest, kUseRule, text, "missing rule invocation");
    std::string_view from = take_until(rest, kArrow, text, "missing '->'");
    std::string_view to = take_until(rest, kRuleClose, text, "missing derive clause");
    std::string_view derived = take_until(rest, kNowHave, text, "missing conclusion");
    if (held.empty() || to.empty()) bad(text, "empty symbol");
    if (from != held) bad(text, "rule input disagrees with held symbol");
    if (to != derived || rest != to) bad(text, "derived symbols disagree");
    ParsedClaim out;
    out.form = ClaimForm::symbol_derivation;
    out.from = std::string(held);
    out.to = std::string(to);
    return out;
}

ParsedClaim parse_step_rule(const std::string& text) {
    std::string_view rest = text;
    rest.remove_prefix(kStepRulePrefix.size());
    std::string_view prereq_raw = take_until(rest, kStepRuleMid, text, "missing rule clause");
    std::string_view step = strip_final_period(rest, text, "missing final period");
    if (step.empty()) bad(text, "empty step");
    ParsedClaim out;
    out.form = ClaimForm::step_rule;
    out.step = std::string(step);
    out.prereq_raw = std::string(prereq_raw);
    out.prereqs = split_requirement_list(out.prereq_raw);
    if (out.prereqs.empty()) bad(text, "empty prerequisite list");
    return out;
}

ParsedClaim parse_step_completion(const std::string& text) {
    std::string_view rest = text;
    rest.remove_prefix(kCompPrefix.size());
    ParsedClaim out;
    out.form = ClaimForm::step_completion;
    // Whichever continuation appears first decides the branch.
    std::size_t with_pos = rest.find(kCompIngredients);
    std::size_t bare_pos = rest.find(kCompDoBare);
    if (with_pos == std::string_view::npos && bare_pos == std::string_view::npos) {
        bad(text, "missing continuation after prerequisites");
    }
    bool has_ingredients = with_pos < bare_pos;
    if (has_ingredients) {
        out.prereq_raw = std::string(take_until(rest, kCompIngredients, text, "unreachable"));
        out.ingredient_raw = std::string(take_until(rest, kCompDo, text, "missing do clause"));
        out.ingredients = split_requirement_list(out.ingredient_raw);
        if (out.ingredients.empty()) bad(text, "empty ingredient list");
    } else {
        out.prereq_raw = std::string(take_until(rest, kCompDoBare, text, "unreachable"));
    }
    std::string_view step = take_until(rest, kCompTail, text, "missing completion clause");
    std::string_view step2 = strip_final_period(rest, text, "missing final period");
    if (step.empty()) bad(text, "empty step");
    if (step != step2) bad(text, "step names disagree");
    out.step = std::string(step);
    out.prereqs = split_requirement_list(out.prereq_raw);
    if (out.prereqs.empty()) bad(text, "empty prerequisite list");
    return out;
}

}  // namespace

std::vector<std::string> split_requirement_list(const std::string& raw) {
    std::vector<std::string> items;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = raw.find(kListJoin, start);
        std::string item =
            pos == std::string::npos ? raw.substr(start) : raw.substr(start, pos - start);
        if (item.empty()) return {};  // caller reports the parse error
        items.push_back(std::move(item));
        if (pos == std::string::npos) break;
        start = pos + kListJoin.size();
    }
    return items;
}

std::string join_requirement_list(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += kListJoin;
        out += items[i];
    }
    return out;
}

std::string rule_claim_text(const std::string& from, const std::string& to) {
    std::string out;
    out += kRulePrefix;
    out += from;
    out += kArrow;
    out += to;
    out += kRuleMeaning;
    out += from;
    out += kRuleDerive;
    out += to;
    out += ')';
    return out;
}

std::string step_rule_text(const std::string& prereq_raw, const std::string& step) {
    std::string out;
    out += kStepRulePrefix;
    out += prereq_raw;
    out += kStepRuleMid;
    out += step;
    out += '.';
    return out;
}

std::string token_claim_text(const std::string& symbol) {
    std::string out;
    out += kTokenPrefix;
    out += symbol;
    return out;
}

std::string derivation_claim_text(const std::string& from, const std::string& to) {
    std::string out;
    out += kTokenPrefix;
    out += from;
    out += kUseRule;
    out += from;
    out += kArrow;
    out += to;
    out += kRuleClose;
    out += to;
    out += kNowHave;
    out += to;
    return out;
}

std::string ingredient_claim_text(const std::string& symbol) {
    std::string out;
    out += kIngredientPrefix;
    out += symbol;
    out += '.';
    return out;
}

std::string start_claim_text() { return std::string(kStartText); }

std::string step_completion_text(const std::string& prereq_raw, const std::string& ingredient_raw,
                                 bool has_ingredients, const std::string& step) {
    std::string out;
    out += kCompPrefix;
    out += prereq_raw;
    if (has_ingredients) {
        out += kCompIngredients;
        out += ingredient_raw;
        out += kCompDo;
    } else {
        out += kCompDoBare;
    }
    out += step;
    out += kCompTail;
    out += step;
    out += '.';
    return out;
}

ParsedClaim parse_claim(const std::string& text) {
    std::string_view sv = text;
    if (sv == kStartText) {
        ParsedClaim out;
        out.form = ClaimForm::start_marker;
        return out;
    }
    if (sv.starts_with(kRulePrefix)) return parse_rule_statement(text);
    if (sv.starts_with(kStepRulePrefix)) return parse_step_rule(text);
    if (sv.starts_with(kCompPrefix)) return parse_step_completion(text);
    if (sv.starts_with(kIngredientPrefix)) {
        std::string_view rest = sv.substr(kIngredientPrefix.size());
        rest = strip_final_period(rest, text, "missing final period");
        if (rest.empty()) bad(text, "empty ingredient");
        ParsedClaim out;
        out.form = ClaimForm::ingredient_holding;
        out.symbol = std::string(rest);
        return out;
    }
    if (sv.starts_with(kTokenPrefix)) {
        if (sv.find(kUseRule) != std::string_view::npos) return parse_symbol_derivation(text);
        std::string_view rest = sv.substr(kTokenPrefix.size());
        if (rest.empty()) bad(text, "empty symbol");
        ParsedClaim out;
        out.form = ClaimForm::token_holding;
        out.symbol = std::string(rest);
        return out;
    }
    bad(text, "no template matches");
}

EntailmentScore oracle_entails(const RuleSystem& system, const EntailmentQuery& query) {
    ParsedClaim hyp = parse_claim(query.hypothesis);
    if (hyp.form != ClaimForm::symbol_derivation && hyp.form != ClaimForm::step_completion) {
        throw ParseError("hypothesis is not a derivation step: \"" + query.hypothesis + "\"");
    }

    std::vector<ParsedClaim> premises;
    premises.reserve(query.premises.size());
    for (const std::string& t : query.premises) premises.push_back(parse_claim(t));

    auto verbatim = [&](const std::string& wanted) {
        for (const std::string& t : query.premises) {
            if (t == wanted) return true;
        }
        return false;
    };

    const EntailmentScore yes{1.0, ScoreMode::oracle};
    const EntailmentScore no{0.0, ScoreMode::oracle};

    if (hyp.form == ClaimForm::symbol_derivation) {
        if (!verbatim(rule_claim_text(hyp.from, hyp.to))) return no;
        for (const ParsedClaim& p : premises) {
            if ((p.form == ClaimForm::token_holding && p.symbol == hyp.from) ||
                (p.form == ClaimForm::symbol_derivation && p.to == hyp.from)) {
                return yes;
            }
        }
        return no;
    }

    // Step completion: the invoked rule, every prerequisite step, and every
    // ingredient must all be present. Requirements recorded in the system for
    // this step are unioned with the ones the hypothesis itself declares.
    if (!verbatim(step_rule_text(hyp.prereq_raw, hyp.step))) return no;

    std::set<std::string> needed_steps(hyp.prereqs.begin(), hyp.prereqs.end());
    std::set<std::string> needed_ingredients(hyp.ingredients.begin(), hyp.ingredients.end());
    if (auto it = system.prerequisites.find(hyp.step); it != system.prerequisites.end()) {
        needed_steps.insert(it->second.begin(), it->second.end());
    }
    if (auto it = system.ingredients.find(hyp.step); it != system.ingredients.end()) {
        needed_ingredients.insert(it->second.begin(), it->second.end());
    }

    for (const std::string& p : needed_steps) {
        bool found = false;
        for (const ParsedClaim& c : premises) {
            if (p == "START" ? c.form == ClaimForm::start_marker
                             : c.form == ClaimForm::step_completion && c.step == p) {
                found = true;
                break;
            }
        }
        if (!found) return no;
    }
    for (const std::string& ing : needed_ingredients) {
        bool found = false;
        for (const ParsedClaim& c : premises) {
            if (c.form == ClaimForm::ingredient_holding && c.symbol == ing) {
                found = true;
                break;
            }
        }
        if (!found) return no;
    }
    return yes;
}

std::string rule_system_to_json(const RuleSystem& system) {
    nlohmann::json j;
    j["tokens_held"] = system.tokens_held;
    auto rules = nlohmann::json::array();
    for (const auto& [from, to] : system.rules) {
        rules.push_back(nlohmann::json::array({from, to}));
    }
    j["rules"] = std::move(rules);
    j["prerequisites"] = system.prerequisites;
    j["ingredients"] = system.ingredients;
    return j.dump();
}

namespace {

RuleSystem rule_system_from(const nlohmann::json& j) {
    RuleSystem system;
    system.tokens_held = j.at("tokens_held").get<std::vector<std::string>>();
    for (const auto& edge : j.at("rules")) {
        if (!edge.is_array() || edge.size() != 2) {
            throw ParseError("rule edge must be a [from, to] pair");
        }
        system.rules.emplace_back(edge[0].get<std::string>(), edge[1].get<std::string>());
    }
    system.prerequisites =
        j.at("prerequisites").get<std::map<std::string, std::vector<std::string>>>();
    system.ingredients = j.at("ingredients").get<std::map<std::string, std::vector<std::string>>>();
    return system;
}

}  // namespace

RuleSystem rule_system_from_json(const std::string& text) {
    try {
        return rule_system_from(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad rule system json: ") + e.what());
    }
}

std::map<std::string, RuleSystem> read_rule_systems(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
        std::map<std::string, RuleSystem> out;
        for (const auto& [id, sys] : j.items()) out.emplace(id, rule_system_from(sys));
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path + ": bad rule system json: " + e.what());
    }
}

void write_rule_systems(const std::string& path,
                        const std::map<std::string, RuleSystem>& systems) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [id, sys] : systems) {
        j[id] = nlohmann::json::parse(rule_system_to_json(sys));
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace ares
