#include "ares/baselines.hpp"

#include <regex>
#include <string>

#include "ares/errors.hpp"

namespace ares {

namespace {

void check_chain(const ReasoningChain& chain) {
    ValidationResult v = validate_chain(chain);
    if (v.ok) return;
    std::string what = "invalid chain";
    for (const std::string& violation : v.violations) what += "; " + violation;
    throw DomainError(what);
}

}  // namespace

std::vector<double> entail_prev(const ReasoningChain& chain, EntailmentModel& model) {
    check_chain(chain);
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(chain.m));
    std::vector<std::string> premises;
    premises.reserve(chain.claims.size());
    for (const Claim& claim : chain.claims) {
        if (claim.kind == ClaimKind::derived) {
            scores.push_back(model.score({premises, claim.text}).value);
        }
        premises.push_back(claim.text);
    }
    return scores;
}

std::vector<double> entail_base(const ReasoningChain& chain, EntailmentModel& model) {
    check_chain(chain);
    std::vector<std::string> premises;
    premises.reserve(static_cast<std::size_t>(chain.n));
    for (int i = 1; i <= chain.n; ++i) premises.push_back(chain.base_claim(i).text);
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(chain.m));
    for (int k = 1; k <= chain.m; ++k) {
        scores.push_back(model.score({premises, chain.derived_claim(k).text}).value);
    }
    return scores;
}

std::string render_judge_prompt(const std::string& prompt_template, const ReasoningChain& chain) {
    check_chain(chain);
    std::string rendered_chain;
    int step = 0;
    for (const Claim& claim : chain.claims) {
        if (claim.kind == ClaimKind::base) {
            rendered_chain += "Claim " + std::to_string(claim.id) + " (given): ";
        } else {
            ++step;
            rendered_chain += "Claim " + std::to_string(claim.id) + " (derived step " +
                              std::to_string(step) + "): ";
        }
        rendered_chain += claim.text;
        rendered_chain += '\n';
    }
    auto substitute = [](std::string text, const std::string& key, const std::string& value) {
        std::size_t pos = 0;
        while ((pos = text.find(key, pos)) != std::string::npos) {
            text.replace(pos, key.size(), value);
            pos += value.size();
        }
        return text;
    };
    std::string out = substitute(prompt_template, "{{n}}", std::to_string(chain.n));
    out = substitute(out, "{{m}}", std::to_string(chain.m));
    return substitute(out, "{{chain}}", rendered_chain);
}

std::vector<double> parse_judge_verdicts(const std::string& reply, int m) {
    static const std::regex verdict_line(R"(^\s*(\d+)\s*[:.]\s*(yes|no)\b)",
                                         std::regex::icase | std::regex::optimize);
    std::vector<std::pair<long, double>> verdicts;
    std::size_t start = 0;
    while (start <= reply.size()) {
        std::size_t end = reply.find('\n', start);
        std::string line =
            end == std::string::npos ? reply.substr(start) : reply.substr(start, end - start);
        std::smatch match;
        if (std::regex_search(line, match, verdict_line)) {
            long number = 0;
            try {
                number = std::stol(match[1].str());
            } catch (const std::exception&) {
                number = -1;  // absurdly long digit run; counts as misnumbered
            }
            char first = match[2].str()[0];
            verdicts.emplace_back(number, (first == 'y' || first == 'Y') ? 1.0 : 0.0);
        }
        if (end == std::string::npos) break;
        start = end + 1;
    }
    if (static_cast<int>(verdicts.size()) != m) {
        throw MalformedJudgment("reply contains " + std::to_string(verdicts.size()) +
                                    " verdicts, expected " + std::to_string(m),
                                reply);
    }
    for (int k = 0; k < m; ++k) {
        if (verdicts[static_cast<std::size_t>(k)].first != k + 1) {
            throw MalformedJudgment("verdicts are not numbered 1.." + std::to_string(m) +
                                        " in order",
                                    reply);
        }
    }
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(m));
    for (const auto& [number, value] : verdicts) scores.push_back(value);
    return scores;
}

std::vector<double> llm_judge(const ReasoningChain& chain, ChainJudge& judge,
                              const std::string& prompt_template) {
    std::string reply = judge.complete(render_judge_prompt(prompt_template, chain));
    return parse_judge_verdicts(reply, chain.m);
}

}  // namespace ares
