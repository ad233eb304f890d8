#include "ares/chain.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ares/errors.hpp"
#include "json.hpp"

namespace ares {

ValidationResult validate_chain(const ReasoningChain& chain) {
    ValidationResult result;
    auto add = [&](std::string msg) {
        result.ok = false;
        result.violations.push_back(std::move(msg));
    };

    int n_base = 0;
    int n_derived = 0;
    bool seen_derived = false;
    for (std::size_t i = 0; i < chain.claims.size(); ++i) {
        const Claim& c = chain.claims[i];
        if (c.id != static_cast<int>(i) + 1) {
            add("claim ids must be consecutive starting at 1, got id " + std::to_string(c.id) +
                " at position " + std::to_string(i + 1));
        }
        if (c.kind == ClaimKind::base) {
            ++n_base;
            if (seen_derived) {
                add("ordering: base claim " + std::to_string(c.id) +
                    " appears after a derived claim");
            }
            if (c.truth_label == TruthLabel::unsound) {
                add("base claim " + std::to_string(c.id) + " labeled unsound");
            }
        } else {
            ++n_derived;
            seen_derived = true;
        }
    }

    if (chain.priors.empty()) {
        add("empty priors");
    }
    if (chain.n != n_base) {
        add("n is " + std::to_string(chain.n) + " but chain has " + std::to_string(n_base) +
            " base claims");
    }
    if (chain.m != n_derived) {
        add("m is " + std::to_string(chain.m) + " but chain has " + std::to_string(n_derived) +
            " derived claims");
    }
    if (n_derived < 1) {
        add("chain must contain at least one derived claim");
    }
    if (!chain.priors.empty() && chain.priors.size() != static_cast<std::size_t>(n_base)) {
        add("priors length mismatch: " + std::to_string(chain.priors.size()) + " priors for " +
            std::to_string(n_base) + " base claims");
    }
    for (std::size_t i = 0; i < chain.priors.size(); ++i) {
        double p = chain.priors[i];
        if (!(p >= 0.0 && p <= 1.0) || std::isnan(p)) {
            add("prior " + std::to_string(i + 1) + " out of [0,1]: " + std::to_string(p));
        }
    }
    return result;
}

std::string chain_to_jsonl(const ReasoningChain& chain) {
    nlohmann::json j;
    j["id"] = chain.id;
    j["n"] = chain.n;
    auto base = nlohmann::json::array();
    auto derived = nlohmann::json::array();
    auto labels = nlohmann::json::array();
    for (const Claim& c : chain.claims) {
        if (c.kind == ClaimKind::base) {
            base.push_back(c.text);
        } else {
            derived.push_back(c.text);
            if (c.truth_label.has_value()) {
                labels.push_back(*c.truth_label == TruthLabel::sound);
            } else {
                labels.push_back(nullptr);
            }
        }
    }
    j["base_claims"] = std::move(base);
    j["derived_claims"] = std::move(derived);
    j["priors"] = chain.priors;
    j["labels"] = std::move(labels);
    return j.dump();
}

ReasoningChain chain_from_jsonl(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad chain json: ") + e.what());
    }
    try {
        ReasoningChain chain;
        chain.id = j.at("id").get<std::string>();
        chain.n = j.at("n").get<int>();
        chain.priors = j.at("priors").get<std::vector<double>>();
        const auto& base = j.at("base_claims");
        const auto& derived = j.at("derived_claims");
        const auto& labels = j.at("labels");
        if (labels.size() != derived.size()) {
            throw ParseError("chain " + chain.id + ": " + std::to_string(labels.size()) +
                             " labels for " + std::to_string(derived.size()) + " derived claims");
        }
        int id = 0;
        for (const auto& t : base) {
            chain.claims.push_back({++id, t.get<std::string>(), ClaimKind::base, std::nullopt});
        }
        for (std::size_t k = 0; k < derived.size(); ++k) {
            std::optional<TruthLabel> label;
            if (!labels[k].is_null()) {
                label = labels[k].get<bool>() ? TruthLabel::sound : TruthLabel::unsound;
            }
            chain.claims.push_back(
                {++id, derived[k].get<std::string>(), ClaimKind::derived, label});
        }
        chain.m = static_cast<int>(derived.size());
        return chain;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad chain json: ") + e.what());
    }
}

std::vector<ReasoningChain> read_chain_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<ReasoningChain> chains;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            chains.push_back(chain_from_jsonl(line));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return chains;
}

void write_chain_file(const std::string& path, const std::vector<ReasoningChain>& chains) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    for (const ReasoningChain& chain : chains) {
        out << chain_to_jsonl(chain) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace ares
