#include "ares/datagen.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "ares/errors.hpp"
#include "ares/rng.hpp"
#include "json.hpp"

namespace ares {

namespace {

void check_spec(const TreeSpec& spec) {
    if (spec.depth < 1) throw SpecError("depth must be >= 1");
    if (spec.sources < 1) throw SpecError("sources must be >= 1");
    if (spec.removed_rule_position &&
        (*spec.removed_rule_position < 1 || *spec.removed_rule_position > spec.depth)) {
        throw SpecError("removed rule position must lie in [1, depth]");
    }
    if (spec.removed_rule_source < 1 || spec.removed_rule_source > spec.sources) {
        throw SpecError("removed rule source must lie in [1, sources]");
    }
    if (spec.inserted_benign < 0) throw SpecError("inserted_benign must be >= 0");
    std::set<char> distinct(spec.symbol_alphabet.begin(), spec.symbol_alphabet.end());
    std::size_t needed = static_cast<std::size_t>(spec.sources) *
                             (static_cast<std::size_t>(spec.depth) + 1) +
                         static_cast<std::size_t>(spec.inserted_benign);
    if (distinct.size() * distinct.size() < needed) {
        throw SpecError("symbol alphabet too small for " + std::to_string(needed) + " symbols");
    }
}

std::string fresh_symbol(std::mt19937_64& g, const std::string& alphabet,
                         std::set<std::string>& used) {
    while (true) {
        std::string s;
        s += alphabet[rng::below(g, alphabet.size())];
        s += alphabet[rng::below(g, alphabet.size())];
        if (used.insert(s).second) return s;
    }
}

// One planned derivation: consumes `from`, produces `to`. Backbone steps
// remember their (source, position); inserted ones have source = -1.
struct PlannedStep {
    std::string from, to;
    int source = -1;
    int position = 0;
};

GeneratedChain generate_tree(const TreeSpec& spec) {
    check_spec(spec);
    auto g = rng::stream(spec.seed);

    std::set<std::string> used;
    // tokens[s][p]: source s's token after p rewrites (p = 0 is the root).
    std::vector<std::vector<std::string>> tokens(static_cast<std::size_t>(spec.sources));
    for (auto& path : tokens) {
        path.reserve(static_cast<std::size_t>(spec.depth) + 1);
        for (int p = 0; p <= spec.depth; ++p) {
            path.push_back(fresh_symbol(g, spec.symbol_alphabet, used));
        }
    }

    // Backbone derivations, round-robin across sources so wide chains
    // interleave their paths.
    std::vector<PlannedStep> steps;
    for (int p = 1; p <= spec.depth; ++p) {
        for (int s = 0; s < spec.sources; ++s) {
            auto& path = tokens[static_cast<std::size_t>(s)];
            steps.push_back({path[static_cast<std::size_t>(p - 1)],
                             path[static_cast<std::size_t>(p)], s + 1, p});
        }
    }

    for (int i = 0; i < spec.inserted_benign; ++i) {
        int s = static_cast<int>(rng::below(g, static_cast<std::uint64_t>(spec.sources)));
        int anchor = static_cast<int>(rng::below(g, static_cast<std::uint64_t>(spec.depth) + 1));
        const std::string from = tokens[static_cast<std::size_t>(s)][static_cast<std::size_t>(anchor)];
        const std::string to = fresh_symbol(g, spec.symbol_alphabet, used);
        // Earliest slot where the consumed token is already established:
        // right after its producer (anchor position `anchor` of source s+1),
        // or anywhere for a root token.
        std::size_t min_slot = 0;
        if (anchor > 0) {
            for (std::size_t idx = 0; idx < steps.size(); ++idx) {
                if (steps[idx].source == s + 1 && steps[idx].position == anchor) {
                    min_slot = idx + 1;
                    break;
                }
            }
        }
        std::size_t slot = min_slot + rng::below(g, steps.size() - min_slot + 1);
        steps.insert(steps.begin() + static_cast<std::ptrdiff_t>(slot), {from, to, -1, 0});
    }

    // The world: every backbone rule exists (including a withheld one);
    // inserted steps invoke rules that exist nowhere.
    RuleSystem system;
    std::set<std::pair<std::string, std::string>> world_rules;
    for (int s = 0; s < spec.sources; ++s) {
        const auto& path = tokens[static_cast<std::size_t>(s)];
        system.tokens_held.push_back(path[0]);
        for (int p = 1; p <= spec.depth; ++p) {
            system.rules.emplace_back(path[static_cast<std::size_t>(p - 1)],
                                      path[static_cast<std::size_t>(p)]);
            world_rules.insert(system.rules.back());
        }
    }

    // Base claims: every world rule except the withheld one, plus root tokens.
    std::vector<std::string> base_texts;
    std::set<std::pair<std::string, std::string>> base_rules;
    for (int s = 0; s < spec.sources; ++s) {
        const auto& path = tokens[static_cast<std::size_t>(s)];
        for (int p = 1; p <= spec.depth; ++p) {
            if (spec.removed_rule_position && s + 1 == spec.removed_rule_source &&
                p == *spec.removed_rule_position) {
                continue;
            }
            base_rules.insert({path[static_cast<std::size_t>(p - 1)],
                               path[static_cast<std::size_t>(p)]});
            base_texts.push_back(rule_claim_text(path[static_cast<std::size_t>(p - 1)],
                                                 path[static_cast<std::size_t>(p)]));
        }
    }
    for (int s = 0; s < spec.sources; ++s) {
        base_texts.push_back(token_claim_text(tokens[static_cast<std::size_t>(s)][0]));
    }
    rng::shuffle(base_texts, g);

    // Ground truth by reachability: a step is sound iff its rule is among the
    // base claims and its consumed token is a root or the product of a sound
    // step.
    std::map<std::string, bool> token_sound;
    for (int s = 0; s < spec.sources; ++s) {
        token_sound[tokens[static_cast<std::size_t>(s)][0]] = true;
    }
    ReasoningChain chain;
    chain.n = static_cast<int>(base_texts.size());
    chain.m = static_cast<int>(steps.size());
    chain.priors.assign(base_texts.size(), 1.0);
    int id = 0;
    for (std::string& text : base_texts) {
        chain.claims.push_back({++id, std::move(text), ClaimKind::base, std::nullopt});
    }
    for (const PlannedStep& step : steps) {
        bool rule_exists = base_rules.count({step.from, step.to}) > 0;
        auto it = token_sound.find(step.from);
        bool input_sound = it != token_sound.end() && it->second;
        bool sound = rule_exists && input_sound;
        token_sound[step.to] = sound;
        chain.claims.push_back({++id, derivation_claim_text(step.from, step.to),
                                ClaimKind::derived,
                                sound ? TruthLabel::sound : TruthLabel::unsound});
    }

    std::string chain_id =
        "claimtree-s" + std::to_string(spec.sources) + "d" + std::to_string(spec.depth);
    if (spec.removed_rule_position) {
        chain_id += "-r" + std::to_string(spec.removed_rule_source) + "." +
                    std::to_string(*spec.removed_rule_position);
    }
    if (spec.inserted_benign > 0) chain_id += "-i" + std::to_string(spec.inserted_benign);
    chain.id = chain_id + "-seed" + std::to_string(spec.seed);
    return {std::move(chain), std::move(system)};
}

}  // namespace

GeneratedChain gen_claimtree(const TreeSpec& spec) {
    if (spec.inserted_benign != 0) {
        throw SpecError("rule-removal chains take no insertions; use the insertion generator");
    }
    return generate_tree(spec);
}

GeneratedChain gen_benign_insertions(const TreeSpec& spec) {
    if (spec.removed_rule_position) {
        throw SpecError("insertion chains keep every rule; removal is a separate corruption");
    }
    return generate_tree(spec);
}

RecipeGraph recipe_graph_from_json(const std::string& text) {
    try {
        nlohmann::json j = nlohmann::json::parse(text);
        RecipeGraph graph;
        graph.ingredients = j.at("ingredients").get<std::vector<std::string>>();
        for (const auto& s : j.at("steps")) {
            RecipeStep step;
            step.id = s.at("id").get<std::string>();
            step.text = s.at("text").get<std::string>();
            step.prereqs = s.at("prereqs").get<std::vector<std::string>>();
            step.ingredients = s.at("ingredients").get<std::vector<std::string>>();
            graph.steps.push_back(std::move(step));
        }
        return graph;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad recipe graph json: ") + e.what());
    }
}

RecipeGraph read_recipe_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return recipe_graph_from_json(text);
    } catch (const ParseError& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

// Stable topological order: repeatedly emit the first step in input order
// whose prerequisites have all been emitted.
std::vector<std::size_t> topo_order(const RecipeGraph& graph,
                                    const std::map<std::string, std::size_t>& by_id) {
    std::vector<std::size_t> order;
    std::vector<bool> emitted(graph.steps.size(), false);
    while (order.size() < graph.steps.size()) {
        bool progressed = false;
        for (std::size_t i = 0; i < graph.steps.size(); ++i) {
            if (emitted[i]) continue;
            bool ready = true;
            for (const std::string& p : graph.steps[i].prereqs) {
                if (!emitted[by_id.at(p)]) {
                    ready = false;
                    break;
                }
            }
            if (ready) {
                emitted[i] = true;
                order.push_back(i);
                progressed = true;
                break;
            }
        }
        if (!progressed) {
            throw GraphError("recipe graph contains a prerequisite cycle");
        }
    }
    return order;
}

constexpr const char* kListJoinToken = ", and ";

}  // namespace

void validate_recipe_graph(const RecipeGraph& graph) {
    if (graph.steps.empty()) throw GraphError("recipe graph has no steps");
    std::set<std::string> ingredient_set;
    for (const std::string& ing : graph.ingredients) {
        if (ing.empty()) throw GraphError("empty ingredient name");
        if (ing.find(kListJoinToken) != std::string::npos) {
            throw GraphError("ingredient name '" + ing + "' collides with the list separator");
        }
        if (!ingredient_set.insert(ing).second) {
            throw GraphError("duplicate ingredient '" + ing + "'");
        }
    }
    std::map<std::string, std::size_t> by_id;
    std::set<std::string> texts;
    for (std::size_t i = 0; i < graph.steps.size(); ++i) {
        const RecipeStep& step = graph.steps[i];
        if (step.id.empty()) throw GraphError("step with empty id");
        if (!by_id.emplace(step.id, i).second) {
            throw GraphError("duplicate step id '" + step.id + "'");
        }
        if (step.text.empty()) throw GraphError("step '" + step.id + "' has empty text");
        if (step.text == "START") {
            throw GraphError("step text 'START' is reserved for the start marker");
        }
        if (step.text.find(kListJoinToken) != std::string::npos) {
            throw GraphError("step text '" + step.text + "' collides with the list separator");
        }
        if (!texts.insert(step.text).second) {
            throw GraphError("duplicate step text '" + step.text + "'");
        }
    }
    for (const RecipeStep& step : graph.steps) {
        std::set<std::string> seen;
        for (const std::string& p : step.prereqs) {
            if (!by_id.count(p)) {
                throw GraphError("step '" + step.id + "' requires unknown step '" + p + "'");
            }
            if (p == step.id) throw GraphError("step '" + step.id + "' requires itself");
            if (!seen.insert(p).second) {
                throw GraphError("step '" + step.id + "' lists prerequisite '" + p + "' twice");
            }
        }
        for (const std::string& ing : step.ingredients) {
            if (!ingredient_set.count(ing)) {
                throw GraphError("step '" + step.id + "' uses unknown ingredient '" + ing + "'");
            }
        }
    }
    topo_order(graph, by_id);  // throws on cycles
}

ReasoningChain gen_recipe_chain(const RecipeGraph& graph, const std::string& drop_ingredient,
                                std::uint64_t seed) {
    validate_recipe_graph(graph);
    if (!drop_ingredient.empty() &&
        std::find(graph.ingredients.begin(), graph.ingredients.end(), drop_ingredient) ==
            graph.ingredients.end()) {
        throw GraphError("dropped ingredient '" + drop_ingredient + "' is not in the graph");
    }
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < graph.steps.size(); ++i) by_id.emplace(graph.steps[i].id, i);

    auto prereq_raw = [&](const RecipeStep& step) {
        if (step.prereqs.empty()) return std::string("START");
        std::vector<std::string> names;
        names.reserve(step.prereqs.size());
        for (const std::string& p : step.prereqs) names.push_back(graph.steps[by_id.at(p)].text);
        return join_requirement_list(names);
    };

    std::vector<std::string> base_texts;
    for (const RecipeStep& step : graph.steps) {
        base_texts.push_back(step_rule_text(prereq_raw(step), step.text));
    }
    for (const std::string& ing : graph.ingredients) {
        if (ing != drop_ingredient) base_texts.push_back(ingredient_claim_text(ing));
    }
    base_texts.push_back(start_claim_text());
    auto g = rng::stream(seed);
    rng::shuffle(base_texts, g);

    ReasoningChain chain;
    chain.n = static_cast<int>(base_texts.size());
    chain.m = static_cast<int>(graph.steps.size());
    chain.priors.assign(base_texts.size(), 1.0);
    int id = 0;
    for (std::string& text : base_texts) {
        chain.claims.push_back({++id, std::move(text), ClaimKind::base, std::nullopt});
    }

    std::map<std::string, bool> step_sound;
    for (std::size_t idx : topo_order(graph, by_id)) {
        const RecipeStep& step = graph.steps[idx];
        bool sound = true;
        for (const std::string& ing : step.ingredients) {
            if (ing == drop_ingredient) sound = false;
        }
        for (const std::string& p : step.prereqs) {
            if (!step_sound.at(p)) sound = false;
        }
        step_sound[step.id] = sound;
        chain.claims.push_back({++id,
                                step_completion_text(prereq_raw(step),
                                                     join_requirement_list(step.ingredients),
                                                     !step.ingredients.empty(), step.text),
                                ClaimKind::derived,
                                sound ? TruthLabel::sound : TruthLabel::unsound});
    }

    std::string tag = drop_ingredient.empty() ? "nodrop" : "drop-" + drop_ingredient;
    std::replace(tag.begin(), tag.end(), ' ', '_');
    chain.id = "recipe-" + tag + "-seed" + std::to_string(seed);
    return chain;
}

RuleSystem recipe_rule_system(const RecipeGraph& graph) {
    validate_recipe_graph(graph);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < graph.steps.size(); ++i) by_id.emplace(graph.steps[i].id, i);
    RuleSystem system;
    system.tokens_held = graph.ingredients;
    for (const RecipeStep& step : graph.steps) {
        std::vector<std::string> prereq_texts;
        if (step.prereqs.empty()) {
            prereq_texts.push_back("START");
        } else {
            for (const std::string& p : step.prereqs) {
                prereq_texts.push_back(graph.steps[by_id.at(p)].text);
            }
        }
        system.prerequisites[step.text] = std::move(prereq_texts);
        system.ingredients[step.text] = step.ingredients;
    }
    return system;
}

}  // namespace ares
