#pragma once

// Synthetic benchmark generators. Both grammars come with exact ground-truth
// labels computed by graph reachability over the generated world — never by
// running a detector, so generated data cannot be circular with the thing
// under test.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ares/chain.hpp"
#include "ares/oracle.hpp"

namespace ares {

// Shape of a symbol-rewriting chain: `sources` independent root tokens, each
// rewritten `depth` times, derivation steps interleaved round-robin across
// sources. Corruptions: withhold one rule claim (everything downstream on
// that source's path becomes unsound) or insert derivations that invoke
// rules which exist nowhere (unsound steps whose products nothing consumes).
struct TreeSpec {
    int depth = 1;
    int sources = 1;
    // 1-based step position whose rule is withheld from the base claims.
    std::optional<int> removed_rule_position;
    // Which source's path carries the removal (1-based).
    int removed_rule_source = 1;
    int inserted_benign = 0;
    std::uint64_t seed = 0;
    // Symbols are two characters drawn from this alphabet, without collision.
    std::string symbol_alphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
};

using GeneratedChain = std::pair<ReasoningChain, RuleSystem>;

// Rule-removal variant (inserted_benign must be 0). The returned system is
// the full ground-truth world, including the withheld rule.
GeneratedChain gen_claimtree(const TreeSpec& spec);

// Benign-insertion variant (removed_rule_position must be unset); with
// inserted_benign = 0 this degenerates to gen_claimtree. Inserted steps are
// placed after their consumed token's producer.
GeneratedChain gen_benign_insertions(const TreeSpec& spec);

// Task graph for recipe chains, ingested from JSON:
//   {"steps": [{"id", "text", "prereqs": [id], "ingredients": [str]}],
//    "ingredients": [str]}
struct RecipeStep {
    std::string id;
    std::string text;
    std::vector<std::string> prereqs;      // step ids, order defines claim text
    std::vector<std::string> ingredients;  // subset of the graph's ingredients

    bool operator==(const RecipeStep&) const = default;
};

struct RecipeGraph {
    std::vector<RecipeStep> steps;
    std::vector<std::string> ingredients;

    bool operator==(const RecipeGraph&) const = default;
};

RecipeGraph recipe_graph_from_json(const std::string& text);
RecipeGraph read_recipe_graph(const std::string& path);

// Throws GraphError on cycles, dangling references, duplicate or reserved
// names, or step texts that would collide with the claim grammar.
void validate_recipe_graph(const RecipeGraph& graph);

// Base claims: one dependency rule per step, one holding claim per ingredient
// minus the dropped one, plus the start marker, shuffled by seed. Derived
// claims follow a deterministic topological order. A step is unsound iff it
// requires the dropped ingredient or depends on an unsound step.
ReasoningChain gen_recipe_chain(const RecipeGraph& graph, const std::string& drop_ingredient,
                                std::uint64_t seed);

// Ground-truth requirements side channel for the oracle.
RuleSystem recipe_rule_system(const RecipeGraph& graph);

}  // namespace ares
