#pragma once

// Domain types for claims, chains, masks, and scores. All of these are
// immutable value objects once constructed and safe to share across threads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ares {

enum class ClaimKind { base, derived };
enum class TruthLabel { sound, unsound };

// One assertion in a chain. Ids are 1-based and consecutive; base claims
// precede all derived claims.
struct Claim {
    int id = 0;
    std::string text;
    ClaimKind kind = ClaimKind::base;
    std::optional<TruthLabel> truth_label;

    bool operator==(const Claim&) const = default;
};

// Ordered base claims followed by derived claims, with one soundness prior
// per base claim.
struct ReasoningChain {
    std::string id;
    std::vector<Claim> claims;
    int n = 0;  // base claim count
    int m = 0;  // derived claim count
    std::vector<double> priors;

    const Claim& base_claim(int i) const { return claims[static_cast<std::size_t>(i - 1)]; }
    // k is 1-based among derived claims, i.e. claim C_{n+k}.
    const Claim& derived_claim(int k) const {
        return claims[static_cast<std::size_t>(n + k - 1)];
    }

    bool operator==(const ReasoningChain&) const = default;
};

// Binary inclusion vector over a claim prefix with its accumulated log mass.
struct PremiseMask {
    std::vector<std::uint8_t> bits;
    double log_prob = 0.0;  // <= 0
};

// Per-derived-claim stability estimates plus the (epsilon, delta) certificate.
struct StabilityReport {
    std::string chain_id;
    std::vector<double> tau_hat;
    double epsilon = 0.0;
    double delta = 0.0;
    std::int64_t samples_requested = 0;
    std::int64_t unique_entailment_calls = 0;
};

struct ValidationResult {
    bool ok = true;
    std::vector<std::string> violations;
};

// Collects every violated invariant instead of stopping at the first.
ValidationResult validate_chain(const ReasoningChain& chain);

// JSON Lines chain files, one chain per line:
//   {"id", "n", "base_claims", "derived_claims", "priors", "labels"}
// "labels" holds one bool-or-null per derived claim, true meaning sound.
std::string chain_to_jsonl(const ReasoningChain& chain);
ReasoningChain chain_from_jsonl(const std::string& line);
std::vector<ReasoningChain> read_chain_file(const std::string& path);
void write_chain_file(const std::string& path, const std::vector<ReasoningChain>& chains);

}  // namespace ares
