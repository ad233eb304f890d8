#pragma once

// Premise-stability estimation: exact per-step stability by exhaustive mask
// enumeration, Monte Carlo estimation with an (epsilon, delta) sample-size
// certificate, and thresholding of the estimates into soundness labels.

#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <vector>

#include "ares/chain.hpp"
#include "ares/entailment.hpp"

namespace ares {

struct SamplingConfig {
    double epsilon = 0.1;
    double delta = 0.1;
    // When set, replaces every base-claim prior; when empty, the chain's own
    // priors apply.
    std::optional<double> prior_override;
    std::uint64_t seed = 0;
    int workers = 1;
};

// One sampled instance: the realized inclusion mask over all n+m claims and
// the per-step scores observed while extending it.
struct InstanceTrace {
    std::vector<std::uint8_t> mask_bits;
    std::vector<double> step_probs;
};

struct ExactStability {
    std::vector<double> tau;
    // Total enumerated mask mass per derived step; equals 1 up to rounding
    // and doubles as the normalization self-check.
    std::vector<double> prefix_mass;
};

// Smallest N with N >= log(2m/delta) / (2 epsilon^2), never below 1.
// Throws DomainError unless m >= 1, epsilon > 0, and 0 < delta < 1.
std::int64_t required_samples(int m, double epsilon, double delta);

// Draws base bits from the priors, then walks the derived claims in order,
// scoring each against the currently included subsequence and drawing its own
// inclusion bit from that score.
InstanceTrace sample_instance(const ReasoningChain& chain, EntailmentModel& model,
                              const SamplingConfig& config, std::mt19937_64& rng);

// Runs required_samples() independent instances (instance i always uses the
// RNG substream derived from (seed, i), so worker count never changes the
// result) and averages the per-step scores. The model is wrapped in a
// deduplicating cache; the report carries its unique-call count. If any
// instance fails, throws EstimationError carrying the number of instances
// that had completed — a partial report is never returned.
StabilityReport estimate_stability(const ReasoningChain& chain,
                                   std::shared_ptr<EntailmentModel> model,
                                   const SamplingConfig& config);

// Exhaustively enumerates inclusion masks (mass accumulated in log space,
// zero-mass branches pruned) to compute each step's exact stability. The
// verification oracle, not the production path: throws TooLarge when
// n + m > max_prefix.
ExactStability exact_stability(const ReasoningChain& chain, std::shared_ptr<EntailmentModel> model,
                               const SamplingConfig& config = {}, int max_prefix = 20);

// Step k is unsound iff tau_hat[k] < threshold (strictly), so threshold 0
// never flags and anything above the maximum flags everything.
std::vector<TruthLabel> detect_errors(const StabilityReport& report, double threshold);

}  // namespace ares
