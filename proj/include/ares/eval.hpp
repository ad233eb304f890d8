#pragma once

// Detection evaluation: pooled two-class macro metrics, threshold sweeps,
// chain-level cross-validation, and best-of-n chain selection. A step is
// predicted unsound when its score falls strictly below the threshold.

#include <cstdint>
#include <string>
#include <vector>

#include "ares/chain.hpp"
#include "ares/score_file.hpp"

namespace ares {

// One chain's labeled derived steps. Scores and labels run in step order and
// always have equal length.
struct EvalRecord {
    std::string chain_id;
    std::vector<double> step_scores;
    std::vector<TruthLabel> step_labels;

    bool operator==(const EvalRecord&) const = default;
};

// Pairs chains with their score records by id; steps without a ground-truth
// label are dropped, and chains left with no labeled steps are omitted.
// Throws IdMismatch on unknown or duplicate ids and on per-step count
// disagreements.
std::vector<EvalRecord> make_eval_records(const std::vector<ReasoningChain>& chains,
                                          const std::vector<ScoreRecord>& scores);

struct MacroMetrics {
    double recall = 0.0;
    double precision = 0.0;
    double f1 = 0.0;

    bool operator==(const MacroMetrics&) const = default;
};

// Steps pooled across chains; per-class precision/recall/F1 with 0/0 -> 0,
// macro = unweighted mean over {sound, unsound}. Macro-F1 averages the
// per-class F1 values (not the F1 of the macro averages).
MacroMetrics macro_metrics(const std::vector<EvalRecord>& records, double threshold);

// Candidates are every distinct training score plus one value above the
// maximum; returns the candidate with the best macro-F1, ties broken toward
// the smallest threshold (fewest flagged steps).
double sweep_threshold(const std::vector<EvalRecord>& train);

struct FoldResult {
    std::vector<std::string> test_chain_ids;
    double threshold = 0.0;
    MacroMetrics metrics;

    bool operator==(const FoldResult&) const = default;
};

struct CrossValidation {
    std::vector<FoldResult> folds;
    double recall_mean = 0.0, recall_std = 0.0;
    double precision_mean = 0.0, precision_std = 0.0;
    double f1_mean = 0.0, f1_std = 0.0;

    bool operator==(const CrossValidation&) const = default;
};

// Chains (never steps) are dealt into `folds` near-equal folds by seeded
// shuffle; each fold is scored with the threshold swept on the others.
// Reports mean and sample standard deviation across folds.
CrossValidation cross_validate(const std::vector<EvalRecord>& records, int folds,
                               std::uint64_t seed);

// Report JSON for one evaluated method, recording the step-pooling convention
// alongside the aggregate metrics and per-fold thresholds.
std::string report_to_json(const std::string& method, const std::string& dataset,
                           const CrossValidation& cv);

// CSV "length,chains,f1_mean,f1_std" grouping records by step count, one
// cross-validation per group (folds capped at the group size; groups with a
// single chain are skipped since they cannot split into train and test).
std::string per_length_f1_csv(const std::vector<EvalRecord>& records, int folds,
                              std::uint64_t seed);

enum class Aggregation { step_average, final_step };

struct BestOfNCandidate {
    std::string chain_id;
    std::vector<double> step_scores;
    bool is_correct = false;
};

// Argmax of the aggregated score; ties broken toward the lowest index.
std::size_t best_of_n(const std::vector<BestOfNCandidate>& candidates, Aggregation aggregation);

// Fraction of groups whose selected candidate is marked correct.
double best_of_n_accuracy(const std::vector<std::vector<BestOfNCandidate>>& groups,
                          Aggregation aggregation);

}  // namespace ares
