#include "ares/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "ares/errors.hpp"
#include "ares/rng.hpp"
#include "json.hpp"

namespace ares {

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

struct ClassCounts {
    long tp = 0, fp = 0, fn = 0;

    double precision() const { return ratio(static_cast<double>(tp), static_cast<double>(tp + fp)); }
    double recall() const { return ratio(static_cast<double>(tp), static_cast<double>(tp + fn)); }
    double f1() const {
        double p = precision(), r = recall();
        return ratio(2.0 * p * r, p + r);
    }
};

struct Pool {
    ClassCounts sound, unsound;
    long steps = 0;
};

Pool pool_counts(const std::vector<EvalRecord>& records, double threshold) {
    Pool pool;
    for (const EvalRecord& record : records) {
        if (record.step_scores.size() != record.step_labels.size()) {
            throw DomainError("record " + record.chain_id + ": " +
                              std::to_string(record.step_scores.size()) + " scores for " +
                              std::to_string(record.step_labels.size()) + " labels");
        }
        for (std::size_t k = 0; k < record.step_scores.size(); ++k) {
            ++pool.steps;
            bool predicted_unsound = record.step_scores[k] < threshold;
            bool is_unsound = record.step_labels[k] == TruthLabel::unsound;
            if (is_unsound) {
                if (predicted_unsound) {
                    ++pool.unsound.tp;
                } else {
                    ++pool.unsound.fn;
                    ++pool.sound.fp;
                }
            } else {
                if (predicted_unsound) {
                    ++pool.unsound.fp;
                    ++pool.sound.fn;
                } else {
                    ++pool.sound.tp;
                }
            }
        }
    }
    return pool;
}

double mean_of(const std::vector<double>& xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(const std::vector<double>& xs, double mean) {
    if (xs.size() < 2) return 0.0;
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double aggregate_score(const BestOfNCandidate& candidate, Aggregation aggregation) {
    if (candidate.step_scores.empty()) {
        throw EmptyInput("candidate " + candidate.chain_id + " has no step scores");
    }
    if (aggregation == Aggregation::final_step) return candidate.step_scores.back();
    return mean_of(candidate.step_scores);
}

}  // namespace

std::vector<EvalRecord> make_eval_records(const std::vector<ReasoningChain>& chains,
                                          const std::vector<ScoreRecord>& scores) {
    std::map<std::string, const ReasoningChain*> by_id;
    for (const ReasoningChain& chain : chains) {
        if (!by_id.emplace(chain.id, &chain).second) {
            throw IdMismatch("duplicate chain id '" + chain.id + "'");
        }
    }
    std::set<std::string> seen;
    std::vector<EvalRecord> records;
    for (const ScoreRecord& score : scores) {
        auto it = by_id.find(score.id);
        if (it == by_id.end()) {
            throw IdMismatch("score record '" + score.id + "' matches no chain");
        }
        if (!seen.insert(score.id).second) {
            throw IdMismatch("duplicate score record '" + score.id + "'");
        }
        const ReasoningChain& chain = *it->second;
        if (static_cast<int>(score.tau_hat.size()) != chain.m) {
            throw IdMismatch("chain '" + score.id + "' has " + std::to_string(chain.m) +
                             " derived claims but " + std::to_string(score.tau_hat.size()) +
                             " scores");
        }
        EvalRecord record;
        record.chain_id = score.id;
        for (int k = 1; k <= chain.m; ++k) {
            const Claim& claim = chain.derived_claim(k);
            if (!claim.truth_label) continue;
            record.step_scores.push_back(score.tau_hat[static_cast<std::size_t>(k - 1)]);
            record.step_labels.push_back(*claim.truth_label);
        }
        if (!record.step_labels.empty()) records.push_back(std::move(record));
    }
    return records;
}

MacroMetrics macro_metrics(const std::vector<EvalRecord>& records, double threshold) {
    Pool pool = pool_counts(records, threshold);
    if (pool.steps == 0) throw EmptyInput("no labeled steps to evaluate");
    MacroMetrics out;
    out.recall = (pool.sound.recall() + pool.unsound.recall()) / 2.0;
    out.precision = (pool.sound.precision() + pool.unsound.precision()) / 2.0;
    out.f1 = (pool.sound.f1() + pool.unsound.f1()) / 2.0;
    return out;
}

double sweep_threshold(const std::vector<EvalRecord>& train) {
    std::set<double> candidates;
    for (const EvalRecord& record : train) {
        candidates.insert(record.step_scores.begin(), record.step_scores.end());
    }
    if (candidates.empty()) throw EmptyInput("no training steps to sweep");
    candidates.insert(*candidates.rbegin() + 1.0);  // flag-everything candidate
    double best_threshold = 0.0;
    double best_f1 = -1.0;
    for (double candidate : candidates) {  // ascending, so ties keep the smallest
        double f1 = macro_metrics(train, candidate).f1;
        if (f1 > best_f1) {
            best_f1 = f1;
            best_threshold = candidate;
        }
    }
    return best_threshold;
}

CrossValidation cross_validate(const std::vector<EvalRecord>& records, int folds,
                               std::uint64_t seed) {
    if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
    if (static_cast<int>(records.size()) < folds) {
        throw TooFewChains(std::to_string(records.size()) + " chains cannot fill " +
                           std::to_string(folds) + " folds");
    }
    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    auto g = rng::stream(seed);
    rng::shuffle(order, g);

    CrossValidation cv;
    std::vector<double> recalls, precisions, f1s;
    for (int f = 0; f < folds; ++f) {
        std::vector<EvalRecord> train, test;
        FoldResult fold;
        for (std::size_t i = 0; i < order.size(); ++i) {
            const EvalRecord& record = records[order[i]];
            if (static_cast<int>(i % static_cast<std::size_t>(folds)) == f) {
                test.push_back(record);
                fold.test_chain_ids.push_back(record.chain_id);
            } else {
                train.push_back(record);
            }
        }
        fold.threshold = sweep_threshold(train);
        fold.metrics = macro_metrics(test, fold.threshold);
        recalls.push_back(fold.metrics.recall);
        precisions.push_back(fold.metrics.precision);
        f1s.push_back(fold.metrics.f1);
        cv.folds.push_back(std::move(fold));
    }
    cv.recall_mean = mean_of(recalls);
    cv.recall_std = sample_std(recalls, cv.recall_mean);
    cv.precision_mean = mean_of(precisions);
    cv.precision_std = sample_std(precisions, cv.precision_mean);
    cv.f1_mean = mean_of(f1s);
    cv.f1_std = sample_std(f1s, cv.f1_mean);
    return cv;
}

std::string report_to_json(const std::string& method, const std::string& dataset,
                           const CrossValidation& cv) {
    nlohmann::json j;
    j["method"] = method;
    j["dataset"] = dataset;
    j["pooling"] = "steps";
    j["folds"] = cv.folds.size();
    j["recall_mean"] = cv.recall_mean;
    j["recall_std"] = cv.recall_std;
    j["precision_mean"] = cv.precision_mean;
    j["precision_std"] = cv.precision_std;
    j["f1_mean"] = cv.f1_mean;
    j["f1_std"] = cv.f1_std;
    auto thresholds = nlohmann::json::array();
    for (const FoldResult& fold : cv.folds) thresholds.push_back(fold.threshold);
    j["thresholds"] = std::move(thresholds);
    return j.dump(2);
}

std::string per_length_f1_csv(const std::vector<EvalRecord>& records, int folds,
                              std::uint64_t seed) {
    std::map<std::size_t, std::vector<EvalRecord>> by_length;
    for (const EvalRecord& record : records) {
        by_length[record.step_labels.size()].push_back(record);
    }
    std::string csv = "length,chains,f1_mean,f1_std\n";
    for (const auto& [length, group] : by_length) {
        if (group.size() < 2) continue;
        int group_folds = std::min<int>(folds, static_cast<int>(group.size()));
        CrossValidation cv = cross_validate(group, group_folds, seed);
        csv += std::to_string(length) + "," + std::to_string(group.size()) + "," +
               std::to_string(cv.f1_mean) + "," + std::to_string(cv.f1_std) + "\n";
    }
    return csv;
}

std::size_t best_of_n(const std::vector<BestOfNCandidate>& candidates, Aggregation aggregation) {
    if (candidates.size() < 2) {
        throw EmptyInput("best-of-n needs at least 2 candidates, got " +
                         std::to_string(candidates.size()));
    }
    std::size_t best = 0;
    double best_score = aggregate_score(candidates[0], aggregation);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        double score = aggregate_score(candidates[i], aggregation);
        if (score > best_score) {  // strict, so ties keep the lowest index
            best_score = score;
            best = i;
        }
    }
    return best;
}

double best_of_n_accuracy(const std::vector<std::vector<BestOfNCandidate>>& groups,
                          Aggregation aggregation) {
    if (groups.empty()) throw EmptyInput("no best-of-n groups");
    long correct = 0;
    for (const auto& group : groups) {
        if (group[best_of_n(group, aggregation)].is_correct) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(groups.size());
}

}  // namespace ares
