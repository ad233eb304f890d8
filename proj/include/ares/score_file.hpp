#pragma once

// Score-file records: one JSONL line per chain holding the per-step scores a
// detector produced, plus whatever certificate parameters apply. All
// detectors share the format so externally computed scores can flow into
// evaluation; fields that only the certified estimator fills are nullable.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ares/chain.hpp"

namespace ares {

struct ScoreRecord {
    std::string id;
    std::vector<double> tau_hat;
    std::optional<double> epsilon;
    std::optional<double> delta;
    std::optional<std::int64_t> n_samples;
    std::optional<std::int64_t> unique_calls;
    std::string method;

    bool operator==(const ScoreRecord&) const = default;
};

// Certificate report -> score record with method "ares".
ScoreRecord to_score_record(const StabilityReport& report);

std::string score_to_jsonl(const ScoreRecord& record);
ScoreRecord score_from_jsonl(const std::string& line);

// Blank lines are skipped on read; parse failures carry "path:lineno".
std::vector<ScoreRecord> read_score_file(const std::string& path);
void write_score_file(const std::string& path, const std::vector<ScoreRecord>& records);

}  // namespace ares
