#include "ares/score_file.hpp"

#include <cmath>
#include <fstream>

#include "ares/errors.hpp"
#include "json.hpp"

namespace ares {

namespace {

template <typename T>
nlohmann::json null_or(const std::optional<T>& value) {
    if (value) return *value;
    return nullptr;
}

template <typename T>
std::optional<T> opt_field(const nlohmann::json& j, const char* key) {
    const auto& v = j.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

}  // namespace

ScoreRecord to_score_record(const StabilityReport& report) {
    ScoreRecord record;
    record.id = report.chain_id;
    record.tau_hat = report.tau_hat;
    record.epsilon = report.epsilon;
    record.delta = report.delta;
    record.n_samples = report.samples_requested;
    record.unique_calls = report.unique_entailment_calls;
    record.method = "ares";
    return record;
}

std::string score_to_jsonl(const ScoreRecord& record) {
    nlohmann::json j;
    j["id"] = record.id;
    j["tau_hat"] = record.tau_hat;
    j["epsilon"] = null_or(record.epsilon);
    j["delta"] = null_or(record.delta);
    j["n_samples"] = null_or(record.n_samples);
    j["unique_calls"] = null_or(record.unique_calls);
    j["method"] = record.method;
    return j.dump();
}

ScoreRecord score_from_jsonl(const std::string& line) {
    try {
        nlohmann::json j = nlohmann::json::parse(line);
        ScoreRecord record;
        record.id = j.at("id").get<std::string>();
        record.tau_hat = j.at("tau_hat").get<std::vector<double>>();
        for (double v : record.tau_hat) {
            if (!std::isfinite(v)) {
                throw ParseError("score record " + record.id + ": non-finite score");
            }
        }
        record.epsilon = opt_field<double>(j, "epsilon");
        record.delta = opt_field<double>(j, "delta");
        record.n_samples = opt_field<std::int64_t>(j, "n_samples");
        record.unique_calls = opt_field<std::int64_t>(j, "unique_calls");
        record.method = j.at("method").get<std::string>();
        return record;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("bad score json: ") + e.what());
    }
}

std::vector<ScoreRecord> read_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    std::vector<ScoreRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            records.push_back(score_from_jsonl(line));
        } catch (const ParseError& e) {
            throw ParseError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return records;
}

void write_score_file(const std::string& path, const std::vector<ScoreRecord>& records) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    for (const ScoreRecord& record : records) {
        out << score_to_jsonl(record) << '\n';
    }
    if (!out) {
        throw IoError("write failed: " + path);
    }
}

}  // namespace ares
