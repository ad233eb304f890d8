#pragma once

// Entailment scoring interface plus a thread-safe memoizing wrapper.
// A model maps (premise sequence, hypothesis) to a soundness score in [0,1].

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace ares {

// How a score was produced: binary and oracle scores lie in {0,1}; likert7
// scores lie in {0.0, 0.2, 0.4, 0.5, 0.6, 0.8, 1.0}.
enum class ScoreMode { binary, likert7, oracle };

struct EntailmentQuery {
    std::vector<std::string> premises;  // ordered; may be empty
    std::string hypothesis;
};

struct EntailmentScore {
    double value = 0.0;  // in [0,1]
    ScoreMode mode = ScoreMode::binary;
};

class EntailmentModel {
  public:
    virtual ~EntailmentModel() = default;
    virtual EntailmentScore score(const EntailmentQuery& query) = 0;
};

// Maps a seven-point plausibility verdict (Very Likely ... Very Unlikely) to
// a score. Matching is case-insensitive after trimming ASCII whitespace;
// anything else throws UnrecognizedLabel.
EntailmentScore likert_to_score(const std::string& label);

// Serializes a query into a collision-free cache key. Premises are
// length-prefixed so no claim text can fake a separator, and order matters:
// the premise is a sequence, not a set.
std::string query_key(const EntailmentQuery& query);

// FNV-1a 64-bit over the key, hex-encoded; identifies entries in persisted
// score logs.
std::string key_hash(const std::string& key);

// Deduplicates identical queries so each distinct one hits the inner model at
// most once, including under concurrency (a second thread asking an in-flight
// question waits for the first answer instead of re-asking). Failed upstream
// calls are not cached; the next caller retries.
class CachedModel : public EntailmentModel {
  public:
    // persist_path, when non-empty, appends one JSONL record
    // {key_hash, premise, hypothesis, score, mode} per unique call; records
    // already in the file pre-fill the cache, so reruns answer from disk.
    explicit CachedModel(std::shared_ptr<EntailmentModel> inner, std::string persist_path = "");

    EntailmentScore score(const EntailmentQuery& query) override;

    // Number of distinct queries answered by the inner model so far.
    std::int64_t unique_calls() const;
    // Number of queries answered without touching the inner model.
    std::int64_t hits() const;

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

}  // namespace ares
