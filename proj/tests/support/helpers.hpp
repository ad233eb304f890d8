#pragma once

// Shared fixtures for the test binaries: tiny deterministic entailment models
// and chain builders.

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "ares/chain.hpp"
#include "ares/entailment.hpp"
#include "ares/errors.hpp"
#include "ares/oracle.hpp"

namespace testsupport {

// Deterministic but irregular-looking model: picks one of two values by the
// parity of the query-key hash. Pure function of the query, so it can be
// compared against exhaustive enumeration.
class HashModel : public ares::EntailmentModel {
  public:
    HashModel(double lo = 0.3, double hi = 0.7) : lo_(lo), hi_(hi) {}
    ares::EntailmentScore score(const ares::EntailmentQuery& query) override {
        const std::string h = ares::key_hash(ares::query_key(query));
        const char c = h.back();
        const int nibble = c <= '9' ? c - '0' : c - 'a' + 10;
        return {nibble % 2 == 0 ? lo_ : hi_, ares::ScoreMode::binary};
    }

  private:
    double lo_, hi_;
};

// Always returns the same value; counts invocations.
class FixedModel : public ares::EntailmentModel {
  public:
    explicit FixedModel(double value) : value_(value) {}
    ares::EntailmentScore score(const ares::EntailmentQuery&) override {
        calls.fetch_add(1);
        return {value_, ares::ScoreMode::binary};
    }
    std::atomic<int> calls{0};

  private:
    double value_;
};

// Scores 1 when the premise is non-empty, 0 otherwise; counts invocations.
class PremisePresenceModel : public ares::EntailmentModel {
  public:
    ares::EntailmentScore score(const ares::EntailmentQuery& query) override {
        calls.fetch_add(1);
        return {query.premises.empty() ? 0.0 : 1.0, ares::ScoreMode::binary};
    }
    std::atomic<int> calls{0};
};

// Fails the first `failures` invocations, then succeeds.
class FlakyModel : public ares::EntailmentModel {
  public:
    explicit FlakyModel(int failures, double value = 1.0) : failures_(failures), value_(value) {}
    ares::EntailmentScore score(const ares::EntailmentQuery&) override {
        if (calls.fetch_add(1) < failures_) {
            throw ares::TransportError("synthetic outage");
        }
        return {value_, ares::ScoreMode::binary};
    }
    std::atomic<int> calls{0};

  private:
    int failures_;
    double value_;
};

// Stalls inside score() so concurrent callers overlap; records the peak
// number of simultaneous invocations.
class SlowModel : public ares::EntailmentModel {
  public:
    ares::EntailmentScore score(const ares::EntailmentQuery&) override {
        int now = inside.fetch_add(1) + 1;
        int prev = peak.load();
        while (now > prev && !peak.compare_exchange_weak(prev, now)) {
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
        calls.fetch_add(1);
        inside.fetch_sub(1);
        return {0.5, ares::ScoreMode::binary};
    }
    std::atomic<int> calls{0};
    std::atomic<int> inside{0};
    std::atomic<int> peak{0};

  private:
};

// Chain with placeholder texts: n base claims "b1..bn", m derived "d1..dm".
inline ares::ReasoningChain make_chain(int n, int m, std::vector<double> priors) {
    ares::ReasoningChain chain;
    chain.id = "test-" + std::to_string(n) + "-" + std::to_string(m);
    chain.n = n;
    chain.m = m;
    chain.priors = std::move(priors);
    int id = 0;
    for (int i = 1; i <= n; ++i) {
        chain.claims.push_back({++id, "b" + std::to_string(i), ares::ClaimKind::base, std::nullopt});
    }
    for (int k = 1; k <= m; ++k) {
        chain.claims.push_back(
            {++id, "d" + std::to_string(k), ares::ClaimKind::derived, std::nullopt});
    }
    return chain;
}

inline ares::ReasoningChain make_chain(int n, int m, double prior = 1.0) {
    return make_chain(n, m, std::vector<double>(static_cast<std::size_t>(n), prior));
}

// Straight-line symbol chain: rules S1->S2->...->S_{depth+1}, token S1 held,
// one derivation per rule. break_at (1-based, 0 = none) removes that rule
// claim so the derivation at that step and everything after is ungrounded.
inline ares::ReasoningChain straight_claimtree(int depth, int break_at = 0) {
    auto symbol = [](int i) { return "S" + std::to_string(i); };
    ares::ReasoningChain chain;
    chain.id = "straight-" + std::to_string(depth) + "-" + std::to_string(break_at);
    int id = 0;
    for (int k = 1; k <= depth; ++k) {
        if (k == break_at) continue;
        chain.claims.push_back({++id, ares::rule_claim_text(symbol(k), symbol(k + 1)),
                                ares::ClaimKind::base, std::nullopt});
    }
    chain.claims.push_back(
        {++id, ares::token_claim_text(symbol(1)), ares::ClaimKind::base, std::nullopt});
    chain.n = id;
    chain.m = depth;
    chain.priors.assign(static_cast<std::size_t>(chain.n), 1.0);
    for (int k = 1; k <= depth; ++k) {
        bool sound = break_at == 0 || k < break_at;
        chain.claims.push_back({++id, ares::derivation_claim_text(symbol(k), symbol(k + 1)),
                                ares::ClaimKind::derived,
                                sound ? ares::TruthLabel::sound : ares::TruthLabel::unsound});
    }
    return chain;
}

// Unique temp path for file round-trip tests.
inline std::string temp_path(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    return (dir / (tag + "-" + std::to_string(::getpid()) + "-" +
                   std::to_string(counter.fetch_add(1))))
        .string();
}

}  // namespace testsupport
