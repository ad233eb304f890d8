#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ares {

// Base for all library errors so callers can catch everything from one place.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameter outside its documented domain (epsilon <= 0, delta outside (0,1), ...).
struct DomainError : Error {
    using Error::Error;
};

// Claim text does not match the synthetic grammar.
struct ParseError : Error {
    using Error::Error;
};

// Judge reply carries none of the seven Likert labels.
struct UnrecognizedLabel : Error {
    using Error::Error;
};

// HTTP judge unreachable after retries are exhausted.
struct TransportError : Error {
    using Error::Error;
};

// Judge reply contains neither YES/NO nor a Likert label.
struct UnparseableResponse : Error {
    using Error::Error;
};

// Whole-chain judge returned the wrong number of verdicts; carries the raw reply.
struct MalformedJudgment : Error {
    MalformedJudgment(const std::string& what, std::string reply)
        : Error(what), raw_reply(std::move(reply)) {}
    std::string raw_reply;
};

// Generator spec violates its invariants.
struct SpecError : Error {
    using Error::Error;
};

// Recipe task graph has cycles, dangling references, or malformed step text.
struct GraphError : Error {
    using Error::Error;
};

// Chain too long for exhaustive enumeration.
struct TooLarge : Error {
    using Error::Error;
};

// Not enough chains to populate the requested folds.
struct TooFewChains : Error {
    using Error::Error;
};

// Evaluation input holds no usable records/steps.
struct EmptyInput : Error {
    using Error::Error;
};

// Chains and score records cannot be paired up (unknown id, duplicate id, or
// per-step count disagreement).
struct IdMismatch : Error {
    using Error::Error;
};

// File could not be read, written, or decoded.
struct IoError : Error {
    using Error::Error;
};

// Estimation aborted mid-run; no partial certificate is emitted. Thrown with
// the causing exception nested for callers that classify failures.
struct EstimationError : Error {
    EstimationError(const std::string& what, std::int64_t completed)
        : Error(what), completed_instances(completed) {}
    std::int64_t completed_instances = 0;
};

}  // namespace ares
