#include "ares/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "ares/errors.hpp"
#include "ares/rng.hpp"

namespace ares {

namespace {

void check_config(const SamplingConfig& config) {
    if (!(config.epsilon > 0.0)) {
        throw DomainError("epsilon must be > 0, got " + std::to_string(config.epsilon));
    }
    if (!(config.delta > 0.0 && config.delta < 1.0)) {
        throw DomainError("delta must be in (0,1), got " + std::to_string(config.delta));
    }
    if (config.prior_override.has_value() &&
        !(*config.prior_override >= 0.0 && *config.prior_override <= 1.0)) {
        throw DomainError("prior override must be in [0,1], got " +
                          std::to_string(*config.prior_override));
    }
}

void check_chain(const ReasoningChain& chain) {
    ValidationResult v = validate_chain(chain);
    if (!v.ok) {
        throw DomainError("invalid chain '" + chain.id + "': " + v.violations.front());
    }
}

double base_prior(const ReasoningChain& chain, const SamplingConfig& config, int j) {
    return config.prior_override ? *config.prior_override
                                 : chain.priors[static_cast<std::size_t>(j)];
}

}  // namespace

std::int64_t required_samples(int m, double epsilon, double delta) {
    if (m < 1) {
        throw DomainError("derived-claim count must be >= 1, got " + std::to_string(m));
    }
    if (!(epsilon > 0.0)) {
        throw DomainError("epsilon must be > 0, got " + std::to_string(epsilon));
    }
    if (!(delta > 0.0 && delta < 1.0)) {
        throw DomainError("delta must be in (0,1), got " + std::to_string(delta));
    }
    double bound = std::log(2.0 * static_cast<double>(m) / delta) / (2.0 * epsilon * epsilon);
    double count = std::ceil(bound);
    if (!(count >= 1.0)) return 1;
    return static_cast<std::int64_t>(count);
}

InstanceTrace sample_instance(const ReasoningChain& chain, EntailmentModel& model,
                              const SamplingConfig& config, std::mt19937_64& rng) {
    InstanceTrace trace;
    trace.mask_bits.assign(chain.claims.size(), 0);
    trace.step_probs.reserve(static_cast<std::size_t>(chain.m));
    std::vector<std::string> included;
    included.reserve(chain.claims.size());
    for (int j = 0; j < chain.n; ++j) {
        bool in = rng::bernoulli(rng, base_prior(chain, config, j));
        trace.mask_bits[static_cast<std::size_t>(j)] = in ? 1 : 0;
        if (in) included.push_back(chain.claims[static_cast<std::size_t>(j)].text);
    }
    for (int k = 0; k < chain.m; ++k) {
        const Claim& claim = chain.claims[static_cast<std::size_t>(chain.n + k)];
        EntailmentScore s = model.score({included, claim.text});
        trace.step_probs.push_back(s.value);
        bool in = rng::bernoulli(rng, s.value);
        trace.mask_bits[static_cast<std::size_t>(chain.n + k)] = in ? 1 : 0;
        if (in) included.push_back(claim.text);
    }
    return trace;
}

StabilityReport estimate_stability(const ReasoningChain& chain,
                                   std::shared_ptr<EntailmentModel> model,
                                   const SamplingConfig& config) {
    check_config(config);
    check_chain(chain);
    const std::int64_t n_samples = required_samples(chain.m, config.epsilon, config.delta);
    auto cached = std::make_shared<CachedModel>(std::move(model));

    std::vector<std::vector<double>> probs(static_cast<std::size_t>(n_samples));
    std::atomic<std::int64_t> next{0};
    std::atomic<std::int64_t> completed{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mu;

    auto run = [&]() {
        while (!failed.load(std::memory_order_relaxed)) {
            std::int64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= n_samples) break;
            try {
                auto rng = rng::substream(config.seed, static_cast<std::uint64_t>(i));
                probs[static_cast<std::size_t>(i)] =
                    sample_instance(chain, *cached, config, rng).step_probs;
                completed.fetch_add(1, std::memory_order_relaxed);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) first_error = std::current_exception();
            }
        }
    };

    const int n_workers = std::max(1, config.workers);
    if (n_workers == 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(run);
        for (std::thread& t : pool) t.join();
    }

    if (failed.load()) {
        try {
            std::rethrow_exception(first_error);
        } catch (const std::exception& e) {
            // Nested so callers can map the abort back to its cause (transport
            // versus parse) without losing the completed-instance count.
            std::throw_with_nested(
                EstimationError(std::string("estimation aborted: ") + e.what(),
                                completed.load()));
        }
    }

    StabilityReport report;
    report.chain_id = chain.id;
    report.epsilon = config.epsilon;
    report.delta = config.delta;
    report.samples_requested = n_samples;
    report.tau_hat.assign(static_cast<std::size_t>(chain.m), 0.0);
    // Ordered fold over instance index: summation order is fixed no matter
    // which worker finished first, so reports are bit-identical under a seed.
    for (std::int64_t i = 0; i < n_samples; ++i) {
        const std::vector<double>& row = probs[static_cast<std::size_t>(i)];
        for (int k = 0; k < chain.m; ++k) {
            report.tau_hat[static_cast<std::size_t>(k)] += row[static_cast<std::size_t>(k)];
        }
    }
    for (double& t : report.tau_hat) t /= static_cast<double>(n_samples);
    report.unique_entailment_calls = cached->unique_calls();
    return report;
}

namespace {

struct ExactWalker {
    const ReasoningChain& chain;
    const SamplingConfig& config;
    EntailmentModel& model;
    ExactStability out;
    std::vector<std::string> included;

    // Walks claims depth-first in index order, carrying the mask's log mass.
    // Arriving at a derived claim both accumulates its stability contribution
    // and branches on its own inclusion bit.
    void walk(int index, double log_mass) {
        const int total = chain.n + chain.m;
        if (index == total) return;
        const Claim& claim = chain.claims[static_cast<std::size_t>(index)];
        if (claim.kind == ClaimKind::base) {
            double p = base_prior(chain, config, index);
            if (p > 0.0) {
                included.push_back(claim.text);
                walk(index + 1, log_mass + std::log(p));
                included.pop_back();
            }
            if (p < 1.0) {
                walk(index + 1, log_mass + std::log1p(-p));
            }
            return;
        }
        const int k = index - chain.n;  // 0-based derived step
        const double mass = std::exp(log_mass);
        const double e = model.score({included, claim.text}).value;
        out.prefix_mass[static_cast<std::size_t>(k)] += mass;
        out.tau[static_cast<std::size_t>(k)] += mass * e;
        if (e > 0.0) {
            included.push_back(claim.text);
            walk(index + 1, log_mass + std::log(e));
            included.pop_back();
        }
        if (e < 1.0) {
            walk(index + 1, log_mass + std::log1p(-e));
        }
    }
};

}  // namespace

ExactStability exact_stability(const ReasoningChain& chain, std::shared_ptr<EntailmentModel> model,
                               const SamplingConfig& config, int max_prefix) {
    check_config(config);
    check_chain(chain);
    if (chain.n + chain.m > max_prefix) {
        throw TooLarge("chain '" + chain.id + "' has " + std::to_string(chain.n + chain.m) +
                       " claims; exhaustive enumeration is capped at " +
                       std::to_string(max_prefix));
    }
    CachedModel cached(std::move(model));
    ExactWalker walker{chain, config, cached, {}, {}};
    walker.out.tau.assign(static_cast<std::size_t>(chain.m), 0.0);
    walker.out.prefix_mass.assign(static_cast<std::size_t>(chain.m), 0.0);
    walker.walk(0, 0.0);
    return std::move(walker.out);
}

std::vector<TruthLabel> detect_errors(const StabilityReport& report, double threshold) {
    if (!(threshold >= 0.0 && threshold <= 1.0)) {
        throw DomainError("threshold must be in [0,1], got " + std::to_string(threshold));
    }
    std::vector<TruthLabel> labels;
    labels.reserve(report.tau_hat.size());
    for (double t : report.tau_hat) {
        labels.push_back(t < threshold ? TruthLabel::unsound : TruthLabel::sound);
    }
    return labels;
}

}  // namespace ares
