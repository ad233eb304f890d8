#include "ares/entailment.hpp"

#include <cctype>
#include <fstream>
#include <future>
#include <mutex>
#include <unordered_map>

#include "ares/errors.hpp"
#include "json.hpp"

namespace ares {

namespace {

std::string trim_lower(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    std::string out = s.substr(b, e - b);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

EntailmentScore likert_to_score(const std::string& label) {
    static const std::unordered_map<std::string, double> table = {
        {"very likely", 1.0},       {"likely", 0.8},
        {"somewhat likely", 0.6},   {"neutral", 0.5},
        {"somewhat unlikely", 0.4}, {"unlikely", 0.2},
        {"very unlikely", 0.0},
    };
    auto it = table.find(trim_lower(label));
    if (it == table.end()) {
        throw UnrecognizedLabel("unrecognized plausibility label: \"" + label + "\"");
    }
    return {it->second, ScoreMode::likert7};
}

std::string query_key(const EntailmentQuery& query) {
    std::string key;
    std::size_t reserve = query.hypothesis.size() + 16;
    for (const std::string& p : query.premises) reserve += p.size() + 12;
    key.reserve(reserve);
    for (const std::string& p : query.premises) {
        key += std::to_string(p.size());
        key += ':';
        key += p;
        key += ';';
    }
    key += "H:";
    key += query.hypothesis;
    return key;
}

std::string key_hash(const std::string& key) {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : key) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

struct CachedModel::Impl {
    std::shared_ptr<EntailmentModel> inner;
    std::string persist_path;

    mutable std::mutex mu;
    std::unordered_map<std::string, EntailmentScore> done;
    std::unordered_map<std::string, std::shared_future<EntailmentScore>> inflight;
    std::int64_t unique_calls = 0;
    std::int64_t hits = 0;

    void persist(const std::string& key, const EntailmentQuery& query,
                 const EntailmentScore& score) {
        if (persist_path.empty()) return;
        nlohmann::json j;
        j["key_hash"] = key_hash(key);
        j["premise"] = query.premises;
        j["hypothesis"] = query.hypothesis;
        j["score"] = score.value;
        j["mode"] = mode_name(score.mode);
        std::lock_guard<std::mutex> lock(mu);
        std::ofstream out(persist_path, std::ios::app);
        if (out) out << j.dump() << '\n';
    }

    // Warm-starts the cache from an existing score log so reruns answer from
    // disk instead of re-querying the model.
    void load(const std::string& path) {
        std::ifstream in(path);
        if (!in) return;  // nothing persisted yet
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            try {
                nlohmann::json j = nlohmann::json::parse(line);
                EntailmentQuery query{j.at("premise").get<std::vector<std::string>>(),
                                      j.at("hypothesis").get<std::string>()};
                EntailmentScore score{j.at("score").get<double>(),
                                      j.contains("mode") ? mode_from_name(j.at("mode"))
                                                         : ScoreMode::binary};
                done.emplace(query_key(query), score);
            } catch (const std::exception& e) {
                throw ParseError(path + ":" + std::to_string(lineno) +
                                 ": bad score-log record: " + e.what());
            }
        }
    }

    static const char* mode_name(ScoreMode mode) {
        switch (mode) {
            case ScoreMode::binary: return "binary";
            case ScoreMode::likert7: return "likert7";
            case ScoreMode::oracle: return "oracle";
        }
        return "binary";
    }

    static ScoreMode mode_from_name(const std::string& name) {
        if (name == "likert7") return ScoreMode::likert7;
        if (name == "oracle") return ScoreMode::oracle;
        if (name == "binary") return ScoreMode::binary;
        throw ParseError("unknown score mode '" + name + "'");
    }
};

CachedModel::CachedModel(std::shared_ptr<EntailmentModel> inner, std::string persist_path)
    : impl_(std::make_shared<Impl>()) {
    impl_->inner = std::move(inner);
    impl_->persist_path = std::move(persist_path);
    if (!impl_->persist_path.empty()) impl_->load(impl_->persist_path);
}

EntailmentScore CachedModel::score(const EntailmentQuery& query) {
    const std::string key = query_key(query);
    std::shared_future<EntailmentScore> waiter;
    std::promise<EntailmentScore> promise;
    bool owner = false;
    {
        std::lock_guard<std::mutex> lock(impl_->mu);
        if (auto it = impl_->done.find(key); it != impl_->done.end()) {
            ++impl_->hits;
            return it->second;
        }
        if (auto it = impl_->inflight.find(key); it != impl_->inflight.end()) {
            waiter = it->second;
        } else {
            waiter = promise.get_future().share();
            impl_->inflight.emplace(key, waiter);
            owner = true;
        }
    }
    if (!owner) {
        // get() rethrows if the owning call failed; since failures are not
        // cached, retrying from here re-invokes the model.
        EntailmentScore s = waiter.get();
        std::lock_guard<std::mutex> lock(impl_->mu);
        ++impl_->hits;
        return s;
    }
    try {
        EntailmentScore s = impl_->inner->score(query);
        {
            std::lock_guard<std::mutex> lock(impl_->mu);
            impl_->done.emplace(key, s);
            impl_->inflight.erase(key);
            ++impl_->unique_calls;
        }
        impl_->persist(key, query, s);
        promise.set_value(s);
        return s;
    } catch (...) {
        {
            std::lock_guard<std::mutex> lock(impl_->mu);
            impl_->inflight.erase(key);
        }
        promise.set_exception(std::current_exception());
        throw;
    }
}

std::int64_t CachedModel::unique_calls() const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->unique_calls;
}

std::int64_t CachedModel::hits() const {
    std::lock_guard<std::mutex> lock(impl_->mu);
    return impl_->hits;
}

}  // namespace ares
