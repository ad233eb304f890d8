#include "ares/judge.hpp"

#include <cctype>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>
#include <vector>

#include "ares/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace ares {

namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

// Earliest word-bounded occurrence of `needle` in lowercase `haystack`.
std::size_t find_word(const std::string& haystack, const std::string& needle) {
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !word_char(haystack[pos - 1]);
        std::size_t after = pos + needle.size();
        bool right_ok = after >= haystack.size() || !word_char(haystack[after]);
        if (left_ok && right_ok) return pos;
        ++pos;
    }
    return std::string::npos;
}

}  // namespace

JudgeEndpointConfig judge_config_from_toml(const toml::Table& table) {
    JudgeEndpointConfig config;
    auto require = [&](const char* key) {
        auto value = table.get_string(key);
        if (!value || value->empty()) {
            throw ParseError(std::string("config key '") + key + "' is required");
        }
        return *value;
    };
    config.base_url = require("judge.base_url");
    config.model = require("judge.model");
    config.temperature = table.get_double("judge.temperature").value_or(config.temperature);
    config.max_retries =
        static_cast<int>(table.get_int("judge.max_retries").value_or(config.max_retries));
    config.backoff_base_seconds =
        table.get_double("judge.backoff_base_seconds").value_or(config.backoff_base_seconds);
    config.backoff_factor =
        table.get_double("judge.backoff_factor").value_or(config.backoff_factor);
    config.api_key_env = table.get_string("judge.api_key_env").value_or(config.api_key_env);
    config.timeout_seconds =
        table.get_double("judge.timeout_seconds").value_or(config.timeout_seconds);
    if (config.max_retries < 0) throw ParseError("judge.max_retries must be >= 0");
    if (config.backoff_base_seconds < 0) {
        throw ParseError("judge.backoff_base_seconds must be >= 0");
    }
    if (config.backoff_factor < 1.0) throw ParseError("judge.backoff_factor must be >= 1");
    if (config.timeout_seconds <= 0) throw ParseError("judge.timeout_seconds must be > 0");
    return config;
}

struct AuditLog::Impl {
    std::mutex mutex;
    std::ofstream out;
};

AuditLog::AuditLog(const std::string& path) : impl_(std::make_shared<Impl>()) {
    impl_->out.open(path, std::ios::app);
    if (!impl_->out) throw IoError("cannot open audit log " + path);
}

void AuditLog::record(const std::string& template_hash, const std::string& prompt,
                      const std::string& reply) {
    nlohmann::json j;
    j["template_hash"] = template_hash;
    j["prompt"] = prompt;
    j["reply"] = reply;
    std::lock_guard<std::mutex> lock(impl_->mutex);
    impl_->out << j.dump() << '\n';
    impl_->out.flush();
}

struct HttpJudgeClient::Impl {
    JudgeEndpointConfig config;
    std::string target;       // scheme://host:port
    std::string path_prefix;  // anything after the authority, no trailing '/'
    std::string api_key;
};

HttpJudgeClient::HttpJudgeClient(JudgeEndpointConfig config) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    const std::string& url = impl_->config.base_url;
    std::size_t scheme = url.find("://");
    if (scheme == std::string::npos) {
        throw DomainError("judge base_url must include a scheme: " + url);
    }
    std::size_t path = url.find('/', scheme + 3);
    if (path == std::string::npos) {
        impl_->target = url;
    } else {
        impl_->target = url.substr(0, path);
        impl_->path_prefix = url.substr(path);
        while (!impl_->path_prefix.empty() && impl_->path_prefix.back() == '/') {
            impl_->path_prefix.pop_back();
        }
    }
    if (!impl_->config.api_key_env.empty()) {
        if (const char* key = std::getenv(impl_->config.api_key_env.c_str())) {
            impl_->api_key = key;
        }
    }
}

HttpJudgeClient::~HttpJudgeClient() = default;

std::string HttpJudgeClient::complete(const std::string& prompt) {
    nlohmann::json body;
    body["model"] = impl_->config.model;
    body["temperature"] = impl_->config.temperature;
    body["messages"] = nlohmann::json::array(
        {nlohmann::json{{"role", "user"}, {"content", prompt}}});
    const std::string payload = body.dump();
    const std::string path = impl_->path_prefix + "/chat/completions";

    httplib::Headers headers;
    if (!impl_->api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->api_key);
    }

    std::string last_failure;
    for (int attempt = 0; attempt <= impl_->config.max_retries; ++attempt) {
        if (attempt > 0) {
            double seconds = impl_->config.backoff_base_seconds;
            for (int i = 1; i < attempt; ++i) seconds *= impl_->config.backoff_factor;
            std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
        }
        httplib::Client client(impl_->target);
        client.set_connection_timeout(std::chrono::duration<double>(impl_->config.timeout_seconds));
        client.set_read_timeout(std::chrono::duration<double>(impl_->config.timeout_seconds));
        client.set_write_timeout(std::chrono::duration<double>(impl_->config.timeout_seconds));

        httplib::Result res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_failure = "connection failed: " + httplib::to_string(res.error());
            continue;  // transport errors are retryable
        }
        if (res->status == 429 || res->status >= 500) {
            last_failure = "status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("judge endpoint returned status " + std::to_string(res->status) +
                                 ": " + res->body);
        }
        try {
            nlohmann::json reply = nlohmann::json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw TransportError("judge endpoint unreachable after " +
                         std::to_string(impl_->config.max_retries + 1) + " attempts (" +
                         last_failure + ")");
}

AuditedJudge::AuditedJudge(std::shared_ptr<ChainJudge> inner, std::shared_ptr<AuditLog> audit,
                           std::string template_hash)
    : inner_(std::move(inner)), audit_(std::move(audit)), template_hash_(std::move(template_hash)) {}

std::string AuditedJudge::complete(const std::string& prompt) {
    std::string reply = inner_->complete(prompt);
    if (audit_) audit_->record(template_hash_, prompt, reply);
    return reply;
}

std::string render_entailment_prompt(const std::string& prompt_template,
                                     const EntailmentQuery& query) {
    std::string premises;
    if (query.premises.empty()) {
        premises = "(none)";
    } else {
        for (std::size_t i = 0; i < query.premises.size(); ++i) {
            premises += std::to_string(i + 1) + ". " + query.premises[i];
            if (i + 1 < query.premises.size()) premises += '\n';
        }
    }
    auto substitute = [](std::string text, const std::string& key, const std::string& value) {
        std::size_t pos = 0;
        while ((pos = text.find(key, pos)) != std::string::npos) {
            text.replace(pos, key.size(), value);
            pos += value.size();
        }
        return text;
    };
    std::string out = substitute(prompt_template, "{{premises}}", premises);
    return substitute(out, "{{hypothesis}}", query.hypothesis);
}

double parse_binary_verdict(const std::string& reply) {
    const std::string lower = lowercase(reply);
    std::size_t yes = find_word(lower, "yes");
    std::size_t no = find_word(lower, "no");
    if (yes == std::string::npos && no == std::string::npos) {
        throw UnparseableResponse("no yes/no verdict in reply: \"" + reply + "\"");
    }
    return yes < no ? 1.0 : 0.0;
}

EntailmentScore parse_likert_reply(const std::string& reply) {
    // Longest labels first so a containing label wins at equal positions.
    static const char* kLabels[] = {"somewhat unlikely", "somewhat likely", "very unlikely",
                                    "very likely",       "unlikely",        "likely",
                                    "neutral"};
    const std::string lower = lowercase(reply);
    std::size_t best_pos = std::string::npos;
    const char* best_label = nullptr;
    for (const char* label : kLabels) {
        std::size_t pos = find_word(lower, label);
        if (pos < best_pos) {
            best_pos = pos;
            best_label = label;
        }
    }
    if (!best_label) {
        throw UnparseableResponse("no seven-point label in reply: \"" + reply + "\"");
    }
    return likert_to_score(best_label);
}

LlmEntailmentModel::LlmEntailmentModel(std::shared_ptr<ChainJudge> judge, ScoreMode mode,
                                       std::string prompt_template,
                                       std::shared_ptr<AuditLog> audit)
    : judge_(std::move(judge)),
      mode_(mode),
      template_(std::move(prompt_template)),
      template_hash_(key_hash(template_)),
      audit_(std::move(audit)) {
    if (mode_ == ScoreMode::oracle) {
        throw DomainError("LLM entailment supports binary or likert7 mode only");
    }
}

EntailmentScore LlmEntailmentModel::score(const EntailmentQuery& query) {
    std::string prompt = render_entailment_prompt(template_, query);
    std::string reply = judge_->complete(prompt);
    if (audit_) audit_->record(template_hash_, prompt, reply);
    if (mode_ == ScoreMode::binary) {
        return {parse_binary_verdict(reply), ScoreMode::binary};
    }
    return parse_likert_reply(reply);
}

}  // namespace ares
