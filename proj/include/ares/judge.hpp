#pragma once

// LLM-backed entailment over an OpenAI-compatible chat-completions endpoint:
// endpoint configuration from TOML, a retrying HTTP transport, prompt
// rendering, verdict parsing, and a JSONL audit trail of every exchange.

#include <memory>
#include <string>

#include "ares/baselines.hpp"
#include "ares/entailment.hpp"
#include "ares/tomlmini.hpp"

namespace ares {

struct JudgeEndpointConfig {
    std::string base_url;  // e.g. "http://127.0.0.1:8000/v1"
    std::string model;
    double temperature = 0.0;
    int max_retries = 3;
    double backoff_base_seconds = 1.0;
    double backoff_factor = 2.0;
    std::string api_key_env = "OPENAI_API_KEY";  // key read from env, never from config
    double timeout_seconds = 30.0;

    bool operator==(const JudgeEndpointConfig&) const = default;
};

// Reads the [judge] section. base_url and model are required; everything
// else falls back to the defaults above.
JudgeEndpointConfig judge_config_from_toml(const toml::Table& table);

// Thread-safe JSONL appender: one {"template_hash", "prompt", "reply"} line
// per recorded exchange.
class AuditLog {
  public:
    explicit AuditLog(const std::string& path);
    void record(const std::string& template_hash, const std::string& prompt,
                const std::string& reply);

  private:
    struct Impl;
    std::shared_ptr<Impl> impl_;
};

// POSTs {base_path}/chat/completions and returns the first choice's message
// content. Connection failures, 429, and 5xx are retried with exponential
// backoff up to max_retries; other failures and exhausted retries raise
// TransportError. Safe for concurrent use (one connection per call).
class HttpJudgeClient : public ChainJudge {
  public:
    explicit HttpJudgeClient(JudgeEndpointConfig config);
    ~HttpJudgeClient() override;
    std::string complete(const std::string& prompt) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Decorator that records every completion exchange in the audit log.
class AuditedJudge : public ChainJudge {
  public:
    AuditedJudge(std::shared_ptr<ChainJudge> inner, std::shared_ptr<AuditLog> audit,
                 std::string template_hash);
    std::string complete(const std::string& prompt) override;

  private:
    std::shared_ptr<ChainJudge> inner_;
    std::shared_ptr<AuditLog> audit_;
    std::string template_hash_;
};

// Substitutes {{premises}} (numbered list, one claim per line, "(none)" when
// empty) and {{hypothesis}} into a prompt template.
std::string render_entailment_prompt(const std::string& prompt_template,
                                     const EntailmentQuery& query);

// First standalone yes/no (case-insensitive, word-bounded) decides the
// verdict; a reply with neither raises UnparseableResponse.
double parse_binary_verdict(const std::string& reply);

// Earliest word-bounded seven-point label in the reply; longer labels win at
// the same position ("Very Unlikely" is not an "Unlikely" hit). None found
// raises UnparseableResponse.
EntailmentScore parse_likert_reply(const std::string& reply);

// Entailment model backed by any completion source. mode selects the binary
// or seven-point protocol (oracle mode is rejected); every exchange is
// recorded in the audit log, parseable or not, when one is supplied.
class LlmEntailmentModel : public EntailmentModel {
  public:
    LlmEntailmentModel(std::shared_ptr<ChainJudge> judge, ScoreMode mode,
                       std::string prompt_template, std::shared_ptr<AuditLog> audit = nullptr);
    EntailmentScore score(const EntailmentQuery& query) override;

  private:
    std::shared_ptr<ChainJudge> judge_;
    ScoreMode mode_;
    std::string template_;
    std::string template_hash_;
    std::shared_ptr<AuditLog> audit_;
};

}  // namespace ares
