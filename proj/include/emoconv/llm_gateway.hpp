#pragma once

// Provider-agnostic chat completion with retries, bounded parallelism and an
// append-only audit log.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace emoconv {

struct SamplingConfig {
    double temperature = 0.6;
    double top_p = 0.9;
    int max_rounds = 5;

    void validate() const;
};

struct LlmRequest {
    std::string model;
    std::string system_prompt;
    std::string user_prompt;
    SamplingConfig sampling;
    // Forwarded to providers that support seeded sampling; the mock provider
    // can match on it, which keeps repeated runs of one prompt distinguishable.
    std::optional<int> seed;
    std::string tag;  // free-form label for the audit log ("judge", "reask", ...)
};

struct LlmResponse {
    std::string text;
    std::chrono::milliseconds latency{0};
    int attempts = 1;
    nlohmann::json provider_meta = nlohmann::json::object();
};

// What a provider returns for a single attempt. status 200 is success; 0 means
// the request never reached the server.
struct ProviderReply {
    int status = 200;
    std::string text;
    std::string error;
    nlohmann::json meta = nlohmann::json::object();
};

class Provider {
public:
    virtual ~Provider() = default;
    virtual std::string name() const = 0;
    // Must be safe to call concurrently.
    virtual ProviderReply send(const LlmRequest& request) = 0;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::chrono::milliseconds base_delay{500};
    double multiplier = 2.0;
};

bool is_retryable(int status);

class AuditLog {
public:
    explicit AuditLog(const std::filesystem::path& path);
    void append(const nlohmann::json& entry);

private:
    std::mutex mu_;
    std::ofstream out_;
};

// Outcome of one request inside a batch.
struct CallResult {
    std::optional<LlmResponse> response;
    std::string error;

    bool ok() const { return response.has_value(); }
};

class Gateway {
public:
    Gateway(std::shared_ptr<Provider> provider, RetryPolicy policy = {}, std::shared_ptr<AuditLog> audit = nullptr);

    // Throws TransportError when retries are exhausted or the failure is permanent.
    LlmResponse complete(const LlmRequest& request) const;

    // Results in request order; at most `parallelism` calls in flight.
    std::vector<CallResult> complete_many(const std::vector<LlmRequest>& requests, int parallelism) const;

    const Provider& provider() const { return *provider_; }
    const RetryPolicy& policy() const { return policy_; }

private:
    std::shared_ptr<Provider> provider_;
    RetryPolicy policy_;
    std::shared_ptr<AuditLog> audit_;
};

// ---------------------------------------------------------------------------
// Providers

// Replays a transcript of scripted responses. Each rule filters on model,
// prompt substrings and seed; the first rule whose filters match serves its
// next response. Once a rule's list is used up it keeps returning the last one.
//
// Transcript format (JSON-lines, or a single JSON array):
//   {"user_contains": "...", "system_contains": "...", "model": "...", "seed": 3,
//    "responses": ["Label: 1", {"status": 429}, {"text": "..."}]}
class MockProvider : public Provider {
public:
    struct Step {
        int status = 200;
        std::string text;
    };
    struct Rule {
        std::optional<std::string> model;
        std::optional<std::string> system_contains;
        std::optional<std::string> user_contains;
        std::optional<int> seed;
        std::vector<Step> steps;
    };

    MockProvider() = default;
    explicit MockProvider(std::vector<Rule> rules);
    static std::shared_ptr<MockProvider> from_transcript(const std::filesystem::path& path);
    static std::vector<Rule> parse_transcript(std::string_view content);

    void add_rule(Rule rule);
    // Convenience: a rule matching on a user-prompt substring.
    void script(std::string user_contains, std::vector<std::string> texts);

    std::string name() const override { return "mock"; }
    ProviderReply send(const LlmRequest& request) override;

    std::size_t calls() const;

private:
    struct Slot {
        Rule rule;
        std::size_t next = 0;
    };
    mutable std::mutex mu_;
    std::vector<Slot> slots_;
    std::size_t calls_ = 0;
};

// OpenAI-compatible /chat/completions endpoint.
class OpenAiProvider : public Provider {
public:
    OpenAiProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout = std::chrono::seconds(120));
    std::string name() const override { return "openai"; }
    ProviderReply send(const LlmRequest& request) override;

    static nlohmann::json request_body(const LlmRequest& request);

private:
    std::string scheme_host_port_;
    std::string base_path_;
    std::string api_key_;
    std::chrono::seconds timeout_;
};

// Provider config file (JSON):
//   {"provider": "openai"|"mock", "endpoint": "...", "model": "...",
//    "credential_env": "OPENAI_API_KEY", "transcript": "mock.jsonl",
//    "max_attempts": 3, "backoff_ms": 500, "parallelism": 4}
struct ProviderConfig {
    std::string provider;
    std::string endpoint;
    std::string model;
    std::string credential_env;
    std::filesystem::path transcript;
    RetryPolicy retry;
    int parallelism = 4;

    static ProviderConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
    static ProviderConfig load(const std::filesystem::path& path);
};

// Resolves the credential from the environment and builds the gateway.
// Throws ConfigError when the credential variable is named but unset.
Gateway make_gateway(const ProviderConfig& config, const std::optional<std::filesystem::path>& audit_path = std::nullopt);

std::string utc_timestamp();

}  // namespace emoconv
