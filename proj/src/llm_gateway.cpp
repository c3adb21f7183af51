#include "emoconv/llm_gateway.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <ctime>
#include <thread>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

void SamplingConfig::validate() const {
    if (!(temperature >= 0.0)) throw PreconditionError("temperature must be >= 0");
    if (!(top_p > 0.0 && top_p <= 1.0)) throw PreconditionError("top_p must be in (0, 1]");
    if (max_rounds < 1) throw PreconditionError("max_rounds must be >= 1");
}

bool is_retryable(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

AuditLog::AuditLog(const std::filesystem::path& path) : out_(path, std::ios::app) {
    if (!out_) throw ConfigError("cannot open audit log " + path.string());
}

void AuditLog::append(const json& entry) {
    std::lock_guard lock(mu_);
    out_ << entry.dump() << '\n';
    out_.flush();
}

Gateway::Gateway(std::shared_ptr<Provider> provider, RetryPolicy policy, std::shared_ptr<AuditLog> audit)
    : provider_(std::move(provider)), policy_(policy), audit_(std::move(audit)) {
    if (!provider_) throw ConfigError("gateway needs a provider");
    if (policy_.max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
}

LlmResponse Gateway::complete(const LlmRequest& request) const {
    request.sampling.validate();
    auto delay = policy_.base_delay;
    ProviderReply reply;
    for (int attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
        const auto start = std::chrono::steady_clock::now();
        reply = provider_->send(request);
        const auto latency =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

        if (audit_) {
            json entry = {{"ts", utc_timestamp()},       {"provider", provider_->name()},
                          {"model", request.model},      {"tag", request.tag},
                          {"attempt", attempt},          {"system", request.system_prompt},
                          {"user", request.user_prompt}, {"temperature", request.sampling.temperature},
                          {"top_p", request.sampling.top_p}, {"status", reply.status},
                          {"raw", reply.text},           {"latency_ms", latency.count()}};
            entry["seed"] = request.seed ? json(*request.seed) : json(nullptr);
            if (!reply.error.empty()) entry["error"] = reply.error;
            audit_->append(entry);
        }

        if (reply.status == 200) return LlmResponse{reply.text, latency, attempt, reply.meta};
        if (!is_retryable(reply.status)) break;
        if (attempt < policy_.max_attempts && delay.count() > 0) {
            std::this_thread::sleep_for(delay);
            delay = std::chrono::milliseconds(static_cast<long long>(std::llround(delay.count() * policy_.multiplier)));
        }
    }
    std::string msg = provider_->name() + " request failed with status " + std::to_string(reply.status);
    if (!reply.error.empty()) msg += ": " + reply.error;
    throw TransportError(msg, reply.status);
}

std::vector<CallResult> Gateway::complete_many(const std::vector<LlmRequest>& requests, int parallelism) const {
    if (parallelism < 1) throw PreconditionError("parallelism must be >= 1");
    std::vector<CallResult> results(requests.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (std::size_t i = next++; i < requests.size(); i = next++) {
            try {
                results[i].response = complete(requests[i]);
            } catch (const std::exception& e) {
                results[i].error = e.what();
            }
        }
    };
    const std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), requests.size());
    std::vector<std::thread> threads;
    for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
    if (n_threads > 0) worker();
    for (auto& t : threads) t.join();
    return results;
}

// ---------------------------------------------------------------------------
// MockProvider

MockProvider::MockProvider(std::vector<Rule> rules) {
    for (auto& r : rules) add_rule(std::move(r));
}

void MockProvider::add_rule(Rule rule) {
    if (rule.steps.empty()) throw ConfigError("mock rule without responses");
    std::lock_guard lock(mu_);
    slots_.push_back({std::move(rule), 0});
}

void MockProvider::script(std::string user_contains, std::vector<std::string> texts) {
    Rule rule;
    rule.user_contains = std::move(user_contains);
    for (auto& t : texts) rule.steps.push_back({200, std::move(t)});
    add_rule(std::move(rule));
}

std::vector<MockProvider::Rule> MockProvider::parse_transcript(std::string_view content) {
    std::vector<json> entries;
    const std::string text(content);
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '[') {
        for (auto& e : json::parse(text)) entries.push_back(e);
    } else {
        std::size_t pos = 0;
        while (pos < text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(pos, end - pos);
            pos = end + 1;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            entries.push_back(json::parse(line));
        }
    }

    std::vector<Rule> rules;
    for (const auto& e : entries) {
        Rule r;
        if (e.contains("model")) r.model = e.at("model").get<std::string>();
        if (e.contains("system_contains")) r.system_contains = e.at("system_contains").get<std::string>();
        if (e.contains("user_contains")) r.user_contains = e.at("user_contains").get<std::string>();
        if (e.contains("seed")) r.seed = e.at("seed").get<int>();
        for (const auto& s : e.at("responses")) {
            if (s.is_string()) {
                r.steps.push_back({200, s.get<std::string>()});
            } else {
                r.steps.push_back({s.value("status", 200), s.value("text", std::string())});
            }
        }
        if (r.steps.empty()) throw ConfigError("mock transcript rule without responses");
        rules.push_back(std::move(r));
    }
    return rules;
}

std::shared_ptr<MockProvider> MockProvider::from_transcript(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open mock transcript " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    try {
        return std::make_shared<MockProvider>(parse_transcript(content));
    } catch (const json::exception& e) {
        throw ConfigError("bad mock transcript " + path.string() + ": " + e.what());
    }
}

ProviderReply MockProvider::send(const LlmRequest& request) {
    std::lock_guard lock(mu_);
    ++calls_;
    for (auto& slot : slots_) {
        const Rule& r = slot.rule;
        if (r.model && *r.model != request.model) continue;
        if (r.seed && (!request.seed || *r.seed != *request.seed)) continue;
        if (r.system_contains && request.system_prompt.find(*r.system_contains) == std::string::npos) continue;
        if (r.user_contains && request.user_prompt.find(*r.user_contains) == std::string::npos) continue;
        const Step& step = r.steps[std::min(slot.next, r.steps.size() - 1)];
        ++slot.next;
        ProviderReply reply;
        reply.status = step.status;
        reply.text = step.text;
        if (step.status != 200) reply.error = "scripted failure";
        return reply;
    }
    return ProviderReply{404, "", "no scripted response matches the request", json::object()};
}

std::size_t MockProvider::calls() const {
    std::lock_guard lock(mu_);
    return calls_;
}

// ---------------------------------------------------------------------------
// Config

ProviderConfig ProviderConfig::from_json(const json& j, const std::filesystem::path& base_dir) {
    ProviderConfig c;
    try {
        c.provider = j.at("provider").get<std::string>();
        c.endpoint = j.value("endpoint", std::string());
        c.model = j.value("model", std::string());
        c.credential_env = j.value("credential_env", std::string());
        if (j.contains("transcript")) {
            c.transcript = j.at("transcript").get<std::string>();
            if (c.transcript.is_relative() && !base_dir.empty()) c.transcript = base_dir / c.transcript;
        }
        c.retry.max_attempts = j.value("max_attempts", 3);
        c.retry.base_delay = std::chrono::milliseconds(j.value("backoff_ms", 500));
        c.parallelism = j.value("parallelism", 4);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad provider config: ") + e.what());
    }
    if (c.provider != "openai" && c.provider != "mock") throw ConfigError("unknown provider '" + c.provider + "'");
    if (c.provider == "openai" && c.endpoint.empty()) throw ConfigError("provider config needs an endpoint");
    if (c.provider == "openai" && c.credential_env.empty()) throw ConfigError("provider config needs credential_env");
    if (c.provider == "mock" && c.transcript.empty()) throw ConfigError("mock provider needs a transcript");
    if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    return c;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open provider config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("provider config " + path.string() + " is not valid JSON: " + e.what());
    }
    return from_json(j, path.parent_path());
}

Gateway make_gateway(const ProviderConfig& config, const std::optional<std::filesystem::path>& audit_path) {
    std::string credential;
    if (!config.credential_env.empty()) {
        const char* v = std::getenv(config.credential_env.c_str());
        if (v == nullptr || *v == '\0')
            throw ConfigError("credential environment variable " + config.credential_env + " is not set");
        credential = v;
    }
    std::shared_ptr<Provider> provider;
    if (config.provider == "mock") {
        provider = MockProvider::from_transcript(config.transcript);
    } else {
        provider = std::make_shared<OpenAiProvider>(config.endpoint, credential);
    }
    std::shared_ptr<AuditLog> audit;
    if (audit_path) audit = std::make_shared<AuditLog>(*audit_path);
    return Gateway(std::move(provider), config.retry, std::move(audit));
}

}  // namespace emoconv
