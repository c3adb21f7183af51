// OpenAI-compatible HTTP provider. Kept in its own translation unit so only
// this file and the annotation server pay for httplib.

#include "httplib.h"

#include "emoconv/error.hpp"
#include "emoconv/llm_gateway.hpp"

namespace emoconv {

using nlohmann::json;

OpenAiProvider::OpenAiProvider(std::string endpoint, std::string api_key, std::chrono::seconds timeout)
    : api_key_(std::move(api_key)), timeout_(timeout) {
    const auto scheme_end = endpoint.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint must include a scheme: " + endpoint);
    const auto path_start = endpoint.find('/', scheme_end + 3);
    scheme_host_port_ = endpoint.substr(0, path_start);
    base_path_ = path_start == std::string::npos ? "" : endpoint.substr(path_start);
    while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (endpoint.rfind("https://", 0) == 0) throw ConfigError("built without TLS support; cannot use " + endpoint);
#endif
}

json OpenAiProvider::request_body(const LlmRequest& request) {
    json messages = json::array();
    if (!request.system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", request.system_prompt}});
    messages.push_back({{"role", "user"}, {"content", request.user_prompt}});
    json body = {{"model", request.model},
                 {"messages", messages},
                 {"temperature", request.sampling.temperature},
                 {"top_p", request.sampling.top_p}};
    if (request.seed) body["seed"] = *request.seed;
    return body;
}

ProviderReply OpenAiProvider::send(const LlmRequest& request) {
    httplib::Client client(scheme_host_port_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    client.set_bearer_token_auth(api_key_);

    auto res = client.Post(base_path_ + "/chat/completions", request_body(request).dump(), "application/json");
    if (!res) return ProviderReply{0, "", "transport: " + httplib::to_string(res.error()), json::object()};
    if (res->status != 200) return ProviderReply{res->status, "", res->body, json::object()};
    try {
        const json j = json::parse(res->body);
        ProviderReply reply;
        reply.text = j.at("choices").at(0).at("message").at("content").get<std::string>();
        if (j.contains("usage")) reply.meta["usage"] = j.at("usage");
        if (j.contains("model")) reply.meta["model"] = j.at("model");
        return reply;
    } catch (const json::exception& e) {
        // Malformed body from the server: treat like a server fault so it is retried.
        return ProviderReply{502, "", std::string("unexpected response body: ") + e.what(), json::object()};
    }
}

}  // namespace emoconv
