#pragma once

// Annotation service: serves batch items to human judges, records their
// answers and screens finalized submissions. Handlers are plain functions of
// (path parameters, JSON body) so they can be tested without a socket.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "emoconv/batches.hpp"
#include "emoconv/corpus.hpp"
#include "emoconv/judgments.hpp"
#include "json.hpp"

namespace emoconv {

struct ServiceResponse {
    int status = 200;
    nlohmann::json body = nlohmann::json::object();
};

struct BatchProgress {
    std::string batch_id;
    std::size_t required = 0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    bool complete = false;  // accepted >= required
};

struct CampaignState {
    std::vector<BatchProgress> batches;
    bool complete() const;
};

nlohmann::json to_json(const CampaignState& s);
CampaignState campaign_state(const std::vector<Batch>& batches, const JudgmentStore& store);

// Opaque item token: 16 hex digits of FNV-1a over "<batch>/<pair id>".
std::string item_token(const std::string& batch_id, const std::string& pair_id);

// The questions asked for every served item.
inline constexpr std::array<Question, 2> kServedQuestions = {Question::CONV, Question::EMO};

class AnnotationService {
public:
    AnnotationService(std::vector<Batch> batches, const std::vector<TestInstance>& instances, JudgmentStore& store,
                      ScreeningPolicy policy = {});

    // GET /batches/{id}/next?judge=J
    ServiceResponse next(const std::string& batch_id, const std::string& judge_id) const;
    // POST /judgments
    ServiceResponse post_judgment(const nlohmann::json& body);
    // GET /progress/{batch}
    ServiceResponse progress(const std::string& batch_id) const;
    // POST /submissions/{batch}/finalize with {"judge_id": ...}
    ServiceResponse finalize(const std::string& batch_id, const nlohmann::json& body);
    // GET /campaign
    ServiceResponse campaign() const;

    const std::vector<Batch>& batches() const { return batches_; }

private:
    struct Served {
        const Batch* batch = nullptr;
        const BatchItem* item = nullptr;
        std::string topic;
        std::string left;
        std::string right;
    };
    const Batch* find_batch(const std::string& id) const;
    nlohmann::json item_payload(const Served& s, std::size_t position) const;
    // Items (in order) for which the judge has not answered every served question.
    std::vector<const Served*> unanswered(const std::string& batch_id, const std::string& judge_id) const;

    std::vector<Batch> batches_;
    JudgmentStore& store_;
    ScreeningPolicy policy_;
    std::map<std::string, std::vector<Served>> served_;              // batch -> items in order
    std::map<std::pair<std::string, std::string>, const Served*> by_token_;  // (batch, token)
};

// Binds the service to HTTP. Every response carries permissive CORS headers
// so a browser client on another origin can call it.
class HttpServer {
public:
    explicit HttpServer(AnnotationService& service, std::string static_dir = {});
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    // Returns the bound port, or -1 on failure. Port 0 picks a free port.
    int bind(const std::string& host, int port);
    // Blocks until stop() is called.
    bool listen_after_bind();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace emoconv
