#include "emoconv/service.hpp"

#include <cstdio>
#include <set>

#include "emoconv/error.hpp"
#include "emoconv/llm_gateway.hpp"

namespace emoconv {

using nlohmann::json;

namespace {

ServiceResponse error_response(int status, const std::string& message) { return {status, {{"error", message}}}; }

}  // namespace

bool CampaignState::complete() const {
    for (const auto& b : batches)
        if (!b.complete) return false;
    return true;
}

json to_json(const CampaignState& s) {
    json batches = json::array();
    for (const auto& b : s.batches)
        batches.push_back({{"batch_id", b.batch_id},
                           {"required", b.required},
                           {"accepted", b.accepted},
                           {"rejected", b.rejected},
                           {"complete", b.complete}});
    return {{"batches", batches}, {"complete", s.complete()}};
}

CampaignState campaign_state(const std::vector<Batch>& batches, const JudgmentStore& store) {
    CampaignState s;
    for (const auto& b : batches) {
        BatchProgress p;
        p.batch_id = b.id;
        p.required = b.required_submissions;
        for (const auto& d : store.decisions(b.id))
            ++(d.outcome == ScreeningOutcome::accepted ? p.accepted : p.rejected);
        p.complete = p.accepted >= p.required;
        s.batches.push_back(p);
    }
    return s;
}

std::string item_token(const std::string& batch_id, const std::string& pair_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : batch_id + "/" + pair_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

AnnotationService::AnnotationService(std::vector<Batch> batches, const std::vector<TestInstance>& instances,
                                     JudgmentStore& store, ScreeningPolicy policy)
    : batches_(std::move(batches)), store_(store), policy_(policy) {
    validate(batches_);
    std::map<std::string, const TestInstance*> inst_by_id;
    for (const auto& inst : instances) inst_by_id[inst.id] = &inst;
    for (const auto& b : batches_) {
        if (b.attention_ids.size() != policy_.checks)
            throw ConfigError("batch " + b.id + " has " + std::to_string(b.attention_ids.size()) +
                              " attention checks, screening expects " + std::to_string(policy_.checks));
        auto& list = served_[b.id];
        for (const auto& item : b.items) {
            Served s;
            s.batch = &b;
            s.item = &item;
            if (item.is_attention) {
                s.topic = item.topic;
                s.left = item.left_text;
                s.right = item.right_text;
            } else {
                auto it = inst_by_id.find(item.instance_id);
                if (it == inst_by_id.end())
                    throw ConfigError("batch " + b.id + " references unknown instance " + item.instance_id);
                const TestInstance& inst = *it->second;
                const ArgumentPair* pair = nullptr;
                for (const auto& p : inst.pairs)
                    if (p.id == item.pair_id) pair = &p;
                if (!pair) throw ConfigError("instance " + inst.id + " has no pair " + item.pair_id);
                s.topic = inst.topic.description;
                s.left = inst.left_of(*pair).text;
                s.right = inst.right_of(*pair).text;
            }
            list.push_back(std::move(s));
        }
    }
    for (auto& [batch_id, list] : served_)
        for (const auto& s : list) by_token_[{batch_id, item_token(batch_id, s.item->pair_id)}] = &s;
}

const Batch* AnnotationService::find_batch(const std::string& id) const {
    for (const auto& b : batches_)
        if (b.id == id) return &b;
    return nullptr;
}

json AnnotationService::item_payload(const Served& s, std::size_t position) const {
    return {{"batch_id", s.batch->id},
            {"pair_id", item_token(s.batch->id, s.item->pair_id)},
            {"position", position},
            {"total", s.batch->items.size()},
            {"topic", s.topic},
            {"argument_1", s.left},
            {"argument_2", s.right},
            {"questions", json::array({"CONV", "EMO"})}};
}

std::vector<const AnnotationService::Served*> AnnotationService::unanswered(const std::string& batch_id,
                                                                           const std::string& judge_id) const {
    std::set<std::pair<std::string, Question>> answered;
    for (const auto& r : store_.records(batch_id))
        if (r.judge_id == judge_id) answered.insert({r.pair_id, r.question});
    std::vector<const Served*> out;
    for (const auto& s : served_.at(batch_id)) {
        for (Question q : kServedQuestions)
            if (!answered.count({s.item->pair_id, q})) {
                out.push_back(&s);
                break;
            }
    }
    return out;
}

ServiceResponse AnnotationService::next(const std::string& batch_id, const std::string& judge_id) const {
    const Batch* b = find_batch(batch_id);
    if (!b) return error_response(404, "unknown batch " + batch_id);
    if (judge_id.empty()) return error_response(422, "judge id required");
    if (auto d = store_.decision(batch_id, judge_id))
        return {200, {{"batch_id", batch_id}, {"done", true}, {"finalized", true}, {"outcome", to_string(d->outcome)}}};
    const auto open = unanswered(batch_id, judge_id);
    if (open.empty()) return {200, {{"batch_id", batch_id}, {"done", true}, {"finalized", false}, {"remaining", 0}}};
    const auto& list = served_.at(batch_id);
    const std::size_t position = static_cast<std::size_t>(open.front() - list.data()) + 1;
    json body = item_payload(*open.front(), position);
    body["done"] = false;
    body["remaining"] = open.size();
    return {200, body};
}

ServiceResponse AnnotationService::post_judgment(const json& body) {
    if (!body.is_object()) return error_response(422, "body must be a JSON object");
    const std::string batch_id = body.value("batch_id", std::string());
    const Batch* b = find_batch(batch_id);
    if (!b) return error_response(404, "unknown batch " + batch_id);
    const std::string judge_id = body.value("judge_id", std::string());
    if (judge_id.empty()) return error_response(422, "judge id required");
    const std::string token = body.value("pair_id", std::string());
    auto it = by_token_.find({batch_id, token});
    if (it == by_token_.end()) return error_response(422, "unknown item " + token + " in batch " + batch_id);
    if (store_.decision(batch_id, judge_id)) return error_response(409, "submission already finalized");

    JudgmentRecord record;
    try {
        json j = body;
        j["pair_id"] = it->second->item->pair_id;
        j["judge_kind"] = "human";
        j["timestamp"] = utc_timestamp();
        record = judgment_from_json(j);
        if (!is_pairwise(record.question)) throw ValidationError("only CONV and EMO are asked for batch items");
    } catch (const ValidationError& e) {
        return error_response(422, e.what());
    }
    if (store_.append(record) == JudgmentStore::AppendStatus::duplicate)
        return error_response(409, "duplicate judgment for (" + judge_id + ", " + token + ", " +
                                       to_string(record.question) + ")");
    return {201, {{"stored", true}, {"pair_id", token}, {"question", to_string(record.question)}}};
}

ServiceResponse AnnotationService::progress(const std::string& batch_id) const {
    const Batch* b = find_batch(batch_id);
    if (!b) return error_response(404, "unknown batch " + batch_id);
    std::map<std::string, std::size_t> answered;
    for (const auto& r : store_.records(batch_id)) ++answered[r.judge_id];
    json judges = json::object();
    for (const auto& [judge, n] : answered) {
        json j = {{"answered", n}, {"expected", b->items.size() * kServedQuestions.size()}};
        auto d = store_.decision(batch_id, judge);
        j["finalized"] = d.has_value();
        j["outcome"] = d ? json(to_string(d->outcome)) : json(nullptr);
        judges[judge] = j;
    }
    BatchProgress p = campaign_state({*b}, store_).batches.front();
    return {200,
            {{"batch_id", batch_id},
             {"items", b->items.size()},
             {"required", p.required},
             {"accepted", p.accepted},
             {"rejected", p.rejected},
             {"complete", p.complete},
             {"judgments", store_.records(batch_id).size()},
             {"judges", judges}}};
}

ServiceResponse AnnotationService::finalize(const std::string& batch_id, const json& body) {
    const Batch* b = find_batch(batch_id);
    if (!b) return error_response(404, "unknown batch " + batch_id);
    const std::string judge_id = body.is_object() ? body.value("judge_id", std::string()) : std::string();
    if (judge_id.empty()) return error_response(422, "judge id required");
    if (store_.decision(batch_id, judge_id)) return error_response(409, "submission already finalized");
    const auto open = unanswered(batch_id, judge_id);
    if (!open.empty())
        return {409, {{"error", "submission incomplete"}, {"remaining", open.size()}}};

    std::map<std::string, Ranking> conv;
    Submission sub;
    sub.judge_id = judge_id;
    sub.batch_id = batch_id;
    for (const auto& r : store_.records(batch_id)) {
        if (r.judge_id != judge_id) continue;
        if (r.question == Question::CONV) conv[r.pair_id] = std::get<Ranking>(r.value);
        sub.records.push_back(r);
    }
    std::size_t failed = 0;
    for (const auto& item : b->items) {
        if (!item.is_attention) continue;
        const bool passed = conv.at(item.pair_id) == *item.expected;
        failed += !passed;
        sub.attention_answers.push_back({item.pair_id, passed});
    }
    SubmissionDecision d;
    d.judge_id = judge_id;
    d.batch_id = batch_id;
    d.outcome = screen_submission(sub, policy_);
    d.attention_answers = sub.attention_answers;
    d.timestamp = utc_timestamp();
    if (!store_.finalize(d)) return error_response(409, "submission already finalized");
    return {200,
            {{"batch_id", batch_id},
             {"judge_id", judge_id},
             {"outcome", to_string(d.outcome)},
             {"failed_checks", failed},
             {"checks", sub.attention_answers.size()}}};
}

ServiceResponse AnnotationService::campaign() const { return {200, to_json(campaign_state(batches_, store_))}; }

}  // namespace emoconv
