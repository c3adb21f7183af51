#include "emoconv/judgments.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

std::string to_string(Ranking r) {
    switch (r) {
        case Ranking::LeftMore: return "LeftMore";
        case Ranking::Equal: return "Equal";
        case Ranking::RightMore: return "RightMore";
    }
    return "?";
}

Ranking parse_ranking(std::string_view s) {
    if (s == "LeftMore") return Ranking::LeftMore;
    if (s == "Equal") return Ranking::Equal;
    if (s == "RightMore") return Ranking::RightMore;
    throw ValidationError("unknown ranking '" + std::string(s) + "'");
}

std::string to_string(Question q) {
    switch (q) {
        case Question::CONV: return "CONV";
        case Question::EMO: return "EMO";
        case Question::SIM: return "SIM";
        case Question::LIKERT_CONV: return "LIKERT_CONV";
    }
    return "?";
}

Question parse_question(std::string_view s) {
    if (s == "CONV") return Question::CONV;
    if (s == "EMO") return Question::EMO;
    if (s == "SIM") return Question::SIM;
    if (s == "LIKERT_CONV") return Question::LIKERT_CONV;
    throw ValidationError("unknown question '" + std::string(s) + "'");
}

std::string to_string(JudgeKind k) { return k == JudgeKind::human ? "human" : "llm_run"; }

JudgeKind parse_judge_kind(std::string_view s) {
    if (s == "human") return JudgeKind::human;
    if (s == "llm_run") return JudgeKind::llm_run;
    throw ValidationError("unknown judge kind '" + std::string(s) + "'");
}

std::string to_string(ScreeningOutcome o) { return o == ScreeningOutcome::accepted ? "accepted" : "rejected"; }

ScreeningOutcome parse_screening_outcome(std::string_view s) {
    if (s == "accepted") return ScreeningOutcome::accepted;
    if (s == "rejected") return ScreeningOutcome::rejected;
    throw ValidationError("unknown screening outcome '" + std::string(s) + "'");
}

void validate(const JudgmentRecord& r) {
    if (r.judge_id.empty()) throw ValidationError("judgment without judge_id");
    if (r.pair_id.empty()) throw ValidationError("judgment without pair_id");
    if (r.batch_id.empty()) throw ValidationError("judgment without batch_id");
    if (is_pairwise(r.question)) {
        if (!std::holds_alternative<Ranking>(r.value))
            throw ValidationError(to_string(r.question) + " judgment needs a ranking value");
    } else {
        const int* v = std::get_if<int>(&r.value);
        if (v == nullptr || *v < 1 || *v > 5)
            throw ValidationError(to_string(r.question) + " judgment needs an integer value in 1-5");
    }
}

json to_json(const JudgmentRecord& r) {
    json j = {{"judge_id", r.judge_id},   {"judge_kind", to_string(r.judge_kind)},
              {"pair_id", r.pair_id},     {"question", to_string(r.question)},
              {"batch_id", r.batch_id},   {"timestamp", r.timestamp}};
    if (const auto* rk = std::get_if<Ranking>(&r.value)) j["value"] = to_string(*rk);
    else j["value"] = std::get<int>(r.value);
    return j;
}

JudgmentRecord judgment_from_json(const json& j, std::size_t line) {
    JudgmentRecord r;
    try {
        r.judge_id = j.at("judge_id").get<std::string>();
        r.judge_kind = parse_judge_kind(j.value("judge_kind", std::string("human")));
        r.pair_id = j.at("pair_id").get<std::string>();
        r.question = parse_question(j.at("question").get<std::string>());
        r.batch_id = j.at("batch_id").get<std::string>();
        r.timestamp = j.value("timestamp", std::string());
        const json& v = j.at("value");
        if (v.is_string()) r.value = parse_ranking(v.get<std::string>());
        else if (v.is_number_integer()) r.value = v.get<int>();
        else throw ValidationError("judgment value must be a ranking name or an integer");
        validate(r);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad judgment record: ") + e.what(), line);
    } catch (const ValidationError& e) {
        if (line == 0 || e.line != 0) throw;
        throw ValidationError(e.what(), line);
    }
    return r;
}

std::vector<JudgmentRecord> parse_judgments(std::string_view jsonl) {
    std::vector<JudgmentRecord> out;
    std::istringstream in{std::string(jsonl)};
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            throw ValidationError(std::string("malformed JSON: ") + e.what(), n);
        }
        out.push_back(judgment_from_json(j, n));
    }
    return out;
}

std::vector<JudgmentRecord> load_judgments(const std::filesystem::path& path) { return parse_judgments(read_file(path)); }

std::string judgments_to_csv(const std::vector<JudgmentRecord>& records) {
    const auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"\n") == std::string::npos) return s;
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += '"';
            q += c;
        }
        return q + "\"";
    };
    std::string out = "judge_id,pair_id,question,value\n";
    for (const auto& r : records) {
        const std::string value = std::holds_alternative<Ranking>(r.value) ? to_string(std::get<Ranking>(r.value))
                                                                           : std::to_string(std::get<int>(r.value));
        out += quote(r.judge_id) + "," + quote(r.pair_id) + "," + to_string(r.question) + "," + value + "\n";
    }
    return out;
}

ScreeningOutcome screen_submission(const Submission& s, const ScreeningPolicy& policy) {
    if (s.attention_answers.empty()) throw PreconditionError("submission has no attention answers");
    if (s.attention_answers.size() != policy.checks)
        throw PreconditionError("submission has " + std::to_string(s.attention_answers.size()) +
                                " attention answers, expected " + std::to_string(policy.checks));
    const auto failed = static_cast<std::size_t>(
        std::count_if(s.attention_answers.begin(), s.attention_answers.end(), [](const auto& a) { return !a.passed; }));
    return failed >= policy.reject_at_failures ? ScreeningOutcome::rejected : ScreeningOutcome::accepted;
}

std::optional<Ranking> strict_majority(std::span<const Ranking> votes) {
    std::array<std::size_t, 3> counts{};
    for (Ranking v : votes) ++counts[static_cast<std::size_t>(v)];
    for (Ranking r : kAllRankings)
        if (2 * counts[static_cast<std::size_t>(r)] > votes.size()) return r;
    return std::nullopt;
}

Ranking majority_vote(std::span<const Ranking> votes) {
    if (votes.empty()) throw PreconditionError("majority_vote over no votes");
    return strict_majority(votes).value_or(Ranking::Equal);
}

SimilaritySummary aggregate_similarity(const std::vector<JudgmentRecord>& records) {
    if (records.empty()) throw PreconditionError("aggregate_similarity over no records");
    std::map<std::string, std::pair<long, long>> sums;  // pair -> (sum, count)
    for (const auto& r : records) {
        if (r.question != Question::SIM) throw PreconditionError("aggregate_similarity needs SIM records only");
        validate(r);
        auto& [sum, count] = sums[r.pair_id];
        sum += std::get<int>(r.value);
        ++count;
    }
    SimilaritySummary out;
    for (const auto& [pair, sc] : sums) {
        const double mean = static_cast<double>(sc.first) / static_cast<double>(sc.second);
        out.per_pair[pair] = mean;
        out.grand_mean += mean;
    }
    out.grand_mean /= static_cast<double>(out.per_pair.size());
    return out;
}

json to_json(const SubmissionDecision& d) {
    json answers = json::array();
    for (const auto& a : d.attention_answers) answers.push_back({{"check_id", a.check_id}, {"passed", a.passed}});
    return {{"judge_id", d.judge_id},
            {"batch_id", d.batch_id},
            {"outcome", to_string(d.outcome)},
            {"attention_answers", answers},
            {"timestamp", d.timestamp}};
}

SubmissionDecision decision_from_json(const json& j) {
    SubmissionDecision d;
    try {
        d.judge_id = j.at("judge_id").get<std::string>();
        d.batch_id = j.at("batch_id").get<std::string>();
        d.outcome = parse_screening_outcome(j.at("outcome").get<std::string>());
        d.timestamp = j.value("timestamp", std::string());
        if (j.contains("attention_answers"))
            for (const auto& a : j.at("attention_answers"))
                d.attention_answers.push_back({a.at("check_id").get<std::string>(), a.at("passed").get<bool>()});
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad submission decision: ") + e.what());
    }
    return d;
}

std::vector<SubmissionDecision> load_decisions(const std::filesystem::path& path) {
    std::vector<SubmissionDecision> out;
    std::size_t n = 0;
    for (const auto& line : read_lines(path)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            out.push_back(decision_from_json(json::parse(line)));
        } catch (const json::exception& e) {
            throw ValidationError(std::string("malformed JSON: ") + e.what(), n);
        } catch (const ValidationError& e) {
            throw ValidationError(e.what(), n);
        }
    }
    return out;
}

std::vector<JudgmentRecord> accepted_records(const std::vector<JudgmentRecord>& records,
                                             const std::vector<SubmissionDecision>& decisions,
                                             bool require_finalized) {
    std::map<std::pair<std::string, std::string>, ScreeningOutcome> outcome;
    for (const auto& d : decisions) outcome[{d.judge_id, d.batch_id}] = d.outcome;
    std::vector<JudgmentRecord> out;
    for (const auto& r : records) {
        if (r.judge_kind == JudgeKind::llm_run) {
            out.push_back(r);
            continue;
        }
        auto it = outcome.find({r.judge_id, r.batch_id});
        if (it == outcome.end() ? !require_finalized : it->second == ScreeningOutcome::accepted) out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JudgmentStore

bool valid_batch_id(std::string_view id) {
    if (id.empty() || id == "." || id == "..") return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    });
}

std::filesystem::path JudgmentStore::judgments_file(const std::filesystem::path& dir, const std::string& batch_id) {
    return dir / ("judgments-" + batch_id + ".jsonl");
}

std::filesystem::path JudgmentStore::decisions_file(const std::filesystem::path& dir, const std::string& batch_id) {
    return dir / ("submissions-" + batch_id + ".jsonl");
}

JudgmentStore::JudgmentStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("judgments-", 0) == 0 && entry.path().extension() == ".jsonl") {
            for (auto& r : load_judgments(entry.path())) {
                BatchState& st = state(r.batch_id);
                st.keys.insert({r.judge_id, r.pair_id, r.question});
                st.records.push_back(std::move(r));
            }
        } else if (name.rfind("submissions-", 0) == 0 && entry.path().extension() == ".jsonl") {
            for (auto& d : load_decisions(entry.path())) state(d.batch_id).decisions[d.judge_id] = d;
        }
    }
}

JudgmentStore::BatchState& JudgmentStore::state(const std::string& batch_id) {
    std::lock_guard lock(map_mu_);
    auto& slot = batches_[batch_id];
    if (!slot) slot = std::make_unique<BatchState>();
    return *slot;
}

const JudgmentStore::BatchState* JudgmentStore::find_state(const std::string& batch_id) const {
    std::lock_guard lock(map_mu_);
    auto it = batches_.find(batch_id);
    return it == batches_.end() ? nullptr : it->second.get();
}

JudgmentStore::AppendStatus JudgmentStore::append(const JudgmentRecord& record) {
    validate(record);
    if (!valid_batch_id(record.batch_id)) throw ValidationError("invalid batch id '" + record.batch_id + "'");
    BatchState& st = state(record.batch_id);
    std::lock_guard lock(st.mu);
    if (!st.keys.insert({record.judge_id, record.pair_id, record.question}).second) return AppendStatus::duplicate;
    std::ofstream out(judgments_file(dir_, record.batch_id), std::ios::app);
    if (!out) throw Error("cannot append to judgment store in " + dir_.string());
    out << to_json(record).dump() << '\n';
    st.records.push_back(record);
    return AppendStatus::stored;
}

bool JudgmentStore::finalize(const SubmissionDecision& decision) {
    if (!valid_batch_id(decision.batch_id)) throw ValidationError("invalid batch id '" + decision.batch_id + "'");
    BatchState& st = state(decision.batch_id);
    std::lock_guard lock(st.mu);
    if (st.decisions.count(decision.judge_id)) return false;
    std::ofstream out(decisions_file(dir_, decision.batch_id), std::ios::app);
    if (!out) throw Error("cannot append to submission log in " + dir_.string());
    out << to_json(decision).dump() << '\n';
    st.decisions[decision.judge_id] = decision;
    return true;
}

std::vector<JudgmentRecord> JudgmentStore::records(const std::string& batch_id) const {
    const BatchState* st = find_state(batch_id);
    if (st == nullptr) return {};
    std::lock_guard lock(st->mu);
    return st->records;
}

std::vector<SubmissionDecision> JudgmentStore::decisions(const std::string& batch_id) const {
    const BatchState* st = find_state(batch_id);
    if (st == nullptr) return {};
    std::lock_guard lock(st->mu);
    std::vector<SubmissionDecision> out;
    for (const auto& [judge, d] : st->decisions) out.push_back(d);
    return out;
}

std::optional<SubmissionDecision> JudgmentStore::decision(const std::string& batch_id,
                                                          const std::string& judge_id) const {
    const BatchState* st = find_state(batch_id);
    if (st == nullptr) return std::nullopt;
    std::lock_guard lock(st->mu);
    auto it = st->decisions.find(judge_id);
    if (it == st->decisions.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> JudgmentStore::batch_ids() const {
    std::lock_guard lock(map_mu_);
    std::vector<std::string> out;
    for (const auto& [id, st] : batches_) out.push_back(id);
    return out;
}

std::vector<JudgmentRecord> JudgmentStore::accepted() const {
    std::vector<JudgmentRecord> all;
    std::vector<SubmissionDecision> decided;
    for (const auto& id : batch_ids()) {
        auto r = records(id);
        all.insert(all.end(), r.begin(), r.end());
        auto d = decisions(id);
        decided.insert(decided.end(), d.begin(), d.end());
    }
    return accepted_records(all, decided, true);
}

}  // namespace emoconv
