#pragma once

// Human and LLM judgments, attention-check screening, majority voting and the
// append-only judgment store.

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

#include "emoconv/corpus.hpp"
#include "json.hpp"

namespace emoconv {

// Three-way pairwise judgment: which of (left, right) is more X.
enum class Ranking { LeftMore, Equal, RightMore };
inline constexpr std::array<Ranking, 3> kAllRankings = {Ranking::LeftMore, Ranking::Equal, Ranking::RightMore};

std::string to_string(Ranking r);
Ranking parse_ranking(std::string_view s);
// L <-> R, Equal fixed.
constexpr Ranking flip(Ranking r) {
    return r == Ranking::LeftMore ? Ranking::RightMore : r == Ranking::RightMore ? Ranking::LeftMore : Ranking::Equal;
}

// One ranking per pair kind of a test instance.
using InstanceVotes = std::map<PairKind, Ranking>;

enum class Question { CONV, EMO, SIM, LIKERT_CONV };
enum class JudgeKind { human, llm_run };

std::string to_string(Question q);
Question parse_question(std::string_view s);
std::string to_string(JudgeKind k);
JudgeKind parse_judge_kind(std::string_view s);
constexpr bool is_pairwise(Question q) { return q == Question::CONV || q == Question::EMO; }

using JudgmentValue = std::variant<Ranking, int>;

struct JudgmentRecord {
    std::string judge_id;
    JudgeKind judge_kind = JudgeKind::human;
    std::string pair_id;
    Question question = Question::CONV;
    JudgmentValue value = Ranking::Equal;
    std::string batch_id;
    std::string timestamp;  // UTC ISO-8601

    bool operator==(const JudgmentRecord&) const = default;
};

// Throws ValidationError when the value type does not match the question or ids are empty.
void validate(const JudgmentRecord& r);
nlohmann::json to_json(const JudgmentRecord& r);
JudgmentRecord judgment_from_json(const nlohmann::json& j, std::size_t line = 0);

std::vector<JudgmentRecord> parse_judgments(std::string_view jsonl);
std::vector<JudgmentRecord> load_judgments(const std::filesystem::path& path);
std::string judgments_to_csv(const std::vector<JudgmentRecord>& records);

struct AttentionAnswer {
    std::string check_id;
    bool passed = false;
};

struct Submission {
    std::string judge_id;
    std::string batch_id;
    std::vector<JudgmentRecord> records;
    std::vector<AttentionAnswer> attention_answers;
};

enum class ScreeningOutcome { accepted, rejected };
std::string to_string(ScreeningOutcome o);
ScreeningOutcome parse_screening_outcome(std::string_view s);

struct ScreeningPolicy {
    std::size_t checks = 3;              // attention checks injected per batch
    std::size_t reject_at_failures = 2;  // rejected once this many checks fail
};

ScreeningOutcome screen_submission(const Submission& s, const ScreeningPolicy& policy = {});

// Label held by more than half of the voters, if any.
std::optional<Ranking> strict_majority(std::span<const Ranking> votes);
// Strict majority, falling back to Equal. Throws PreconditionError on empty input.
Ranking majority_vote(std::span<const Ranking> votes);

struct SimilaritySummary {
    std::map<std::string, double> per_pair;
    double grand_mean = 0.0;
};

// Mean 1-5 score per pair and the mean of the pair means.
SimilaritySummary aggregate_similarity(const std::vector<JudgmentRecord>& records);

// Finalized decision for one (judge, batch) submission.
struct SubmissionDecision {
    std::string judge_id;
    std::string batch_id;
    ScreeningOutcome outcome = ScreeningOutcome::accepted;
    std::vector<AttentionAnswer> attention_answers;
    std::string timestamp;
};

nlohmann::json to_json(const SubmissionDecision& d);
SubmissionDecision decision_from_json(const nlohmann::json& j);
std::vector<SubmissionDecision> load_decisions(const std::filesystem::path& path);

// Drops human records of rejected submissions. With `require_finalized`, human
// records without any decision are dropped too. LLM records always pass.
std::vector<JudgmentRecord> accepted_records(const std::vector<JudgmentRecord>& records,
                                             const std::vector<SubmissionDecision>& decisions,
                                             bool require_finalized);

// Per-batch append-only JSON-lines store with an in-memory index rebuilt on
// open. Appends to one batch are serialized; reads return a snapshot.
class JudgmentStore {
public:
    explicit JudgmentStore(std::filesystem::path dir);

    enum class AppendStatus { stored, duplicate };
    AppendStatus append(const JudgmentRecord& record);

    // Records the decision; returns false if this judge already has one for the batch.
    bool finalize(const SubmissionDecision& decision);

    std::vector<JudgmentRecord> records(const std::string& batch_id) const;
    std::vector<SubmissionDecision> decisions(const std::string& batch_id) const;
    std::optional<SubmissionDecision> decision(const std::string& batch_id, const std::string& judge_id) const;
    std::vector<std::string> batch_ids() const;

    // Human records of finalized, accepted submissions plus LLM records, over all batches.
    std::vector<JudgmentRecord> accepted() const;

    static std::filesystem::path judgments_file(const std::filesystem::path& dir, const std::string& batch_id);
    static std::filesystem::path decisions_file(const std::filesystem::path& dir, const std::string& batch_id);

private:
    struct BatchState {
        mutable std::mutex mu;
        std::vector<JudgmentRecord> records;
        std::set<std::tuple<std::string, std::string, Question>> keys;
        std::map<std::string, SubmissionDecision> decisions;
    };
    BatchState& state(const std::string& batch_id);
    const BatchState* find_state(const std::string& batch_id) const;

    std::filesystem::path dir_;
    mutable std::mutex map_mu_;
    std::map<std::string, std::unique_ptr<BatchState>> batches_;
};

// Batch ids become file names; only [A-Za-z0-9._-] is allowed.
bool valid_batch_id(std::string_view id);

}  // namespace emoconv
