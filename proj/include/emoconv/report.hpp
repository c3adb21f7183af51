#pragma once

// Aggregation from judgment records to votes, effect rates, BWS scores and
// the consolidated report.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/dynamics.hpp"
#include "emoconv/judge_harness.hpp"
#include "emoconv/judgments.hpp"
#include "emoconv/stats.hpp"
#include "json.hpp"

namespace emoconv {

// Majority vote per pair over the records of one question (any judge kind).
std::map<std::string, Ranking> majority_votes(const std::vector<JudgmentRecord>& records, Question question);

// The instance's votes when every pair kind has one.
std::optional<InstanceVotes> instance_votes(const TestInstance& instance, const std::map<std::string, Ranking>& votes);

// How human judgments are grouped before averaging rates across judges.
enum class JudgeUnit { judge_batch, judge };
std::string to_string(JudgeUnit u);
JudgeUnit parse_judge_unit(std::string_view s);

// Category triples per judge unit, for instances where the unit judged all
// four pairs on `question`.
std::map<std::string, std::vector<CategoryTriple>> per_judge_triples(const std::vector<TestInstance>& instances,
                                                                     const std::vector<JudgmentRecord>& records,
                                                                     JudgeUnit unit, Question question = Question::CONV);

struct DatasetRates {
    std::string dataset;
    std::optional<GroupedRates> per_judge;  // mean across judge units
    std::optional<RateSummary> pooled;      // all judge triples together
    std::optional<RateSummary> majority;    // triples of the majority votes
};

nlohmann::json to_json(const DatasetRates& r);

// Human rates per dataset; scopes without data are left empty.
std::vector<DatasetRates> human_rates(const std::vector<TestInstance>& instances,
                                      const std::vector<JudgmentRecord>& records, JudgeUnit unit, CiMethod method);

// Rates of one voter (e.g. an LLM) per dataset from pair votes.
std::map<std::string, RateSummary> vote_rates(const std::vector<TestInstance>& instances,
                                              const std::map<std::string, Ranking>& votes, const std::string& scope);

// Likert variant: per-instance mean scores per role, categorized at `threshold`.
std::map<std::string, RateSummary> likert_rates(const std::vector<TestInstance>& instances,
                                                const std::vector<JudgmentRecord>& records, double threshold);

// BWS per dataset over instances with EMO majority votes on all pairs.
std::map<std::string, DatasetBws> bws_by_dataset(const std::vector<TestInstance>& instances,
                                                 const std::vector<JudgmentRecord>& records);

// Pair ids of the instances' pairs; used to keep attention items out of metrics.
std::set<std::string> instance_pair_ids(const std::vector<TestInstance>& instances);

struct ReportInputs {
    std::vector<TestInstance> instances;
    std::vector<JudgmentRecord> human;  // screened records
    std::vector<JudgeRun> llm_runs;
    JudgeUnit unit = JudgeUnit::judge_batch;
    CiMethod ci = CiMethod::normal;
};

struct Report {
    nlohmann::json json;
    std::string csv;  // dataset,judge,rate_type,value,ci_lo,ci_hi
};

Report build_report(const ReportInputs& in);

std::string rates_csv_header();
// One row per rate of `summary`; CI columns empty when absent.
std::string rates_csv_rows(const std::string& dataset, const std::string& judge, const RateSummary& summary);

}  // namespace emoconv
