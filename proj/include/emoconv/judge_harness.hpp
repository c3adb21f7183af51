#pragma once

// LLM judges over argument pairs: prompt rendering, label parsing, run-level
// majority votes and macro-F1 alignment with human majority labels.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/dynamics.hpp"
#include "emoconv/fraction.hpp"
#include "emoconv/judgments.hpp"
#include "emoconv/llm_gateway.hpp"
#include "emoconv/prompts.hpp"
#include "json.hpp"

namespace emoconv {

struct JudgePromptTemplate {
    int id = 1;
    std::string shared_preamble;
    std::string variant_suffix;  // contains the {text} field
    bool expects_explanation = false;

    std::string full_text() const;
};

// The three built-in templates, ids 1..3.
const std::array<JudgePromptTemplate, 3>& builtin_judge_templates();
const JudgePromptTemplate& builtin_judge_template(int id);

// Built-ins, with any of <dir>/judge/shared.txt and <dir>/judge/<id>.txt replacing
// the corresponding text.
std::array<JudgePromptTemplate, 3> load_judge_templates(const std::optional<std::filesystem::path>& dir);
void export_judge_templates(const std::filesystem::path& dir);

std::string judge_pair_text(const std::string& topic, const std::string& left, const std::string& right);
// No system prompt; the whole template goes into the user turn.
RenderedPrompt render_judge_prompt(const JudgePromptTemplate& t, const std::string& topic, const std::string& left,
                                   const std::string& right);

// First standalone 0/1/2 after an optional "Label:" marker. 1 = LeftMore,
// 2 = RightMore, 0 = Equal. Throws ParseError when none is found.
Ranking parse_judge_label(std::string_view response);

struct JudgeOptions {
    std::string model;
    int runs = 5;
    SamplingConfig sampling;
    int parallelism = 4;
};

struct JudgeRun {
    std::string model;
    int prompt_id = 1;
    std::string pair_id;
    int run_idx = 0;
    std::string raw;
    std::optional<Ranking> parsed;  // nullopt: invalid run
    std::string error;

    bool operator==(const JudgeRun&) const = default;
};

nlohmann::json to_json(const JudgeRun& r);
JudgeRun judge_run_from_json(const nlohmann::json& j, std::size_t line = 0);
std::vector<JudgeRun> parse_judge_runs(std::string_view jsonl);
std::vector<JudgeRun> load_judge_runs(const std::filesystem::path& path);
std::string serialize_judge_runs(const std::vector<JudgeRun>& runs);

struct PairVerdict {
    Ranking ranking = Ranking::Equal;
    std::size_t valid_runs = 0;
    std::vector<JudgeRun> runs;
};

// Majority over valid runs, Equal when there is none. Invalid runs do not vote.
Ranking vote_runs(std::span<const JudgeRun> runs, bool* all_invalid = nullptr);

// Run i uses seed i. Throws PreconditionError when runs < 1.
PairVerdict judge_pair(const Gateway& gateway, const JudgePromptTemplate& t, const JudgeOptions& options,
                       const TestInstance& instance, const ArgumentPair& pair);

// All pairs of all instances, requests issued through one bounded pool.
std::vector<JudgeRun> judge_dataset(const Gateway& gateway, const JudgePromptTemplate& t, const JudgeOptions& options,
                                    const std::vector<TestInstance>& instances);

// (model, prompt_id) -> pair_id -> voted ranking. Warnings name pairs whose runs were all invalid.
using LlmVotes = std::map<std::pair<std::string, int>, std::map<std::string, Ranking>>;
LlmVotes aggregate_judge_runs(const std::vector<JudgeRun>& runs, std::vector<std::string>* warnings = nullptr);

// ---------------------------------------------------------------------------
// Alignment

struct ClassF1 {
    int label = 0;
    Fraction f1;
};

// Per-class F1 over the classes that occur in gold or prediction, and their
// unweighted mean. Throws PreconditionError on empty or mismatched input.
struct MacroF1 {
    Fraction macro;
    std::vector<ClassF1> per_class;
};
MacroF1 macro_f1(std::span<const int> gold, std::span<const int> predicted);

enum class AlignmentTask { static_ranking, dynamic_category };

struct AlignmentScore {
    std::string model;
    int prompt_id = 1;
    Language language = Language::en;
    double static_macro_f1 = 0.0;
    double dynamic_macro_f1 = 0.0;
    std::map<std::string, double> per_class_f1;  // "static/LeftMore", "dynamic/Positive", ...
    std::size_t n_pairs = 0;
    std::size_t n_instances = 0;
};

nlohmann::json to_json(const AlignmentScore& s);

// Uses the instances of `language` for which both sides have a vote on all
// four pairs. Static: the four pair rankings; dynamic: the three categories
// each side's rankings imply. Throws PreconditionError when nothing overlaps.
AlignmentScore score_alignment(const std::vector<TestInstance>& instances,
                               const std::map<std::string, Ranking>& human, const std::map<std::string, Ranking>& llm,
                               Language language, const std::string& model = {}, int prompt_id = 1);

struct ReportCell {
    double score = 0.0;
    int rank = 0;
    int prompt_id = 0;  // prompt that produced the best score
};

struct ModelReportRow {
    std::string model;
    std::map<std::string, ReportCell> cells;  // column name -> cell
};

struct ModelReport {
    std::vector<std::string> columns;  // subset of static_en, dynamic_en, static_de, dynamic_de
    std::vector<ModelReportRow> rows;  // sorted by model name
};

// Best prompt per model and column, ranked descending; ties go to the model
// name that sorts first. Columns for absent languages are omitted.
ModelReport model_report(const std::vector<AlignmentScore>& scores);
nlohmann::json to_json(const ModelReport& r);
std::string to_text(const ModelReport& r);

}  // namespace emoconv
