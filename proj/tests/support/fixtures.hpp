#pragma once

// Shared test data: small instances, scratch directories and the scripted
// ten-instance pipeline used by the end-to-end checks.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/counterpart.hpp"
#include "emoconv/error.hpp"
#include "emoconv/judge_harness.hpp"
#include "emoconv/judgments.hpp"
#include "emoconv/llm_gateway.hpp"
#include "emoconv/report.hpp"
#include "json.hpp"

namespace fixtures {

namespace fs = std::filesystem;
using namespace emoconv;

class ScratchDir {
public:
    explicit ScratchDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = fs::temp_directory_path() /
                ("emoconv-" + tag + "-" + std::to_string(stamp) + "-" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~ScratchDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    ScratchDir(const ScratchDir&) = delete;
    ScratchDir& operator=(const ScratchDir&) = delete;
    const fs::path& path() const { return path_; }
    fs::path operator/(const std::string& name) const { return path_ / name; }

private:
    fs::path path_;
};

inline Argument argument(const std::string& id, const std::string& text, Role role, Language lang = Language::en) {
    Argument a;
    a.id = id;
    a.text = text;
    a.role = role;
    a.language = lang;
    a.origin = role == Role::E || role == Role::N ? Origin::source : Origin::generated;
    return a;
}

inline TestInstance instance(const std::string& id, const std::string& dataset = "ds", Language lang = Language::en) {
    TestInstance t;
    t.id = id;
    t.topic = {id + "-topic", "Topic of " + id};
    t.dataset = dataset;
    t.language = lang;
    for (Role r : kAllRoles) t.arguments[r] = argument(id + "-" + to_string(r), "Argument " + to_string(r) + " of " + id, r, lang);
    t.pairs = canonical_pairs(id, t.arguments);
    return t;
}

inline JudgmentRecord vote(const std::string& judge, const std::string& pair, Question q, Ranking r,
                           const std::string& batch = "b1") {
    JudgmentRecord rec;
    rec.judge_id = judge;
    rec.pair_id = pair;
    rec.question = q;
    rec.value = r;
    rec.batch_id = batch;
    rec.timestamp = "2026-01-01T00:00:00Z";
    return rec;
}

// `n` words of filler so a paragraph has a known token count.
inline std::string words(const std::string& stem, int n) {
    std::string out;
    for (int i = 0; i < n; ++i) out += (i ? " " : "") + stem + std::to_string(i);
    return out;
}

// ---------------------------------------------------------------------------
// Scripted pipeline

constexpr Ranking L = Ranking::LeftMore;
constexpr Ranking E = Ranking::Equal;
constexpr Ranking R = Ranking::RightMore;

// Human majority pattern per instance in (Anchor, ReducedLeft, IncreasedRight, BothShifted) order.
inline const std::array<std::array<Ranking, 4>, 10>& human_pattern() {
    static const std::array<std::array<Ranking, 4>, 10> p = {{
        {L, L, L, L}, {L, E, L, R}, {E, R, E, L}, {R, R, E, R}, {L, L, L, L},
        {E, E, E, E}, {L, R, R, L}, {R, L, R, R}, {E, L, L, R}, {L, L, E, L},
    }};
    return p;
}

// The LLM judge's voted rankings; differs from the humans on instances 1, 2, 6 and 8.
inline const std::array<std::array<Ranking, 4>, 10>& llm_pattern() {
    static const std::array<std::array<Ranking, 4>, 10> p = {{
        {L, L, L, L}, {L, L, L, R}, {E, R, E, E}, {R, R, E, R}, {L, L, L, L},
        {E, E, E, E}, {L, R, R, R}, {R, L, R, R}, {L, L, L, R}, {L, L, E, L},
    }};
    return p;
}

// Hand-computed expectations for the scripted pipeline.
//   Human majority categories: C 18, P 7, N 5 over 30.
//   Per judge: J1 and J2 vote the pattern, J3 votes Equal everywhere (30 C).
//   Static confusion (gold -> pred): E->L twice, L->E once, L->R once;
//     F1 L = 17/19, E = 16/19, R = 22/23, macro = 1177/1311.
//   Dynamic: F1 C = 34/39, P = 6/7, N = 4/7, macro = 628/819.
//   LLM categories: C 21, P 7, N 2.
struct Expected {
    static constexpr double majority_c = 18.0 / 30.0, majority_p = 7.0 / 30.0, majority_n = 5.0 / 30.0;
    static constexpr double judge_mean_c = 11.0 / 15.0, judge_mean_p = 7.0 / 45.0, judge_mean_n = 1.0 / 9.0;
    static constexpr double static_f1 = 1177.0 / 1311.0;
    static constexpr double dynamic_f1 = 628.0 / 819.0;
    static constexpr double llm_c = 21.0 / 30.0, llm_p = 7.0 / 30.0, llm_n = 2.0 / 30.0;
};

inline std::string tag(const char* kind, int i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "[%s-%02d]", kind, i);
    return buf;
}

inline nlohmann::json rule(nlohmann::json filters, nlohmann::json responses) {
    filters["responses"] = std::move(responses);
    return filters;
}

inline std::string label_text(Ranking r) {
    return r == Ranking::LeftMore ? "Label: 1" : r == Ranking::RightMore ? "Label: 2" : "Label: 0";
}

// Five runs whose vote is `target`: three agreeing runs, one dissent, one
// unparseable. Equal targets use a split vote with no majority.
inline std::array<std::string, 5> judge_runs_for(Ranking target, bool split) {
    if (split) return {"Label: 1", "Label: 2", "1", "2", "I cannot decide."};
    const Ranking other = target == Ranking::LeftMore ? Ranking::RightMore : Ranking::LeftMore;
    return {label_text(target), label_text(other), label_text(target), "No label here.", label_text(target)};
}

struct PipelineResult {
    std::vector<TestInstance> instances;
    std::vector<GenerationRecord> generation;
    std::vector<JudgmentRecord> human;  // screened
    std::vector<JudgeRun> runs;
    Report report;
    std::size_t paragraphs = 0;
};

// segment -> generate -> (synthetic votes) aggregate -> judge -> report, all offline.
inline PipelineResult run_pipeline(const fs::path& dir) {
    using nlohmann::json;
    PipelineResult out;

    // Speeches with two long paragraphs each: the first becomes E, the second N.
    std::vector<std::pair<std::string, std::string>> sources;
    for (int i = 0; i < 10; ++i) {
        const std::string raw = "Outrageous and heartbreaking " + tag("emo", i) + " " + words("e", 62) + "\n\n" +
                                "The figures show " + tag("neu", i) + " " + words("n", 62) + "\n";
        const auto paragraphs = segment_speech(raw);
        out.paragraphs += paragraphs.size();
        if (paragraphs.size() != 2) throw Error("fixture speech did not split into two paragraphs");
        sources.emplace_back(paragraphs[0].text, paragraphs[1].text);
    }

    // Transcript: generation answers per source, verification ratings per candidate, judge runs per pair and seed.
    std::vector<json> transcript;
    for (int i = 0; i < 10; ++i) {
        if (i == 3) {
            // First reduced-emotion candidate still reads as emotional, the second passes.
            transcript.push_back(rule({{"system_contains", "without emotional language"}, {"user_contains", tag("emo", i)}},
                                      {"Generated argument: Calm draft " + tag("gma", i) + "\nExplanation: toned down",
                                       "Generated argument: Calm text " + tag("gm", i) + "\nExplanation: neutral now"}));
            transcript.push_back(rule({{"system_contains", "Rate how likely"}, {"user_contains", tag("gma", i)}}, {"80"}));
        } else {
            transcript.push_back(rule({{"system_contains", "without emotional language"}, {"user_contains", tag("emo", i)}},
                                      {"Generated argument: Calm text " + tag("gm", i) + "\nExplanation: neutral now"}));
        }
        transcript.push_back(rule({{"system_contains", "Rate how likely"}, {"user_contains", tag("gm", i)}}, {"Rating: 20"}));
        transcript.push_back(rule({{"system_contains", "with emotions"}, {"user_contains", tag("neu", i)}},
                                  {"Generated argument: A tragedy for families " + tag("gp", i) +
                                   "\nExplanation: vivid suffering"}));
        transcript.push_back(rule({{"system_contains", "Rate how likely"}, {"user_contains", tag("gp", i)}}, {"85"}));
    }
    const auto transcript_path = dir / "transcript.jsonl";
    {
        std::string content;
        for (const auto& r : transcript) content += r.dump() + "\n";
        write_file(transcript_path, content);
    }
    write_file(dir / "provider.json", json{{"provider", "mock"}, {"model", "mock-gen"}, {"transcript", "transcript.jsonl"},
                                           {"max_attempts", 2}, {"backoff_ms", 0}, {"parallelism", 4}}
                                          .dump());
    const auto config = ProviderConfig::load(dir / "provider.json");
    Gateway gateway = make_gateway(config, dir / "audit.jsonl");
    const PromptSet prompts;
    Classifier verifier(gateway, prompts, config.model);
    GenerationOptions gopts;
    gopts.model = config.model;
    CounterpartGenerator generator(gateway, prompts, verifier, gopts);
    for (int i = 0; i < 10; ++i) {
        const std::string id = "e2e-" + std::to_string(i);
        const Argument e = argument(id + "-E", sources[static_cast<std::size_t>(i)].first, Role::E);
        const Argument n = argument(id + "-N", sources[static_cast<std::size_t>(i)].second, Role::N);
        out.instances.push_back(
            generator.build_instance(e, n, {id + "-topic", "Motion " + std::to_string(i)}, "e2e", id, &out.generation));
    }
    save_dataset(dir / "instances.jsonl", out.instances);
    out.instances = load_dataset(dir / "instances.jsonl");

    // Synthetic annotators: J1 and J2 follow the pattern, J3 answers Equal, J4
    // answers the mirror image but fails two attention checks and is screened out.
    std::vector<JudgmentRecord> all;
    std::vector<SubmissionDecision> decisions;
    for (const char* judge : {"J1", "J2", "J3", "J4"}) {
        for (std::size_t i = 0; i < 10; ++i)
            for (std::size_t k = 0; k < 4; ++k) {
                const Ranking h = human_pattern()[i][k];
                const std::string j = judge;
                const Ranking r = j == "J3" ? Ranking::Equal : j == "J4" ? flip(h) : h;
                all.push_back(vote(j, out.instances[i].pair(kAllPairKinds[k]).id, Question::CONV, r, "e2e-b01"));
            }
        SubmissionDecision d;
        d.judge_id = judge;
        d.batch_id = "e2e-b01";
        Submission s{judge, "e2e-b01", {}, {{"c1", true}, {"c2", std::string(judge) != "J4"}, {"c3", std::string(judge) != "J4"}}};
        d.outcome = screen_submission(s);
        d.attention_answers = s.attention_answers;
        decisions.push_back(d);
    }
    out.human = accepted_records(all, decisions, true);

    // LLM judge transcript, one rule per pair and run seed.
    std::vector<json> judge_rules;
    for (std::size_t i = 0; i < 10; ++i)
        for (std::size_t k = 0; k < 4; ++k) {
            const auto& inst = out.instances[i];
            const auto& pair = inst.pair(kAllPairKinds[k]);
            const Ranking target = llm_pattern()[i][k];
            const bool split = target == Ranking::Equal && human_pattern()[i][k] != Ranking::Equal;
            const auto texts = judge_runs_for(target, split);
            const std::string pair_text = judge_pair_text(inst.topic.description, inst.left_of(pair).text, inst.right_of(pair).text);
            for (int run = 0; run < 5; ++run) {
                const std::string& text = texts[static_cast<std::size_t>(run)];
                judge_rules.push_back(rule({{"model", "mock-judge"}, {"user_contains", pair_text}, {"seed", run}}, {text}));
            }
        }
    {
        std::string content;
        for (const auto& r : judge_rules) content += r.dump() + "\n";
        write_file(dir / "judge_transcript.jsonl", content);
    }
    auto judge_provider = MockProvider::from_transcript(dir / "judge_transcript.jsonl");
    Gateway judge_gateway(judge_provider, RetryPolicy{1, std::chrono::milliseconds(0), 1.0});
    JudgeOptions jopts;
    jopts.model = "mock-judge";
    jopts.runs = 5;
    jopts.parallelism = 4;
    out.runs = judge_dataset(judge_gateway, builtin_judge_template(1), jopts, out.instances);
    write_file(dir / "runs.jsonl", serialize_judge_runs(out.runs));

    ReportInputs in;
    in.instances = out.instances;
    in.human = out.human;
    in.llm_runs = load_judge_runs(dir / "runs.jsonl");
    out.report = build_report(in);
    return out;
}

}  // namespace fixtures
