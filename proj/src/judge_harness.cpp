#include "emoconv/judge_harness.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iostream>
#include <set>
#include <sstream>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

namespace {

const char* const kShared =
    "Below, you will find one pair of argumentative texts discussing the same topic with the same stance. The topic "
    "may be a binary choice, a bill from UK parliamentary debates, or a simple statement. Both arguments either "
    "support or oppose the topic, or they favor one side if the topic involves a binary choice.\n"
    "\n"
    "Your task is to evaluate each pair to determine **which argumentative text you find more convincing**. There "
    "are three label options:\n"
    "0 (Both arguments are equally convincing.)\n"
    "1 (Argument 1 is more convincing.)\n"
    "2 (Argument 2 is more convincing.)\n"
    "\n"
    "**Note**: Truncated sentences or grammatical errors should be **ignored**.";

const char* const kSuffix1 =
    "Please answer your label option **without** any explanations.\n"
    "\n"
    "{text}";

const char* const kSuffix2 =
    "Please answer your label option and briefly explain why you choose this label.\n"
    "\n"
    "{text}\n"
    "\n"
    "Below is an example answer for you; please follow this format in your response.\n"
    "Label: 2\n"
    "Explanation: because Argument 2 provides more statistics supporting the claim, while Argument 1 contains "
    "logical fallacies.";

const char* const kSuffix3 =
    "Please answer your label option and briefly explain why you choose this label.\n"
    "\n"
    "{text}\n"
    "\n"
    "Below is an example answer for you; please follow this format in your response.\n"
    "Label: 1\n"
    "Explanation: Argument 1 is more convincing, because I totally agree with its point and it evokes my empathy.";

std::string lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

int ranking_class(Ranking r) { return static_cast<int>(r); }
int category_class(EffectCategory c) { return static_cast<int>(c); }

}  // namespace

std::string JudgePromptTemplate::full_text() const { return shared_preamble + "\n\n" + variant_suffix; }

const std::array<JudgePromptTemplate, 3>& builtin_judge_templates() {
    static const std::array<JudgePromptTemplate, 3> templates = {
        JudgePromptTemplate{1, kShared, kSuffix1, false},
        JudgePromptTemplate{2, kShared, kSuffix2, true},
        JudgePromptTemplate{3, kShared, kSuffix3, true},
    };
    return templates;
}

const JudgePromptTemplate& builtin_judge_template(int id) {
    if (id < 1 || id > 3) throw PreconditionError("judge prompt id must be 1, 2 or 3, got " + std::to_string(id));
    return builtin_judge_templates()[static_cast<std::size_t>(id - 1)];
}

std::array<JudgePromptTemplate, 3> load_judge_templates(const std::optional<std::filesystem::path>& dir) {
    auto out = builtin_judge_templates();
    if (!dir) return out;
    const auto judge_dir = *dir / "judge";
    const auto shared = judge_dir / "shared.txt";
    if (std::filesystem::exists(shared)) {
        const std::string text = trim(read_file(shared));
        for (auto& t : out) t.shared_preamble = text;
    }
    for (auto& t : out) {
        const auto path = judge_dir / (std::to_string(t.id) + ".txt");
        if (!std::filesystem::exists(path)) continue;
        t.variant_suffix = trim(read_file(path));
        if (t.variant_suffix.find("{text}") == std::string::npos)
            throw ConfigError(path.string() + ": judge template lacks the {text} field");
    }
    return out;
}

void export_judge_templates(const std::filesystem::path& dir) {
    const auto judge_dir = dir / "judge";
    std::filesystem::create_directories(judge_dir);
    write_file(judge_dir / "shared.txt", std::string(kShared) + "\n");
    for (const auto& t : builtin_judge_templates())
        write_file(judge_dir / (std::to_string(t.id) + ".txt"), t.variant_suffix + "\n");
}

std::string judge_pair_text(const std::string& topic, const std::string& left, const std::string& right) {
    return "Topic: " + topic + "\n\nArgument 1: " + left + "\n\nArgument 2: " + right;
}

RenderedPrompt render_judge_prompt(const JudgePromptTemplate& t, const std::string& topic, const std::string& left,
                                   const std::string& right) {
    return {"", fill_placeholders(t.full_text(), {{"text", judge_pair_text(topic, left, right)}})};
}

Ranking parse_judge_label(std::string_view response) {
    const std::string text(response);
    std::size_t start = 0;
    const auto marker = lower(text).find("label:");
    if (marker != std::string::npos) start = marker + 6;
    for (std::size_t i = start; i < text.size(); ++i) {
        const char c = text[i];
        if (c < '0' || c > '2') continue;
        if (i > 0 && (is_word(text[i - 1]) || text[i - 1] == '.')) continue;
        if (i + 1 < text.size()) {
            const char n = text[i + 1];
            if (is_word(n)) continue;
            if ((n == '.' || n == ',') && i + 2 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 2])))
                continue;
        }
        return c == '1' ? Ranking::LeftMore : c == '2' ? Ranking::RightMore : Ranking::Equal;
    }
    throw ParseError("no judge label in response");
}

json to_json(const JudgeRun& r) {
    return {{"model", r.model},
            {"prompt_id", r.prompt_id},
            {"pair_id", r.pair_id},
            {"run_idx", r.run_idx},
            {"raw", r.raw},
            {"parsed", r.parsed ? json(to_string(*r.parsed)) : json(nullptr)},
            {"error", r.error}};
}

JudgeRun judge_run_from_json(const json& j, std::size_t line) {
    try {
        JudgeRun r;
        r.model = j.at("model").get<std::string>();
        r.prompt_id = j.at("prompt_id").get<int>();
        r.pair_id = j.at("pair_id").get<std::string>();
        r.run_idx = j.at("run_idx").get<int>();
        r.raw = j.value("raw", std::string());
        if (j.contains("parsed") && !j.at("parsed").is_null()) r.parsed = parse_ranking(j.at("parsed").get<std::string>());
        r.error = j.value("error", std::string());
        return r;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("judge run: ") + e.what(), line);
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("judge run: ") + e.what(), line);
    }
}

std::vector<JudgeRun> parse_judge_runs(std::string_view jsonl) {
    std::vector<JudgeRun> out;
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
            throw ValidationError(std::string("invalid JSON: ") + e.what(), n);
        }
        out.push_back(judge_run_from_json(j, n));
    }
    return out;
}

std::vector<JudgeRun> load_judge_runs(const std::filesystem::path& path) { return parse_judge_runs(read_file(path)); }

std::string serialize_judge_runs(const std::vector<JudgeRun>& runs) {
    std::string out;
    for (const auto& r : runs) out += to_json(r).dump() + "\n";
    return out;
}

Ranking vote_runs(std::span<const JudgeRun> runs, bool* all_invalid) {
    std::vector<Ranking> valid;
    for (const auto& r : runs)
        if (r.parsed) valid.push_back(*r.parsed);
    if (all_invalid) *all_invalid = valid.empty();
    if (valid.empty()) return Ranking::Equal;
    return majority_vote(valid);
}

namespace {

LlmRequest judge_request(const JudgePromptTemplate& t, const JudgeOptions& options, const TestInstance& instance,
                         const ArgumentPair& pair, int run_idx) {
    const auto prompt =
        render_judge_prompt(t, instance.topic.description, instance.left_of(pair).text, instance.right_of(pair).text);
    LlmRequest req;
    req.model = options.model;
    req.system_prompt = prompt.system;
    req.user_prompt = prompt.user;
    req.sampling = options.sampling;
    req.seed = run_idx;
    req.tag = "judge";
    return req;
}

JudgeRun to_run(const JudgePromptTemplate& t, const JudgeOptions& options, const std::string& pair_id, int run_idx,
                const CallResult& result) {
    JudgeRun run;
    run.model = options.model;
    run.prompt_id = t.id;
    run.pair_id = pair_id;
    run.run_idx = run_idx;
    if (!result.ok()) {
        run.error = result.error;
        return run;
    }
    run.raw = result.response->text;
    try {
        run.parsed = parse_judge_label(run.raw);
    } catch (const ParseError& e) {
        run.error = e.what();
    }
    return run;
}

}  // namespace

PairVerdict judge_pair(const Gateway& gateway, const JudgePromptTemplate& t, const JudgeOptions& options,
                       const TestInstance& instance, const ArgumentPair& pair) {
    if (options.runs < 1) throw PreconditionError("judge runs must be >= 1");
    std::vector<LlmRequest> requests;
    for (int i = 0; i < options.runs; ++i) requests.push_back(judge_request(t, options, instance, pair, i));
    const auto results = gateway.complete_many(requests, options.parallelism);
    PairVerdict verdict;
    for (int i = 0; i < options.runs; ++i)
        verdict.runs.push_back(to_run(t, options, pair.id, i, results[static_cast<std::size_t>(i)]));
    bool all_invalid = false;
    verdict.ranking = vote_runs(verdict.runs, &all_invalid);
    verdict.valid_runs = static_cast<std::size_t>(
        std::count_if(verdict.runs.begin(), verdict.runs.end(), [](const JudgeRun& r) { return r.parsed.has_value(); }));
    if (all_invalid) std::cerr << "warning: pair " << pair.id << ": no valid judge run, counted as Equal\n";
    return verdict;
}

std::vector<JudgeRun> judge_dataset(const Gateway& gateway, const JudgePromptTemplate& t, const JudgeOptions& options,
                                    const std::vector<TestInstance>& instances) {
    if (options.runs < 1) throw PreconditionError("judge runs must be >= 1");
    std::vector<LlmRequest> requests;
    std::vector<std::pair<std::string, int>> keys;
    for (const auto& inst : instances)
        for (const auto& pair : inst.pairs)
            for (int i = 0; i < options.runs; ++i) {
                requests.push_back(judge_request(t, options, inst, pair, i));
                keys.emplace_back(pair.id, i);
            }
    const auto results = gateway.complete_many(requests, options.parallelism);
    std::vector<JudgeRun> runs;
    runs.reserve(results.size());
    for (std::size_t i = 0; i < results.size(); ++i) runs.push_back(to_run(t, options, keys[i].first, keys[i].second, results[i]));
    return runs;
}

LlmVotes aggregate_judge_runs(const std::vector<JudgeRun>& runs, std::vector<std::string>* warnings) {
    std::map<std::pair<std::string, int>, std::map<std::string, std::vector<JudgeRun>>> grouped;
    for (const auto& r : runs) grouped[{r.model, r.prompt_id}][r.pair_id].push_back(r);
    LlmVotes out;
    for (const auto& [key, pairs] : grouped)
        for (const auto& [pair_id, pair_runs] : pairs) {
            bool all_invalid = false;
            out[key][pair_id] = vote_runs(pair_runs, &all_invalid);
            if (all_invalid && warnings)
                warnings->push_back(key.first + " prompt " + std::to_string(key.second) + ": pair " + pair_id +
                                    " has no valid run, counted as Equal");
        }
    return out;
}

// ---------------------------------------------------------------------------

MacroF1 macro_f1(std::span<const int> gold, std::span<const int> predicted) {
    if (gold.empty()) throw PreconditionError("macro F1 over empty label vectors");
    if (gold.size() != predicted.size()) throw PreconditionError("macro F1: label vectors differ in length");
    std::set<int> classes(gold.begin(), gold.end());
    classes.insert(predicted.begin(), predicted.end());
    MacroF1 out;
    Fraction sum;
    for (int c : classes) {
        std::int64_t tp = 0, fp = 0, fn = 0;
        for (std::size_t i = 0; i < gold.size(); ++i) {
            const bool g = gold[i] == c;
            const bool p = predicted[i] == c;
            tp += g && p;
            fp += !g && p;
            fn += g && !p;
        }
        // F1 = 2TP / (2TP + FP + FN); the denominator is positive since c occurs somewhere.
        const Fraction f1(2 * tp, 2 * tp + fp + fn);
        out.per_class.push_back({c, f1});
        sum = sum + f1;
    }
    out.macro = sum / static_cast<std::int64_t>(classes.size());
    return out;
}

json to_json(const AlignmentScore& s) {
    return {{"model", s.model},
            {"prompt_id", s.prompt_id},
            {"language", to_string(s.language)},
            {"static_macro_f1", s.static_macro_f1},
            {"dynamic_macro_f1", s.dynamic_macro_f1},
            {"per_class_f1", s.per_class_f1},
            {"n_pairs", s.n_pairs},
            {"n_instances", s.n_instances}};
}

AlignmentScore score_alignment(const std::vector<TestInstance>& instances, const std::map<std::string, Ranking>& human,
                               const std::map<std::string, Ranking>& llm, Language language, const std::string& model,
                               int prompt_id) {
    std::vector<int> static_gold, static_pred, dyn_gold, dyn_pred;
    std::size_t n_instances = 0;
    for (const auto& inst : instances) {
        if (inst.language != language) continue;
        InstanceVotes hv, lv;
        bool complete = true;
        for (PairKind kind : kAllPairKinds) {
            const auto& id = inst.pair(kind).id;
            auto h = human.find(id);
            auto l = llm.find(id);
            if (h == human.end() || l == llm.end()) {
                complete = false;
                break;
            }
            hv[kind] = h->second;
            lv[kind] = l->second;
        }
        if (!complete) continue;
        ++n_instances;
        for (PairKind kind : kAllPairKinds) {
            static_gold.push_back(ranking_class(hv[kind]));
            static_pred.push_back(ranking_class(lv[kind]));
        }
        const auto hc = instance_categories(hv);
        const auto lc = instance_categories(lv);
        for (std::size_t i = 0; i < 3; ++i) {
            dyn_gold.push_back(category_class(hc[i]));
            dyn_pred.push_back(category_class(lc[i]));
        }
    }
    if (n_instances == 0)
        throw PreconditionError("no " + to_string(language) + " instance has both human and LLM votes on all pairs");

    AlignmentScore s;
    s.model = model;
    s.prompt_id = prompt_id;
    s.language = language;
    s.n_instances = n_instances;
    s.n_pairs = static_gold.size();
    const auto st = macro_f1(static_gold, static_pred);
    const auto dy = macro_f1(dyn_gold, dyn_pred);
    s.static_macro_f1 = st.macro.value();
    s.dynamic_macro_f1 = dy.macro.value();
    for (const auto& c : st.per_class) s.per_class_f1["static/" + to_string(static_cast<Ranking>(c.label))] = c.f1.value();
    for (const auto& c : dy.per_class)
        s.per_class_f1["dynamic/" + to_string(static_cast<EffectCategory>(c.label))] = c.f1.value();
    return s;
}

ModelReport model_report(const std::vector<AlignmentScore>& scores) {
    if (scores.empty()) throw PreconditionError("model report over no scores");
    std::set<Language> languages;
    std::map<std::string, ModelReportRow> rows;
    for (const auto& s : scores) {
        languages.insert(s.language);
        auto& row = rows[s.model];
        row.model = s.model;
        const std::string lang = to_string(s.language);
        for (const auto& [task, value] : {std::pair<std::string, double>{"static", s.static_macro_f1},
                                          std::pair<std::string, double>{"dynamic", s.dynamic_macro_f1}}) {
            const std::string col = task + "_" + lang;
            auto it = row.cells.find(col);
            // Keep the first prompt id on equal scores.
            if (it == row.cells.end() || value > it->second.score ||
                (value == it->second.score && s.prompt_id < it->second.prompt_id))
                row.cells[col] = ReportCell{value, 0, s.prompt_id};
        }
    }
    ModelReport report;
    for (Language lang : {Language::en, Language::de})
        if (languages.count(lang))
            for (const char* task : {"static", "dynamic"}) report.columns.push_back(std::string(task) + "_" + to_string(lang));
    for (const auto& col : report.columns) {
        std::vector<std::pair<double, std::string>> order;
        for (const auto& [model, row] : rows) {
            auto it = row.cells.find(col);
            if (it != row.cells.end()) order.emplace_back(it->second.score, model);
        }
        std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        for (std::size_t i = 0; i < order.size(); ++i) rows[order[i].second].cells[col].rank = static_cast<int>(i + 1);
    }
    for (auto& [model, row] : rows) report.rows.push_back(std::move(row));
    return report;
}

json to_json(const ModelReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json jr = {{"model", row.model}};
        for (const auto& col : r.columns) {
            auto it = row.cells.find(col);
            if (it == row.cells.end()) {
                jr[col] = nullptr;
                continue;
            }
            jr[col] = {{"score", it->second.score}, {"rank", it->second.rank}, {"prompt_id", it->second.prompt_id}};
        }
        rows.push_back(std::move(jr));
    }
    return {{"columns", r.columns}, {"rows", rows}};
}

std::string to_text(const ModelReport& r) {
    std::ostringstream out;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-28s", "model");
    out << buf;
    for (const auto& col : r.columns) {
        std::snprintf(buf, sizeof buf, " %12s %4s", col.c_str(), "rank");
        out << buf;
    }
    out << '\n';
    for (const auto& row : r.rows) {
        std::snprintf(buf, sizeof buf, "%-28s", row.model.c_str());
        out << buf;
        for (const auto& col : r.columns) {
            auto it = row.cells.find(col);
            if (it == row.cells.end())
                std::snprintf(buf, sizeof buf, " %12s %4s", "-", "-");
            else
                std::snprintf(buf, sizeof buf, " %12.3f %4d", it->second.score, it->second.rank);
            out << buf;
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace emoconv
