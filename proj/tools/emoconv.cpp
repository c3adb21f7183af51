// emoconv command-line entry point. Every pipeline stage is a subcommand;
// run `emoconv <command> --help` for its flags.

#include <csignal>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "emoconv/batches.hpp"
#include "emoconv/classify.hpp"
#include "emoconv/corpus.hpp"
#include "emoconv/counterpart.hpp"
#include "emoconv/dynamics.hpp"
#include "emoconv/error.hpp"
#include "emoconv/judge_harness.hpp"
#include "emoconv/judgments.hpp"
#include "emoconv/llm_gateway.hpp"
#include "emoconv/prompts.hpp"
#include "emoconv/report.hpp"
#include "emoconv/service.hpp"
#include "emoconv/stats.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace emoconv;

namespace {

// Provider config plus the optional "sampling" and "thresholds" sections:
//   {"sampling": {"temperature": 0.6, "top_p": 0.9, "max_rounds": 5},
//    "thresholds": {"stance": 90, "emotional_en": 75, "emotional_de": 85}}
struct Settings {
    ProviderConfig provider;
    SamplingConfig sampling;
    int stance_threshold = kDefaultStanceThreshold;
    std::map<Language, int> emotion_threshold = {{Language::en, default_emotion_threshold(Language::en)},
                                                 {Language::de, default_emotion_threshold(Language::de)}};
};

Settings load_settings(const fs::path& path) {
    Settings s;
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    s.provider = ProviderConfig::from_json(j, path.parent_path());
    try {
        if (j.contains("sampling")) {
            const auto& js = j["sampling"];
            s.sampling.temperature = js.value("temperature", s.sampling.temperature);
            s.sampling.top_p = js.value("top_p", s.sampling.top_p);
            s.sampling.max_rounds = js.value("max_rounds", s.sampling.max_rounds);
        }
        if (j.contains("thresholds")) {
            const auto& jt = j["thresholds"];
            s.stance_threshold = jt.value("stance", s.stance_threshold);
            s.emotion_threshold[Language::en] = jt.value("emotional_en", s.emotion_threshold[Language::en]);
            s.emotion_threshold[Language::de] = jt.value("emotional_de", s.emotion_threshold[Language::de]);
        }
    } catch (const json::exception& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    s.sampling.validate();
    return s;
}

std::vector<json> read_jsonl(const fs::path& path) {
    std::vector<json> out;
    std::size_t n = 0;
    for (const auto& line : read_lines(path)) {
        ++n;
        if (trim(line).empty()) continue;
        try {
            out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
            throw ValidationError(path.string() + ": invalid JSON: " + e.what(), n);
        }
    }
    return out;
}

void emit(const std::string& content, const std::string& out_path) {
    if (out_path.empty() || out_path == "-") std::cout << content;
    else write_file(out_path, content);
}

std::string jsonl(const std::vector<json>& rows) {
    std::string out;
    for (const auto& r : rows) out += r.dump() + "\n";
    return out;
}

Language parse_lang(const std::string& s) { return parse_language(s); }

std::optional<fs::path> opt_path(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
}

// Human records screened by the submission log, or by a store directory.
std::vector<JudgmentRecord> load_records(const std::vector<std::string>& judgment_files, const std::string& submissions,
                                         const std::string& store_dir) {
    std::vector<JudgmentRecord> records;
    if (!store_dir.empty()) {
        JudgmentStore store(store_dir);
        records = store.accepted();
    }
    for (const auto& f : judgment_files) {
        auto r = load_judgments(f);
        records.insert(records.end(), r.begin(), r.end());
    }
    if (!submissions.empty()) return accepted_records(records, load_decisions(submissions), true);
    return records;
}

CiMethod parse_ci(const std::string& s) {
    if (s == "normal") return CiMethod::normal;
    if (s == "student-t") return CiMethod::student_t;
    if (s == "none") return CiMethod::none;
    throw ValidationError("unknown CI method '" + s + "'");
}

struct ProviderOpts {
    std::string config;
    std::string audit;
    std::string prompts;
    std::string model;
};

void add_provider_opts(CLI::App* cmd, ProviderOpts& o) {
    cmd->add_option("--config", o.config, "Provider config JSON (provider, endpoint, model, credential_env, ...)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--audit", o.audit, "Append-only JSON-lines log of every LLM call");
    cmd->add_option("--prompts", o.prompts, "Directory with prompt template overrides (<lang>/<name>.txt)");
    cmd->add_option("--model", o.model, "Override the model id from the config");
}

struct Llm {
    Settings settings;
    Gateway gateway;
    PromptSet prompts;
    std::string model;
};

Llm make_llm(const ProviderOpts& o) {
    Settings settings = load_settings(o.config);
    Gateway gateway = make_gateway(settings.provider, opt_path(o.audit));
    PromptSet prompts = o.prompts.empty() ? PromptSet() : PromptSet::with_overrides(o.prompts);
    std::string model = o.model.empty() ? settings.provider.model : o.model;
    return {std::move(settings), std::move(gateway), std::move(prompts), std::move(model)};
}

// ---------------------------------------------------------------------------

struct SegmentOpts {
    std::vector<std::string> inputs;
    std::string documents;
    std::string keywords;
    std::string field = "title";
    std::string language = "en";
    std::string out;
    SegmentConfig config;
};

void run_segment(const SegmentOpts& o) {
    std::vector<Document> docs;
    for (const auto& path : o.inputs) docs.push_back({fs::path(path).stem().string(), "", "", read_file(path)});
    if (!o.documents.empty()) {
        std::vector<Document> loaded;
        for (const auto& j : read_jsonl(o.documents))
            loaded.push_back({j.at("id").get<std::string>(), j.value("title", ""), j.value("intro", ""),
                              j.at("body").get<std::string>()});
        const auto keywords = o.keywords.empty() ? default_keywords(parse_lang(o.language)) : load_keywords(o.keywords);
        const auto kept = filter_by_keywords(loaded, keywords, o.field == "intro" ? KeywordField::intro : KeywordField::title);
        std::cerr << "kept " << kept.size() << " of " << loaded.size() << " documents\n";
        docs.insert(docs.end(), kept.begin(), kept.end());
    }
    if (docs.empty()) throw PreconditionError("nothing to segment: give --input or --documents");
    std::vector<json> rows;
    for (const auto& d : docs) {
        const auto paragraphs = segment_speech(d.body, o.config);
        for (std::size_t i = 0; i < paragraphs.size(); ++i)
            rows.push_back({{"id", d.id + "/p" + std::to_string(i + 1)},
                            {"document", d.id},
                            {"title", d.title},
                            {"intro", d.intro},
                            {"index", i},
                            {"text", paragraphs[i].text},
                            {"token_count", paragraphs[i].token_count},
                            {"source_position", paragraphs[i].source_position}});
    }
    emit(jsonl(rows), o.out);
}

struct ClassifyOpts {
    ProviderOpts provider;
    std::string task = "emotional";
    std::string input;
    std::string language = "en";
    std::optional<int> threshold;
    std::string out;
    bool calibrate = false;
    std::string criterion = "max-f1";
    int step = 5;
    std::size_t train_groups = 0;
};

CalibrationCriterion parse_criterion(const std::string& s) {
    if (s == "max-f1") return CalibrationCriterion::max_macro_f1();
    const std::string prefix = "precision:";
    if (s.rfind(prefix, 0) == 0) return CalibrationCriterion::precision_at_least(std::stod(s.substr(prefix.size())));
    throw ValidationError("unknown criterion '" + s + "' (max-f1 | precision:<p>)");
}

void run_calibrate(const ClassifyOpts& o) {
    std::vector<int> ratings;
    std::vector<bool> gold;
    std::vector<std::string> groups;
    for (const auto& j : read_jsonl(o.input)) {
        ratings.push_back(j.at("rating").get<int>());
        gold.push_back(j.at("gold").get<bool>());
        groups.push_back(j.value("group", std::string()));
    }
    const auto criterion = parse_criterion(o.criterion);
    json result = to_json(calibrate_threshold(ratings, gold, criterion, o.step));
    if (o.train_groups > 0) {
        const auto grouped = calibrate_grouped(ratings, gold, groups, o.train_groups, criterion, o.step);
        json splits = json::array();
        for (const auto& s : grouped.splits)
            splits.push_back({{"train_groups", s.train_groups},
                              {"threshold", s.threshold},
                              {"test_precision", s.test_precision},
                              {"test_macro_f1", s.test_macro_f1}});
        result["grouped"] = {{"splits", splits},
                             {"mean_test_precision", grouped.mean_test_precision},
                             {"mean_test_macro_f1", grouped.mean_test_macro_f1}};
    }
    emit(result.dump(2) + "\n", o.out);
}

void run_classify(const ClassifyOpts& o) {
    if (o.calibrate) return run_calibrate(o);
    if (o.provider.config.empty()) throw ConfigError("--config is required unless --calibrate is given");
    Llm llm = make_llm(o.provider);
    Classifier classifier(llm.gateway, llm.prompts, llm.model, llm.settings.sampling);
    const Language default_lang = parse_lang(o.language);
    std::vector<json> rows;
    for (const auto& j : read_jsonl(o.input)) {
        const Language lang = j.contains("language") ? parse_lang(j["language"].get<std::string>()) : default_lang;
        ClassifierVerdict v;
        if (o.task == "argumentative") {
            v = classifier.classify_argumentative(j.at("text").get<std::string>(), lang);
        } else if (o.task == "emotional") {
            v = classifier.rate_emotionality(j.at("text").get<std::string>(), lang,
                                             o.threshold ? o.threshold : llm.settings.emotion_threshold[lang]);
        } else if (o.task == "stance") {
            Argument a, b;
            a.id = j.value("id", std::string("a"));
            a.text = j.at("text_a").get<std::string>();
            a.language = lang;
            b.id = a.id + "-b";
            b.text = j.at("text_b").get<std::string>();
            b.language = lang;
            v = classifier.rate_stance_agreement(a, b, o.threshold.value_or(llm.settings.stance_threshold));
        } else {
            throw ValidationError("unknown task '" + o.task + "'");
        }
        json row = to_json(v);
        row["id"] = j.value("id", std::string());
        rows.push_back(std::move(row));
    }
    emit(jsonl(rows), o.out);
}

// Candidate arguments: {"id","text","language","role":"E"|"N","topic":{"id","description"},"dataset"}.
struct PairOpts {
    ProviderOpts provider;
    std::string input;
    std::optional<int> threshold;
    std::string out;
};

Argument argument_from_candidate(const json& j) {
    Argument a;
    a.id = j.at("id").get<std::string>();
    a.text = j.at("text").get<std::string>();
    a.language = parse_lang(j.value("language", std::string("en")));
    a.role = parse_role(j.at("role").get<std::string>());
    a.origin = Origin::source;
    if (j.contains("meta"))
        for (const auto& [k, v] : j["meta"].items()) a.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
    validate(a);
    return a;
}

void run_pair(const PairOpts& o) {
    Llm llm = make_llm(o.provider);
    Classifier classifier(llm.gateway, llm.prompts, llm.model, llm.settings.sampling);
    const int threshold = o.threshold.value_or(llm.settings.stance_threshold);
    struct Cand {
        Argument arg;
        Topic topic;
        std::string dataset;
    };
    std::vector<Cand> es, ns;
    for (const auto& j : read_jsonl(o.input)) {
        Cand c{argument_from_candidate(j),
               {j.at("topic").at("id").get<std::string>(), j.at("topic").at("description").get<std::string>()},
               j.value("dataset", std::string("default"))};
        if (c.arg.role == Role::E) es.push_back(std::move(c));
        else if (c.arg.role == Role::N) ns.push_back(std::move(c));
        else throw ValidationError("candidate " + c.arg.id + " must have role E or N");
    }
    std::vector<bool> used(ns.size(), false);
    std::vector<json> rows;
    for (const auto& e : es) {
        for (std::size_t i = 0; i < ns.size(); ++i) {
            const auto& n = ns[i];
            if (used[i] || n.topic.id != e.topic.id || n.arg.language != e.arg.language || n.dataset != e.dataset) continue;
            const auto v = classifier.rate_stance_agreement(e.arg, n.arg, threshold);
            if (!v.label) continue;
            used[i] = true;
            rows.push_back({{"id", e.arg.id + "+" + n.arg.id},
                            {"dataset", e.dataset},
                            {"topic", {{"id", e.topic.id}, {"description", e.topic.description}}},
                            {"E", to_json(e.arg)},
                            {"N", to_json(n.arg)},
                            {"stance_rating", v.rating ? json(*v.rating) : json(nullptr)}});
            break;
        }
    }
    std::cerr << "paired " << rows.size() << " of " << es.size() << " emotional arguments\n";
    emit(jsonl(rows), o.out);
}

struct GenerateOpts {
    ProviderOpts provider;
    std::string input;
    std::string out;
    std::string records;
    std::optional<int> threshold;
};

void run_generate(const GenerateOpts& o) {
    Llm llm = make_llm(o.provider);
    Classifier verifier(llm.gateway, llm.prompts, llm.model, llm.settings.sampling);
    std::vector<TestInstance> instances;
    std::vector<GenerationRecord> records;
    for (const auto& j : read_jsonl(o.input)) {
        Argument e = argument_from_candidate(j.at("E"));
        Argument n = argument_from_candidate(j.at("N"));
        GenerationOptions gopts;
        gopts.model = llm.model;
        gopts.sampling = llm.settings.sampling;
        gopts.emotion_threshold = o.threshold ? o.threshold : llm.settings.emotion_threshold[e.language];
        CounterpartGenerator generator(llm.gateway, llm.prompts, verifier, gopts);
        const Topic topic{j.at("topic").at("id").get<std::string>(), j.at("topic").at("description").get<std::string>()};
        instances.push_back(generator.build_instance(e, n, topic, j.value("dataset", std::string("default")),
                                                     j.at("id").get<std::string>(), &records));
    }
    emit(serialize_dataset(instances), o.out);
    if (!o.records.empty()) {
        std::vector<json> rows;
        for (const auto& r : records) rows.push_back(to_json(r));
        write_file(o.records, jsonl(rows));
    }
}

struct BatchOpts {
    std::string instances;
    BatchOptions options;
    std::string out;
};

void run_batch(const BatchOpts& o) { emit(serialize_batches(make_batches(load_dataset(o.instances), o.options)), o.out); }

struct ServeOpts {
    std::string batches;
    std::string instances;
    std::string store;
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string static_dir;
};

HttpServer* g_server = nullptr;

void run_serve(const ServeOpts& o) {
    JudgmentStore store(o.store);
    AnnotationService service(load_batches(o.batches), load_dataset(o.instances), store);
    HttpServer server(service, o.static_dir);
    const int port = server.bind(o.host, o.port);
    if (port < 0) throw Error("cannot bind " + o.host + ":" + std::to_string(o.port));
    g_server = &server;
    std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
    });
    std::cerr << "serving " << service.batches().size() << " batches on http://" << o.host << ":" << port << "\n";
    server.listen_after_bind();
    g_server = nullptr;
}

struct RecordOpts {
    std::vector<std::string> judgments;
    std::string submissions;
    std::string store;
    std::string instances;
};

void add_record_opts(CLI::App* cmd, RecordOpts& o, bool need_instances = true) {
    cmd->add_option("--judgments", o.judgments, "Judgment JSON-lines file(s)")->check(CLI::ExistingFile);
    cmd->add_option("--submissions", o.submissions, "Submission decisions; drops rejected and unfinalized human work")
        ->check(CLI::ExistingFile);
    cmd->add_option("--store", o.store, "Judgment store directory (accepted submissions only)")
        ->check(CLI::ExistingDirectory);
    auto* inst = cmd->add_option("--instances", o.instances, "Instance JSON-lines file")->check(CLI::ExistingFile);
    if (need_instances) inst->required();
}

std::vector<JudgmentRecord> records_of(const RecordOpts& o) {
    if (o.judgments.empty() && o.store.empty()) throw PreconditionError("give --judgments or --store");
    if (o.submissions.empty() && o.store.empty() && !o.judgments.empty())
        std::cerr << "warning: no --submissions given; human records are used unscreened\n";
    return load_records(o.judgments, o.submissions, o.store);
}

struct AggregateOpts {
    RecordOpts records;
    std::string question = "CONV";
    std::string out;
    std::string csv;
};

void run_aggregate(const AggregateOpts& o) {
    const auto records = records_of(o.records);
    if (!o.csv.empty()) write_file(o.csv, judgments_to_csv(records));
    const Question q = parse_question(o.question);
    json result;
    result["question"] = o.question;
    if (q == Question::SIM) {
        const auto sim = aggregate_similarity(records);
        result["per_pair"] = sim.per_pair;
        result["grand_mean"] = sim.grand_mean;
    } else if (is_pairwise(q)) {
        std::vector<JudgmentRecord> scoped = records;
        if (!o.records.instances.empty()) {
            const auto ids = instance_pair_ids(load_dataset(o.records.instances));
            std::erase_if(scoped, [&](const JudgmentRecord& r) { return !ids.count(r.pair_id); });
        }
        json votes = json::object();
        for (const auto& [pair, r] : majority_votes(scoped, q)) votes[pair] = to_string(r);
        result["votes"] = votes;
    } else {
        throw ValidationError("aggregate supports CONV, EMO and SIM");
    }
    emit(result.dump(2) + "\n", o.out);
}

struct RatesOpts {
    RecordOpts records;
    std::string group = "per-judge";
    std::string ci = "normal";
    std::string unit = "judge-batch";
    bool likert = false;
    double threshold = 0.5;
    std::string out;
    std::string csv;
};

void run_rates(const RatesOpts& o) {
    const auto instances = load_dataset(o.records.instances);
    const auto records = records_of(o.records);
    json out = json::array();
    std::string csv = rates_csv_header();
    if (o.likert) {
        for (const auto& [dataset, summary] : likert_rates(instances, records, o.threshold)) {
            json j = to_json(summary);
            j["threshold"] = o.threshold;
            out.push_back(j);
            csv += rates_csv_rows(dataset, "likert", summary);
        }
    } else {
        const auto ids = instance_pair_ids(instances);
        std::vector<JudgmentRecord> scoped;
        for (const auto& r : records)
            if (ids.count(r.pair_id)) scoped.push_back(r);
        for (const auto& dr : human_rates(instances, scoped, parse_judge_unit(o.unit), parse_ci(o.ci))) {
            if (o.group == "per-judge") {
                if (!dr.per_judge) continue;
                json j = to_json(dr.per_judge->summary);
                json judges = json::array();
                for (const auto& g : dr.per_judge->per_group) {
                    judges.push_back(to_json(g));
                    csv += rates_csv_rows(dr.dataset, g.scope, g);
                }
                j["judges"] = judges;
                out.push_back(j);
                csv += rates_csv_rows(dr.dataset, "mean", dr.per_judge->summary);
            } else if (o.group == "pooled") {
                if (!dr.pooled) continue;
                out.push_back(to_json(*dr.pooled));
                csv += rates_csv_rows(dr.dataset, "pooled", *dr.pooled);
            } else if (o.group == "majority") {
                if (!dr.majority) continue;
                out.push_back(to_json(*dr.majority));
                csv += rates_csv_rows(dr.dataset, "majority", *dr.majority);
            } else {
                throw ValidationError("unknown grouping '" + o.group + "' (per-judge | pooled | majority)");
            }
        }
    }
    if (out.empty()) throw PreconditionError("no instance has a complete set of judgments");
    emit(out.dump(2) + "\n", o.out);
    if (!o.csv.empty()) write_file(o.csv, csv);
}

struct AgreementOpts {
    RecordOpts records;
    std::string question = "CONV";
    bool text = false;
    std::string out;
};

void run_agreement(const AgreementOpts& o) {
    const auto ids = instance_pair_ids(load_dataset(o.records.instances));
    const auto report = agreement_report(batch_labels(records_of(o.records), parse_question(o.question), &ids));
    emit(o.text ? to_text(report) : to_json(report).dump(2) + "\n", o.out);
}

struct BwsOpts {
    RecordOpts records;
    std::string out;
};

void run_bws(const BwsOpts& o) {
    const auto instances = load_dataset(o.records.instances);
    json out = json::object();
    for (const auto& [dataset, bws] : bws_by_dataset(instances, records_of(o.records))) out[dataset] = to_json(bws);
    if (out.empty()) throw PreconditionError("no instance has EMO majority votes on all pairs");
    emit(out.dump(2) + "\n", o.out);
}

struct JudgeOpts {
    ProviderOpts provider;
    std::string instances;
    std::string prompt = "all";
    int runs = 5;
    std::optional<int> parallelism;
    std::string out;
};

void run_judge(const JudgeOpts& o) {
    Llm llm = make_llm(o.provider);
    const auto instances = load_dataset(o.instances);
    const auto templates = load_judge_templates(opt_path(o.provider.prompts));
    std::vector<int> ids;
    if (o.prompt == "all") ids = {1, 2, 3};
    else ids = {std::stoi(o.prompt)};
    JudgeOptions jopts;
    jopts.model = llm.model;
    jopts.runs = o.runs;
    jopts.sampling = llm.settings.sampling;
    jopts.parallelism = o.parallelism.value_or(llm.settings.provider.parallelism);
    std::vector<JudgeRun> all;
    for (int id : ids) {
        if (id < 1 || id > 3) throw ValidationError("prompt must be 1, 2, 3 or all");
        auto runs = judge_dataset(llm.gateway, templates[static_cast<std::size_t>(id - 1)], jopts, instances);
        all.insert(all.end(), runs.begin(), runs.end());
    }
    std::size_t invalid = 0;
    for (const auto& r : all) invalid += !r.parsed;
    if (invalid) std::cerr << "warning: " << invalid << " of " << all.size() << " runs gave no valid label\n";
    emit(serialize_judge_runs(all), o.out);
}

struct ReportOpts {
    RecordOpts records;
    std::vector<std::string> llm;
    std::string unit = "judge-batch";
    std::string ci = "normal";
    std::string out;
    std::string csv;
    bool text = false;
};

void run_report(const ReportOpts& o) {
    ReportInputs in;
    in.instances = load_dataset(o.records.instances);
    if (!o.records.judgments.empty() || !o.records.store.empty()) in.human = records_of(o.records);
    for (const auto& f : o.llm) {
        auto runs = load_judge_runs(f);
        in.llm_runs.insert(in.llm_runs.end(), runs.begin(), runs.end());
    }
    in.unit = parse_judge_unit(o.unit);
    in.ci = parse_ci(o.ci);
    const Report report = build_report(in);
    emit(report.json.dump(2) + "\n", o.out);
    if (!o.csv.empty()) write_file(o.csv, report.csv);
    if (o.text && !report.json["model_report"].is_null()) {
        std::vector<AlignmentScore> scores;
        for (const auto& a : report.json["alignment"]) {
            AlignmentScore s;
            s.model = a["model"];
            s.prompt_id = a["prompt_id"];
            s.language = parse_language(a["language"].get<std::string>());
            s.static_macro_f1 = a["static_macro_f1"];
            s.dynamic_macro_f1 = a["dynamic_macro_f1"];
            scores.push_back(s);
        }
        std::cerr << to_text(model_report(scores));
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const ValidationError*>(&e)) return 3;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Emotion and convincingness toolkit: argument pairs, annotation campaigns, LLM judges"};
    app.require_subcommand(1);

    SegmentOpts seg;
    auto* c_seg = app.add_subcommand("segment", "Split speeches into balanced paragraphs (optionally keyword-filtered)");
    c_seg->add_option("--input", seg.inputs, "Plain-text speech file(s); blank lines separate paragraphs")
        ->check(CLI::ExistingFile);
    c_seg->add_option("--documents", seg.documents, "Documents JSON-lines {id,title,intro,body} to filter first")
        ->check(CLI::ExistingFile);
    c_seg->add_option("--keywords", seg.keywords, "Keyword file (one per line, # comments); default: built-in list")
        ->check(CLI::ExistingFile);
    c_seg->add_option("--field", seg.field, "Field matched by keywords")->check(CLI::IsMember({"title", "intro"}));
    c_seg->add_option("--lang", seg.language, "Language of the built-in keyword list")->check(CLI::IsMember({"en", "de"}));
    c_seg->add_option("--min-tokens", seg.config.min_tokens, "Keep merging while the paragraph is shorter than this");
    c_seg->add_option("--short-next", seg.config.short_next_tokens, "Absorb a following paragraph shorter than this");
    c_seg->add_option("--brackets", seg.config.open_brackets, "Absorb a following paragraph starting with one of these");
    c_seg->add_option("--out", seg.out, "Output JSON-lines (default stdout)");

    ClassifyOpts cls;
    auto* c_cls = app.add_subcommand("classify", "Run an LLM classifier, or calibrate a rating threshold");
    c_cls->add_option("--config", cls.provider.config, "Provider config JSON")->check(CLI::ExistingFile);
    c_cls->add_option("--audit", cls.provider.audit, "Append-only LLM call log");
    c_cls->add_option("--prompts", cls.provider.prompts, "Prompt override directory");
    c_cls->add_option("--model", cls.provider.model, "Override the model id from the config");
    c_cls->add_option("--task", cls.task, "Classifier")->check(CLI::IsMember({"argumentative", "stance", "emotional"}));
    c_cls->add_option("--input", cls.input, "JSON-lines: {id,text[,language]} or {id,text_a,text_b} for stance; "
                                            "{rating,gold[,group]} with --calibrate")
        ->required()
        ->check(CLI::ExistingFile);
    c_cls->add_option("--lang", cls.language, "Default language")->check(CLI::IsMember({"en", "de"}));
    c_cls->add_option("--threshold", cls.threshold, "Rating threshold (0-100)")->check(CLI::Range(0, 100));
    c_cls->add_flag("--calibrate", cls.calibrate, "Sweep thresholds against gold labels instead of calling an LLM");
    c_cls->add_option("--criterion", cls.criterion, "max-f1 or precision:<p>");
    c_cls->add_option("--step", cls.step, "Threshold grid step")->check(CLI::Range(1, 100));
    c_cls->add_option("--train-groups", cls.train_groups, "Grouped cross-validation: groups used for calibration");
    c_cls->add_option("--out", cls.out, "Output file (default stdout)");

    PairOpts pair;
    auto* c_pair = app.add_subcommand("pair", "Pair E and N arguments of one topic that share a stance");
    add_provider_opts(c_pair, pair.provider);
    c_pair->add_option("--input", pair.input, "Candidate arguments JSON-lines")->required()->check(CLI::ExistingFile);
    c_pair->add_option("--threshold", pair.threshold, "Stance agreement threshold (0-100)")->check(CLI::Range(0, 100));
    c_pair->add_option("--out", pair.out, "Output JSON-lines (default stdout)");

    GenerateOpts gen;
    auto* c_gen = app.add_subcommand("generate", "Generate Gminus/Gplus counterparts and build test instances");
    add_provider_opts(c_gen, gen.provider);
    c_gen->add_option("--input", gen.input, "Pairs JSON-lines from `pair`")->required()->check(CLI::ExistingFile);
    c_gen->add_option("--out", gen.out, "Instance JSON-lines (default stdout)");
    c_gen->add_option("--records", gen.records, "Generation records JSON-lines");
    c_gen->add_option("--threshold", gen.threshold, "Emotion threshold for verification")->check(CLI::Range(0, 100));

    BatchOpts bat;
    auto* c_bat = app.add_subcommand("batch", "Assign instances to annotation batches with attention checks");
    c_bat->add_option("--instances", bat.instances, "Instance JSON-lines")->required()->check(CLI::ExistingFile);
    c_bat->add_option("--per-batch", bat.options.per_batch, "Instances per batch")->check(CLI::PositiveNumber);
    c_bat->add_option("--checks", bat.options.checks, "Attention checks per batch")->check(CLI::PositiveNumber);
    c_bat->add_option("--required", bat.options.required_submissions, "Accepted submissions needed per batch")
        ->check(CLI::PositiveNumber);
    c_bat->add_option("--seed", bat.options.seed, "Shuffle seed");
    c_bat->add_option("--out", bat.out, "Batch file (default stdout)");

    ServeOpts srv;
    auto* c_srv = app.add_subcommand("serve", "Run the HTTP annotation service");
    c_srv->add_option("--batches", srv.batches, "Batch file from `batch`")->required()->check(CLI::ExistingFile);
    c_srv->add_option("--instances", srv.instances, "Instance JSON-lines")->required()->check(CLI::ExistingFile);
    c_srv->add_option("--store", srv.store, "Judgment store directory")->required();
    c_srv->add_option("--host", srv.host, "Bind address");
    c_srv->add_option("--port", srv.port, "Port (0 picks a free one)");
    c_srv->add_option("--static", srv.static_dir, "Directory served at / (annotation UI build)");

    AggregateOpts agg;
    auto* c_agg = app.add_subcommand("aggregate", "Majority votes per pair (or SIM means); optional CSV export");
    add_record_opts(c_agg, agg.records, false);
    c_agg->add_option("--question", agg.question, "CONV, EMO or SIM")->check(CLI::IsMember({"CONV", "EMO", "SIM"}));
    c_agg->add_option("--out", agg.out, "Output JSON (default stdout)");
    c_agg->add_option("--csv", agg.csv, "Write judge_id,pair_id,question,value CSV");

    RatesOpts rat;
    auto* c_rat = app.add_subcommand("rates", "Consistency, positivity and negativity rates");
    add_record_opts(c_rat, rat.records);
    c_rat->add_option("--group", rat.group, "per-judge, pooled or majority")
        ->check(CLI::IsMember({"per-judge", "pooled", "majority"}));
    c_rat->add_option("--ci", rat.ci, "Interval across judges")->check(CLI::IsMember({"normal", "student-t", "none"}));
    c_rat->add_option("--unit", rat.unit, "Judge unit for per-judge rates")->check(CLI::IsMember({"judge-batch", "judge"}));
    c_rat->add_flag("--likert", rat.likert, "Use LIKERT_CONV ratings instead of pairwise CONV");
    c_rat->add_option("--threshold", rat.threshold, "Likert score difference needed for a ranking")
        ->check(CLI::PositiveNumber);
    c_rat->add_option("--out", rat.out, "Output JSON (default stdout)");
    c_rat->add_option("--csv", rat.csv, "Plot CSV dataset,judge,rate_type,value,ci_lo,ci_hi");

    AgreementOpts agr;
    auto* c_agr = app.add_subcommand("agreement", "Krippendorff's alpha and agreement percentages per batch");
    add_record_opts(c_agr, agr.records);
    c_agr->add_option("--question", agr.question, "CONV or EMO")->check(CLI::IsMember({"CONV", "EMO"}));
    c_agr->add_flag("--text", agr.text, "Plain-text table instead of JSON");
    c_agr->add_option("--out", agr.out, "Output (default stdout)");

    BwsOpts bws;
    auto* c_bws = app.add_subcommand("bws", "Best-worst scaling scores of the emotion comparisons");
    add_record_opts(c_bws, bws.records);
    c_bws->add_option("--out", bws.out, "Output JSON (default stdout)");

    JudgeOpts jdg;
    auto* c_jdg = app.add_subcommand("judge", "Run an LLM judge over every pair");
    add_provider_opts(c_jdg, jdg.provider);
    c_jdg->add_option("--instances", jdg.instances, "Instance JSON-lines")->required()->check(CLI::ExistingFile);
    c_jdg->add_option("--prompt", jdg.prompt, "1, 2, 3 or all")->check(CLI::IsMember({"1", "2", "3", "all"}));
    c_jdg->add_option("--runs", jdg.runs, "Runs per pair")->check(CLI::PositiveNumber);
    c_jdg->add_option("--parallelism", jdg.parallelism, "Calls in flight (default from config)")
        ->check(CLI::PositiveNumber);
    c_jdg->add_option("--out", jdg.out, "Judge runs JSON-lines (default stdout)");

    ReportOpts rep;
    auto* c_rep = app.add_subcommand("report", "Consolidated JSON report and plot CSV");
    add_record_opts(c_rep, rep.records);
    c_rep->add_option("--llm", rep.llm, "Judge runs JSON-lines file(s)")->check(CLI::ExistingFile);
    c_rep->add_option("--unit", rep.unit, "Judge unit")->check(CLI::IsMember({"judge-batch", "judge"}));
    c_rep->add_option("--ci", rep.ci, "Interval across judges")->check(CLI::IsMember({"normal", "student-t", "none"}));
    c_rep->add_option("--out", rep.out, "Report JSON (default stdout)");
    c_rep->add_option("--csv", rep.csv, "Plot CSV");
    c_rep->add_flag("--text", rep.text, "Print the model ranking table to stderr");

    std::string export_dir;
    auto* c_prm = app.add_subcommand("prompts", "Write the built-in prompt templates as editable files");
    c_prm->add_option("--export", export_dir, "Target directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*c_seg) run_segment(seg);
        else if (*c_cls) run_classify(cls);
        else if (*c_pair) run_pair(pair);
        else if (*c_gen) run_generate(gen);
        else if (*c_bat) run_batch(bat);
        else if (*c_srv) run_serve(srv);
        else if (*c_agg) run_aggregate(agg);
        else if (*c_rat) run_rates(rat);
        else if (*c_agr) run_agreement(agr);
        else if (*c_bws) run_bws(bws);
        else if (*c_jdg) run_judge(jdg);
        else if (*c_rep) run_report(rep);
        else if (*c_prm) {
            PromptSet().export_to(export_dir);
            export_judge_templates(export_dir);
        }
    } catch (const json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}
