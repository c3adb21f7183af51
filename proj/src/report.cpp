#include "emoconv/report.hpp"

#include <cstdio>
#include <set>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

std::map<std::string, Ranking> majority_votes(const std::vector<JudgmentRecord>& records, Question question) {
    if (!is_pairwise(question)) throw PreconditionError("majority votes need a pairwise question");
    std::map<std::string, std::vector<Ranking>> by_pair;
    for (const auto& r : records)
        if (r.question == question) by_pair[r.pair_id].push_back(std::get<Ranking>(r.value));
    std::map<std::string, Ranking> out;
    for (const auto& [pair, votes] : by_pair) out[pair] = majority_vote(votes);
    return out;
}

std::optional<InstanceVotes> instance_votes(const TestInstance& instance, const std::map<std::string, Ranking>& votes) {
    InstanceVotes out;
    for (PairKind kind : kAllPairKinds) {
        auto it = votes.find(instance.pair(kind).id);
        if (it == votes.end()) return std::nullopt;
        out[kind] = it->second;
    }
    return out;
}

std::string to_string(JudgeUnit u) { return u == JudgeUnit::judge ? "judge" : "judge-batch"; }

JudgeUnit parse_judge_unit(std::string_view s) {
    if (s == "judge") return JudgeUnit::judge;
    if (s == "judge-batch") return JudgeUnit::judge_batch;
    throw ValidationError("unknown judge unit '" + std::string(s) + "' (judge | judge-batch)");
}

std::map<std::string, std::vector<CategoryTriple>> per_judge_triples(const std::vector<TestInstance>& instances,
                                                                     const std::vector<JudgmentRecord>& records,
                                                                     JudgeUnit unit, Question question) {
    std::map<std::string, std::map<std::string, Ranking>> by_unit;
    for (const auto& r : records) {
        if (r.question != question) continue;
        const std::string key = unit == JudgeUnit::judge ? r.judge_id : r.judge_id + "@" + r.batch_id;
        by_unit[key][r.pair_id] = std::get<Ranking>(r.value);
    }
    std::map<std::string, std::vector<CategoryTriple>> out;
    for (const auto& [key, votes] : by_unit)
        for (const auto& inst : instances)
            if (auto v = instance_votes(inst, votes)) out[key].push_back(instance_categories(*v));
    return out;
}

json to_json(const DatasetRates& r) {
    json j = {{"dataset", r.dataset}};
    if (r.per_judge) {
        json groups = json::array();
        for (const auto& g : r.per_judge->per_group) groups.push_back(to_json(g));
        j["per_judge"] = {{"summary", to_json(r.per_judge->summary)}, {"judges", groups}};
    } else {
        j["per_judge"] = nullptr;
    }
    j["pooled"] = r.pooled ? to_json(*r.pooled) : json(nullptr);
    j["majority"] = r.majority ? to_json(*r.majority) : json(nullptr);
    return j;
}

namespace {

std::map<std::string, std::vector<TestInstance>> by_dataset(const std::vector<TestInstance>& instances) {
    std::map<std::string, std::vector<TestInstance>> out;
    for (const auto& inst : instances) out[inst.dataset].push_back(inst);
    return out;
}

std::vector<CategoryTriple> vote_triples(const std::vector<TestInstance>& instances,
                                         const std::map<std::string, Ranking>& votes) {
    std::vector<CategoryTriple> out;
    for (const auto& inst : instances)
        if (auto v = instance_votes(inst, votes)) out.push_back(instance_categories(*v));
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::vector<DatasetRates> human_rates(const std::vector<TestInstance>& instances,
                                      const std::vector<JudgmentRecord>& records, JudgeUnit unit, CiMethod method) {
    const auto votes = majority_votes(records, Question::CONV);
    std::vector<DatasetRates> out;
    for (const auto& [dataset, members] : by_dataset(instances)) {
        DatasetRates dr;
        dr.dataset = dataset;
        const auto groups = per_judge_triples(members, records, unit);
        std::vector<CategoryTriple> pooled;
        for (const auto& [key, triples] : groups) pooled.insert(pooled.end(), triples.begin(), triples.end());
        if (!pooled.empty()) {
            dr.per_judge = rates_per_group(groups, dataset, method);
            dr.pooled = rates(pooled, dataset);
        }
        const auto maj = vote_triples(members, votes);
        if (!maj.empty()) dr.majority = rates(maj, dataset);
        out.push_back(std::move(dr));
    }
    return out;
}

std::map<std::string, RateSummary> vote_rates(const std::vector<TestInstance>& instances,
                                              const std::map<std::string, Ranking>& votes, const std::string& scope) {
    std::map<std::string, RateSummary> out;
    for (const auto& [dataset, members] : by_dataset(instances)) {
        const auto triples = vote_triples(members, votes);
        if (!triples.empty()) out[dataset] = rates(triples, scope);
    }
    return out;
}

std::map<std::string, RateSummary> likert_rates(const std::vector<TestInstance>& instances,
                                                const std::vector<JudgmentRecord>& records, double threshold) {
    std::map<std::string, std::vector<CategoryTriple>> triples;
    for (const auto& inst : instances) {
        LikertInstanceScores scores;
        scores.threshold = threshold;
        try {
            scores.means = likert_role_means(inst, records);
        } catch (const PreconditionError&) {
            continue;  // instance without a full set of ratings
        }
        triples[inst.dataset].push_back(likert_categorize(scores));
    }
    std::map<std::string, RateSummary> out;
    for (const auto& [dataset, t] : triples) out[dataset] = rates(t, dataset);
    return out;
}

std::map<std::string, DatasetBws> bws_by_dataset(const std::vector<TestInstance>& instances,
                                                 const std::vector<JudgmentRecord>& records) {
    const auto votes = majority_votes(records, Question::EMO);
    std::map<std::string, DatasetBws> out;
    for (const auto& [dataset, members] : by_dataset(instances)) {
        std::vector<InstanceVotes> complete;
        for (const auto& inst : members)
            if (auto v = instance_votes(inst, votes)) complete.push_back(*v);
        if (!complete.empty()) out[dataset] = dataset_bws(complete);
    }
    return out;
}

std::set<std::string> instance_pair_ids(const std::vector<TestInstance>& instances) {
    std::set<std::string> out;
    for (const auto& inst : instances)
        for (const auto& p : inst.pairs) out.insert(p.id);
    return out;
}

std::string rates_csv_header() { return "dataset,judge,rate_type,value,ci_lo,ci_hi\n"; }

std::string rates_csv_rows(const std::string& dataset, const std::string& judge, const RateSummary& s) {
    static const char* names[] = {"consistency", "positivity", "negativity"};
    std::string out;
    for (std::size_t c = 0; c < 3; ++c) {
        out += dataset + "," + judge + "," + names[c] + "," + fmt(s.rate(kAllCategories[c])) + ",";
        if (s.ci95) out += fmt((*s.ci95)[c].lo) + "," + fmt((*s.ci95)[c].hi);
        else out += ",";
        out += "\n";
    }
    return out;
}

Report build_report(const ReportInputs& in) {
    Report report;
    json warnings = json::array();
    std::string csv = rates_csv_header();
    json datasets = json::object();

    const auto pair_ids = instance_pair_ids(in.instances);
    std::vector<JudgmentRecord> human;
    for (const auto& r : in.human)
        if (pair_ids.count(r.pair_id)) human.push_back(r);

    for (const auto& dr : human_rates(in.instances, human, in.unit, in.ci)) {
        json& d = datasets[dr.dataset];
        d["human"] = to_json(dr);
        if (dr.per_judge) {
            csv += rates_csv_rows(dr.dataset, "mean", dr.per_judge->summary);
            for (const auto& g : dr.per_judge->per_group) csv += rates_csv_rows(dr.dataset, g.scope, g);
        }
        if (dr.pooled) csv += rates_csv_rows(dr.dataset, "pooled", *dr.pooled);
        if (dr.majority) csv += rates_csv_rows(dr.dataset, "majority", *dr.majority);
    }
    for (const auto& [dataset, bws] : bws_by_dataset(in.instances, human)) datasets[dataset]["bws"] = to_json(bws);

    std::vector<std::string> run_warnings;
    const auto llm = aggregate_judge_runs(in.llm_runs, &run_warnings);
    for (const auto& w : run_warnings) warnings.push_back(w);
    const auto human_conv = majority_votes(human, Question::CONV);
    std::set<Language> languages;
    for (const auto& inst : in.instances) languages.insert(inst.language);

    std::vector<AlignmentScore> scores;
    for (const auto& [key, votes] : llm) {
        const std::string label = key.first + "#p" + std::to_string(key.second);
        for (const auto& [dataset, summary] : vote_rates(in.instances, votes, label)) {
            datasets[dataset]["llm"][label] = to_json(summary);
            csv += rates_csv_rows(dataset, label, summary);
        }
        for (Language lang : languages) {
            try {
                scores.push_back(score_alignment(in.instances, human_conv, votes, lang, key.first, key.second));
            } catch (const PreconditionError& e) {
                warnings.push_back(label + ": " + e.what());
            }
        }
    }
    json alignment = json::array();
    for (const auto& s : scores) alignment.push_back(to_json(s));

    report.json = {{"datasets", datasets}, {"alignment", alignment}, {"judge_unit", to_string(in.unit)}};
    report.json["model_report"] = scores.empty() ? json(nullptr) : to_json(model_report(scores));
    report.json["warnings"] = warnings;
    report.csv = std::move(csv);
    return report;
}

}  // namespace emoconv
