#include "emoconv/stats.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

std::size_t pairable_values(const LabelMatrix& m) {
    if (m.empty()) return 0;
    std::size_t total = 0;
    for (std::size_t item = 0; item < m[0].size(); ++item) {
        std::size_t mu = 0;
        for (const auto& row : m)
            if (item < row.size() && row[item]) ++mu;
        if (mu >= 2) total += mu;
    }
    return total;
}

double krippendorff_alpha_nominal(const LabelMatrix& m) {
    if (m.size() < 2) throw PreconditionError("alpha needs at least two judges");
    const std::size_t n_items = m[0].size();
    for (const auto& row : m)
        if (row.size() != n_items) throw PreconditionError("label matrix rows differ in length");

    // Coincidence matrix o[c][k]: each ordered pair of values within an item
    // contributes 1 / (m_u - 1).
    std::map<int, std::map<int, double>> o;
    for (std::size_t item = 0; item < n_items; ++item) {
        std::map<int, int> counts;
        int mu = 0;
        for (const auto& row : m)
            if (row[item]) {
                ++counts[*row[item]];
                ++mu;
            }
        if (mu < 2) continue;
        for (const auto& [c, nc] : counts)
            for (const auto& [k, nk] : counts) {
                const double pairs = c == k ? static_cast<double>(nc) * (nc - 1) : static_cast<double>(nc) * nk;
                o[c][k] += pairs / (mu - 1);
            }
    }

    std::map<int, double> marginal;
    double n = 0.0;
    for (const auto& [c, row] : o)
        for (const auto& [k, v] : row) {
            marginal[c] += v;
            n += v;
        }
    if (pairable_values(m) < 2) throw PreconditionError("alpha needs at least two pairable values");

    double observed = 0.0;  // sum of off-diagonal coincidences
    for (const auto& [c, row] : o)
        for (const auto& [k, v] : row)
            if (c != k) observed += v;
    if (observed == 0.0) return 1.0;

    double expected = 0.0;  // sum over c != k of n_c * n_k
    for (const auto& [c, nc] : marginal)
        for (const auto& [k, nk] : marginal)
            if (c != k) expected += nc * nk;
    return 1.0 - (n - 1.0) * observed / expected;
}

std::vector<BatchLabels> batch_labels(const std::vector<JudgmentRecord>& records, Question question,
                                      const std::set<std::string>* items) {
    if (!is_pairwise(question)) throw PreconditionError("agreement is defined for pairwise questions");
    std::map<std::string, std::map<std::string, std::map<std::string, Ranking>>> by_batch;  // batch->judge->item
    for (const auto& r : records) {
        if (r.question != question) continue;
        if (items && !items->count(r.pair_id)) continue;
        by_batch[r.batch_id][r.judge_id][r.pair_id] = std::get<Ranking>(r.value);
    }
    std::vector<BatchLabels> out;
    for (const auto& [batch, judges] : by_batch) {
        BatchLabels b;
        b.batch_id = batch;
        std::set<std::string> item_set;
        for (const auto& [judge, labels] : judges) {
            b.judges.push_back(judge);
            for (const auto& [item, v] : labels) item_set.insert(item);
        }
        b.items.assign(item_set.begin(), item_set.end());
        for (const auto& judge : b.judges) {
            const auto& labels = judges.at(judge);
            std::vector<std::optional<int>> row;
            for (const auto& item : b.items) {
                auto it = labels.find(item);
                row.push_back(it == labels.end() ? std::nullopt : std::optional<int>(static_cast<int>(it->second)));
            }
            b.labels.push_back(std::move(row));
        }
        out.push_back(std::move(b));
    }
    return out;
}

AgreementReport agreement_report(const std::vector<BatchLabels>& batches) {
    AgreementReport report;
    std::size_t items = 0, full = 0, majority = 0;
    double best_sum = 0.0, all_sum = 0.0;
    std::size_t best_n = 0, all_n = 0;

    for (const auto& b : batches) {
        BatchAgreement ba;
        ba.batch_id = b.batch_id;
        ba.n_judges = b.judges.size();
        if (b.judges.size() < 2) {
            report.warnings.push_back("batch " + b.batch_id + " skipped: fewer than two judges");
            report.per_batch.push_back(ba);
            continue;
        }
        for (std::size_t item = 0; item < b.items.size(); ++item) {
            std::vector<Ranking> labels;
            for (const auto& row : b.labels)
                if (row[item]) labels.push_back(static_cast<Ranking>(*row[item]));
            if (labels.size() < 2) continue;
            ++ba.n_items;
            if (std::all_of(labels.begin(), labels.end(), [&](Ranking r) { return r == labels[0]; })) ++ba.full_items;
            if (strict_majority(labels)) ++ba.majority_items;
        }
        for (std::size_t a = 0; a < b.judges.size(); ++a)
            for (std::size_t c = a + 1; c < b.judges.size(); ++c) {
                const LabelMatrix sub = {b.labels[a], b.labels[c]};
                if (pairable_values(sub) < 2) continue;
                const double alpha = krippendorff_alpha_nominal(sub);
                if (!ba.best_pair_alpha || alpha > *ba.best_pair_alpha) {
                    ba.best_pair_alpha = alpha;
                    ba.best_pair = {b.judges[a], b.judges[c]};
                }
            }
        if (pairable_values(b.labels) >= 2) ba.alpha_all = krippendorff_alpha_nominal(b.labels);
        if (!ba.best_pair_alpha) {
            report.warnings.push_back("batch " + b.batch_id + " skipped: no judge pair shares two labelled items");
            report.per_batch.push_back(ba);
            continue;
        }
        best_sum += *ba.best_pair_alpha;
        ++best_n;
        if (ba.alpha_all) {
            all_sum += *ba.alpha_all;
            ++all_n;
        }
        items += ba.n_items;
        full += ba.full_items;
        majority += ba.majority_items;
        report.per_batch.push_back(ba);
    }
    if (best_n == 0) throw Error("no batch has two judges with overlapping labels");
    report.alpha_best_pair = best_sum / static_cast<double>(best_n);
    report.alpha_all = all_n ? all_sum / static_cast<double>(all_n) : 0.0;
    report.full_pct = items ? 100.0 * static_cast<double>(full) / static_cast<double>(items) : 0.0;
    report.majority_pct = items ? 100.0 * static_cast<double>(majority) / static_cast<double>(items) : 0.0;
    return report;
}

json to_json(const AgreementReport& r) {
    json batches = json::array();
    for (const auto& b : r.per_batch) {
        json jb = {{"batch_id", b.batch_id},
                   {"n_judges", b.n_judges},
                   {"n_items", b.n_items},
                   {"full_items", b.full_items},
                   {"majority_items", b.majority_items}};
        jb["best_pair_alpha"] = b.best_pair_alpha ? json(*b.best_pair_alpha) : json(nullptr);
        jb["best_pair"] = b.best_pair_alpha ? json::array({b.best_pair.first, b.best_pair.second}) : json(nullptr);
        jb["alpha_all"] = b.alpha_all ? json(*b.alpha_all) : json(nullptr);
        batches.push_back(std::move(jb));
    }
    return {{"alpha_best_pair", r.alpha_best_pair}, {"full_pct", r.full_pct}, {"majority_pct", r.majority_pct},
            {"alpha_all", r.alpha_all},             {"per_batch", batches},  {"warnings", r.warnings}};
}

std::string to_text(const AgreementReport& r) {
    std::ostringstream out;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%-16s %8s %8s %8s %8s\n", "batch", "judges", "items", "alpha", "alpha_all");
    out << buf;
    for (const auto& b : r.per_batch) {
        std::snprintf(buf, sizeof buf, "%-16s %8zu %8zu %8s %8s\n", b.batch_id.c_str(), b.n_judges, b.n_items,
                      b.best_pair_alpha ? std::to_string(*b.best_pair_alpha).substr(0, 6).c_str() : "-",
                      b.alpha_all ? std::to_string(*b.alpha_all).substr(0, 6).c_str() : "-");
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "\nalpha (best pair) %.3f   full %.1f%%   maj. %.1f%%   alpha (all) %.3f\n",
                  r.alpha_best_pair, r.full_pct, r.majority_pct, r.alpha_all);
    out << buf;
    for (const auto& w : r.warnings) out << "warning: " << w << '\n';
    return out.str();
}

// ---------------------------------------------------------------------------
// BWS

std::map<Role, BwsScore> bws_scores(const InstanceVotes& votes) {
    std::map<Role, BwsScore> scores;
    for (Role role : kAllRoles) scores[role].role = role;
    for (PairKind kind : kAllPairKinds) {
        auto it = votes.find(kind);
        if (it == votes.end()) throw PreconditionError("missing EMO vote for pair kind " + to_string(kind));
        const auto [lr, rr] = roles_of(kind);
        BwsScore& l = scores[lr];
        BwsScore& r = scores[rr];
        ++l.comparisons;
        ++r.comparisons;
        if (it->second == Ranking::LeftMore) {
            ++l.wins;
            ++r.losses;
        } else if (it->second == Ranking::RightMore) {
            ++r.wins;
            ++l.losses;
        }
    }
    for (auto& [role, s] : scores)
        s.score = s.comparisons ? static_cast<double>(s.wins - s.losses) / s.comparisons : 0.0;
    return scores;
}

DatasetBws dataset_bws(const std::vector<InstanceVotes>& instances) {
    if (instances.empty()) throw PreconditionError("dataset_bws over no instances");
    DatasetBws out;
    out.n_instances = instances.size();
    for (Role role : kAllRoles) out.mean_score[role] = 0.0;
    for (const auto& votes : instances)
        for (const auto& [role, s] : bws_scores(votes)) out.mean_score[role] += s.score;
    for (auto& [role, v] : out.mean_score) v /= static_cast<double>(instances.size());
    out.emotion_reduced = out.mean_score[Role::E] > out.mean_score[Role::Gminus];
    out.emotion_increased = out.mean_score[Role::Gplus] > out.mean_score[Role::N];
    return out;
}

json to_json(const DatasetBws& d) {
    json scores = json::object();
    for (const auto& [role, v] : d.mean_score) scores[to_string(role)] = v;
    return {{"scores", scores},
            {"n_instances", d.n_instances},
            {"emotion_reduced", d.emotion_reduced},
            {"emotion_increased", d.emotion_increased}};
}

}  // namespace emoconv
