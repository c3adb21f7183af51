#pragma once

// Inter-annotator agreement and best-worst scaling of emotion comparisons.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/judgments.hpp"
#include "json.hpp"

namespace emoconv {

// judges x items; std::nullopt marks a missing label.
using LabelMatrix = std::vector<std::vector<std::optional<int>>>;

// Number of values in items that carry at least two labels.
std::size_t pairable_values(const LabelMatrix& m);

// Nominal Krippendorff's alpha from the coincidence matrix, missing cells
// allowed. Returns 1.0 when no disagreement is observed. Throws
// PreconditionError with fewer than two judges or two pairable values.
double krippendorff_alpha_nominal(const LabelMatrix& m);

struct BatchLabels {
    std::string batch_id;
    std::vector<std::string> judges;
    std::vector<std::string> items;
    LabelMatrix labels;
};

// Groups pairwise records of one question by batch into judge x item matrices.
// When `items` is given, only those pair ids are kept (attention checks excluded).
std::vector<BatchLabels> batch_labels(const std::vector<JudgmentRecord>& records, Question question,
                                      const std::set<std::string>* items = nullptr);

struct BatchAgreement {
    std::string batch_id;
    std::size_t n_judges = 0;
    std::size_t n_items = 0;        // items with at least two labels
    std::size_t full_items = 0;     // all labels identical
    std::size_t majority_items = 0; // a label held by more than half
    std::optional<double> best_pair_alpha;
    std::pair<std::string, std::string> best_pair;
    std::optional<double> alpha_all;
};

struct AgreementReport {
    double alpha_best_pair = 0.0;  // mean over batches of the best judge-pair alpha
    double full_pct = 0.0;
    double majority_pct = 0.0;
    double alpha_all = 0.0;        // mean over batches of alpha over all judges
    std::vector<BatchAgreement> per_batch;
    std::vector<std::string> warnings;
};

nlohmann::json to_json(const AgreementReport& r);
std::string to_text(const AgreementReport& r);

// Batches with fewer than two judges are skipped with a warning. Throws Error
// when no batch is usable.
AgreementReport agreement_report(const std::vector<BatchLabels>& batches);

// ---------------------------------------------------------------------------
// Best-worst scaling

struct BwsScore {
    Role role = Role::E;
    double score = 0.0;  // (wins - losses) / comparisons, 0 without comparisons
    int wins = 0;
    int losses = 0;
    int comparisons = 0;
};

// Scores from the EMO majority votes of one instance. Every role takes part
// in exactly two pairs; Equal counts as a comparison without win or loss.
std::map<Role, BwsScore> bws_scores(const InstanceVotes& votes);

struct DatasetBws {
    std::map<Role, double> mean_score;
    std::size_t n_instances = 0;
    bool emotion_reduced = false;    // score(E) > score(Gminus)
    bool emotion_increased = false;  // score(Gplus) > score(N)
};

DatasetBws dataset_bws(const std::vector<InstanceVotes>& instances);
nlohmann::json to_json(const DatasetBws& d);

}  // namespace emoconv
