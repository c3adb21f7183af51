#pragma once

// How convincingness rankings move when the emotional intensity of a pair
// changes: per-pair effect categories, the consistency/positivity/negativity
// rates, and the Likert-score variant.

#include <array>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "emoconv/corpus.hpp"
#include "emoconv/fraction.hpp"
#include "emoconv/judgments.hpp"
#include "json.hpp"

namespace emoconv {

enum class EffectCategory { Consistent, Positive, Negative };
inline constexpr std::array<EffectCategory, 3> kAllCategories = {EffectCategory::Consistent, EffectCategory::Positive,
                                                                 EffectCategory::Negative};
std::string to_string(EffectCategory c);
EffectCategory parse_effect_category(std::string_view s);

// Categories of the three counterpart pairs in (ReducedLeft, IncreasedRight, BothShifted) order.
using CategoryTriple = std::array<EffectCategory, 3>;

// In every counterpart pair the left argument's emotional intensity drops
// relative to the right one. Positive: the left argument loses convincingness
// relative to the anchor ranking; Negative: it gains; Consistent: unchanged.
EffectCategory categorize(Ranking anchor, Ranking counterpart);

// Throws PreconditionError when a pair kind is missing.
CategoryTriple instance_categories(const InstanceVotes& votes);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct RateSummary {
    std::string scope;
    double consistency = 0.0;
    double positivity = 0.0;
    double negativity = 0.0;
    std::size_t n_instances = 0;
    std::optional<std::array<Interval, 3>> ci95;  // consistency, positivity, negativity

    double rate(EffectCategory c) const;
};

nlohmann::json to_json(const RateSummary& r);

// Exact rates: count of each category over 3n. Identical to averaging the
// per-instance fractions, but rounded once.
std::array<Fraction, 3> rate_fractions(std::span<const CategoryTriple> instances);

// Pooled rates over all instances. Throws PreconditionError when empty.
RateSummary rates(std::span<const CategoryTriple> instances, const std::string& scope = "pooled");

enum class CiMethod { normal, student_t, none };

struct GroupedRates {
    RateSummary summary;                 // mean over groups, with CI
    std::vector<RateSummary> per_group;  // one per judge unit
};

// Rates per group (judge), then their mean and a 95% interval across groups.
// Groups with no instances are ignored; throws when none remain.
GroupedRates rates_per_group(const std::map<std::string, std::vector<CategoryTriple>>& groups,
                             const std::string& scope, CiMethod method = CiMethod::normal);

// Two-sided 95% interval half-width multiplier for `k` groups.
double ci_multiplier(CiMethod method, std::size_t k);

// ---------------------------------------------------------------------------
// Likert variant

struct LikertInstanceScores {
    std::map<Role, double> means;  // mean 1-5 convincingness per role
    double threshold = 0.5;
};

// LeftMore iff left - right > threshold, RightMore iff < -threshold.
Ranking likert_ranking(double left, double right, double threshold);
InstanceVotes likert_votes(const LikertInstanceScores& scores);
CategoryTriple likert_categorize(const LikertInstanceScores& scores);

// Mean LIKERT_CONV score per role of `instance`; records name the argument id
// in their pair_id field. Throws when a role has no rating.
std::map<Role, double> likert_role_means(const TestInstance& instance, const std::vector<JudgmentRecord>& records);

}  // namespace emoconv
