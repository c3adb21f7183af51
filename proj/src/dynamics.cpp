#include "emoconv/dynamics.hpp"

#include <cmath>

#include "emoconv/error.hpp"

namespace emoconv {

using nlohmann::json;

std::string to_string(EffectCategory c) {
    switch (c) {
        case EffectCategory::Consistent: return "Consistent";
        case EffectCategory::Positive: return "Positive";
        case EffectCategory::Negative: return "Negative";
    }
    return "?";
}

EffectCategory parse_effect_category(std::string_view s) {
    if (s == "Consistent") return EffectCategory::Consistent;
    if (s == "Positive") return EffectCategory::Positive;
    if (s == "Negative") return EffectCategory::Negative;
    throw ValidationError("unknown effect category '" + std::string(s) + "'");
}

EffectCategory categorize(Ranking anchor, Ranking counterpart) {
    if (anchor == counterpart) return EffectCategory::Consistent;
    // Order LeftMore > Equal > RightMore by how strongly the left side wins.
    const auto strength = [](Ranking r) { return r == Ranking::LeftMore ? 2 : r == Ranking::Equal ? 1 : 0; };
    return strength(counterpart) < strength(anchor) ? EffectCategory::Positive : EffectCategory::Negative;
}

CategoryTriple instance_categories(const InstanceVotes& votes) {
    const auto get = [&](PairKind k) {
        auto it = votes.find(k);
        if (it == votes.end()) throw PreconditionError("missing vote for pair kind " + to_string(k));
        return it->second;
    };
    const Ranking anchor = get(PairKind::Anchor);
    CategoryTriple out{};
    for (std::size_t i = 0; i < kCounterpartKinds.size(); ++i) out[i] = categorize(anchor, get(kCounterpartKinds[i]));
    return out;
}

double RateSummary::rate(EffectCategory c) const {
    switch (c) {
        case EffectCategory::Consistent: return consistency;
        case EffectCategory::Positive: return positivity;
        case EffectCategory::Negative: return negativity;
    }
    return 0.0;
}

json to_json(const RateSummary& r) {
    json j = {{"scope", r.scope},
              {"consistency", r.consistency},
              {"positivity", r.positivity},
              {"negativity", r.negativity},
              {"n_instances", r.n_instances}};
    if (r.ci95) {
        const auto& ci = *r.ci95;
        j["ci95"] = {{"consistency", {ci[0].lo, ci[0].hi}},
                     {"positivity", {ci[1].lo, ci[1].hi}},
                     {"negativity", {ci[2].lo, ci[2].hi}}};
    } else {
        j["ci95"] = nullptr;
    }
    return j;
}

std::array<Fraction, 3> rate_fractions(std::span<const CategoryTriple> instances) {
    if (instances.empty()) throw PreconditionError("rates over zero instances");
    std::array<std::int64_t, 3> counts{};
    for (const auto& t : instances)
        for (EffectCategory c : t) ++counts[static_cast<std::size_t>(c)];
    const auto denom = static_cast<std::int64_t>(3 * instances.size());
    return {Fraction(counts[0], denom), Fraction(counts[1], denom), Fraction(counts[2], denom)};
}

RateSummary rates(std::span<const CategoryTriple> instances, const std::string& scope) {
    const auto f = rate_fractions(instances);
    RateSummary r;
    r.scope = scope;
    r.consistency = f[0].value();
    r.positivity = f[1].value();
    r.negativity = f[2].value();
    r.n_instances = instances.size();
    return r;
}

double ci_multiplier(CiMethod method, std::size_t k) {
    if (method == CiMethod::normal) return 1.96;
    if (method == CiMethod::none || k < 2) return 0.0;
    // 0.975 quantiles of Student's t for df = 1..30.
    static constexpr double t975[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
                                      2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
                                      2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045, 2.042};
    const std::size_t df = k - 1;
    return df <= 30 ? t975[df - 1] : 1.96;
}

GroupedRates rates_per_group(const std::map<std::string, std::vector<CategoryTriple>>& groups,
                             const std::string& scope, CiMethod method) {
    GroupedRates out;
    std::vector<std::array<Fraction, 3>> exact;
    std::vector<std::array<double, 3>> values;
    std::size_t total_instances = 0;
    for (const auto& [name, triples] : groups) {
        if (triples.empty()) continue;
        const auto f = rate_fractions(triples);
        exact.push_back(f);
        out.per_group.push_back(rates(triples, name));
        values.push_back({f[0].value(), f[1].value(), f[2].value()});
        total_instances += triples.size();
    }
    if (values.empty()) throw PreconditionError("rates over zero judges");

    const auto k = static_cast<std::int64_t>(values.size());
    std::array<double, 3> mean{};
    try {
        for (std::size_t c = 0; c < 3; ++c) {
            Fraction sum;
            for (const auto& f : exact) sum = sum + f[c];
            mean[c] = (sum / k).value();
        }
    } catch (const std::overflow_error&) {
        // Many groups with coprime sizes; fall back to floating point.
        for (std::size_t c = 0; c < 3; ++c) {
            mean[c] = 0.0;
            for (const auto& v : values) mean[c] += v[c];
            mean[c] /= static_cast<double>(k);
        }
    }
    RateSummary& s = out.summary;
    s.scope = scope;
    s.consistency = mean[0];
    s.positivity = mean[1];
    s.negativity = mean[2];
    s.n_instances = total_instances;

    if (method != CiMethod::none && values.size() >= 2) {
        std::array<Interval, 3> ci{};
        const double z = ci_multiplier(method, values.size());
        for (std::size_t c = 0; c < 3; ++c) {
            const double mean = s.rate(kAllCategories[c]);
            double ss = 0.0;
            for (const auto& v : values) ss += (v[c] - mean) * (v[c] - mean);
            const double sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
            const double half = z * sd / std::sqrt(static_cast<double>(values.size()));
            ci[c] = {mean - half, mean + half};
        }
        s.ci95 = ci;
    }
    return out;
}

Ranking likert_ranking(double left, double right, double threshold) {
    // Means of integer ratings carry representation error (3.2 - 2.2 > 1.0),
    // so differences within 1e-9 of the threshold count as equal to it.
    constexpr double kSlack = 1e-9;
    const double diff = left - right;
    if (diff > threshold + kSlack) return Ranking::LeftMore;
    if (diff < -threshold - kSlack) return Ranking::RightMore;
    return Ranking::Equal;
}

InstanceVotes likert_votes(const LikertInstanceScores& scores) {
    if (!(scores.threshold > 0.0)) throw PreconditionError("Likert threshold must be > 0");
    InstanceVotes votes;
    for (PairKind kind : kAllPairKinds) {
        const auto [lr, rr] = roles_of(kind);
        auto l = scores.means.find(lr);
        auto r = scores.means.find(rr);
        if (l == scores.means.end() || r == scores.means.end())
            throw PreconditionError("Likert scores missing a role for pair kind " + to_string(kind));
        votes[kind] = likert_ranking(l->second, r->second, scores.threshold);
    }
    return votes;
}

CategoryTriple likert_categorize(const LikertInstanceScores& scores) { return instance_categories(likert_votes(scores)); }

std::map<Role, double> likert_role_means(const TestInstance& instance, const std::vector<JudgmentRecord>& records) {
    std::map<std::string, Role> role_of;
    for (const auto& [role, arg] : instance.arguments) role_of[arg.id] = role;
    std::map<Role, std::pair<long, long>> sums;
    for (const auto& r : records) {
        if (r.question != Question::LIKERT_CONV) continue;
        auto it = role_of.find(r.pair_id);
        if (it == role_of.end()) continue;
        auto& [sum, count] = sums[it->second];
        sum += std::get<int>(r.value);
        ++count;
    }
    std::map<Role, double> means;
    for (Role role : kAllRoles) {
        auto it = sums.find(role);
        if (it == sums.end())
            throw PreconditionError("instance " + instance.id + ": no Likert rating for role " + to_string(role));
        means[role] = static_cast<double>(it->second.first) / static_cast<double>(it->second.second);
    }
    return means;
}

}  // namespace emoconv
