// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "emoconv/classify.hpp"
#include "emoconv/counterpart.hpp"
#include "emoconv/dynamics.hpp"
#include "emoconv/judge_harness.hpp"
#include "emoconv/stats.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace emoconv;

namespace {

struct Outcome {
    bool ok = true;
    std::string detail;
};

// Collects the first few failure messages of a criterion.
class Checker {
public:
    void expect(bool condition, const std::string& what) {
        if (condition) return;
        ++failures_;
        if (failures_ <= 3) messages_ << (failures_ > 1 ? "; " : "") << what;
    }
    Outcome outcome(const std::string& summary) const {
        if (failures_ == 0) return {true, summary};
        return {false, std::to_string(failures_) + " failure(s): " + messages_.str()};
    }

private:
    int failures_ = 0;
    std::ostringstream messages_;
};

constexpr Ranking L = Ranking::LeftMore;
constexpr Ranking E = Ranking::Equal;
constexpr Ranking R = Ranking::RightMore;

std::string name(Ranking r) { return to_string(r); }

// Category table written out column by column: anchor ranking, counterpart
// ranking, expected effect.
Outcome table_exhaustiveness() {
    using C = EffectCategory;
    const std::vector<std::tuple<Ranking, Ranking, C>> table = {
        {L, L, C::Consistent}, {L, E, C::Positive},   {L, R, C::Positive},
        {E, L, C::Negative},   {E, E, C::Consistent}, {E, R, C::Positive},
        {R, L, C::Negative},   {R, E, C::Negative},   {R, R, C::Consistent},
    };
    Checker c;
    std::map<C, int> counts;
    for (const auto& [anchor, counterpart, expected] : table) {
        const C got = categorize(anchor, counterpart);
        ++counts[got];
        c.expect(got == expected, name(anchor) + "/" + name(counterpart) + " gave " + to_string(got));
    }
    c.expect(counts[C::Consistent] == 3 && counts[C::Positive] == 3 && counts[C::Negative] == 3, "category counts");
    return c.outcome("9/9 combinations");
}

Outcome rate_formula() {
    std::mt19937 rng(101);
    Checker c;
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 40);
        std::vector<CategoryTriple> triples;
        std::vector<std::array<int, 3>> coded;
        for (int i = 0; i < n; ++i) {
            std::array<int, 3> code{};
            CategoryTriple t{};
            for (std::size_t k = 0; k < 3; ++k) {
                code[k] = static_cast<int>(rng() % 3);
                t[k] = kAllCategories[static_cast<std::size_t>(code[k])];
            }
            triples.push_back(t);
            coded.push_back(code);
        }
        const auto got = rates(triples);
        const auto want = oracle::eq1_rates(coded);
        for (std::size_t k = 0; k < 3; ++k) {
            const double diff = std::abs(got.rate(kAllCategories[k]) - want[k]);
            worst = std::max(worst, diff);
            c.expect(diff <= 1e-12, "trial " + std::to_string(trial) + " category " + std::to_string(k));
        }
        c.expect(std::abs(got.consistency + got.positivity + got.negativity - 1.0) <= 1e-9,
                 "trial " + std::to_string(trial) + " does not sum to 1");
    }
    std::ostringstream s;
    s << "1000 assignments, max deviation " << worst;
    return c.outcome(s.str());
}

Outcome krippendorff() {
    std::mt19937 rng(202);
    Checker c;
    int done = 0;
    double worst = 0.0;
    while (done < 200) {
        const std::size_t judges = 2 + rng() % 5;
        const std::size_t items = 5 + rng() % 26;
        const int categories = 2 + static_cast<int>(rng() % 3);
        LabelMatrix m(judges, std::vector<std::optional<int>>(items));
        for (auto& row : m)
            for (auto& cell : row)
                if (rng() % 100 >= 20) cell = static_cast<int>(rng() % static_cast<unsigned>(categories));
        if (pairable_values(m) < 2) continue;
        ++done;
        const double got = krippendorff_alpha_nominal(m);
        const double want = oracle::alpha_nominal(m);
        worst = std::max(worst, std::abs(got - want));
        c.expect(std::abs(got - want) <= 1e-9, "matrix " + std::to_string(done));
    }
    for (int k = 0; k < 20; ++k) {
        const std::size_t judges = 2 + rng() % 5;
        const std::size_t items = 5 + rng() % 26;
        LabelMatrix m(judges, std::vector<std::optional<int>>(items));
        for (std::size_t u = 0; u < items; ++u) {
            const int v = static_cast<int>(rng() % 3);
            for (std::size_t j = 0; j < judges; ++j) m[j][u] = v;
        }
        c.expect(krippendorff_alpha_nominal(m) == 1.0, "perfect agreement fixture " + std::to_string(k));
    }
    std::ostringstream s;
    s << "200 random matrices, max deviation " << worst << "; 20 perfect-agreement fixtures = 1.0";
    return c.outcome(s.str());
}

Outcome bws() {
    std::mt19937 rng(303);
    Checker c;
    for (int trial = 0; trial < 1000; ++trial) {
        InstanceVotes votes;
        for (PairKind k : kAllPairKinds) votes[k] = kAllRankings[rng() % 3];
        int net = 0;
        for (const auto& [role, s] : bws_scores(votes)) net += s.wins - s.losses;
        c.expect(net == 0, "conservation on random instance " + std::to_string(trial));
    }
    // Latent intensities with E above Gminus and Gplus above N in every instance.
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<InstanceVotes> dataset;
    for (int i = 0; i < 200; ++i) {
        const double e = u(rng), n = u(rng);
        const double gm = e * u(rng), gp = n + (1.0 - n) * u(rng);
        const auto cmp = [](double a, double b) { return std::abs(a - b) < 0.05 ? E : a > b ? L : R; };
        dataset.push_back({{PairKind::Anchor, cmp(e, n)},
                           {PairKind::ReducedLeft, cmp(gm, n)},
                           {PairKind::IncreasedRight, cmp(e, gp)},
                           {PairKind::BothShifted, cmp(gm, gp)}});
    }
    for (const auto& v : dataset) {
        int net = 0;
        for (const auto& [role, s] : bws_scores(v)) net += s.wins - s.losses;
        c.expect(net == 0, "conservation on ordered instance");
    }
    const auto d = dataset_bws(dataset);
    c.expect(d.mean_score.at(Role::E) > d.mean_score.at(Role::Gminus), "score(E) <= score(Gminus)");
    c.expect(d.mean_score.at(Role::Gplus) > d.mean_score.at(Role::N), "score(Gplus) <= score(N)");
    c.expect(d.emotion_reduced && d.emotion_increased, "ordering flags");
    std::ostringstream s;
    s << "net 0 on 1200 instances; E " << d.mean_score.at(Role::E) << " > Gminus " << d.mean_score.at(Role::Gminus)
      << ", Gplus " << d.mean_score.at(Role::Gplus) << " > N " << d.mean_score.at(Role::N);
    return c.outcome(s.str());
}

Outcome majority() {
    Checker c;
    int cases = 0;
    for (int code = 0; code < 243; ++code) {
        std::vector<Ranking> votes;
        for (int k = 0, x = code; k < 5; ++k, x /= 3) votes.push_back(kAllRankings[static_cast<std::size_t>(x % 3)]);
        ++cases;
        std::map<Ranking, int> counts;
        for (Ranking v : votes) ++counts[v];
        Ranking expected = E;
        for (const auto& [r, n] : counts)
            if (n >= 3) expected = r;
        const Ranking got = majority_vote(votes);
        c.expect(got == expected, "case " + std::to_string(code));

        std::vector<Ranking> perm = votes;
        std::sort(perm.begin(), perm.end());
        do {
            if (majority_vote(perm) != got) {
                c.expect(false, "permutation of case " + std::to_string(code));
                break;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));

        std::vector<Ranking> mirrored;
        for (Ranking v : votes) mirrored.push_back(flip(v));
        c.expect(majority_vote(mirrored) == flip(got), "symmetry of case " + std::to_string(code));

        std::vector<JudgeRun> runs;
        for (std::size_t i = 0; i < votes.size(); ++i) {
            JudgeRun run;
            run.run_idx = static_cast<int>(i);
            run.parsed = votes[i];
            runs.push_back(run);
        }
        c.expect(vote_runs(runs) == expected, "vote_runs of case " + std::to_string(code));
    }
    const std::vector<Ranking> tie = {L, L, R, R, E};
    c.expect(majority_vote(tie) == E, "[L,L,R,R,E] is not Equal");
    std::vector<JudgeRun> split(5);
    split[0].parsed = L;
    split[1].parsed = R;
    split[2].parsed = L;
    split[3].parsed = R;
    c.expect(vote_runs(split) == E, "split runs with an invalid run are not Equal");
    return c.outcome(std::to_string(cases) + " five-vote cases with all permutations");
}

Outcome retry_loop() {
    Checker c;
    for (int k = 0; k <= 7; ++k) {
        auto mock = std::make_shared<MockProvider>();
        MockProvider::Rule gen;
        gen.system_contains = "with emotions";
        for (int i = 1; i <= 8; ++i)
            gen.steps.push_back({200, "Generated argument: candidate [c" + std::to_string(i) + "]\nExplanation: x"});
        mock->add_rule(gen);
        for (int i = 1; i <= 8; ++i) {
            MockProvider::Rule verify;
            verify.system_contains = "Rate how likely";
            verify.user_contains = "[c" + std::to_string(i) + "]";
            verify.steps = {{200, i <= k ? "10" : "90"}};
            mock->add_rule(verify);
        }
        Gateway gateway(mock, RetryPolicy{1, std::chrono::milliseconds(0), 1.0});
        const PromptSet prompts;
        Classifier verifier(gateway, prompts, "m");
        CounterpartGenerator generator(gateway, prompts, verifier, GenerationOptions{"m", {}, std::nullopt});
        const auto out = generator.generate(fixtures::argument("n", "A plain source", Role::N), Direction::add);
        const int expected_rounds = std::min(k + 1, 5);
        c.expect(out.record.rounds_used == expected_rounds,
                 "k=" + std::to_string(k) + " used " + std::to_string(out.record.rounds_used) + " rounds");
        c.expect(out.record.accepted == (k < 5), "k=" + std::to_string(k) + " acceptance flag");
    }
    return c.outcome("k = 0..7 rejections");
}

Outcome end_to_end() {
    Checker c;
    const auto start = std::chrono::steady_clock::now();
    fixtures::ScratchDir first("acc-e2e"), second("acc-e2e");
    const auto a = fixtures::run_pipeline(first.path());
    const auto b = fixtures::run_pipeline(second.path());
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    c.expect(a.report.json == b.report.json, "reports differ between runs");
    c.expect(a.report.csv == b.report.csv, "plot CSV differs between runs");
    c.expect(a.instances == b.instances, "instances differ between runs");
    c.expect(a.runs == b.runs, "judge runs differ between runs");

    using X = fixtures::Expected;
    const auto& j = a.report.json;
    const auto& human = j["datasets"]["e2e"]["human"];
    c.expect(human["majority"]["consistency"] == X::majority_c && human["majority"]["positivity"] == X::majority_p &&
                 human["majority"]["negativity"] == X::majority_n,
             "majority rates");
    c.expect(human["per_judge"]["summary"]["consistency"] == X::judge_mean_c &&
                 human["per_judge"]["summary"]["positivity"] == X::judge_mean_p &&
                 human["per_judge"]["summary"]["negativity"] == X::judge_mean_n,
             "per-judge mean rates");
    const auto& llm = j["datasets"]["e2e"]["llm"]["mock-judge#p1"];
    c.expect(llm["consistency"] == X::llm_c && llm["positivity"] == X::llm_p && llm["negativity"] == X::llm_n, "LLM rates");
    c.expect(j["alignment"].size() == 1 && j["alignment"][0]["static_macro_f1"] == X::static_f1 &&
                 j["alignment"][0]["dynamic_macro_f1"] == X::dynamic_f1,
             "macro F1");
    c.expect(seconds < 60.0, "took " + std::to_string(seconds) + " s");
    std::ostringstream s;
    s << "two identical runs, exact rates and F1 (static 1177/1311, dynamic 628/819), " << seconds << " s";
    return c.outcome(s.str());
}

std::size_t consistent_count(const std::vector<LikertInstanceScores>& instances, double threshold) {
    std::size_t n = 0;
    for (auto s : instances) {
        s.threshold = threshold;
        for (EffectCategory cat : likert_categorize(s)) n += cat == EffectCategory::Consistent;
    }
    return n;
}

LikertInstanceScores likert(double e, double n, double gm, double gp) {
    return {{{Role::E, e}, {Role::N, n}, {Role::Gminus, gm}, {Role::Gplus, gp}}, 0.5};
}

Outcome likert_monotonicity() {
    Checker c;
    std::mt19937 rng(404);
    // Each role score is the mean of five 1-5 ratings.
    std::uniform_int_distribution<int> rating(1, 5);
    const auto mean_of_five = [&] {
        int sum = 0;
        for (int k = 0; k < 5; ++k) sum += rating(rng);
        return sum / 5.0;
    };
    std::vector<LikertInstanceScores> random;
    for (int i = 0; i < 500; ++i) {
        const double e = mean_of_five(), n = mean_of_five(), gm = mean_of_five(), gp = mean_of_five();
        random.push_back(likert(e, n, gm, gp));
    }
    const auto r05 = consistent_count(random, 0.5), r10 = consistent_count(random, 1.0);
    c.expect(r10 >= r05, "random instances: " + std::to_string(r10) + " < " + std::to_string(r05));

    // 22 flat, 3 with a 0.75 gap on E, 1 with 0.75 gaps on E and Gplus, 14 with gaps of 2.
    std::vector<LikertInstanceScores> fixture;
    for (int i = 0; i < 22; ++i) fixture.push_back(likert(3.0, 3.0, 3.0, 3.0));
    for (int i = 0; i < 3; ++i) fixture.push_back(likert(3.75, 3.0, 3.0, 3.0));
    fixture.push_back(likert(3.75, 3.0, 3.0, 3.75));
    for (int i = 0; i < 14; ++i) fixture.push_back(likert(5.0, 3.0, 1.0, 5.0));
    const auto f05 = consistent_count(fixture, 0.5), f10 = consistent_count(fixture, 1.0);
    c.expect(f05 == 69, "fixture at 0.5 gave " + std::to_string(f05) + "/120");
    c.expect(f10 >= f05, "fixture rate fell when raising the threshold");
    std::ostringstream s;
    s << "random " << r05 << " -> " << r10 << " of 1500; fixture " << f05 << "/120 (" << 100.0 * f05 / 120 << "%) -> " << f10
      << "/120 (" << 100.0 * f10 / 120 << "%)";
    return c.outcome(s.str());
}

Outcome calibration() {
    Checker c;
    std::mt19937 rng(505);
    int precision_cases = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<int> ratings;
        std::vector<bool> gold;
        for (std::size_t i = 0; i < n; ++i) {
            // Coarse ratings so ties between thresholds are common.
            ratings.push_back(static_cast<int>(rng() % 11) * 10);
            gold.push_back(rng() % 2 == 0);
        }
        gold[0] = true;
        gold[1] = false;
        const int step = std::array<int, 4>{1, 5, 10, 7}[static_cast<std::size_t>(trial % 4)];
        const auto got = calibrate_threshold(ratings, gold, {}, step);
        const int want = oracle::best_f1_threshold(ratings, gold, step);
        c.expect(got.threshold == want, "trial " + std::to_string(trial) + ": " + std::to_string(got.threshold) +
                                            " vs " + std::to_string(want));
        const auto grid = oracle::grid(step);
        c.expect(got.sweep.size() == grid.size(), "sweep length in trial " + std::to_string(trial));
        for (std::size_t i = 0; i < std::min(grid.size(), got.sweep.size()); ++i) {
            const auto pt = oracle::binary_point(ratings, gold, grid[i]);
            const double mf1 = static_cast<double>(pt.macro_f1.num) / static_cast<double>(pt.macro_f1.den);
            c.expect(got.sweep[i].threshold == grid[i] && std::abs(got.sweep[i].macro_f1 - mf1) <= 1e-12,
                     "sweep row " + std::to_string(i) + " in trial " + std::to_string(trial));
        }
        const double p = 0.5 + 0.1 * static_cast<double>(trial % 5);
        const int want_p = oracle::min_precision_threshold(ratings, gold, step, p);
        if (want_p >= 0) {
            ++precision_cases;
            const auto gp = calibrate_threshold(ratings, gold, CalibrationCriterion::precision_at_least(p), step);
            c.expect(gp.threshold == want_p, "precision criterion in trial " + std::to_string(trial));
        } else {
            bool threw = false;
            try {
                calibrate_threshold(ratings, gold, CalibrationCriterion::precision_at_least(p), step);
            } catch (const Error&) {
                threw = true;
            }
            c.expect(threw, "unmet precision criterion did not throw in trial " + std::to_string(trial));
        }
    }
    return c.outcome("100 fixtures, max-F1 and " + std::to_string(precision_cases) + " precision-criterion thresholds");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"category table exhaustiveness", table_exhaustiveness},
        {"rate formula", rate_formula},
        {"Krippendorff alpha oracle", krippendorff},
        {"BWS conservation and ordering", bws},
        {"majority vote properties", majority},
        {"counterpart retry loop", retry_loop},
        {"mock end-to-end", end_to_end},
        {"Likert threshold monotonicity", likert_monotonicity},
        {"calibration oracle", calibration},
    };
    int failed = 0;
    for (const auto& [label, check] : criteria) {
        Outcome o;
        const auto start = std::chrono::steady_clock::now();
        try {
            o = check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        failed += !o.ok;
        std::cout << (o.ok ? "PASS" : "FAIL") << "  " << label << ": " << o.detail << " [" << static_cast<long>(ms)
                  << " ms]\n";
    }
    std::cout << (failed ? "FAILED " + std::to_string(failed) + " criteria" : std::string("all criteria passed")) << "\n";
    return failed ? 1 : 0;
}
