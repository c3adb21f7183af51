#include <algorithm>
#include <random>
#include <thread>

#include "doctest.h"
#include "emoconv/dynamics.hpp"
#include "emoconv/error.hpp"
#include "emoconv/judgments.hpp"
#include "emoconv/stats.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace emoconv;
using fixtures::E;
using fixtures::L;
using fixtures::R;
using fixtures::vote;

namespace {

constexpr auto C = EffectCategory::Consistent;
constexpr auto P = EffectCategory::Positive;
constexpr auto N = EffectCategory::Negative;

InstanceVotes votes4(Ranking a, Ranking rl, Ranking ir, Ranking bs) {
    return {{PairKind::Anchor, a}, {PairKind::ReducedLeft, rl}, {PairKind::IncreasedRight, ir}, {PairKind::BothShifted, bs}};
}

Ranking random_ranking(std::mt19937& rng) { return kAllRankings[rng() % 3]; }

std::vector<AttentionAnswer> answers(std::initializer_list<bool> passed) {
    std::vector<AttentionAnswer> out;
    int k = 0;
    for (bool p : passed) out.push_back({"c" + std::to_string(k++), p});
    return out;
}

LabelMatrix random_matrix(std::mt19937& rng, std::size_t judges, std::size_t items, int labels, double missing) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LabelMatrix m(judges, std::vector<std::optional<int>>(items));
    for (auto& row : m)
        for (auto& cell : row)
            if (u(rng) >= missing) cell = static_cast<int>(rng() % static_cast<unsigned>(labels));
    return m;
}

}  // namespace

TEST_SUITE("judgments") {

TEST_CASE("screening rejects at two failed checks") {
    CHECK(screen_submission({"j", "b", {}, answers({true, true, false})}) == ScreeningOutcome::accepted);
    CHECK(screen_submission({"j", "b", {}, answers({true, false, false})}) == ScreeningOutcome::rejected);
    CHECK(screen_submission({"j", "b", {}, answers({true, true, true})}) == ScreeningOutcome::accepted);
    CHECK(screen_submission({"j", "b", {}, answers({false, false, false})}) == ScreeningOutcome::rejected);
    CHECK_THROWS_AS(screen_submission({"j", "b", {}, {}}), PreconditionError);
    CHECK_THROWS_AS(screen_submission({"j", "b", {}, answers({true, true})}), PreconditionError);
}

TEST_CASE("majority vote examples") {
    const std::vector<Ranking> a = {L, L, L, R, E}, b = {L, L, R, R, E}, c = {E};
    CHECK(majority_vote(a) == L);
    CHECK(majority_vote(b) == E);
    CHECK(majority_vote(c) == E);
    CHECK(majority_vote(std::vector<Ranking>{R}) == R);
    CHECK(majority_vote(std::vector<Ranking>{L, R}) == E);
    CHECK_THROWS_AS(majority_vote(std::vector<Ranking>{}), PreconditionError);
}

TEST_CASE("majority vote is permutation invariant, symmetric and stable under extra winner votes") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<Ranking> v(1 + rng() % 9);
        for (auto& x : v) x = random_ranking(rng);
        const Ranking out = majority_vote(v);
        auto shuffled = v;
        std::shuffle(shuffled.begin(), shuffled.end(), rng);
        CHECK(majority_vote(shuffled) == out);
        std::vector<Ranking> flipped;
        for (auto x : v) flipped.push_back(flip(x));
        CHECK(majority_vote(flipped) == flip(out));
        if (auto winner = strict_majority(v)) {
            v.push_back(*winner);
            CHECK(majority_vote(v) == *winner);
        }
    }
}

TEST_CASE("similarity means") {
    std::vector<JudgmentRecord> recs;
    const auto sim = [&](const std::string& pair, int v) {
        JudgmentRecord r = vote("j" + std::to_string(recs.size()), pair, Question::SIM, L);
        r.value = v;
        recs.push_back(r);
    };
    sim("p1", 4);
    sim("p1", 5);
    sim("p1", 5);
    sim("p2", 5);
    sim("p3", 1);
    sim("p3", 5);
    const auto s = aggregate_similarity(recs);
    CHECK(s.per_pair.at("p1") == doctest::Approx(14.0 / 3.0));
    CHECK(s.per_pair.at("p2") == 5.0);
    CHECK(s.per_pair.at("p3") == 3.0);
    CHECK(s.grand_mean == doctest::Approx((14.0 / 3.0 + 5.0 + 3.0) / 3.0));
    CHECK_THROWS_AS(aggregate_similarity({}), PreconditionError);
}

TEST_CASE("record validation and JSON round trip") {
    auto r = vote("j", "p", Question::CONV, R);
    CHECK(judgment_from_json(to_json(r)) == r);
    auto sim = r;
    sim.question = Question::SIM;
    CHECK_THROWS_AS(validate(sim), ValidationError);
    sim.value = 6;
    CHECK_THROWS_AS(validate(sim), ValidationError);
    sim.value = 3;
    CHECK_NOTHROW(validate(sim));
    CHECK(judgment_from_json(to_json(sim)) == sim);
    auto bad = r;
    bad.value = 2;
    CHECK_THROWS_AS(validate(bad), ValidationError);
    bad = r;
    bad.judge_id.clear();
    CHECK_THROWS_AS(validate(bad), ValidationError);

    const std::string text = to_json(r).dump() + "\n" + R"({"judge_id":"j","pair_id":"p","question":"EMO","value":"Sideways","batch_id":"b"})";
    try {
        parse_judgments(text);
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(e.line == 2);
    }
}

TEST_CASE("CSV export") {
    auto r = vote("j,1", "p", Question::EMO, L);
    CHECK(judgments_to_csv({r}) == "judge_id,pair_id,question,value\n\"j,1\",p,EMO,LeftMore\n");
}

TEST_CASE("rejected submissions contribute no records") {
    std::vector<JudgmentRecord> recs = {vote("a", "p1", Question::CONV, L), vote("a", "p2", Question::CONV, L),
                                        vote("b", "p1", Question::CONV, R), vote("c", "p1", Question::CONV, E)};
    auto llm = vote("m#0", "p1", Question::CONV, L);
    llm.judge_kind = JudgeKind::llm_run;
    recs.push_back(llm);
    const std::vector<SubmissionDecision> decisions = {{"a", "b1", ScreeningOutcome::accepted, {}, ""},
                                                       {"b", "b1", ScreeningOutcome::rejected, {}, ""}};
    const auto strict = accepted_records(recs, decisions, true);
    CHECK(strict.size() == 3);
    CHECK(std::none_of(strict.begin(), strict.end(), [](const auto& r) { return r.judge_id == "b"; }));
    CHECK(accepted_records(recs, decisions, false).size() == 4);
}

TEST_CASE("store appends, rejects duplicates and rebuilds its index") {
    fixtures::ScratchDir dir("store");
    {
        JudgmentStore store(dir.path());
        CHECK(store.append(vote("j", "p1", Question::CONV, L)) == JudgmentStore::AppendStatus::stored);
        CHECK(store.append(vote("j", "p1", Question::EMO, L)) == JudgmentStore::AppendStatus::stored);
        CHECK(store.append(vote("j", "p1", Question::CONV, R)) == JudgmentStore::AppendStatus::duplicate);
        CHECK(store.append(vote("j", "p1", Question::CONV, R, "b2")) == JudgmentStore::AppendStatus::stored);
        CHECK_THROWS_AS(store.append(vote("j", "p9", Question::CONV, R, "../x")), ValidationError);
        CHECK(store.finalize({"j", "b1", ScreeningOutcome::rejected, {{"c", false}}, "t"}));
        CHECK_FALSE(store.finalize({"j", "b1", ScreeningOutcome::accepted, {}, "t"}));
        CHECK(store.records("b1").size() == 2);
    }
    JudgmentStore reopened(dir.path());
    CHECK(reopened.records("b1").size() == 2);
    CHECK(reopened.records("b2").size() == 1);
    CHECK(reopened.append(vote("j", "p1", Question::CONV, E)) == JudgmentStore::AppendStatus::duplicate);
    REQUIRE(reopened.decision("b1", "j").has_value());
    CHECK(reopened.decision("b1", "j")->outcome == ScreeningOutcome::rejected);
    CHECK(reopened.accepted().empty());
    CHECK(std::filesystem::exists(JudgmentStore::judgments_file(dir.path(), "b1")));
}

TEST_CASE("store serializes concurrent appends") {
    fixtures::ScratchDir dir("store-mt");
    JudgmentStore store(dir.path());
    std::vector<std::thread> threads;
    std::atomic<int> stored{0};
    for (int t = 0; t < 8; ++t)
        threads.emplace_back([&, t] {
            for (int i = 0; i < 50; ++i)
                if (store.append(vote("j" + std::to_string(t % 4), "p" + std::to_string(i), Question::CONV, L)) ==
                    JudgmentStore::AppendStatus::stored)
                    ++stored;
        });
    for (auto& th : threads) th.join();
    CHECK(stored.load() == 200);
    CHECK(store.records("b1").size() == 200);
    CHECK(load_judgments(JudgmentStore::judgments_file(dir.path(), "b1")).size() == 200);
}

}  // TEST_SUITE

TEST_SUITE("dynamics") {

TEST_CASE("categorize examples") {
    CHECK(categorize(L, E) == P);
    CHECK(categorize(E, L) == N);
    CHECK(categorize(R, R) == C);
}

TEST_CASE("categorize flip symmetry") {
    for (Ranking a : kAllRankings)
        for (Ranking b : kAllRankings) {
            const auto c = categorize(a, b);
            const auto f = categorize(flip(a), flip(b));
            CHECK(f == (c == C ? C : c == P ? N : P));
        }
}

TEST_CASE("instance categories") {
    CHECK(instance_categories(votes4(L, E, E, E)) == CategoryTriple{P, P, P});
    CHECK(instance_categories(votes4(E, E, E, E)) == CategoryTriple{C, C, C});
    CHECK(instance_categories(votes4(R, L, R, E)) == CategoryTriple{N, C, N});
    auto missing = votes4(L, L, L, L);
    missing.erase(PairKind::BothShifted);
    CHECK_THROWS_AS(instance_categories(missing), PreconditionError);
}

TEST_CASE("rate examples") {
    const std::vector<CategoryTriple> one = {{C, P, N}};
    auto r = rates(one);
    CHECK(r.consistency == doctest::Approx(1.0 / 3));
    CHECK(r.positivity == doctest::Approx(1.0 / 3));
    CHECK(r.negativity == doctest::Approx(1.0 / 3));
    const std::vector<CategoryTriple> two = {{C, C, C}, {P, P, P}};
    r = rates(two);
    CHECK(r.consistency == 0.5);
    CHECK(r.positivity == 0.5);
    CHECK(r.negativity == 0.0);
    const std::vector<CategoryTriple> all_c(4, CategoryTriple{C, C, C});
    r = rates(all_c);
    CHECK(r.consistency == 1.0);
    CHECK(r.n_instances == 4);
    CHECK_THROWS_AS(rates(std::vector<CategoryTriple>{}), PreconditionError);
}

TEST_CASE("per-judge rates with normal interval") {
    std::map<std::string, std::vector<CategoryTriple>> groups;
    groups["a"] = {{C, C, C}};
    groups["b"] = {{P, P, P}};
    groups["c"] = {};
    const auto g = rates_per_group(groups, "ds");
    CHECK(g.per_group.size() == 2);
    CHECK(g.summary.consistency == 0.5);
    REQUIRE(g.summary.ci95.has_value());
    const double half = 1.96 * std::sqrt(0.5) / std::sqrt(2.0);
    CHECK((*g.summary.ci95)[0].lo == doctest::Approx(0.5 - half));
    CHECK((*g.summary.ci95)[0].hi == doctest::Approx(0.5 + half));
    CHECK((*g.summary.ci95)[2].lo == 0.0);

    const auto t = rates_per_group(groups, "ds", CiMethod::student_t);
    CHECK((*t.summary.ci95)[0].hi == doctest::Approx(0.5 + 12.706 * std::sqrt(0.5) / std::sqrt(2.0)));
    CHECK_FALSE(rates_per_group(groups, "ds", CiMethod::none).summary.ci95.has_value());
    CHECK_FALSE(rates_per_group({{"a", {{C, C, C}}}}, "ds").summary.ci95.has_value());
    CHECK_THROWS_AS(rates_per_group({{"a", {}}}, "ds"), PreconditionError);
}

TEST_CASE("rates always sum to one") {
    std::mt19937 rng(19);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<CategoryTriple> v(1 + rng() % 40);
        for (auto& t : v)
            for (auto& c : t) c = kAllCategories[rng() % 3];
        const auto r = rates(v);
        CHECK(std::abs(r.consistency + r.positivity + r.negativity - 1.0) <= 1e-9);
        for (double x : {r.consistency, r.positivity, r.negativity}) {
            CHECK(x >= 0.0);
            CHECK(x <= 1.0);
        }
        // The rates do not depend on the order of the counterpart positions.
        auto permuted = v;
        for (auto& t : permuted) std::reverse(t.begin(), t.end());
        CHECK(rates(permuted).consistency == r.consistency);
    }
}

TEST_CASE("Likert categorization") {
    LikertInstanceScores s;
    s.means = {{Role::E, 4.0}, {Role::N, 3.0}, {Role::Gminus, 3.0}, {Role::Gplus, 3.0}};
    s.threshold = 0.5;
    CHECK(likert_votes(s).at(PairKind::Anchor) == L);
    CHECK(likert_votes(s).at(PairKind::ReducedLeft) == E);
    CHECK(likert_categorize(s)[0] == P);

    s.means = {{Role::E, 3.5}, {Role::N, 3.5}, {Role::Gminus, 3.5}, {Role::Gplus, 3.5}};
    CHECK(likert_categorize(s) == CategoryTriple{C, C, C});

    CHECK(likert_ranking(3.2, 2.2, 1.0) == E);
    CHECK(likert_ranking(3.3, 2.2, 1.0) == L);
    CHECK(likert_ranking(2.2, 3.3, 1.0) == R);
    s.threshold = 0.0;
    CHECK_THROWS_AS(likert_categorize(s), PreconditionError);
}

TEST_CASE("Likert consistency count does not fall with a higher threshold in aggregate") {
    // Each role score is the mean of five 1-5 ratings.
    std::mt19937 rng(23);
    std::uniform_int_distribution<int> rating(1, 5);
    const auto mean_of_five = [&] {
        int sum = 0;
        for (int k = 0; k < 5; ++k) sum += rating(rng);
        return sum / 5.0;
    };
    const std::vector<double> thresholds = {0.5, 1.0, 1.5, 2.0};
    std::vector<int> consistent(thresholds.size(), 0);
    for (int i = 0; i < 500; ++i) {
        LikertInstanceScores s;
        for (Role r : kAllRoles) s.means[r] = mean_of_five();
        for (std::size_t k = 0; k < thresholds.size(); ++k) {
            s.threshold = thresholds[k];
            for (auto c : likert_categorize(s)) consistent[k] += c == C;
        }
    }
    for (std::size_t k = 1; k < thresholds.size(); ++k) CHECK(consistent[k] >= consistent[k - 1]);
}

TEST_CASE("Likert role means from records") {
    const auto inst = fixtures::instance("i");
    std::vector<JudgmentRecord> recs;
    int judge = 0;
    for (Role role : kAllRoles)
        for (int v : {3, 4}) {
            auto r = vote("j" + std::to_string(judge++), inst.argument(role).id, Question::LIKERT_CONV, E);
            r.value = role == Role::E ? 5 : v;
            recs.push_back(r);
        }
    const auto means = likert_role_means(inst, recs);
    CHECK(means.at(Role::E) == 5.0);
    CHECK(means.at(Role::N) == 3.5);
    recs.erase(std::remove_if(recs.begin(), recs.end(), [&](const auto& r) { return r.pair_id == inst.argument(Role::Gplus).id; }),
               recs.end());
    CHECK_THROWS_AS(likert_role_means(inst, recs), PreconditionError);
}

}  // TEST_SUITE

TEST_SUITE("stats") {

TEST_CASE("alpha examples") {
    LabelMatrix same(2, std::vector<std::optional<int>>(10));
    for (int i = 0; i < 10; ++i) same[0][static_cast<std::size_t>(i)] = same[1][static_cast<std::size_t>(i)] = i % 3;
    CHECK(krippendorff_alpha_nominal(same) == 1.0);

    std::mt19937 rng(2);
    const auto m = random_matrix(rng, 3, 12, 3, 0.0);
    CHECK(krippendorff_alpha_nominal(m) == doctest::Approx(oracle::alpha_nominal(m)).epsilon(1e-12));

    LabelMatrix opposite = {{0, 1, 0, 1}, {1, 0, 1, 0}};
    CHECK(krippendorff_alpha_nominal(opposite) < 0.0);

    // Two judges, one item each with one disagreement: textbook value.
    LabelMatrix small = {{0, 0, 1, 1}, {0, 1, 1, 1}};
    CHECK(krippendorff_alpha_nominal(small) == doctest::Approx(oracle::alpha_nominal(small)));
}

TEST_CASE("alpha preconditions") {
    CHECK_THROWS_AS(krippendorff_alpha_nominal({{0, 1}}), PreconditionError);
    CHECK_THROWS_AS(krippendorff_alpha_nominal({{0, std::nullopt}, {std::nullopt, 1}}), PreconditionError);
    CHECK_THROWS_AS(krippendorff_alpha_nominal({{0, 1}, {0}}), PreconditionError);
    CHECK(pairable_values({{0, std::nullopt, 1}, {0, 1, std::nullopt}}) == 2);
}

TEST_CASE("alpha invariances") {
    std::mt19937 rng(13);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t judges = 2 + rng() % 4, items = 5 + rng() % 20;
        const auto m = random_matrix(rng, judges, items, 3, 0.15);
        if (pairable_values(m) < 2) continue;
        double a;
        try {
            a = krippendorff_alpha_nominal(m);
        } catch (const PreconditionError&) {
            continue;
        }
        auto relabeled = m;
        for (auto& row : relabeled)
            for (auto& c : row)
                if (c) c = (*c + 1) % 3;
        CHECK(krippendorff_alpha_nominal(relabeled) == doctest::Approx(a).epsilon(1e-12));
        auto reordered = m;
        std::reverse(reordered.begin(), reordered.end());
        CHECK(krippendorff_alpha_nominal(reordered) == doctest::Approx(a).epsilon(1e-12));
        auto cloned = m;
        cloned.insert(cloned.end(), m.begin(), m.end());
        CHECK(std::abs(krippendorff_alpha_nominal(cloned) - oracle::alpha_nominal(cloned)) <= 1e-9);
    }
}

TEST_CASE("alpha on judge-cloned data equals the original when no disagreement is added") {
    LabelMatrix m = {{0, 1, 2, 0, 1}, {0, 1, 2, 0, 1}};
    auto cloned = m;
    cloned.insert(cloned.end(), m.begin(), m.end());
    CHECK(krippendorff_alpha_nominal(cloned) == krippendorff_alpha_nominal(m));
}

TEST_CASE("agreement report examples") {
    SUBCASE("identical judges") {
        std::vector<JudgmentRecord> recs;
        for (const char* j : {"a", "b", "c"})
            for (int i = 0; i < 6; ++i) recs.push_back(vote(j, "p" + std::to_string(i), Question::CONV, kAllRankings[static_cast<std::size_t>(i % 3)]));
        const auto r = agreement_report(batch_labels(recs, Question::CONV));
        CHECK(r.alpha_best_pair == 1.0);
        CHECK(r.full_pct == 100.0);
        CHECK(r.majority_pct == 100.0);
        CHECK(r.alpha_all == 1.0);
    }
    SUBCASE("three of five agree everywhere") {
        std::vector<JudgmentRecord> recs;
        const std::array<Ranking, 5> pattern = {L, L, L, R, E};
        for (std::size_t j = 0; j < 5; ++j)
            for (int i = 0; i < 4; ++i) recs.push_back(vote("j" + std::to_string(j), "p" + std::to_string(i), Question::CONV, pattern[j]));
        const auto r = agreement_report(batch_labels(recs, Question::CONV));
        CHECK(r.full_pct == 0.0);
        CHECK(r.majority_pct == 100.0);
    }
    SUBCASE("mean of best pairs over batches") {
        // Batch b1: best pair alpha 1; batch b2: two judges that always disagree on binary labels.
        std::vector<JudgmentRecord> recs;
        for (int i = 0; i < 4; ++i) {
            const Ranking x = i % 2 ? L : R;
            recs.push_back(vote("a", "p" + std::to_string(i), Question::CONV, x, "b1"));
            recs.push_back(vote("b", "p" + std::to_string(i), Question::CONV, x, "b1"));
            recs.push_back(vote("c", "q" + std::to_string(i), Question::CONV, x, "b2"));
            recs.push_back(vote("d", "q" + std::to_string(i), Question::CONV, flip(x), "b2"));
        }
        const auto batches = batch_labels(recs, Question::CONV);
        REQUIRE(batches.size() == 2);
        const double b2 = krippendorff_alpha_nominal(batches[1].labels);
        const auto r = agreement_report(batches);
        CHECK(r.alpha_best_pair == doctest::Approx((1.0 + b2) / 2.0));
        CHECK(r.per_batch[0].best_pair == std::pair<std::string, std::string>{"a", "b"});
    }
    SUBCASE("single-judge batches are skipped with a warning") {
        std::vector<JudgmentRecord> recs = {vote("a", "p", Question::CONV, L, "b1"), vote("a", "q", Question::CONV, L, "b2"),
                                            vote("b", "q", Question::CONV, L, "b2"), vote("b", "r", Question::CONV, R, "b2"),
                                            vote("a", "r", Question::CONV, L, "b2")};
        const auto r = agreement_report(batch_labels(recs, Question::CONV));
        CHECK(r.warnings.size() == 1);
        REQUIRE(r.per_batch.size() == 2);
        CHECK_FALSE(r.per_batch[0].best_pair_alpha.has_value());
        CHECK(r.per_batch[1].best_pair_alpha.has_value());
        CHECK_THROWS_AS(agreement_report(batch_labels({recs[0]}, Question::CONV)), Error);
    }
}

TEST_CASE("agreement ignores items outside the given set") {
    std::vector<JudgmentRecord> recs = {vote("a", "p", Question::CONV, L), vote("b", "p", Question::CONV, L),
                                        vote("a", "check", Question::CONV, L), vote("b", "check", Question::CONV, R)};
    const std::set<std::string> keep = {"p"};
    const auto batches = batch_labels(recs, Question::CONV, &keep);
    REQUIRE(batches.size() == 1);
    CHECK(batches[0].items == std::vector<std::string>{"p"});
}

TEST_CASE("full agreement never exceeds majority agreement") {
    std::mt19937 rng(29);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<JudgmentRecord> recs;
        for (int b = 0; b < 3; ++b)
            for (int j = 0; j < 5; ++j)
                for (int i = 0; i < 8; ++i)
                    if (rng() % 6)
                        recs.push_back(vote("j" + std::to_string(j), "p" + std::to_string(b) + "-" + std::to_string(i),
                                            Question::EMO, random_ranking(rng), "b" + std::to_string(b)));
        const auto r = agreement_report(batch_labels(recs, Question::EMO));
        CHECK(r.full_pct <= r.majority_pct);
        for (const auto& b : r.per_batch) CHECK(b.full_items <= b.majority_items);
    }
}

TEST_CASE("BWS examples") {
    // E wins Anchor and IncreasedRight.
    auto s = bws_scores(votes4(L, E, L, E));
    CHECK(s.at(Role::E).score == 1.0);
    CHECK(s.at(Role::E).comparisons == 2);
    // Gminus wins ReducedLeft, ties BothShifted.
    s = bws_scores(votes4(E, L, E, E));
    CHECK(s.at(Role::Gminus).score == 0.5);
    s = bws_scores(votes4(E, E, E, E));
    for (Role r : kAllRoles) CHECK(s.at(r).score == 0.0);
    auto missing = votes4(L, L, L, L);
    missing.erase(PairKind::Anchor);
    CHECK_THROWS_AS(bws_scores(missing), PreconditionError);
}

TEST_CASE("BWS agrees with the comparison-list oracle") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 500; ++trial) {
        const auto v = votes4(random_ranking(rng), random_ranking(rng), random_ranking(rng), random_ranking(rng));
        std::vector<oracle::Comparison> comps;
        for (PairKind k : kAllPairKinds) {
            const auto [l, r] = roles_of(k);
            const Ranking x = v.at(k);
            comps.push_back({static_cast<int>(l), static_cast<int>(r), x == L ? 0 : x == R ? 1 : -1});
        }
        const auto expected = oracle::bws(comps);
        const auto s = bws_scores(v);
        int net = 0;
        for (Role r : kAllRoles) {
            CHECK(s.at(r).score == expected[static_cast<std::size_t>(r)]);
            net += s.at(r).wins - s.at(r).losses;
        }
        CHECK(net == 0);
    }
}

TEST_CASE("dataset BWS predicates") {
    const std::vector<InstanceVotes> v = {votes4(L, R, R, E), votes4(L, R, R, R)};
    const auto d = dataset_bws(v);
    CHECK(d.n_instances == 2);
    CHECK(d.emotion_reduced);
    CHECK(d.emotion_increased);
    const auto j = to_json(d);
    CHECK(j["emotion_reduced"] == true);
    CHECK(j["scores"].contains("Gminus"));
}

}  // TEST_SUITE
