#include "flbandit/replay.hpp"

#include <gtest/gtest.h>

#include <random>

#include "worked_example.hpp"
#include "flbandit/errors.hpp"
#include "flbandit/report.hpp"

using namespace flbandit;
using flbandit::testing::example_dataset;
using flbandit::testing::mbfl;
using flbandit::testing::sbfl;

namespace {

constexpr double kPaperTol = 0.0005;

// Smallest seed whose first (uniform) pick on `dataset` is `arm`.
std::uint64_t seed_with_first_pick(const Dataset& dataset, const ArmId& arm) {
    const BanditState fresh(dataset.arms());
    for (std::uint64_t seed = 0;; ++seed) {
        Rng rng = make_rng(seed);
        if (select_arm(fresh, {0.0, AggregatorKind::average, seed}, rng) == arm) return seed;
    }
}

std::vector<ArmId> arms_of(const RunTrace& t) {
    std::vector<ArmId> out;
    for (const auto& r : t.rounds) out.push_back(r.arm);
    return out;
}

Dataset random_dataset(std::mt19937_64& gen, std::size_t modules, std::size_t arms) {
    std::uniform_real_distribution<double> u(0.0, 0.3);
    std::vector<std::string> ids;
    for (std::size_t m = 0; m < modules; ++m) ids.push_back("m" + std::to_string(m));
    std::vector<double> scores(modules * arms);
    for (auto& s : scores) s = u(gen);
    return Dataset(ids, default_arm_ids(arms), scores);
}

}  // namespace

TEST(PolicyReplay, ReproducesWorkedExampleBaColumn) {
    const Dataset d = example_dataset();
    const std::uint64_t seed = seed_with_first_pick(d, sbfl());
    const RunTrace trace = run_policy_replay(d, identity_ordering(d), {0.0, AggregatorKind::average, seed});
    EXPECT_EQ(arms_of(trace), (std::vector<ArmId>{sbfl(), sbfl(), mbfl()}));
    EXPECT_EQ(trace.achieved(), (std::vector<double>{0.003, 0.116, 0.052}));
    EXPECT_EQ(trace.label, "BA-avg-EXAM");
}

TEST(PolicyReplay, DominantArmWinsAfterFirstRound) {
    std::mt19937_64 gen(8);
    std::uniform_real_distribution<double> u(0.0, 0.5);
    std::vector<std::string> ids;
    std::vector<double> scores;
    for (int m = 0; m < 30; ++m) {
        ids.push_back("m" + std::to_string(m));
        const double low = u(gen);
        scores.push_back(low);
        scores.push_back(low + 0.01 + u(gen));
    }
    const Dataset d(ids, {sbfl(), mbfl()}, scores);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const RunTrace t = run_policy_replay(d, shuffle_modules(d, seed), {0.0, AggregatorKind::average, seed});
        for (std::size_t r = 1; r < t.rounds.size(); ++r) ASSERT_EQ(t.rounds[r].arm, sbfl()) << "round " << r;
    }
}

TEST(PolicyReplay, DeterministicPerSeed) {
    const Dataset d = generate_synthetic({50, {{0.1, 0.05}, {0.12, 0.05}, {0.2, 0.1}}, 3, {}});
    const Ordering o = shuffle_modules(d, 4);
    const PolicyConfig p{0.2, AggregatorKind::median, 77};
    EXPECT_EQ(run_policy_replay(d, o, p), run_policy_replay(d, o, p));
}

TEST(PolicyReplay, AchievedScoresAreDatasetCells) {
    std::mt19937_64 gen(12);
    for (int trial = 0; trial < 40; ++trial) {
        const Dataset d = random_dataset(gen, 1 + trial % 17, 2 + trial % 3);
        const Ordering o = shuffle_modules(d, trial);
        for (const auto& trace : {run_policy_replay(d, o, {0.3, AggregatorKind::average, std::uint64_t(trial)}),
                                  run_random_baseline(d, o, trial)}) {
            ASSERT_EQ(trace.rounds.size(), d.module_count());
            for (std::size_t r = 0; r < trace.rounds.size(); ++r) {
                const std::size_t m = o.permutation[r];
                ASSERT_EQ(trace.rounds[r].module, d.modules()[m]);
                ASSERT_EQ(trace.rounds[r].achieved, d.score(m, *d.arm_index(trace.rounds[r].arm)));
            }
        }
    }
}

TEST(PolicyReplay, RejectsBadOrdering) {
    const Dataset d = example_dataset();
    EXPECT_THROW((void)run_policy_replay(d, Ordering{{0, 1}, 0}, {}), DomainError);
    EXPECT_THROW((void)run_policy_replay(d, Ordering{{0, 1, 1}, 0}, {}), DomainError);
}

TEST(FixedArm, WorkedExampleColumns) {
    const Dataset d = example_dataset();
    const RunTrace s = run_fixed_arm(d, identity_ordering(d), sbfl());
    EXPECT_EQ(s.achieved(), (std::vector<double>{0.003, 0.116, 0.001}));
    const std::vector<RunTrace> one{s};
    EXPECT_NEAR(summarize(one).average_exam, 0.040, kPaperTol);

    const std::vector<RunTrace> m{run_fixed_arm(d, identity_ordering(d), mbfl())};
    EXPECT_NEAR(summarize(m).average_exam, 0.030, kPaperTol);
    EXPECT_NEAR(summarize(m).median_exam, 0.027, kPaperTol);
    EXPECT_EQ(m.front().label, "MBFL+ochiai");
}

TEST(FixedArm, SingleModuleAndUnknownArm) {
    const Dataset d({"x"}, {sbfl(), mbfl()}, {0.25, 0.5});
    const RunTrace t = run_fixed_arm(d, identity_ordering(d), mbfl());
    EXPECT_EQ(t.achieved(), std::vector<double>{0.5});
    EXPECT_THROW((void)run_fixed_arm(d, identity_ordering(d), ArmId(Method::sbfl, "dstar2")), ConfigError);
}

TEST(FixedArm, SummaryIsOrderInvariant) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 30; ++trial) {
        const Dataset d = random_dataset(gen, 2 + trial % 20, 3);
        for (std::size_t a = 0; a < d.arm_count(); ++a) {
            const auto column = d.column(a);
            const std::vector<RunTrace> t{run_fixed_arm(d, shuffle_modules(d, trial), d.arms()[a])};
            const ApproachSummary s = summarize(t);
            ASSERT_DOUBLE_EQ(s.average_exam, aggregate(column, AggregatorKind::average));
            ASSERT_EQ(s.median_exam, aggregate(column, AggregatorKind::median));
        }
    }
}

TEST(RandomBaseline, ConvergesToMeanOfColumns) {
    // Expected run average with columns 0.1 and 0.3 picked uniformly: 0.2.
    // Per-round variance is 0.01, so over 50 modules x 400 seeds the standard
    // error is sqrt(0.01 / 20000) = 0.0007; 0.004 is more than five of them.
    const Dataset d = generate_synthetic({50, {{0.1, 0.0}, {0.3, 0.0}}, 0, {}});
    double total = 0.0;
    const int seeds = 400;
    for (int s = 0; s < seeds; ++s) {
        total += aggregate(run_random_baseline(d, identity_ordering(d), s).achieved(), AggregatorKind::average);
    }
    EXPECT_NEAR(total / seeds, 0.2, 0.004);
}

TEST(RandomBaseline, DuplicatedColumnsGiveThatColumnsMean) {
    const std::vector<double> col{0.1, 0.4, 0.2, 0.7};
    std::vector<double> scores;
    for (double v : col) scores.insert(scores.end(), {v, v});
    const Dataset d({"a", "b", "c", "d"}, {sbfl(), mbfl()}, scores);
    const std::vector<RunTrace> t{run_random_baseline(d, shuffle_modules(d, 3), 3)};
    EXPECT_DOUBLE_EQ(summarize(t).average_exam, aggregate(col, AggregatorKind::average));
}

TEST(RandomBaseline, DeterministicAndNeedsTwoArms) {
    const Dataset d = generate_synthetic({30, {{0.1, 0.05}, {0.3, 0.05}}, 2, {}});
    EXPECT_EQ(run_random_baseline(d, identity_ordering(d), 5), run_random_baseline(d, identity_ordering(d), 5));
    const Dataset single({"a"}, {sbfl()}, {0.1});
    EXPECT_THROW((void)run_random_baseline(single, identity_ordering(single), 0), ConfigError);
}

TEST(Summarize, WorkedExampleBaColumn) {
    RunTrace t{"BA", 0, {{"a", sbfl(), 0.003}, {"b", sbfl(), 0.116}, {"c", mbfl(), 0.052}}};
    const std::vector<RunTrace> one{t};
    const ApproachSummary s = summarize(one);
    EXPECT_NEAR(s.average_exam, 0.057, kPaperTol);
    EXPECT_NEAR(s.median_exam, 0.052, kPaperTol);
    EXPECT_EQ(s.repetitions, 1u);

    const std::vector<RunTrace> repeated(5, t);
    const ApproachSummary r = summarize(repeated);
    EXPECT_DOUBLE_EQ(r.average_exam, s.average_exam);
    EXPECT_DOUBLE_EQ(r.median_exam, s.median_exam);
    EXPECT_EQ(r.repetitions, 5u);
}

TEST(Summarize, MeanAcrossRepetitions) {
    const std::vector<RunTrace> traces{
        {"x", 0, {{"a", sbfl(), 0.01}, {"b", sbfl(), 0.03}}},
        {"x", 1, {{"a", sbfl(), 0.04}, {"b", sbfl(), 0.04}}},
    };
    EXPECT_DOUBLE_EQ(summarize(traces).average_exam, 0.03);
}

TEST(Summarize, Errors) {
    EXPECT_THROW((void)summarize({}), DomainError);
    const std::vector<RunTrace> uneven{{"x", 0, {{"a", sbfl(), 0.1}}}, {"x", 1, {}}};
    EXPECT_THROW((void)summarize(uneven), DomainError);
}

TEST(RunExperiment, FixedArmsOnlyMatchColumns) {
    const Dataset d = generate_synthetic({25, {{0.1, 0.05}, {0.2, 0.05}, {0.3, 0.05}}, 6, {}});
    ExperimentConfig c;
    c.repetitions = 1;
    c.run_ba_avg = c.run_ba_mdn = c.run_random = false;
    const Report r = run_experiment(d, c);
    ASSERT_EQ(r.approaches.size(), 3u);
    for (std::size_t a = 0; a < 3; ++a) {
        EXPECT_EQ(r.approaches[a].summary.label, d.arms()[a].label());
        EXPECT_DOUBLE_EQ(r.approaches[a].summary.average_exam, aggregate(d.column(a), AggregatorKind::average));
        EXPECT_EQ(r.approaches[a].summary.median_exam, aggregate(d.column(a), AggregatorKind::median));
    }
    EXPECT_EQ(r.approaches[0].rank_avg, 1);
    EXPECT_EQ(r.approaches[0].relative_error_avg, 0.0);
}

TEST(RunExperiment, WorkedExampleWithForcedFirstPick) {
    const Dataset d = example_dataset();
    ExperimentConfig c;
    c.repetitions = 1;
    c.order = OrderMode::identity;
    c.base_seed = seed_with_first_pick(d, sbfl());
    const Report r = run_experiment(d, c);
    EXPECT_NEAR(r.at(kBaAvgLabel).summary.average_exam, 0.057, kPaperTol);
    EXPECT_NEAR(r.at(kBaAvgLabel).summary.median_exam, 0.052, kPaperTol);
    EXPECT_NEAR(r.at("SBFL+ochiai").summary.average_exam, 0.040, kPaperTol);
    EXPECT_NEAR(r.at("MBFL+ochiai").summary.average_exam, 0.030, kPaperTol);
    EXPECT_THROW((void)r.at("nope"), ConfigError);
}

TEST(RunExperiment, DeterministicAndThreadCountIndependent) {
    const Dataset d = generate_synthetic({133, {{0.01, 0.01}, {0.05, 0.01}, {0.05, 0.01}, {0.05, 0.01}}, 9, {}});
    ExperimentConfig c;
    c.base_seed = 42;
    c.epsilon = 0.1;
    const std::string once = report_to_json(run_experiment(d, c));
    EXPECT_EQ(once, report_to_json(run_experiment(d, c)));
    c.threads = 4;
    EXPECT_EQ(once, report_to_json(run_experiment(d, c)));
    c.order = OrderMode::shuffle_once;
    EXPECT_NE(once, report_to_json(run_experiment(d, c)));
}

TEST(RunExperiment, ArmSubsetAndValidation) {
    const Dataset d = generate_synthetic({20, {{0.1, 0.05}, {0.2, 0.05}, {0.3, 0.05}}, 6, {}});
    ExperimentConfig c;
    c.arms = {d.arms()[2], d.arms()[0]};
    const Report r = run_experiment(d, c);
    EXPECT_EQ(r.arms, c.arms);
    EXPECT_EQ(r.approaches.size(), 5u);

    c.arms = {d.arms()[0]};
    EXPECT_THROW((void)run_experiment(d, c), ConfigError);
    c.arms.clear();
    c.repetitions = 0;
    EXPECT_THROW((void)run_experiment(d, c), ConfigError);
}
