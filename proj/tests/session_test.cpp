#include "flbandit/session.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <thread>

#include "worked_example.hpp"
#include "flbandit/errors.hpp"
#include "flbandit/json.hpp"
#include "temp_dir.hpp"

using namespace flbandit;
using flbandit::testing::example_round;
using flbandit::testing::mbfl;
using flbandit::testing::sbfl;
using flbandit::testing::TempDir;

namespace {

constexpr double kPaperTol = 0.0005;

std::vector<ArmId> reference_arms() {
    return {ArmId(Method::sbfl, "ochiai"), ArmId(Method::sbfl, "tarantula"), ArmId(Method::mbfl, "ochiai"),
            ArmId(Method::sbfl, "dstar2")};
}

RoundReport direct(std::string module, RoundRewards rewards) { return {std::move(module), std::move(rewards)}; }

SessionService fixed_clock_service(const TempDir& dir) {
    return SessionService(dir.path(), [] { return std::string("2024-01-01T00:00:00Z"); });
}

SessionState example_session(SessionService& service, AggregatorKind kind) {
    SessionState s = service.create_session({sbfl(), mbfl()}, {0.0, kind, 3});
    const char* modules[] = {"a", "b", "c"};
    for (int m = 0; m < 3; ++m) s = service.report_round(s.id, direct(modules[m], example_round(m)));
    return s;
}

}  // namespace

TEST(Session, CreateWithReferenceArms) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session(reference_arms(), {});
    EXPECT_EQ(s.bandit.arm_count(), 4u);
    EXPECT_EQ(s.status, SessionStatus::active);
    EXPECT_TRUE(service.store().exists(s.id));
    EXPECT_FALSE(s.created_at.empty());
}

TEST(Session, CreateValidation) {
    TempDir dir;
    SessionService service(dir.path());
    EXPECT_THROW(service.create_session({sbfl()}, {}), ValidationError);
    EXPECT_THROW(service.create_session({sbfl(), sbfl()}, {}), ValidationError);
    EXPECT_THROW(service.create_session({sbfl(), mbfl()}, {1.5, AggregatorKind::average, 0}), ValidationError);
    EXPECT_TRUE(service.list_sessions().empty());
}

TEST(Session, FreshRecommendationHasEmptySnapshotAndIsStable) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {0.5, AggregatorKind::average, 8});
    const Recommendation first = service.recommend(s.id);
    EXPECT_TRUE(first.expected_rewards.empty());
    EXPECT_EQ(first.round, 0u);
    for (int i = 0; i < 20; ++i) EXPECT_EQ(service.recommend(s.id).arm, first.arm);
}

TEST(Session, WorkedExampleAverageRecommendsMbfl) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = example_session(service, AggregatorKind::average);
    const Recommendation rec = service.recommend(s.id);
    EXPECT_EQ(rec.arm, mbfl());
    EXPECT_NEAR(rec.expected_rewards.at(sbfl()), 0.040, kPaperTol);
    EXPECT_NEAR(rec.expected_rewards.at(mbfl()), 0.030, kPaperTol);
}

TEST(Session, WorkedExampleMedianRecommendsSbfl) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = example_session(service, AggregatorKind::median);
    EXPECT_EQ(service.recommend(s.id).arm, sbfl());
}

TEST(Session, RankFormIsConvertedToExam) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {});
    LocatedFault fault;
    fault.per_arm.emplace(sbfl(), FaultRank{5, 100});
    fault.per_arm.emplace(mbfl(), FaultRank{5, 100});
    const SessionState after = service.report_round(s.id, {"m1", fault});
    for (const auto& a : after.bandit.arms()) EXPECT_EQ(a.history, std::vector<double>{0.05});
}

TEST(Session, SuspiciousnessFormUsesRankOfFault) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {});
    LocatedFault fault;
    fault.faulty_lines = {0};
    fault.per_arm.emplace(sbfl(), SuspiciousnessRanking{{0.9, 0.5, 0.9, 0.1}, TieStrategy::average});
    fault.per_arm.emplace(mbfl(), SuspiciousnessRanking{{0.9, 0.5, 0.9, 0.1}, TieStrategy::worst});
    const SessionState after = service.report_round(s.id, {"m1", fault});
    EXPECT_DOUBLE_EQ(after.bandit.arms()[0].history[0], 1.5 / 4);
    EXPECT_DOUBLE_EQ(after.bandit.arms()[1].history[0], 2.0 / 4);
}

TEST(Session, IncompleteReportLeavesStateUnchanged) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {});
    EXPECT_THROW(service.report_round(s.id, direct("a", {{sbfl(), 0.1}})), ValidationError);
    EXPECT_THROW(service.report_round(s.id, direct("a", {{sbfl(), 0.1}, {mbfl(), 1.1}})), ValidationError);
    EXPECT_THROW(service.report_round(s.id, direct("", {{sbfl(), 0.1}, {mbfl(), 0.1}})), ValidationError);
    LocatedFault bad;
    bad.per_arm.emplace(sbfl(), FaultRank{10, 5});
    bad.per_arm.emplace(mbfl(), FaultRank{1, 5});
    EXPECT_THROW(service.report_round(s.id, {"a", bad}), ValidationError);
    EXPECT_EQ(service.get_session(s.id), s);
}

TEST(Session, RetrievalAndClose) {
    TempDir dir;
    SessionService service(dir.path());
    EXPECT_THROW((void)service.get_session("nope"), NotFoundError);
    EXPECT_THROW((void)service.get_session("../etc"), NotFoundError);
    EXPECT_THROW(service.close_session("nope"), NotFoundError);

    const SessionState a = service.create_session({sbfl(), mbfl()}, {});
    (void)service.create_session(reference_arms(), {});
    EXPECT_EQ(service.list_sessions().size(), 2u);

    const SessionState closed = service.close_session(a.id);
    EXPECT_EQ(closed.status, SessionStatus::closed);
    EXPECT_EQ(service.close_session(a.id), closed);
    EXPECT_THROW((void)service.recommend(a.id), StateError);
    EXPECT_THROW(service.report_round(a.id, direct("x", example_round(0))), StateError);
}

TEST(Session, ReloadReproducesStateExactly) {
    TempDir dir;
    SessionState in_memory = [&] {
        SessionService service(dir.path());
        return example_session(service, AggregatorKind::average);
    }();
    SessionService reopened(dir.path());
    const SessionState loaded = reopened.get_session(in_memory.id);
    EXPECT_EQ(loaded, in_memory);
    EXPECT_EQ(expected_rewards_snapshot(loaded.bandit, AggregatorKind::average),
              expected_rewards_snapshot(in_memory.bandit, AggregatorKind::average));
}

TEST(Session, LoggedRecommendationsFollowSeedStream) {
    TempDir dir;
    SessionService service(dir.path());
    SessionState s = service.create_session(reference_arms(), {0.3, AggregatorKind::average, 41});
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(0.0, 0.2);
    for (int r = 0; r < 25; ++r) {
        RoundRewards rewards;
        for (const auto& arm : reference_arms()) rewards.emplace(arm, u(gen));
        s = service.report_round(s.id, direct("m" + std::to_string(r), rewards));
    }

    BanditState replayed(s.bandit.arm_ids());
    for (std::size_t r = 0; r < s.round_log.size(); ++r) {
        Rng rng = make_rng(41, r);
        EXPECT_EQ(s.round_log[r].recommended, select_arm(replayed, s.policy, rng)) << "round " << r;
        replayed = update_state(std::move(replayed), s.round_log[r].rewards);
    }
    EXPECT_EQ(replayed, s.bandit);
    EXPECT_EQ(expected_rewards_snapshot(replayed, AggregatorKind::median),
              expected_rewards_snapshot(s.bandit, AggregatorKind::median));
}

TEST(Session, StorageFailureLeavesDocumentIntact) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {});
    // A directory squatting on the temp-file name makes the write fail.
    const auto squat = dir.path() / ("." + s.id + ".tmp");
    std::filesystem::create_directories(squat / "occupied");
    EXPECT_THROW(service.report_round(s.id, direct("a", example_round(0))), StorageError);
    EXPECT_EQ(service.get_session(s.id), s);
    std::filesystem::remove_all(squat);
    EXPECT_EQ(service.report_round(s.id, direct("a", example_round(0))).bandit.rounds_completed(), 1u);
}

TEST(Session, CorruptDocumentIsStorageError) {
    TempDir dir;
    SessionService service(dir.path());
    std::ofstream(dir.path() / "broken.json") << "{ not json";
    EXPECT_THROW((void)service.get_session("broken"), StorageError);
    EXPECT_TRUE(service.list_sessions().empty());
}

TEST(Session, ConcurrentReportsAreSerialized) {
    TempDir dir;
    SessionService service(dir.path());
    const SessionState s = service.create_session({sbfl(), mbfl()}, {});
    std::vector<std::thread> workers;
    for (int t = 0; t < 4; ++t) {
        workers.emplace_back([&, t] {
            for (int i = 0; i < 10; ++i) {
                (void)service.report_round(s.id, direct("t" + std::to_string(t), {{sbfl(), 0.1}, {mbfl(), 0.2}}));
                (void)service.get_session(s.id);
            }
        });
    }
    for (auto& w : workers) w.join();
    const SessionState final_state = service.get_session(s.id);
    EXPECT_EQ(final_state.bandit.rounds_completed(), 40u);
    EXPECT_EQ(final_state.round_log.size(), 40u);
}

TEST(SessionJson, DocumentRoundTrip) {
    TempDir dir;
    SessionService service = fixed_clock_service(dir);
    SessionState s = example_session(service, AggregatorKind::median);
    s = service.close_session(s.id);
    EXPECT_EQ(session_from_json(nlohmann::json::parse(session_to_json(s).dump())), s);
}

TEST(SessionJson, RoundReportForms) {
    const auto a = round_report_from_json(
        nlohmann::json::parse(R"({"module":"a","exam":{"sbfl+ochiai":0.003,"mbfl+ochiai":0.011}})"));
    EXPECT_EQ(std::get<RoundRewards>(a.outcome).at(sbfl()), 0.003);

    const auto b = round_report_from_json(nlohmann::json::parse(
        R"({"module":"b","faulty_lines":[2],"ranks":{"sbfl+ochiai":{"rank":5,"total_lines":100},
            "mbfl+ochiai":{"suspiciousness":[0.1,0.2,0.3],"tie":"best"}}})"));
    const auto& fault = std::get<LocatedFault>(b.outcome);
    EXPECT_EQ(std::get<FaultRank>(fault.per_arm.at(sbfl())), (FaultRank{5, 100}));
    const std::vector<ArmId> arms{sbfl(), mbfl()};
    const RoundRewards rewards = resolve_rewards(b, arms);
    EXPECT_DOUBLE_EQ(rewards.at(sbfl()), 0.05);
    EXPECT_DOUBLE_EQ(rewards.at(mbfl()), 1.0 / 3);

    for (const char* bad : {R"({"exam":{}})", R"({"module":"a"})", R"({"module":"a","exam":{"x":0.1}})",
                            R"({"module":"a","exam":{"sbfl+ochiai":"high"}})",
                            R"({"module":"a","exam":{"sbfl+ochiai":0.1,"SBFL+ochiai":0.1}})",
                            R"({"module":"a","ranks":{"sbfl+ochiai":{"suspiciousness":[0.1]}}})",
                            R"({"module":"a","ranks":{"sbfl+ochiai":{"rank":1,"total_lines":-3}}})", "[]"}) {
        EXPECT_THROW((void)round_report_from_json(nlohmann::json::parse(bad)), ValidationError) << bad;
    }
}
