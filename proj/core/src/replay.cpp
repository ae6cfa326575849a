#include "flbandit/replay.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <thread>

#include "flbandit/errors.hpp"
#include "flbandit/report.hpp"

namespace flbandit {
namespace {

constexpr std::uint64_t kRandomBaselineStream = 0x52414e44ULL;

void check_ordering(const Dataset& dataset, const Ordering& ordering) {
    if (ordering.size() != dataset.module_count() || !ordering.is_valid()) {
        throw DomainError("ordering is not a permutation of the dataset's modules");
    }
}

RunTrace follow(const Dataset& dataset, const Ordering& ordering, std::string label, std::uint64_t seed,
                auto&& choose) {
    check_ordering(dataset, ordering);
    RunTrace trace{std::move(label), seed, {}};
    trace.rounds.reserve(ordering.size());
    for (const std::size_t m : ordering.permutation) {
        const std::size_t a = choose(m);
        trace.rounds.push_back({dataset.modules()[m], dataset.arms()[a], dataset.score(m, a)});
    }
    return trace;
}

struct Approach {
    std::string label;
    std::vector<RunTrace> traces;
};

}  // namespace

std::vector<ExamScore> RunTrace::achieved() const {
    std::vector<ExamScore> out;
    out.reserve(rounds.size());
    for (const auto& r : rounds) out.push_back(r.achieved);
    return out;
}

std::string policy_label(AggregatorKind kind) {
    return std::string(kind == AggregatorKind::average ? kBaAvgLabel : kBaMdnLabel);
}

RunTrace run_policy_replay(const Dataset& dataset, const Ordering& ordering, const PolicyConfig& policy) {
    policy.validate();
    BanditState state(dataset.arms());
    Rng rng = make_rng(policy.seed);
    return follow(dataset, ordering, policy_label(policy.aggregator), policy.seed, [&](std::size_t m) {
        const ArmId chosen = select_arm(state, policy, rng);
        RoundRewards rewards;
        const auto row = dataset.row(m);
        for (std::size_t a = 0; a < dataset.arm_count(); ++a) rewards.emplace(dataset.arms()[a], row[a]);
        state = update_state(std::move(state), rewards);
        return *dataset.arm_index(chosen);
    });
}

RunTrace run_fixed_arm(const Dataset& dataset, const Ordering& ordering, const ArmId& arm) {
    const auto index = dataset.arm_index(arm);
    if (!index) throw ConfigError("arm " + arm.key() + " is not in the dataset");
    return follow(dataset, ordering, arm.label(), 0, [&](std::size_t) { return *index; });
}

RunTrace run_random_baseline(const Dataset& dataset, const Ordering& ordering, std::uint64_t seed) {
    if (dataset.arm_count() < 2) throw ConfigError("random baseline needs at least 2 arms");
    Rng rng = make_rng(seed, kRandomBaselineStream);
    std::uniform_int_distribution<std::size_t> pick(0, dataset.arm_count() - 1);
    return follow(dataset, ordering, std::string(kRandomLabel), seed, [&](std::size_t) { return pick(rng); });
}

ApproachSummary summarize(std::span<const RunTrace> traces) {
    if (traces.empty()) throw DomainError("nothing to summarize");
    const std::size_t length = traces.front().rounds.size();
    if (length == 0) throw DomainError("cannot summarize an empty trace");

    ApproachSummary s{traces.front().label, 0.0, 0.0, traces.size()};
    for (const auto& t : traces) {
        if (t.rounds.size() != length) throw DomainError("traces differ in length");
        const auto scores = t.achieved();
        s.average_exam += aggregate(scores, AggregatorKind::average);
        s.median_exam += aggregate(scores, AggregatorKind::median);
    }
    s.average_exam /= static_cast<double>(traces.size());
    s.median_exam /= static_cast<double>(traces.size());
    return s;
}

std::string_view to_string(OrderMode mode) noexcept {
    switch (mode) {
        case OrderMode::reshuffle_per_rep: return "reshuffle-per-rep";
        case OrderMode::shuffle_once: return "shuffle-once";
        case OrderMode::identity: return "identity";
    }
    return "unknown";
}

const ReportEntry& Report::at(std::string_view label) const {
    for (const auto& e : approaches) {
        if (e.summary.label == label) return e;
    }
    throw ConfigError("no approach labelled '" + std::string(label) + "' in report");
}

Report run_experiment(const Dataset& full, const ExperimentConfig& config) {
    if (config.repetitions < 1) throw ConfigError("repetitions must be at least 1");
    const Dataset dataset = config.arms.empty() ? full : full.select_arms(config.arms);
    if (dataset.arm_count() < 2) throw ConfigError("an experiment needs at least 2 arms");
    PolicyConfig{config.epsilon, AggregatorKind::average, 0}.validate();

    const Ordering shared_order = config.order == OrderMode::identity
                                      ? identity_ordering(dataset)
                                      : shuffle_modules(dataset, config.base_seed);

    auto run_repetition = [&](std::size_t r) {
        const std::uint64_t seed = config.repetition_seed(r);
        const Ordering order =
            config.order == OrderMode::reshuffle_per_rep ? shuffle_modules(dataset, seed) : shared_order;
        std::vector<RunTrace> traces;
        if (config.run_fixed_arms) {
            for (const auto& arm : dataset.arms()) traces.push_back(run_fixed_arm(dataset, order, arm));
        }
        if (config.run_ba_avg) {
            traces.push_back(run_policy_replay(dataset, order, {config.epsilon, AggregatorKind::average, seed}));
        }
        if (config.run_ba_mdn) {
            traces.push_back(run_policy_replay(dataset, order, {config.epsilon, AggregatorKind::median, seed}));
        }
        if (config.run_random) traces.push_back(run_random_baseline(dataset, order, seed));
        return traces;
    };

    std::vector<std::vector<RunTrace>> per_rep(config.repetitions);
    const unsigned threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                                 : config.threads;
    if (threads <= 1 || config.repetitions == 1) {
        for (std::size_t r = 0; r < config.repetitions; ++r) per_rep[r] = run_repetition(r);
    } else {
        for (std::size_t begin = 0; begin < config.repetitions; begin += threads) {
            const std::size_t end = std::min<std::size_t>(config.repetitions, begin + threads);
            std::vector<std::future<std::vector<RunTrace>>> batch;
            for (std::size_t r = begin; r < end; ++r) batch.push_back(std::async(std::launch::async, run_repetition, r));
            for (std::size_t r = begin; r < end; ++r) per_rep[r] = batch[r - begin].get();
        }
    }

    if (per_rep.front().empty()) throw ConfigError("experiment selects no approaches");

    Report report;
    report.config = config;
    report.arms = dataset.arms();
    const std::size_t approach_count = per_rep.front().size();
    std::vector<ExamScore> averages;
    std::vector<ExamScore> medians;
    for (std::size_t i = 0; i < approach_count; ++i) {
        std::vector<RunTrace> traces;
        traces.reserve(per_rep.size());
        for (auto& rep : per_rep) traces.push_back(std::move(rep[i]));
        ReportEntry entry{summarize(traces)};
        averages.push_back(entry.summary.average_exam);
        medians.push_back(entry.summary.median_exam);
        report.approaches.push_back(std::move(entry));
    }

    const auto err_avg = relative_errors_against_best(averages);
    const auto err_mdn = relative_errors_against_best(medians);
    const auto rank_avg = rank_scores(averages);
    const auto rank_mdn = rank_scores(medians);
    for (std::size_t i = 0; i < approach_count; ++i) {
        auto& e = report.approaches[i];
        e.relative_error_avg = err_avg[i];
        e.relative_error_mdn = err_mdn[i];
        e.rank_avg = rank_avg[i];
        e.rank_mdn = rank_mdn[i];
    }
    return report;
}

}  // namespace flbandit
