#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "flbandit/arm.hpp"
#include "flbandit/bandit.hpp"
#include "flbandit/dataset.hpp"
#include "flbandit/exam.hpp"

namespace flbandit {

/// One replayed module: which arm was followed and the EXAM it achieved.
struct TraceRound {
    std::string module;
    ArmId arm;
    ExamScore achieved = 0.0;

    friend bool operator==(const TraceRound&, const TraceRound&) = default;
};

struct RunTrace {
    std::string label;
    std::uint64_t seed = 0;
    std::vector<TraceRound> rounds;

    [[nodiscard]] std::vector<ExamScore> achieved() const;

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

inline constexpr std::string_view kBaAvgLabel = "BA-avg-EXAM";
inline constexpr std::string_view kBaMdnLabel = "BA-mdn-EXAM";
inline constexpr std::string_view kRandomLabel = "Random";

[[nodiscard]] std::string policy_label(AggregatorKind kind);

/// Online epsilon-greedy replay. Each round selects an arm, records the dataset
/// cell of that arm as achieved, then feeds every arm's score back (full feedback).
[[nodiscard]] RunTrace run_policy_replay(const Dataset& dataset, const Ordering& ordering,
                                         const PolicyConfig& policy);

/// Always follows `arm`. Throws ConfigError if the arm is not in the dataset.
[[nodiscard]] RunTrace run_fixed_arm(const Dataset& dataset, const Ordering& ordering, const ArmId& arm);

/// Uniformly random arm on every round, independent of history.
[[nodiscard]] RunTrace run_random_baseline(const Dataset& dataset, const Ordering& ordering,
                                           std::uint64_t seed);

struct ApproachSummary {
    std::string label;
    ExamScore average_exam = 0.0;
    ExamScore median_exam = 0.0;
    std::size_t repetitions = 0;
};

/// Mean across traces of each trace's average EXAM and of each trace's median
/// EXAM. Throws DomainError on no traces, empty traces or unequal lengths.
[[nodiscard]] ApproachSummary summarize(std::span<const RunTrace> traces);

/// How module order is produced for each repetition.
enum class OrderMode {
    reshuffle_per_rep,  ///< fresh shuffle from each repetition's seed
    shuffle_once,       ///< one shuffle from the base seed, reused
    identity,           ///< dataset order
};

[[nodiscard]] std::string_view to_string(OrderMode mode) noexcept;

struct ExperimentConfig {
    std::string dataset_name;
    /// Subset of dataset arms used as bandit arms and fixed baselines; empty = all.
    std::vector<ArmId> arms;
    bool run_ba_avg = true;
    bool run_ba_mdn = true;
    bool run_fixed_arms = true;
    bool run_random = true;
    std::size_t repetitions = 10;
    std::uint64_t base_seed = 0;
    double epsilon = 0.0;
    OrderMode order = OrderMode::reshuffle_per_rep;
    /// Worker threads for repetitions; 0 = hardware concurrency. Output does not depend on it.
    unsigned threads = 1;

    /// Seed of repetition r: base_seed + r.
    [[nodiscard]] std::uint64_t repetition_seed(std::size_t r) const noexcept { return base_seed + r; }
};

struct ReportEntry {
    ApproachSummary summary;
    double relative_error_avg = 0.0;
    double relative_error_mdn = 0.0;
    int rank_avg = 0;
    int rank_mdn = 0;
};

struct Report {
    std::vector<ReportEntry> approaches;
    ExperimentConfig config;
    std::vector<ArmId> arms;

    /// Entry by label; throws ConfigError when absent.
    [[nodiscard]] const ReportEntry& at(std::string_view label) const;
};

/// Runs every configured approach on every repetition, summarizes per label and
/// attaches relative errors and rank scores per criterion. Approaches appear as:
/// fixed arms (in arm order), BA-avg, BA-mdn, Random.
[[nodiscard]] Report run_experiment(const Dataset& dataset, const ExperimentConfig& config);

}  // namespace flbandit
