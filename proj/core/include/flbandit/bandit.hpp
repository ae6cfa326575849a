#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "flbandit/arm.hpp"
#include "flbandit/exam.hpp"

namespace flbandit {

/// How an arm's EXAM history is collapsed into its expected cost.
enum class AggregatorKind { average, median };

[[nodiscard]] std::string_view to_string(AggregatorKind kind) noexcept;
/// Accepts "avg", "average", "mdn", "median". Throws DomainError otherwise.
[[nodiscard]] AggregatorKind parse_aggregator(std::string_view text);

/// epsilon-greedy parameters. epsilon = 0 is pure greedy.
struct PolicyConfig {
    double epsilon = 0.0;
    AggregatorKind aggregator = AggregatorKind::average;
    std::uint64_t seed = 0;

    /// Throws DomainError unless 0 <= epsilon <= 1.
    void validate() const;

    friend bool operator==(const PolicyConfig&, const PolicyConfig&) = default;
};

using Rng = std::mt19937_64;

/// Independent generator for (seed, stream). Different streams of one seed do
/// not share state, so shuffling and selection can draw from the same seed.
[[nodiscard]] Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0);

struct ArmState {
    ArmId arm;
    std::vector<ExamScore> history;

    friend bool operator==(const ArmState&, const ArmState&) = default;
};

/// Per-round observed scores, one per arm (full feedback).
using RoundRewards = std::map<ArmId, ExamScore>;

/// Histories of every arm. All histories always have the same length, equal to
/// rounds_completed(), because every round observes every arm.
class BanditState {
public:
    /// Fresh state with empty histories. Throws ConfigError on < 2 arms or duplicates.
    explicit BanditState(std::vector<ArmId> arms);
    /// Restores a state from histories. Throws ConfigError if lengths differ.
    explicit BanditState(std::vector<ArmState> arms);

    [[nodiscard]] std::span<const ArmState> arms() const noexcept { return arms_; }
    [[nodiscard]] std::size_t arm_count() const noexcept { return arms_.size(); }
    [[nodiscard]] std::size_t rounds_completed() const noexcept { return rounds_; }
    [[nodiscard]] std::vector<ArmId> arm_ids() const;
    /// Index of `arm`, or nullopt.
    [[nodiscard]] std::optional<std::size_t> find(const ArmId& arm) const;

    friend bool operator==(const BanditState&, const BanditState&) = default;

private:
    friend BanditState update_state(BanditState state, const RoundRewards& round_rewards);

    std::vector<ArmState> arms_;
    std::size_t rounds_ = 0;
};

/// Mean, or median (midpoint of the two middle values for even counts).
/// Throws NoObservationsError on an empty sample.
[[nodiscard]] ExamScore aggregate(std::span<const ExamScore> samples, AggregatorKind kind);

/// epsilon-greedy choice over minimal aggregated EXAM.
///
/// Before any round completes the pick is uniform. Afterwards one uniform draw
/// decides exploration (probability epsilon, uniform arm); otherwise the arm with
/// the smallest aggregate wins, ties broken uniformly at random.
[[nodiscard]] ArmId select_arm(const BanditState& state, const PolicyConfig& policy, Rng& rng);

/// Appends every arm's score for one round. `round_rewards` must contain exactly
/// the state's arms (IncompleteFeedbackError otherwise); scores must lie in [0, 1].
[[nodiscard]] BanditState update_state(BanditState state, const RoundRewards& round_rewards);

/// aggregate(history, kind) for each arm with a non-empty history.
[[nodiscard]] std::map<ArmId, ExamScore> expected_rewards_snapshot(const BanditState& state,
                                                                   AggregatorKind kind);

}  // namespace flbandit
