#include "flbandit/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <string>

#include "flbandit/errors.hpp"

namespace flbandit {
namespace {

std::size_t uniform_index(std::size_t count, Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, count - 1);
    return pick(rng);
}

std::vector<ArmState> empty_histories(std::vector<ArmId> arms) {
    std::vector<ArmState> states;
    states.reserve(arms.size());
    for (auto& arm : arms) states.push_back(ArmState{std::move(arm), {}});
    return states;
}

}  // namespace

std::string_view to_string(AggregatorKind kind) noexcept {
    return kind == AggregatorKind::average ? "average" : "median";
}

AggregatorKind parse_aggregator(std::string_view text) {
    if (text == "avg" || text == "average") return AggregatorKind::average;
    if (text == "mdn" || text == "median") return AggregatorKind::median;
    throw DomainError("unknown aggregator '" + std::string(text) + "' (expected avg or median)");
}

void PolicyConfig::validate() const {
    if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("epsilon must lie in [0, 1]");
}

Rng make_rng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return Rng(seq);
}

BanditState::BanditState(std::vector<ArmId> arms) : BanditState(empty_histories(std::move(arms))) {}

BanditState::BanditState(std::vector<ArmState> arms) : arms_(std::move(arms)) {
    if (arms_.size() < 2) throw ConfigError("a bandit needs at least 2 arms");
    std::set<ArmId> seen;
    for (const auto& a : arms_) {
        if (!seen.insert(a.arm).second) throw ConfigError("duplicate arm " + a.arm.key());
    }
    rounds_ = arms_.front().history.size();
    for (const auto& a : arms_) {
        if (a.history.size() != rounds_) {
            throw ConfigError("arm histories differ in length (full feedback violated)");
        }
    }
}

std::vector<ArmId> BanditState::arm_ids() const {
    std::vector<ArmId> ids;
    ids.reserve(arms_.size());
    for (const auto& a : arms_) ids.push_back(a.arm);
    return ids;
}

std::optional<std::size_t> BanditState::find(const ArmId& arm) const {
    for (std::size_t i = 0; i < arms_.size(); ++i) {
        if (arms_[i].arm == arm) return i;
    }
    return std::nullopt;
}

ExamScore aggregate(std::span<const ExamScore> samples, AggregatorKind kind) {
    if (samples.empty()) throw NoObservationsError();
    if (kind == AggregatorKind::average) {
        return std::accumulate(samples.begin(), samples.end(), 0.0) /
               static_cast<double>(samples.size());
    }
    std::vector<ExamScore> sorted(samples.begin(), samples.end());
    const std::size_t mid = sorted.size() / 2;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid), sorted.end());
    const ExamScore upper = sorted[mid];
    if (sorted.size() % 2 == 1) return upper;
    const ExamScore lower = *std::max_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(mid));
    return (lower + upper) / 2.0;
}

ArmId select_arm(const BanditState& state, const PolicyConfig& policy, Rng& rng) {
    policy.validate();
    const auto arms = state.arms();
    if (arms.size() < 2) throw ConfigError("a bandit needs at least 2 arms");

    if (state.rounds_completed() == 0) return arms[uniform_index(arms.size(), rng)].arm;

    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < policy.epsilon) return arms[uniform_index(arms.size(), rng)].arm;

    std::vector<std::size_t> tied;
    double best = 0.0;
    for (std::size_t i = 0; i < arms.size(); ++i) {
        const double cost = aggregate(arms[i].history, policy.aggregator);
        if (tied.empty() || cost < best) {
            best = cost;
            tied.assign(1, i);
        } else if (cost == best) {
            tied.push_back(i);
        }
    }
    if (tied.size() == 1) return arms[tied.front()].arm;
    return arms[tied[uniform_index(tied.size(), rng)]].arm;
}

BanditState update_state(BanditState state, const RoundRewards& round_rewards) {
    if (round_rewards.size() != state.arms_.size()) {
        throw IncompleteFeedbackError("incomplete feedback: expected " +
                                      std::to_string(state.arms_.size()) + " arm scores, got " +
                                      std::to_string(round_rewards.size()));
    }
    for (const auto& a : state.arms_) {
        const auto it = round_rewards.find(a.arm);
        if (it == round_rewards.end()) {
            throw IncompleteFeedbackError("incomplete feedback: no score for " + a.arm.key());
        }
        if (!(it->second >= 0.0 && it->second <= 1.0)) {
            throw DomainError("EXAM score for " + a.arm.key() + " must lie in [0, 1]");
        }
    }
    for (auto& a : state.arms_) a.history.push_back(round_rewards.at(a.arm));
    ++state.rounds_;
    return state;
}

std::map<ArmId, ExamScore> expected_rewards_snapshot(const BanditState& state, AggregatorKind kind) {
    std::map<ArmId, ExamScore> out;
    for (const auto& a : state.arms()) {
        if (!a.history.empty()) out.emplace(a.arm, aggregate(a.history, kind));
    }
    return out;
}

}  // namespace flbandit
