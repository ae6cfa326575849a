#pragma once

#include <cstddef>
#include <span>

namespace flbandit {

/// EXAM score: fraction of a module's source lines examined before the fault
/// is reached. Smaller is better. Stored as a plain fraction in [0, 1].
using ExamScore = double;

/// Position of the first faulty line in a suspiciousness ordering.
/// `rank` is real-valued so tie-averaged positions can be represented.
struct FaultRank {
    double rank = 1.0;
    std::size_t total_lines = 1;

    friend bool operator==(const FaultRank&, const FaultRank&) = default;
};

/// How to position the faulty line inside a group of equally suspicious lines.
enum class TieStrategy { best, worst, average };

/// rank / total_lines. Throws DomainError unless 1 <= rank <= total_lines.
[[nodiscard]] ExamScore exam_score(const FaultRank& fault);

/// Rank of the first faulty line reached when lines are examined in descending
/// suspiciousness order.
///
/// For a faulty line with suspiciousness s, `best` counts lines strictly more
/// suspicious plus one, `worst` counts every line at least as suspicious, and
/// `average` is their midpoint. When several lines are faulty the one with the
/// smallest rank under the chosen strategy wins. Throws DomainError on empty
/// inputs, out-of-range indices or NaN suspiciousness.
[[nodiscard]] FaultRank rank_of_fault(std::span<const double> suspiciousness,
                                      std::span<const std::size_t> faulty_indices,
                                      TieStrategy tie = TieStrategy::average);

}  // namespace flbandit
