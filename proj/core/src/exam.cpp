#include "flbandit/exam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "flbandit/errors.hpp"

namespace flbandit {

ExamScore exam_score(const FaultRank& fault) {
    if (fault.total_lines < 1) throw DomainError("total_lines must be at least 1");
    if (!(fault.rank >= 1.0) || fault.rank > static_cast<double>(fault.total_lines)) {
        throw DomainError("rank must lie in [1, total_lines]");
    }
    return fault.rank / static_cast<double>(fault.total_lines);
}

FaultRank rank_of_fault(std::span<const double> suspiciousness,
                        std::span<const std::size_t> faulty_indices, TieStrategy tie) {
    if (suspiciousness.empty()) throw DomainError("suspiciousness list is empty");
    if (faulty_indices.empty()) throw DomainError("no faulty lines given");
    if (std::any_of(suspiciousness.begin(), suspiciousness.end(),
                    [](double v) { return std::isnan(v); })) {
        throw DomainError("suspiciousness contains NaN");
    }

    double best_rank = std::numeric_limits<double>::infinity();
    for (const std::size_t index : faulty_indices) {
        if (index >= suspiciousness.size()) throw DomainError("faulty line index out of range");
        const double s = suspiciousness[index];
        std::size_t above = 0;
        std::size_t at_least = 0;
        for (const double v : suspiciousness) {
            above += v > s ? 1 : 0;
            at_least += v >= s ? 1 : 0;
        }
        const double best = static_cast<double>(above + 1);
        const double worst = static_cast<double>(at_least);
        double rank = 0.0;
        switch (tie) {
            case TieStrategy::best: rank = best; break;
            case TieStrategy::worst: rank = worst; break;
            case TieStrategy::average: rank = (best + worst) / 2.0; break;
        }
        best_rank = std::min(best_rank, rank);
    }
    return FaultRank{best_rank, suspiciousness.size()};
}

}  // namespace flbandit
