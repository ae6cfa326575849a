#pragma once

#include <span>
#include <string>
#include <vector>

#include "flbandit/exam.hpp"

namespace flbandit {

struct Report;

/// 1 - best / target: fractional excess of `target` over `best`.
/// Throws DomainError unless 0 < best <= target.
[[nodiscard]] double relative_error(ExamScore target, ExamScore best);

/// Relative error of every value against the smallest one. Equal-to-best values
/// get 0; when the best is exactly 0 any positive value gets 1.
[[nodiscard]] std::vector<double> relative_errors_against_best(std::span<const ExamScore> values);

/// Competition ranking, ascending: rank = 1 + number of strictly smaller values.
[[nodiscard]] std::vector<int> rank_scores(std::span<const ExamScore> values);

/// Machine-readable report: {"approaches": [...], "config": {...}}. Full precision.
[[nodiscard]] std::string report_to_json(const Report& report);

/// Markdown comparison table: one column per approach, rows for EXAM value, rank score and relative error per criterion.
/// Relative errors are percentages to one decimal; the best is rendered "-".
[[nodiscard]] std::string report_to_markdown(const Report& report);

}  // namespace flbandit
