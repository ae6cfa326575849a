#include "flbandit/report.hpp"

#include <algorithm>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "flbandit/errors.hpp"
#include "flbandit/replay.hpp"

namespace flbandit {
namespace {

std::string fixed6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::string percent(double e) {
    if (e == 0.0) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f%%", e * 100.0);
    return buf;
}

}  // namespace

double relative_error(ExamScore target, ExamScore best) {
    if (!(target > 0.0) || !(best > 0.0)) throw DomainError("relative error needs positive EXAM values");
    if (best > target) throw DomainError("best value exceeds target value");
    if (target == best) return 0.0;
    return 1.0 - best / target;
}

std::vector<double> relative_errors_against_best(std::span<const ExamScore> values) {
    std::vector<double> out;
    if (values.empty()) return out;
    const ExamScore best = *std::min_element(values.begin(), values.end());
    out.reserve(values.size());
    for (const ExamScore v : values) {
        if (v == best) {
            out.push_back(0.0);
        } else if (best == 0.0) {
            out.push_back(1.0);
        } else {
            out.push_back(relative_error(v, best));
        }
    }
    return out;
}

std::vector<int> rank_scores(std::span<const ExamScore> values) {
    std::vector<int> ranks;
    ranks.reserve(values.size());
    for (const ExamScore v : values) {
        const auto better = std::count_if(values.begin(), values.end(), [v](ExamScore o) { return o < v; });
        ranks.push_back(static_cast<int>(better) + 1);
    }
    return ranks;
}

std::string report_to_json(const Report& report) {
    using nlohmann::json;
    json approaches = json::array();
    for (const auto& e : report.approaches) {
        approaches.push_back({
            {"label", e.summary.label},
            {"average_exam", e.summary.average_exam},
            {"median_exam", e.summary.median_exam},
            {"relative_error_avg", e.relative_error_avg},
            {"relative_error_mdn", e.relative_error_mdn},
            {"rank_avg", e.rank_avg},
            {"rank_mdn", e.rank_mdn},
            {"repetitions", e.summary.repetitions},
        });
    }

    const auto& c = report.config;
    json arms = json::array();
    for (const auto& a : report.arms) arms.push_back(a.key());
    json seeds = json::array();
    for (std::size_t r = 0; r < c.repetitions; ++r) seeds.push_back(c.repetition_seed(r));
    json policies = json::array();
    if (c.run_fixed_arms) policies.push_back("fixed");
    if (c.run_ba_avg) policies.push_back(std::string(kBaAvgLabel));
    if (c.run_ba_mdn) policies.push_back(std::string(kBaMdnLabel));
    if (c.run_random) policies.push_back(std::string(kRandomLabel));

    json doc = {
        {"approaches", std::move(approaches)},
        {"config",
         {
             {"dataset", c.dataset_name},
             {"arms", std::move(arms)},
             {"policies", std::move(policies)},
             {"repetitions", c.repetitions},
             {"base_seed", c.base_seed},
             {"seeds", std::move(seeds)},
             {"epsilon", c.epsilon},
             {"order", std::string(to_string(c.order))},
             {"cross_repetition", "mean"},
         }},
    };
    return doc.dump(2) + "\n";
}

std::string report_to_markdown(const Report& report) {
    std::ostringstream out;
    const auto& c = report.config;
    out << "Repetitions: " << c.repetitions << ", base seed: " << c.base_seed << ", epsilon: " << c.epsilon
        << ", order: " << to_string(c.order) << "\n\n";

    out << "| Evaluation criterion | Measurement |";
    for (const auto& e : report.approaches) out << ' ' << e.summary.label << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < report.approaches.size(); ++i) out << "---:|";
    out << '\n';

    auto row = [&](std::string_view criterion, std::string_view measurement, auto&& cell) {
        out << "| " << criterion << " | " << measurement << " |";
        for (const auto& e : report.approaches) out << ' ' << cell(e) << " |";
        out << '\n';
    };
    row("Average EXAM", "EXAM", [](const ReportEntry& e) { return fixed6(e.summary.average_exam); });
    row("", "Rank score", [](const ReportEntry& e) { return std::to_string(e.rank_avg); });
    row("", "Relative error", [](const ReportEntry& e) { return percent(e.relative_error_avg); });
    row("Median EXAM", "EXAM", [](const ReportEntry& e) { return fixed6(e.summary.median_exam); });
    row("", "Rank score", [](const ReportEntry& e) { return std::to_string(e.rank_mdn); });
    row("", "Relative error", [](const ReportEntry& e) { return percent(e.relative_error_mdn); });
    return out.str();
}

}  // namespace flbandit
