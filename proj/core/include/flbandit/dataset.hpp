#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flbandit/arm.hpp"
#include "flbandit/exam.hpp"

namespace flbandit {

/// Module x technique matrix of EXAM scores: the replay environment.
///
/// The matrix is total (every cell present), scores lie in [0, 1] and module
/// ids are unique. Immutable after construction.
class Dataset {
public:
    /// `scores` is row-major: scores[m * arms.size() + a]. Throws DomainError
    /// when the shape, ranges or uniqueness rules are broken.
    Dataset(std::vector<std::string> modules, std::vector<ArmId> arms, std::vector<ExamScore> scores);

    [[nodiscard]] const std::vector<std::string>& modules() const noexcept { return modules_; }
    [[nodiscard]] const std::vector<ArmId>& arms() const noexcept { return arms_; }
    [[nodiscard]] std::size_t module_count() const noexcept { return modules_.size(); }
    [[nodiscard]] std::size_t arm_count() const noexcept { return arms_.size(); }

    [[nodiscard]] ExamScore score(std::size_t module, std::size_t arm) const {
        return scores_[module * arms_.size() + arm];
    }
    [[nodiscard]] std::span<const ExamScore> row(std::size_t module) const {
        return {scores_.data() + module * arms_.size(), arms_.size()};
    }
    [[nodiscard]] std::vector<ExamScore> column(std::size_t arm) const;
    [[nodiscard]] std::optional<std::size_t> arm_index(const ArmId& arm) const;

    /// Restriction to `arms` (in the given order). Throws ConfigError for unknown arms.
    [[nodiscard]] Dataset select_arms(std::span<const ArmId> arms) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::string> modules_;
    std::vector<ArmId> arms_;
    std::vector<ExamScore> scores_;
};

/// What to do with a module that lacks a score for some arm.
enum class MissingPolicy {
    skip,        ///< drop the module
    worst_case,  ///< fill the gap with 1.0
};

[[nodiscard]] MissingPolicy parse_missing_policy(std::string_view text);

/// Reads the long CSV layout `module_id,method,formula,exam` (header required,
/// `#` comment lines and blank lines ignored). Modules and arms keep their
/// first-appearance order. Throws ParseError carrying the offending line.
[[nodiscard]] Dataset load_dataset(std::istream& in, MissingPolicy missing = MissingPolicy::skip);
[[nodiscard]] Dataset load_dataset_file(const std::filesystem::path& path,
                                        MissingPolicy missing = MissingPolicy::skip);

/// Writes the same CSV layout. Scores use shortest round-trip formatting, so
/// load_dataset(write_dataset(d)) == d.
void write_dataset(std::ostream& out, const Dataset& dataset);

/// Order in which modules are presented to a policy.
struct Ordering {
    std::vector<std::size_t> permutation;
    std::uint64_t seed = 0;

    /// True when `permutation` is a bijection over 0..size-1.
    [[nodiscard]] bool is_valid() const;
    [[nodiscard]] std::size_t size() const noexcept { return permutation.size(); }
};

[[nodiscard]] Ordering identity_ordering(const Dataset& dataset);
/// Uniformly random permutation of the dataset's modules, deterministic in `seed`.
[[nodiscard]] Ordering shuffle_modules(const Dataset& dataset, std::uint64_t seed);

/// Score distribution of one synthetic arm: normal(mean, spread) clamped to [0, 1].
struct ArmDistribution {
    double mean = 0.05;
    double spread = 0.01;
};

struct SynthConfig {
    std::size_t module_count = 133;
    std::vector<ArmDistribution> arms;
    std::uint64_t seed = 0;
    /// Optional explicit arm identities; defaults to default_arm_ids(arms.size()).
    std::vector<ArmId> arm_ids;

    /// Throws DomainError when module_count is 0, a mean is outside (0, 1),
    /// a spread is negative, or arm_ids does not match arms in size.
    void validate() const;
};

/// mbfl+ochiai, sbfl+tarantula, sbfl+dstar2, sbfl+ochiai, then sbfl+formula5, sbfl+formula6, ...
[[nodiscard]] std::vector<ArmId> default_arm_ids(std::size_t count);

/// Draws every (module, arm) cell independently. Deterministic per seed.
[[nodiscard]] Dataset generate_synthetic(const SynthConfig& config);

}  // namespace flbandit
