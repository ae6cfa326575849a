#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace flbandit {

/// Localization method half of a technique.
enum class Method { sbfl, mbfl };

[[nodiscard]] std::string_view to_string(Method method) noexcept;

/// Parses "sbfl" / "mbfl" (case-insensitive). Throws DomainError otherwise.
[[nodiscard]] Method parse_method(std::string_view text);

/// Identity of one fault-localization technique: localization method x suspiciousness formula.
///
/// The formula is a non-empty lowercase token made of [a-z0-9_-]. Construction
/// validates it and throws DomainError on anything else.
class ArmId {
public:
    ArmId(Method method, std::string formula);

    /// Accepts "sbfl+ochiai", "SBFL+ochiai" or "sbfl:ochiai".
    [[nodiscard]] static ArmId parse(std::string_view text);

    [[nodiscard]] Method method() const noexcept { return method_; }
    [[nodiscard]] const std::string& formula() const noexcept { return formula_; }

    /// Canonical key, e.g. "sbfl+ochiai". Used in files and on the wire.
    [[nodiscard]] std::string key() const;
    /// Display label in report style, e.g. "SBFL+ochiai".
    [[nodiscard]] std::string label() const;

    friend bool operator==(const ArmId&, const ArmId&) = default;
    friend auto operator<=>(const ArmId&, const ArmId&) = default;

private:
    Method method_;
    std::string formula_;
};

}  // namespace flbandit
