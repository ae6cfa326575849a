#include "flbandit/arm.hpp"

#include <algorithm>
#include <cctype>

#include "flbandit/errors.hpp"

namespace flbandit {
namespace {

std::string lowercase(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool is_formula_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
}

}  // namespace

std::string_view to_string(Method method) noexcept {
    return method == Method::sbfl ? "sbfl" : "mbfl";
}

Method parse_method(std::string_view text) {
    const std::string lower = lowercase(text);
    if (lower == "sbfl") return Method::sbfl;
    if (lower == "mbfl") return Method::mbfl;
    throw DomainError("unknown localization method '" + std::string(text) + "' (expected sbfl or mbfl)");
}

ArmId::ArmId(Method method, std::string formula) : method_(method), formula_(std::move(formula)) {
    if (formula_.empty() || !std::all_of(formula_.begin(), formula_.end(), is_formula_char)) {
        throw DomainError("formula must be a non-empty lowercase token, got '" + formula_ + "'");
    }
}

ArmId ArmId::parse(std::string_view text) {
    const auto sep = text.find_first_of("+:");
    if (sep == std::string_view::npos) {
        throw DomainError("arm '" + std::string(text) + "' is not of the form method+formula");
    }
    return ArmId(parse_method(text.substr(0, sep)), std::string(text.substr(sep + 1)));
}

std::string ArmId::key() const { return std::string(to_string(method_)) + "+" + formula_; }

std::string ArmId::label() const {
    return std::string(method_ == Method::sbfl ? "SBFL" : "MBFL") + "+" + formula_;
}

}  // namespace flbandit
