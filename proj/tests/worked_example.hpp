#pragma once

// Worked example shared by several suites: two arms, three modules.

#include <sstream>
#include <string>

#include "flbandit/arm.hpp"
#include "flbandit/bandit.hpp"
#include "flbandit/dataset.hpp"

namespace flbandit::testing {

inline ArmId sbfl() { return ArmId(Method::sbfl, "ochiai"); }
inline ArmId mbfl() { return ArmId(Method::mbfl, "ochiai"); }

inline constexpr const char* kExampleCsv =
    "module_id,method,formula,exam\n"
    "# module a\n"
    "a,sbfl,ochiai,0.003\n"
    "a,mbfl,ochiai,0.011\n"
    "b,sbfl,ochiai,0.116\n"
    "b,mbfl,ochiai,0.027\n"
    "c,sbfl,ochiai,0.001\n"
    "c,mbfl,ochiai,0.052\n";

inline Dataset example_dataset() {
    std::istringstream in(kExampleCsv);
    return load_dataset(in);
}

inline RoundRewards example_round(int module) {
    static const double sbfl_scores[] = {0.003, 0.116, 0.001};
    static const double mbfl_scores[] = {0.011, 0.027, 0.052};
    return {{sbfl(), sbfl_scores[module]}, {mbfl(), mbfl_scores[module]}};
}

inline BanditState example_state() {
    BanditState state({sbfl(), mbfl()});
    for (int m = 0; m < 3; ++m) state = update_state(std::move(state), example_round(m));
    return state;
}

}  // namespace flbandit::testing
