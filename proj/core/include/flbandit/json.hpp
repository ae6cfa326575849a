#pragma once

#include <map>
#include <nlohmann/json.hpp>

#include "flbandit/bandit.hpp"
#include "flbandit/session.hpp"

namespace flbandit {

// Wire and storage encodings. Arms are encoded by ArmId::key(); numbers keep
// full double precision so a decode of an encode is exact.

[[nodiscard]] nlohmann::json arm_scores_to_json(const std::map<ArmId, ExamScore>& scores);
[[nodiscard]] std::map<ArmId, ExamScore> arm_scores_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json policy_to_json(const PolicyConfig& policy);
[[nodiscard]] PolicyConfig policy_from_json(const nlohmann::json& j);

/// Persisted session document.
[[nodiscard]] nlohmann::json session_to_json(const SessionState& session);
/// Throws ValidationError on a malformed document.
[[nodiscard]] SessionState session_from_json(const nlohmann::json& j);

/// Persisted document plus derived fields for clients: both expected-reward
/// snapshots and, while active, the current recommendation.
[[nodiscard]] nlohmann::json session_view(const SessionState& session);

[[nodiscard]] nlohmann::json recommendation_to_json(const Recommendation& rec);

/// Accepts either
///   {"module": "m", "exam": {"sbfl+ochiai": 0.003, ...}}
/// or
///   {"module": "m", "faulty_lines": [..],
///    "ranks": {"sbfl+ochiai": {"rank": 5, "total_lines": 100}
///              | {"suspiciousness": [..], "tie": "average"}, ...}}
/// Throws ValidationError.
[[nodiscard]] RoundReport round_report_from_json(const nlohmann::json& j);

}  // namespace flbandit
