#include "flbandit/json.hpp"

#include "flbandit/errors.hpp"

namespace flbandit {
namespace {

using nlohmann::json;

ArmId arm_from_key(const std::string& key) {
    try {
        return ArmId::parse(key);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

const json& require(const json& j, const char* field) {
    if (!j.is_object() || !j.contains(field)) throw ValidationError(std::string("missing field '") + field + "'");
    return j.at(field);
}

double number(const json& j, const char* what) {
    if (!j.is_number()) throw ValidationError(std::string(what) + " must be a number");
    return j.get<double>();
}

std::string text(const json& j, const char* what) {
    if (!j.is_string()) throw ValidationError(std::string(what) + " must be a string");
    return j.get<std::string>();
}

TieStrategy parse_tie(const std::string& s) {
    if (s == "best") return TieStrategy::best;
    if (s == "worst") return TieStrategy::worst;
    if (s == "average") return TieStrategy::average;
    throw ValidationError("unknown tie strategy '" + s + "'");
}

std::size_t count(const json& j, const char* what) {
    if (!j.is_number_integer() || j.get<long long>() < 0) {
        throw ValidationError(std::string(what) + " must be a non-negative integer");
    }
    return j.get<std::size_t>();
}

}  // namespace

json arm_scores_to_json(const std::map<ArmId, ExamScore>& scores) {
    json j = json::object();
    for (const auto& [arm, v] : scores) j[arm.key()] = v;
    return j;
}

std::map<ArmId, ExamScore> arm_scores_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("per-arm scores must be an object");
    std::map<ArmId, ExamScore> out;
    for (const auto& [key, v] : j.items()) {
        if (!out.emplace(arm_from_key(key), number(v, "EXAM score")).second) {
            throw ValidationError("arm " + key + " given twice");
        }
    }
    return out;
}

json policy_to_json(const PolicyConfig& policy) {
    return {{"epsilon", policy.epsilon},
            {"aggregator", std::string(to_string(policy.aggregator))},
            {"seed", policy.seed}};
}

PolicyConfig policy_from_json(const json& j) {
    PolicyConfig p;
    if (j.contains("epsilon")) p.epsilon = number(j.at("epsilon"), "epsilon");
    if (j.contains("aggregator")) {
        try {
            p.aggregator = parse_aggregator(text(j.at("aggregator"), "aggregator"));
        } catch (const DomainError& e) {
            throw ValidationError(e.what());
        }
    }
    if (j.contains("seed")) {
        if (!j.at("seed").is_number_unsigned()) throw ValidationError("seed must be a non-negative integer");
        p.seed = j.at("seed").get<std::uint64_t>();
    }
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
    return p;
}

json session_to_json(const SessionState& s) {
    json arms = json::array();
    for (const auto& a : s.bandit.arms()) arms.push_back({{"arm", a.arm.key()}, {"history", a.history}});
    json log = json::array();
    for (const auto& r : s.round_log) {
        log.push_back({{"module", r.module},
                       {"recommended", r.recommended.key()},
                       {"rewards", arm_scores_to_json(r.rewards)},
                       {"timestamp", r.timestamp}});
    }
    return {
        {"id", s.id},
        {"created_at", s.created_at},
        {"status", std::string(to_string(s.status))},
        {"policy", policy_to_json(s.policy)},
        {"arms", std::move(arms)},
        {"rounds_completed", s.bandit.rounds_completed()},
        {"round_log", std::move(log)},
    };
}

SessionState session_from_json(const json& j) {
    try {
        std::vector<ArmState> arms;
        for (const auto& a : require(j, "arms")) {
            arms.push_back({arm_from_key(text(require(a, "arm"), "arm")),
                            require(a, "history").get<std::vector<ExamScore>>()});
        }
        std::vector<RoundLogEntry> log;
        for (const auto& r : require(j, "round_log")) {
            std::map<ArmId, ExamScore> rewards = arm_scores_from_json(require(r, "rewards"));
            log.push_back({text(require(r, "module"), "module"), arm_from_key(text(require(r, "recommended"), "arm")),
                           std::move(rewards), text(require(r, "timestamp"), "timestamp")});
        }
        const std::string status = text(require(j, "status"), "status");
        if (status != "active" && status != "closed") throw ValidationError("unknown status '" + status + "'");

        SessionState s{text(require(j, "id"), "id"),
                       text(require(j, "created_at"), "created_at"),
                       policy_from_json(require(j, "policy")),
                       BanditState(std::move(arms)),
                       std::move(log),
                       status == "active" ? SessionStatus::active : SessionStatus::closed};
        if (s.round_log.size() != s.bandit.rounds_completed()) {
            throw ValidationError("round log length differs from completed rounds");
        }
        return s;
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    } catch (const json::exception& e) {
        throw ValidationError(e.what());
    }
}

json recommendation_to_json(const Recommendation& rec) {
    return {{"arm", rec.arm.key()},
            {"label", rec.arm.label()},
            {"expected_rewards", arm_scores_to_json(rec.expected_rewards)},
            {"round", rec.round}};
}

json session_view(const SessionState& s) {
    json view = session_to_json(s);
    view["expected_rewards"] = {
        {"average", arm_scores_to_json(expected_rewards_snapshot(s.bandit, AggregatorKind::average))},
        {"median", arm_scores_to_json(expected_rewards_snapshot(s.bandit, AggregatorKind::median))},
    };
    view["recommendation"] = s.status == SessionStatus::active ? recommendation_to_json(recommend(s)) : json();
    return view;
}

RoundReport round_report_from_json(const json& j) {
    if (!j.is_object()) throw ValidationError("round report must be a JSON object");
    RoundReport report;
    report.module = text(require(j, "module"), "module");
    const bool direct = j.contains("exam");
    const bool located = j.contains("ranks");
    if (direct == located) throw ValidationError("round report needs exactly one of 'exam' or 'ranks'");

    if (direct) {
        report.outcome = arm_scores_from_json(j.at("exam"));
        return report;
    }

    LocatedFault fault;
    if (j.contains("faulty_lines")) {
        const auto& lines = j.at("faulty_lines");
        if (!lines.is_array()) throw ValidationError("faulty_lines must be an array");
        for (const auto& l : lines) fault.faulty_lines.push_back(count(l, "faulty line"));
    }
    const auto& ranks = j.at("ranks");
    if (!ranks.is_object()) throw ValidationError("ranks must be an object");
    for (const auto& [key, v] : ranks.items()) {
        ArmOutcome outcome;
        if (v.is_object() && v.contains("suspiciousness")) {
            SuspiciousnessRanking r;
            const auto& susp = v.at("suspiciousness");
            if (!susp.is_array()) throw ValidationError("suspiciousness must be an array");
            for (const auto& s : susp) r.suspiciousness.push_back(number(s, "suspiciousness"));
            if (v.contains("tie")) r.tie = parse_tie(text(v.at("tie"), "tie"));
            if (fault.faulty_lines.empty()) throw ValidationError("suspiciousness rankings need faulty_lines");
            outcome = std::move(r);
        } else {
            outcome = FaultRank{number(require(v, "rank"), "rank"), count(require(v, "total_lines"), "total_lines")};
        }
        if (!fault.per_arm.emplace(arm_from_key(key), std::move(outcome)).second) {
            throw ValidationError("arm " + key + " given twice");
        }
    }
    report.outcome = std::move(fault);
    return report;
}

}  // namespace flbandit
