#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "flbandit/arm.hpp"
#include "flbandit/bandit.hpp"
#include "flbandit/exam.hpp"

namespace flbandit {

enum class SessionStatus { active, closed };

[[nodiscard]] std::string_view to_string(SessionStatus status) noexcept;

struct RoundLogEntry {
    std::string module;
    ArmId recommended;
    RoundRewards rewards;
    std::string timestamp;

    friend bool operator==(const RoundLogEntry&, const RoundLogEntry&) = default;
};

/// A developer's debugging loop: policy, arm histories and the log of rounds.
/// round_log.size() always equals bandit.rounds_completed().
struct SessionState {
    std::string id;
    std::string created_at;
    PolicyConfig policy;
    BanditState bandit;
    std::vector<RoundLogEntry> round_log;
    SessionStatus status = SessionStatus::active;

    friend bool operator==(const SessionState&, const SessionState&) = default;
};

struct SessionSummary {
    std::string id;
    std::string created_at;
    SessionStatus status = SessionStatus::active;
    std::size_t arm_count = 0;
    std::size_t rounds_completed = 0;
};

/// Per-arm suspiciousness list; the EXAM rank is derived with rank_of_fault.
struct SuspiciousnessRanking {
    std::vector<double> suspiciousness;
    TieStrategy tie = TieStrategy::average;
};

using ArmOutcome = std::variant<FaultRank, SuspiciousnessRanking>;

/// Actual fault location plus, per arm, where that arm ranked it.
struct LocatedFault {
    /// Faulty line indices; only needed by SuspiciousnessRanking outcomes.
    std::vector<std::size_t> faulty_lines;
    std::map<ArmId, ArmOutcome> per_arm;
};

/// Outcome of debugging one module: explicit EXAM per arm, or data to derive it.
struct RoundReport {
    std::string module;
    std::variant<RoundRewards, LocatedFault> outcome;
};

/// Converts a report into one EXAM score per arm in `arms`.
/// Throws ValidationError when an arm is missing or extra, or a value is invalid.
[[nodiscard]] RoundRewards resolve_rewards(const RoundReport& report, std::span<const ArmId> arms);

struct Recommendation {
    ArmId arm;
    std::map<ArmId, ExamScore> expected_rewards;
    /// 0-based index of the round this recommendation is for.
    std::size_t round = 0;
};

/// Recommendation for the next round. Uses the generator for stream
/// rounds_completed of the session seed, so it is constant until a round is reported.
[[nodiscard]] Recommendation recommend(const SessionState& session);

/// New active session with empty histories. Throws ValidationError on < 2 arms,
/// duplicate arms or an invalid epsilon.
[[nodiscard]] SessionState make_session(std::string id, std::string created_at, std::vector<ArmId> arms,
                                        const PolicyConfig& policy);

/// Applies one reported round. Throws StateError if the session is closed.
[[nodiscard]] SessionState apply_round(SessionState session, const RoundReport& report, std::string timestamp);

/// One JSON document per session in a directory, replaced atomically
/// (write to a temporary file, then rename over the old document).
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path directory);

    [[nodiscard]] const std::filesystem::path& directory() const noexcept { return dir_; }
    [[nodiscard]] std::filesystem::path path_for(const std::string& id) const;
    [[nodiscard]] bool exists(const std::string& id) const;
    /// Throws NotFoundError for unknown ids, StorageError for unreadable documents.
    [[nodiscard]] SessionState load(const std::string& id) const;
    /// Throws StorageError; the previous document is left intact on failure.
    void save(const SessionState& session) const;
    [[nodiscard]] std::vector<std::string> ids() const;

private:
    std::filesystem::path dir_;
};

/// Session operations over a store. One writer per session at a time; reads take
/// a shared lock and see either the previous or the next document, never a mix.
class SessionService {
public:
    using Clock = std::function<std::string()>;

    explicit SessionService(std::filesystem::path directory, Clock clock = {});

    SessionState create_session(std::vector<ArmId> arms, const PolicyConfig& policy);
    [[nodiscard]] SessionState get_session(const std::string& id) const;
    [[nodiscard]] std::vector<SessionSummary> list_sessions() const;
    /// Throws StateError on a closed session.
    [[nodiscard]] Recommendation recommend(const std::string& id) const;
    SessionState report_round(const std::string& id, const RoundReport& report);
    /// Idempotent.
    SessionState close_session(const std::string& id);

    [[nodiscard]] const SessionStore& store() const noexcept { return store_; }

private:
    std::shared_ptr<std::shared_mutex> lock_for(const std::string& id) const;
    std::string new_id() const;

    SessionStore store_;
    Clock clock_;
    mutable std::mutex registry_mutex_;
    mutable std::map<std::string, std::shared_ptr<std::shared_mutex>> locks_;
};

/// Current UTC time as ISO-8601 with seconds, e.g. "2024-05-01T12:00:00Z".
[[nodiscard]] std::string utc_timestamp();

}  // namespace flbandit
