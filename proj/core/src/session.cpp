#include "flbandit/session.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "flbandit/errors.hpp"
#include "flbandit/json.hpp"

namespace flbandit {
namespace fs = std::filesystem;

namespace {

constexpr std::string_view kSuffix = ".json";

bool valid_id(const std::string& id) {
    if (id.empty() || id.size() > 64) return false;
    for (const char c : id) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                        c == '-' || c == '_';
        if (!ok) return false;
    }
    return true;
}

template <class Visitor>
void for_each_arm_checked(std::span<const ArmId> arms, std::size_t reported, const Visitor& has_arm) {
    for (const auto& arm : arms) {
        if (!has_arm(arm)) throw ValidationError("report has no outcome for arm " + arm.key());
    }
    if (reported != arms.size()) throw ValidationError("report contains arms that are not in the session");
}

ExamScore exam_for(const ArmOutcome& outcome, std::span<const std::size_t> faulty_lines) {
    try {
        if (const auto* r = std::get_if<FaultRank>(&outcome)) return exam_score(*r);
        const auto& ranking = std::get<SuspiciousnessRanking>(outcome);
        return exam_score(rank_of_fault(ranking.suspiciousness, faulty_lines, ranking.tie));
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

}  // namespace

std::string_view to_string(SessionStatus status) noexcept {
    return status == SessionStatus::active ? "active" : "closed";
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

RoundRewards resolve_rewards(const RoundReport& report, std::span<const ArmId> arms) {
    if (report.module.empty()) throw ValidationError("module label is empty");
    RoundRewards rewards;
    if (const auto* direct = std::get_if<RoundRewards>(&report.outcome)) {
        for_each_arm_checked(arms, direct->size(), [&](const ArmId& a) { return direct->contains(a); });
        for (const auto& arm : arms) {
            const ExamScore v = direct->at(arm);
            if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("EXAM for " + arm.key() + " must lie in [0, 1]");
            rewards.emplace(arm, v);
        }
        return rewards;
    }
    const auto& located = std::get<LocatedFault>(report.outcome);
    for_each_arm_checked(arms, located.per_arm.size(), [&](const ArmId& a) { return located.per_arm.contains(a); });
    for (const auto& arm : arms) rewards.emplace(arm, exam_for(located.per_arm.at(arm), located.faulty_lines));
    return rewards;
}

Recommendation recommend(const SessionState& session) {
    if (session.status == SessionStatus::closed) throw StateError("session " + session.id + " is closed");
    Rng rng = make_rng(session.policy.seed, session.bandit.rounds_completed());
    return Recommendation{select_arm(session.bandit, session.policy, rng),
                          expected_rewards_snapshot(session.bandit, session.policy.aggregator),
                          session.bandit.rounds_completed()};
}

SessionState make_session(std::string id, std::string created_at, std::vector<ArmId> arms,
                          const PolicyConfig& policy) {
    try {
        policy.validate();
        return SessionState{std::move(id), std::move(created_at), policy, BanditState(std::move(arms)), {},
                            SessionStatus::active};
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    } catch (const ConfigError& e) {
        throw ValidationError(e.what());
    }
}

SessionState apply_round(SessionState session, const RoundReport& report, std::string timestamp) {
    if (session.status == SessionStatus::closed) throw StateError("session " + session.id + " is closed");
    const auto arms = session.bandit.arm_ids();
    RoundRewards rewards = resolve_rewards(report, arms);
    const ArmId recommended = recommend(session).arm;
    session.bandit = update_state(std::move(session.bandit), rewards);
    session.round_log.push_back({report.module, recommended, std::move(rewards), std::move(timestamp)});
    return session;
}

SessionStore::SessionStore(fs::path directory) : dir_(std::move(directory)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw StorageError("cannot create session store " + dir_.string() + ": " + ec.message());
}

fs::path SessionStore::path_for(const std::string& id) const {
    if (!valid_id(id)) throw NotFoundError("no session '" + id + "'");
    return dir_ / (id + std::string(kSuffix));
}

bool SessionStore::exists(const std::string& id) const {
    return valid_id(id) && fs::exists(path_for(id));
}

SessionState SessionStore::load(const std::string& id) const {
    const fs::path path = path_for(id);
    std::ifstream in(path);
    if (!in) {
        if (!fs::exists(path)) throw NotFoundError("no session '" + id + "'");
        throw StorageError("cannot read " + path.string());
    }
    nlohmann::json doc;
    try {
        in >> doc;
        return session_from_json(doc);
    } catch (const nlohmann::json::exception& e) {
        throw StorageError("corrupt session document " + path.string() + ": " + e.what());
    } catch (const ValidationError& e) {
        throw StorageError("corrupt session document " + path.string() + ": " + e.what());
    }
}

void SessionStore::save(const SessionState& session) const {
    const fs::path target = path_for(session.id);
    const fs::path temp = dir_ / ("." + session.id + ".tmp");
    {
        std::ofstream out(temp, std::ios::trunc);
        out << session_to_json(session).dump(2) << '\n';
        out.flush();
        if (!out) {
            std::error_code ignored;
            fs::remove(temp, ignored);
            throw StorageError("cannot write " + temp.string());
        }
    }
    std::error_code ec;
    fs::rename(temp, target, ec);
    if (ec) {
        std::error_code ignored;
        fs::remove(temp, ignored);
        throw StorageError("cannot replace " + target.string() + ": " + ec.message());
    }
}

std::vector<std::string> SessionStore::ids() const {
    std::vector<std::string> out;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(dir_, ec)) {
        const auto name = entry.path().filename().string();
        if (!entry.is_regular_file() || name.starts_with('.') || !name.ends_with(kSuffix)) continue;
        out.push_back(name.substr(0, name.size() - kSuffix.size()));
    }
    std::sort(out.begin(), out.end());
    return out;
}

SessionService::SessionService(fs::path directory, Clock clock)
    : store_(std::move(directory)), clock_(clock ? std::move(clock) : Clock(utc_timestamp)) {}

std::shared_ptr<std::shared_mutex> SessionService::lock_for(const std::string& id) const {
    std::lock_guard guard(registry_mutex_);
    auto& slot = locks_[id];
    if (!slot) slot = std::make_shared<std::shared_mutex>();
    return slot;
}

std::string SessionService::new_id() const {
    std::random_device device;
    std::mt19937_64 gen((static_cast<std::uint64_t>(device()) << 32) ^ device());
    while (true) {
        std::ostringstream id;
        id << std::hex << gen();
        if (!store_.exists(id.str())) return id.str();
    }
}

SessionState SessionService::create_session(std::vector<ArmId> arms, const PolicyConfig& policy) {
    SessionState session = make_session(new_id(), clock_(), std::move(arms), policy);
    auto lock = lock_for(session.id);
    std::unique_lock guard(*lock);
    store_.save(session);
    return session;
}

SessionState SessionService::get_session(const std::string& id) const {
    auto lock = lock_for(id);
    std::shared_lock guard(*lock);
    return store_.load(id);
}

std::vector<SessionSummary> SessionService::list_sessions() const {
    std::vector<SessionSummary> out;
    for (const auto& id : store_.ids()) {
        try {
            const SessionState s = get_session(id);
            out.push_back({s.id, s.created_at, s.status, s.bandit.arm_count(), s.bandit.rounds_completed()});
        } catch (const Error&) {
            // Skip documents that vanished or are unreadable.
        }
    }
    return out;
}

Recommendation SessionService::recommend(const std::string& id) const {
    return flbandit::recommend(get_session(id));
}

SessionState SessionService::report_round(const std::string& id, const RoundReport& report) {
    auto lock = lock_for(id);
    std::unique_lock guard(*lock);
    SessionState next = apply_round(store_.load(id), report, clock_());
    store_.save(next);
    return next;
}

SessionState SessionService::close_session(const std::string& id) {
    auto lock = lock_for(id);
    std::unique_lock guard(*lock);
    SessionState session = store_.load(id);
    if (session.status == SessionStatus::closed) return session;
    session.status = SessionStatus::closed;
    store_.save(session);
    return session;
}

}  // namespace flbandit
