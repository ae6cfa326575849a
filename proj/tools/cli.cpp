#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "flbandit/dataset.hpp"
#include "flbandit/errors.hpp"
#include "flbandit/http_api.hpp"
#include "flbandit/json.hpp"
#include "flbandit/replay.hpp"
#include "flbandit/report.hpp"
#include "flbandit/session.hpp"

namespace flbandit::cli {
namespace {

constexpr const char* kStoreEnv = "FLBANDIT_STORE";
constexpr const char* kDefaultStore = ".flbandit-sessions";

struct ReplayOptions {
    std::string dataset;
    std::string aggregator = "both";
    double epsilon = 0.0;
    std::size_t repetitions = 10;
    std::uint64_t seed = 0;
    std::string format = "json";
    std::string out;
    bool reshuffle = true;
    bool keep_order = false;
    std::string missing = "skip";
    std::vector<std::string> arms;
    bool no_fixed = false;
    bool no_random = false;
    unsigned threads = 1;
};

struct SynthOptions {
    std::size_t modules = 133;
    std::size_t arms = 4;
    std::uint64_t seed = 0;
    std::vector<double> means;
    double spread = 0.01;
    std::string out;
};

struct SessionOptions {
    std::string store;
    std::string id;
    std::vector<std::string> arms;
    double epsilon = 0.0;
    std::string aggregator = "avg";
    std::uint64_t seed = 0;
    std::string module;
    std::vector<std::string> exam;
    std::vector<std::string> rank;
};

struct ServeOptions {
    std::string store;
    std::string addr = "127.0.0.1:8080";
};

/// Writes to `path`, or to `out` when path is empty.
void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    file << text;
    if (!file) throw StorageError("cannot write " + path);
}

std::string store_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kStoreEnv)) return env;
    return kDefaultStore;
}

std::pair<std::string, std::string> split_assignment(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos) throw ValidationError("expected arm=value, got '" + text + "'");
    return {text.substr(0, eq), text.substr(eq + 1)};
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) throw ValidationError("'" + text + "' is not a number");
    return v;
}

ArmId parse_arm(const std::string& text) {
    try {
        return ArmId::parse(text);
    } catch (const DomainError& e) {
        throw ValidationError(e.what());
    }
}

int run_replay(const ReplayOptions& o, std::ostream& out) {
    const Dataset dataset = load_dataset_file(o.dataset, parse_missing_policy(o.missing));
    ExperimentConfig config;
    config.dataset_name = o.dataset;
    for (const auto& a : o.arms) config.arms.push_back(ArmId::parse(a));
    config.run_ba_avg = o.aggregator != "median";
    config.run_ba_mdn = o.aggregator != "avg";
    config.run_fixed_arms = !o.no_fixed;
    config.run_random = !o.no_random;
    config.repetitions = o.repetitions;
    config.base_seed = o.seed;
    config.epsilon = o.epsilon;
    config.order = o.keep_order ? OrderMode::identity
                   : o.reshuffle ? OrderMode::reshuffle_per_rep
                                 : OrderMode::shuffle_once;
    config.threads = o.threads;

    const Report report = run_experiment(dataset, config);
    emit(o.format == "md" ? report_to_markdown(report) : report_to_json(report), o.out, out);
    return kExitOk;
}

int run_synth(const SynthOptions& o, std::ostream& out) {
    SynthConfig config;
    config.module_count = o.modules;
    config.seed = o.seed;
    if (!o.means.empty() && o.means.size() != o.arms) {
        throw ValidationError("--means needs one value per arm");
    }
    for (std::size_t i = 0; i < o.arms; ++i) {
        const double mean = o.means.empty() ? 0.01 * static_cast<double>(i + 1) : o.means[i];
        config.arms.push_back({mean, o.spread});
    }
    std::ostringstream csv;
    write_dataset(csv, generate_synthetic(config));
    emit(csv.str(), o.out, out);
    return kExitOk;
}

RoundReport report_from_flags(const SessionOptions& o) {
    if (o.exam.empty() == o.rank.empty()) throw ValidationError("give either --exam or --rank values");
    RoundReport report;
    report.module = o.module;
    if (!o.exam.empty()) {
        RoundRewards rewards;
        for (const auto& e : o.exam) {
            const auto [arm, value] = split_assignment(e);
            if (!rewards.emplace(parse_arm(arm), parse_number(value)).second) {
                throw ValidationError("arm " + arm + " given twice");
            }
        }
        report.outcome = std::move(rewards);
        return report;
    }
    LocatedFault fault;
    for (const auto& r : o.rank) {
        const auto [arm, value] = split_assignment(r);
        const auto slash = value.find('/');
        if (slash == std::string::npos) throw ValidationError("expected arm=rank/total, got '" + r + "'");
        const double rank = parse_number(value.substr(0, slash));
        const double total = parse_number(value.substr(slash + 1));
        if (total < 1 || total != static_cast<double>(static_cast<std::size_t>(total))) {
            throw ValidationError("total lines must be a positive integer");
        }
        if (!fault.per_arm.emplace(parse_arm(arm), FaultRank{rank, static_cast<std::size_t>(total)}).second) {
            throw ValidationError("arm " + arm + " given twice");
        }
    }
    report.outcome = std::move(fault);
    return report;
}

void print_json(std::ostream& out, const nlohmann::json& j) { out << j.dump(2) << '\n'; }

int run_session(const std::string& action, const SessionOptions& o, std::ostream& out) {
    SessionService service(store_dir(o.store));
    if (action == "new") {
        std::vector<ArmId> arms;
        for (const auto& a : o.arms) arms.push_back(parse_arm(a));
        PolicyConfig policy{o.epsilon, parse_aggregator(o.aggregator), o.seed};
        print_json(out, session_view(service.create_session(std::move(arms), policy)));
    } else if (action == "show") {
        print_json(out, session_view(service.get_session(o.id)));
    } else if (action == "list") {
        nlohmann::json list = nlohmann::json::array();
        for (const auto& s : service.list_sessions()) {
            list.push_back({{"id", s.id},
                            {"created_at", s.created_at},
                            {"status", std::string(to_string(s.status))},
                            {"rounds_completed", s.rounds_completed}});
        }
        print_json(out, list);
    } else if (action == "recommend") {
        print_json(out, recommendation_to_json(service.recommend(o.id)));
    } else if (action == "report") {
        print_json(out, session_view(service.report_round(o.id, report_from_flags(o))));
    } else if (action == "close") {
        print_json(out, session_view(service.close_session(o.id)));
    }
    return kExitOk;
}

int run_serve(const ServeOptions& o, std::ostream& out, std::ostream& err) {
    const auto colon = o.addr.rfind(':');
    if (colon == std::string::npos) throw ValidationError("--addr must be host:port");
    const std::string host = o.addr.substr(0, colon);
    const int port = static_cast<int>(parse_number(o.addr.substr(colon + 1)));

    SessionService service(store_dir(o.store));
    ApiServer server(service);
    const int bound = server.bind(host, port);
    if (bound < 0) {
        err << "error: cannot bind " << o.addr << '\n';
        return kExitData;
    }
    out << "serving session API on http://" << host << ':' << bound << "/api/sessions (store "
        << service.store().directory().string() << ")" << std::endl;
    return server.listen() ? kExitOk : kExitData;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bandit-based selection of fault-localization techniques", "flbandit"};
    app.require_subcommand(1);

    ReplayOptions replay;
    auto* replay_cmd = app.add_subcommand("replay", "Replay policies and baselines over an EXAM dataset");
    replay_cmd->add_option("--dataset", replay.dataset, "CSV dataset (module_id,method,formula,exam)")
        ->required();
    replay_cmd->add_option("--aggregator", replay.aggregator, "Bandit policies to run: avg, median or both")
        ->check(CLI::IsMember({"avg", "median", "both"}))
        ->capture_default_str();
    replay_cmd->add_option("--epsilon", replay.epsilon, "Exploration probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    replay_cmd->add_option("--repetitions", replay.repetitions, "Number of repetitions")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    replay_cmd->add_option("--seed", replay.seed, "Base seed; repetition r uses seed + r")->capture_default_str();
    replay_cmd->add_option("--format", replay.format, "Report format")
        ->check(CLI::IsMember({"json", "md"}))
        ->capture_default_str();
    replay_cmd->add_option("--out", replay.out, "Write the report here instead of standard output");
    replay_cmd->add_flag("--reshuffle-per-rep,!--no-reshuffle-per-rep", replay.reshuffle,
                         "Shuffle module order for every repetition (default) or once from the base seed");
    replay_cmd->add_flag("--keep-order", replay.keep_order, "Replay modules in dataset order, no shuffling");
    replay_cmd->add_option("--missing", replay.missing, "Modules lacking an arm's score: skip or worst (fill 1.0)")
        ->check(CLI::IsMember({"skip", "worst"}))
        ->capture_default_str();
    replay_cmd->add_option("--arms", replay.arms, "Arm subset, e.g. sbfl+ochiai,mbfl+ochiai (default: all)")
        ->delimiter(',');
    replay_cmd->add_flag("--no-fixed", replay.no_fixed, "Skip the fixed-arm baselines");
    replay_cmd->add_flag("--no-random", replay.no_random, "Skip the random baseline");
    replay_cmd->add_option("--threads", replay.threads, "Worker threads for repetitions (0 = all cores)")
        ->capture_default_str();

    SynthOptions synth;
    auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic EXAM dataset");
    synth_cmd->add_option("--modules", synth.modules, "Number of modules")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    synth_cmd->add_option("--arms", synth.arms, "Number of arms")->check(CLI::PositiveNumber)->capture_default_str();
    synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--means", synth.means, "Per-arm mean EXAM (default 0.01, 0.02, ...)")->delimiter(',');
    synth_cmd->add_option("--spread", synth.spread, "Standard deviation of every arm's scores")
        ->check(CLI::NonNegativeNumber)
        ->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Write the CSV here instead of standard output");

    SessionOptions session;
    auto* session_cmd = app.add_subcommand("session", "Live debugging sessions in a local store");
    session_cmd->require_subcommand(1);
    session_cmd->add_option("--store", session.store,
                            std::string("Session store directory (env ") + kStoreEnv + ", default " +
                                kDefaultStore + ")");
    auto* s_new = session_cmd->add_subcommand("new", "Create a session");
    s_new->add_option("--arms", session.arms, "Comma-separated arms, e.g. sbfl+ochiai,mbfl+ochiai")
        ->delimiter(',')
        ->required();
    s_new->add_option("--epsilon", session.epsilon, "Exploration probability")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    s_new->add_option("--aggregator", session.aggregator, "Expected-reward aggregator: avg or median")
        ->check(CLI::IsMember({"avg", "median"}))
        ->capture_default_str();
    s_new->add_option("--seed", session.seed, "Selection seed")->capture_default_str();
    auto* s_show = session_cmd->add_subcommand("show", "Print a session");
    auto* s_list = session_cmd->add_subcommand("list", "List sessions");
    auto* s_rec = session_cmd->add_subcommand("recommend", "Recommend the technique for the next module");
    auto* s_report = session_cmd->add_subcommand("report", "Report the outcome of one module");
    s_report->add_option("--module", session.module, "Module label")->required();
    s_report->add_option("--exam", session.exam, "Per-arm EXAM, arm=value (repeatable)");
    s_report->add_option("--rank", session.rank, "Per-arm fault rank, arm=rank/total_lines (repeatable)");
    auto* s_close = session_cmd->add_subcommand("close", "Close a session");
    for (auto* cmd : {s_show, s_rec, s_report, s_close}) cmd->add_option("--id", session.id, "Session id")->required();
    for (auto* cmd : {s_new, s_show, s_list, s_rec, s_report, s_close}) {
        cmd->add_option("--store", session.store, "Session store directory");
    }

    ServeOptions serve;
    auto* serve_cmd = app.add_subcommand("serve", "Serve the session HTTP API");
    serve_cmd->add_option("--addr", serve.addr, "Listen address host:port")->capture_default_str();
    serve_cmd->add_option("--store", serve.store,
                          std::string("Session store directory (env ") + kStoreEnv + ")");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        for (const auto* sub : app.get_subcommands()) {
            err << sub->help();
            break;
        }
        return kExitUsage;
    }

    try {
        if (replay_cmd->parsed()) return run_replay(replay, out);
        if (synth_cmd->parsed()) return run_synth(synth, out);
        if (serve_cmd->parsed()) return run_serve(serve, out, err);
        for (auto* sub : session_cmd->get_subcommands()) return run_session(sub->get_name(), session, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitData;
    }
    return kExitUsage;
}

}  // namespace flbandit::cli
