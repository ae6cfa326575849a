#include "flbandit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <sstream>

#include "flbandit/bandit.hpp"
#include "flbandit/errors.hpp"

namespace flbandit {
namespace {

constexpr std::string_view kHeader = "module_id,method,formula,exam";
constexpr std::uint64_t kShuffleStream = 0x5348'5546'464cULL;

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return fields;
}

bool valid_score(double v) { return v >= 0.0 && v <= 1.0; }

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

}  // namespace

Dataset::Dataset(std::vector<std::string> modules, std::vector<ArmId> arms, std::vector<ExamScore> scores)
    : modules_(std::move(modules)), arms_(std::move(arms)), scores_(std::move(scores)) {
    if (modules_.empty()) throw DomainError("dataset has no modules");
    if (arms_.empty()) throw DomainError("dataset has no arms");
    if (scores_.size() != modules_.size() * arms_.size()) {
        throw DomainError("dataset score matrix is not modules x arms");
    }
    if (std::set<std::string>(modules_.begin(), modules_.end()).size() != modules_.size()) {
        throw DomainError("dataset module ids are not unique");
    }
    if (std::set<ArmId>(arms_.begin(), arms_.end()).size() != arms_.size()) {
        throw DomainError("dataset arms are not unique");
    }
    if (!std::all_of(scores_.begin(), scores_.end(), valid_score)) {
        throw DomainError("dataset score outside [0, 1]");
    }
}

std::vector<ExamScore> Dataset::column(std::size_t arm) const {
    std::vector<ExamScore> out;
    out.reserve(modules_.size());
    for (std::size_t m = 0; m < modules_.size(); ++m) out.push_back(score(m, arm));
    return out;
}

std::optional<std::size_t> Dataset::arm_index(const ArmId& arm) const {
    const auto it = std::find(arms_.begin(), arms_.end(), arm);
    if (it == arms_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - arms_.begin());
}

Dataset Dataset::select_arms(std::span<const ArmId> arms) const {
    std::vector<std::size_t> idx;
    for (const auto& arm : arms) {
        const auto i = arm_index(arm);
        if (!i) throw ConfigError("arm " + arm.key() + " is not in the dataset");
        idx.push_back(*i);
    }
    std::vector<ExamScore> scores;
    scores.reserve(modules_.size() * idx.size());
    for (std::size_t m = 0; m < modules_.size(); ++m) {
        for (const auto a : idx) scores.push_back(score(m, a));
    }
    return Dataset(modules_, std::vector<ArmId>(arms.begin(), arms.end()), std::move(scores));
}

MissingPolicy parse_missing_policy(std::string_view text) {
    if (text == "skip") return MissingPolicy::skip;
    if (text == "worst" || text == "worst-case") return MissingPolicy::worst_case;
    throw DomainError("unknown missing-cell policy '" + std::string(text) + "' (expected skip or worst)");
}

Dataset load_dataset(std::istream& in, MissingPolicy missing) {
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::vector<std::string> modules;
    std::map<std::string, std::size_t> module_index;
    std::vector<ArmId> arms;
    std::map<std::pair<std::size_t, std::size_t>, ExamScore> cells;

    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
        view = trim(view);
        if (view.empty() || view.front() == '#') continue;

        if (!header_seen) {
            if (view != kHeader) {
                throw ParseError(line_no, "expected header '" + std::string(kHeader) + "'");
            }
            header_seen = true;
            continue;
        }

        const auto fields = split(view, ',');
        if (fields.size() != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw ParseError(line_no, "empty module_id");

        std::optional<ArmId> arm;
        try {
            arm.emplace(parse_method(fields[1]), std::string(fields[2]));
        } catch (const DomainError& e) {
            throw ParseError(line_no, e.what());
        }

        double exam = 0.0;
        const auto* first = fields[3].data();
        const auto* last = first + fields[3].size();
        const auto [ptr, ec] = std::from_chars(first, last, exam);
        if (ec != std::errc() || ptr != last || fields[3].empty()) {
            throw ParseError(line_no, "exam '" + std::string(fields[3]) + "' is not a number");
        }
        if (!valid_score(exam)) throw ParseError(line_no, "exam " + std::string(fields[3]) + " outside [0, 1]");

        const std::string module_id(fields[0]);
        auto [mit, inserted] = module_index.try_emplace(module_id, modules.size());
        if (inserted) modules.push_back(module_id);

        auto ait = std::find(arms.begin(), arms.end(), *arm);
        if (ait == arms.end()) {
            arms.push_back(*arm);
            ait = arms.end() - 1;
        }
        const auto a = static_cast<std::size_t>(ait - arms.begin());
        if (!cells.emplace(std::pair{mit->second, a}, exam).second) {
            throw ParseError(line_no, "duplicate score for (" + module_id + ", " + arm->key() + ")");
        }
    }

    if (cells.empty()) throw ParseError(0, "no records");

    std::vector<std::string> kept;
    std::vector<ExamScore> scores;
    for (std::size_t m = 0; m < modules.size(); ++m) {
        std::vector<ExamScore> row;
        bool complete = true;
        for (std::size_t a = 0; a < arms.size(); ++a) {
            const auto it = cells.find({m, a});
            if (it != cells.end()) {
                row.push_back(it->second);
            } else if (missing == MissingPolicy::worst_case) {
                row.push_back(1.0);
            } else {
                complete = false;
                break;
            }
        }
        if (!complete) continue;
        kept.push_back(modules[m]);
        scores.insert(scores.end(), row.begin(), row.end());
    }
    if (kept.empty()) throw ParseError(0, "no module has a score for every arm");
    return Dataset(std::move(kept), std::move(arms), std::move(scores));
}

Dataset load_dataset_file(const std::filesystem::path& path, MissingPolicy missing) {
    std::ifstream in(path);
    if (!in) throw ParseError(0, "cannot open dataset " + path.string());
    return load_dataset(in, missing);
}

void write_dataset(std::ostream& out, const Dataset& dataset) {
    out << kHeader << '\n';
    for (std::size_t m = 0; m < dataset.module_count(); ++m) {
        for (std::size_t a = 0; a < dataset.arm_count(); ++a) {
            const auto& arm = dataset.arms()[a];
            out << dataset.modules()[m] << ',' << to_string(arm.method()) << ',' << arm.formula() << ','
                << format_double(dataset.score(m, a)) << '\n';
        }
    }
}

bool Ordering::is_valid() const {
    std::vector<std::size_t> sorted = permutation;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (sorted[i] != i) return false;
    }
    return true;
}

Ordering identity_ordering(const Dataset& dataset) {
    Ordering o;
    o.permutation.resize(dataset.module_count());
    std::iota(o.permutation.begin(), o.permutation.end(), std::size_t{0});
    return o;
}

Ordering shuffle_modules(const Dataset& dataset, std::uint64_t seed) {
    Ordering o = identity_ordering(dataset);
    o.seed = seed;
    Rng rng = make_rng(seed, kShuffleStream);
    std::shuffle(o.permutation.begin(), o.permutation.end(), rng);
    return o;
}

void SynthConfig::validate() const {
    if (module_count < 1) throw DomainError("module_count must be at least 1");
    if (arms.empty()) throw DomainError("synthetic dataset needs at least one arm");
    for (const auto& d : arms) {
        if (!(d.mean > 0.0 && d.mean < 1.0)) throw DomainError("arm mean must lie in (0, 1)");
        if (!(d.spread >= 0.0)) throw DomainError("arm spread must be non-negative");
    }
    if (!arm_ids.empty() && arm_ids.size() != arms.size()) {
        throw DomainError("arm_ids and arm distributions differ in size");
    }
}

std::vector<ArmId> default_arm_ids(std::size_t count) {
    std::vector<ArmId> base{
        ArmId(Method::mbfl, "ochiai"),
        ArmId(Method::sbfl, "tarantula"),
        ArmId(Method::sbfl, "dstar2"),
        ArmId(Method::sbfl, "ochiai"),
    };
    if (count <= base.size()) {
        base.resize(count, base.front());
        return base;
    }
    for (std::size_t i = base.size(); i < count; ++i) {
        base.emplace_back(Method::sbfl, "formula" + std::to_string(i + 1));
    }
    return base;
}

Dataset generate_synthetic(const SynthConfig& config) {
    config.validate();
    std::vector<ArmId> ids = config.arm_ids.empty() ? default_arm_ids(config.arms.size()) : config.arm_ids;

    std::vector<std::string> modules;
    modules.reserve(config.module_count);
    const std::size_t width = std::to_string(config.module_count).size();
    for (std::size_t m = 0; m < config.module_count; ++m) {
        std::string n = std::to_string(m + 1);
        modules.push_back("module-" + std::string(width - n.size(), '0') + n);
    }

    Rng rng = make_rng(config.seed);
    std::vector<ExamScore> scores;
    scores.reserve(config.module_count * config.arms.size());
    for (std::size_t m = 0; m < config.module_count; ++m) {
        for (const auto& d : config.arms) {
            double v = d.mean;
            if (d.spread > 0.0) v = std::normal_distribution<double>(d.mean, d.spread)(rng);
            scores.push_back(std::clamp(v, 0.0, 1.0));
        }
    }
    return Dataset(std::move(modules), std::move(ids), std::move(scores));
}

}  // namespace flbandit
