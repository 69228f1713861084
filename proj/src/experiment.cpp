#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include <hobj/csv.hpp>
#include <hobj/errors.hpp>
#include <hobj/experiment.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace hobj
{

namespace
{

constexpr std::size_t smoke_repeats = 5;

void write_text(const fs::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw config_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw config_error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double mean_of(const std::vector<double> &v)
{
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

std::string num(double v)
{
    return format_double(v);
}

std::string variant_of(const RunConfig &cfg)
{
    return cfg.mode == Mode::detection ? cfg.detection.variant_name() : std::string{};
}

double relevant_share(const RunRecord &r)
{
    const auto total = r.post_first_interaction_evaluations();
    if (total == 0) return std::numeric_limits<double>::quiet_NaN();
    return static_cast<double>(r.post_first_interaction_relevant()) / static_cast<double>(total);
}

// Runs grouped by cell in first-seen order, each group sorted by repeat.
std::vector<std::pair<std::string, std::vector<const StoredRun *>>> by_cell(const std::vector<StoredRun> &runs)
{
    std::vector<std::pair<std::string, std::vector<const StoredRun *>>> cells;
    std::map<std::string, std::size_t> where;
    for (const auto &r : runs) {
        auto it = where.find(r.cell);
        if (it == where.end()) {
            it = where.emplace(r.cell, cells.size()).first;
            cells.push_back({r.cell, {}});
        }
        cells[it->second].second.push_back(&r);
    }
    for (auto &[name, list] : cells) {
        std::stable_sort(list.begin(), list.end(), [](const StoredRun *a, const StoredRun *b) { return a->repeat < b->repeat; });
    }
    return cells;
}

} // namespace

ExperimentSuite ExperimentSuite::from_json(const json &j)
{
    ExperimentSuite s;
    try {
        s.seed_base = j.value("seed_base", std::uint64_t{0});
        s.repeats = j.value("repeats", s.repeats);
        s.baseline = j.value("baseline", std::string{});
        const json base = j.value("base", json::object());
        static const std::regex safe("[A-Za-z0-9_.-]+");
        for (const auto &c : j.at("cells")) {
            ExperimentCell cell;
            cell.name = c.at("name").get<std::string>();
            if (!std::regex_match(cell.name, safe)) throw config_error("cell name '" + cell.name + "' must match [A-Za-z0-9_.-]+");
            cell.seed_group = c.value("seed_group", cell.name);
            cell.config = base;
            cell.config.merge_patch(c.value("config", json::object()));
            for (const auto &other : s.cells) {
                if (other.name == cell.name) throw config_error("duplicate cell name '" + cell.name + "'");
            }
            s.cells.push_back(std::move(cell));
        }
    } catch (const json::exception &e) {
        throw config_error(std::string("suite: ") + e.what());
    }
    if (s.cells.empty()) throw config_error("suite has no cells");
    if (s.repeats == 0) throw config_error("suite needs at least one repeat");
    if (!s.baseline.empty()) {
        const bool known = std::any_of(s.cells.begin(), s.cells.end(), [&](const auto &c) { return c.name == s.baseline; });
        if (!known) throw config_error("baseline cell '" + s.baseline + "' not in the suite");
    }
    return s;
}

json ExperimentSuite::to_json() const
{
    json cells = json::array();
    for (const auto &c : this->cells) cells.push_back({{"name", c.name}, {"seed_group", c.seed_group}, {"config", c.config}});
    return {{"seed_base", seed_base}, {"repeats", repeats}, {"baseline", baseline}, {"cells", cells}};
}

std::uint64_t ExperimentSuite::seed_for(const ExperimentCell &cell, std::size_t repeat) const
{
    return seed_base + stable_hash(cell.seed_group + "/" + std::to_string(repeat));
}

RunConfig ExperimentSuite::config_for(const ExperimentCell &cell, std::size_t repeat, bool smoke) const
{
    json j = cell.config;
    j["seed"] = seed_for(cell, repeat);
    auto cfg = run_config_from_json(j);
    if (smoke) cfg.apply_smoke();
    return cfg;
}

ExperimentSuite load_suite(const std::string &path)
{
    json j;
    try {
        j = json::parse(read_text(path));
    } catch (const json::exception &e) {
        throw config_error("suite " + path + ": " + e.what());
    }
    return ExperimentSuite::from_json(j);
}

SuiteReport run_suite(const ExperimentSuite &input, const std::string &out_dir, const SuiteOptions &opt)
{
    auto suite = input;
    if (opt.seed_base_override) suite.seed_base = *opt.seed_base_override;
    const std::size_t repeats = opt.smoke ? std::min(suite.repeats, smoke_repeats) : suite.repeats;

    struct Task {
        std::size_t cell;
        std::size_t repeat;
    };
    std::vector<Task> tasks;
    for (std::size_t c = 0; c < suite.cells.size(); ++c) {
        for (std::size_t r = 0; r < repeats; ++r) tasks.push_back({c, r});
    }

    const fs::path root(out_dir);
    for (const auto &c : suite.cells) fs::create_directories(root / "runs" / c.name);

    std::vector<std::string> errors(tasks.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t t = next++; t < tasks.size(); t = next++) {
            const auto &cell = suite.cells[tasks[t].cell];
            const auto r = tasks[t].repeat;
            try {
                const auto rec = run(suite.config_for(cell, r, opt.smoke));
                auto j = to_json(rec);
                j["suite"] = {{"cell", cell.name}, {"repeat", r}, {"seed_group", cell.seed_group}};
                const auto stem = root / "runs" / cell.name / ("run_" + std::to_string(r));
                write_text(stem.string() + ".json", j.dump(2) + "\n");
                std::string csv = run_record_csv_header();
                for (const auto &row : run_record_csv_rows(rec)) csv += row;
                write_text(stem.string() + ".csv", csv);
            } catch (const std::exception &e) {
                errors[t] = e.what();
                if (errors[t].empty()) errors[t] = "unknown error";
            }
        }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opt.jobs, tasks.size()));
    std::vector<std::thread> pool;
    for (std::size_t k = 1; k < jobs; ++k) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();

    SuiteReport report;
    json runs = json::array();
    for (std::size_t t = 0; t < tasks.size(); ++t) {
        const auto &cell = suite.cells[tasks[t].cell];
        json entry = {{"cell", cell.name}, {"repeat", tasks[t].repeat}, {"seed", suite.seed_for(cell, tasks[t].repeat)}};
        ++report.runs;
        if (errors[t].empty()) {
            entry["status"] = "ok";
        } else {
            entry["status"] = "failed";
            entry["error"] = errors[t];
            ++report.failed;
            if (std::find(report.failed_cells.begin(), report.failed_cells.end(), cell.name) == report.failed_cells.end()) {
                report.failed_cells.push_back(cell.name);
            }
        }
        runs.push_back(entry);
    }
    json manifest = {{"format", "suite-manifest-v1"},
                     {"suite", suite.to_json()},
                     {"smoke", opt.smoke},
                     {"repeats_run", repeats},
                     {"failed_cells", report.failed_cells},
                     {"runs", runs}};
    write_text(root / "manifest.json", manifest.dump(2) + "\n");

    const auto stored = load_runs(out_dir);
    write_text(root / "summary.csv", summarize_runs(stored, suite.baseline));
    write_text(root / "trajectory.csv", trajectory_csv(stored));
    write_text(root / "heatmap.csv", heatmap_csv(stored));
    return report;
}

TInterval t_interval(const std::vector<double> &values)
{
    TInterval ci;
    ci.n = values.size();
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    if (ci.n == 0) {
        ci.mean = ci.low = ci.high = nan;
        return ci;
    }
    ci.mean = mean_of(values);
    if (ci.n == 1) {
        ci.low = ci.high = nan;
        return ci;
    }
    double ss = 0.0;
    for (double v : values) ss += (v - ci.mean) * (v - ci.mean);
    const double sd = std::sqrt(ss / static_cast<double>(ci.n - 1));
    const boost::math::students_t dist(static_cast<double>(ci.n - 1));
    const double t = boost::math::quantile(boost::math::complement(dist, 0.025));
    const double half = t * sd / std::sqrt(static_cast<double>(ci.n));
    ci.low = ci.mean - half;
    ci.high = ci.mean + half;
    return ci;
}

std::vector<StoredRun> load_runs(const std::string &dir)
{
    std::vector<fs::path> files;
    const fs::path runs_dir = fs::path(dir) / "runs";
    if (!fs::exists(runs_dir)) return {};
    for (const auto &e : fs::recursive_directory_iterator(runs_dir)) {
        if (!e.is_regular_file()) continue;
        const auto name = e.path().filename().string();
        if (name.rfind("run_", 0) == 0 && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());

    std::vector<StoredRun> out;
    for (const auto &path : files) {
        try {
            const auto j = json::parse(read_text(path));
            StoredRun s;
            s.record = run_record_from_json(j);
            if (j.contains("suite")) {
                s.cell = j.at("suite").at("cell").get<std::string>();
                s.repeat = j.at("suite").at("repeat").get<std::size_t>();
            } else {
                s.cell = path.parent_path().filename().string();
                s.repeat = std::stoul(path.stem().string().substr(4));
            }
            out.push_back(std::move(s));
        } catch (const std::exception &e) {
            std::cerr << "warning: skipping " << path.string() << ": " << e.what() << "\n";
        }
    }
    return out;
}

std::string summarize_runs(const std::vector<StoredRun> &runs, const std::string &baseline)
{
    std::string out = csv_row({"schema", "row_type", "cell", "baseline", "mode", "variant", "n", "mean_utility",
                               "ci_low", "ci_high", "mean_final_active", "mean_evals_total", "mean_evals_post_first",
                               "mean_relevant_share_post_first", "mean_diff", "same_seeds", "evals_ratio",
                               "evals_reduction"});
    const auto cells = by_cell(runs);
    const std::vector<const StoredRun *> *base = nullptr;
    for (const auto &[name, list] : cells) {
        if (name == baseline) base = &list;
    }

    auto post_first = [](const std::vector<const StoredRun *> &list) {
        std::vector<double> v;
        for (auto *r : list) v.push_back(static_cast<double>(r->record.post_first_interaction_evaluations()));
        return mean_of(v);
    };

    for (const auto &[name, list] : cells) {
        std::vector<double> u, active, total, share;
        for (auto *r : list) {
            if (r->record.final_utility) u.push_back(*r->record.final_utility);
            active.push_back(static_cast<double>(r->record.final_mask.count()));
            total.push_back(static_cast<double>(r->record.counter.total()));
            const double s = relevant_share(r->record);
            if (!std::isnan(s)) share.push_back(s);
        }
        const auto ci = t_interval(u);
        const auto &cfg = list.front()->record.config;
        out += csv_row({"ho-summary-v1", "cell", name, "", to_string(cfg.mode), variant_of(cfg),
                        std::to_string(list.size()), num(ci.mean), num(ci.low), num(ci.high), num(mean_of(active)),
                        num(mean_of(total)), num(post_first(list)), num(mean_of(share)), "", "", "", ""});
    }

    if (!base) return out;
    for (const auto &[name, list] : cells) {
        if (name == baseline) continue;
        std::vector<double> diff;
        bool same = true;
        const std::size_t n = std::min(list.size(), base->size());
        for (std::size_t k = 0; k < n; ++k) {
            const auto &a = list[k]->record;
            const auto &b = (*base)[k]->record;
            same = same && a.config.seed == b.config.seed && list[k]->repeat == (*base)[k]->repeat;
            if (a.final_utility && b.final_utility) diff.push_back(*a.final_utility - *b.final_utility);
        }
        const auto ci = t_interval(diff);
        const double mine = post_first(list);
        const double theirs = post_first(*base);
        const double ratio = theirs > 0.0 ? mine / theirs : std::numeric_limits<double>::quiet_NaN();
        std::vector<double> share;
        for (auto *r : list) {
            const double s = relevant_share(r->record);
            if (!std::isnan(s)) share.push_back(s);
        }
        const auto &cfg = list.front()->record.config;
        out += csv_row({"ho-summary-v1", "paired", name, baseline, to_string(cfg.mode), variant_of(cfg),
                        std::to_string(n), "", num(ci.low), num(ci.high), "", "", num(mine), num(mean_of(share)),
                        num(ci.mean), same ? "true" : "false", num(ratio), num(1.0 - ratio)});
    }
    return out;
}

std::string trajectory_csv(const std::vector<StoredRun> &runs)
{
    std::string out = csv_row({"schema", "cell", "interaction", "n", "mean_active_count", "mean_best_utility_so_far",
                               "mean_evals_total"});
    for (const auto &[name, list] : by_cell(runs)) {
        std::size_t depth = 0;
        for (auto *r : list) depth = std::max(depth, r->record.interactions.size());
        for (std::size_t k = 0; k <= depth; ++k) {
            std::vector<double> active, best, evals;
            for (auto *r : list) {
                const auto &rec = r->record;
                if (k == 0) {
                    active.push_back(static_cast<double>(rec.initial_mask.count()));
                    if (rec.counter_before_first_interaction) {
                        evals.push_back(static_cast<double>(rec.counter_before_first_interaction->total()));
                    }
                    continue;
                }
                if (k > rec.interactions.size()) continue;
                const auto &it = rec.interactions[k - 1];
                active.push_back(static_cast<double>(it.mask_after.count()));
                if (it.best_utility_so_far) best.push_back(*it.best_utility_so_far);
                evals.push_back(static_cast<double>(it.counter_after.total()));
            }
            out += csv_row({"ho-trajectory-v1", name, std::to_string(k), std::to_string(active.size()),
                            num(mean_of(active)), num(mean_of(best)), num(mean_of(evals))});
        }
    }
    return out;
}

std::string heatmap_csv(const std::vector<StoredRun> &runs)
{
    std::string out = csv_row({"schema", "cell", "objective", "interaction", "count", "repeats", "frequency"});
    for (const auto &[name, list] : by_cell(runs)) {
        const std::size_t m = list.front()->record.initial_mask.size();
        std::size_t depth = 0;
        for (auto *r : list) depth = std::max(depth, r->record.interactions.size());
        for (std::size_t k = 0; k <= depth; ++k) {
            std::vector<std::size_t> count(m, 0);
            std::size_t present = 0;
            for (auto *r : list) {
                const auto &rec = r->record;
                if (k > rec.interactions.size()) continue;
                const auto &d = k == 0 ? rec.initial_mask : rec.interactions[k - 1].mask_after;
                ++present;
                for (std::size_t i = 0; i < m && i < d.size(); ++i) count[i] += d[i];
            }
            for (std::size_t i = 0; i < m; ++i) {
                out += csv_row({"ho-heatmap-v1", name, std::to_string(i + 1), std::to_string(k), std::to_string(count[i]),
                                std::to_string(present),
                                num(present ? static_cast<double>(count[i]) / static_cast<double>(present) : 0.0)});
            }
        }
    }
    return out;
}

std::string manifest_baseline(const std::string &dir)
{
    const fs::path p = fs::path(dir) / "manifest.json";
    if (!fs::exists(p)) return {};
    try {
        const auto j = json::parse(read_text(p));
        return j.at("suite").value("baseline", std::string{});
    } catch (const std::exception &e) {
        std::cerr << "warning: unreadable manifest " << p.string() << ": " << e.what() << "\n";
        return {};
    }
}

} // namespace hobj
