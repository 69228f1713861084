// Batch experiment runner: run suites, summarize results, build heatmap data.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <hobj/errors.hpp>
#include <hobj/experiment.hpp>
#include <hobj/problems.hpp>

namespace
{

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw hobj::config_error("cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Interactive EMO with hidden-objective detection: experiment runner"};
    app.require_subcommand(1);

    std::string suite_path, out_dir, in_dir, out_file, config_path, rmnk_out;
    std::size_t jobs = std::max(1u, std::thread::hardware_concurrency());
    bool smoke = false;

    auto *run = app.add_subcommand("run", "Run every cell of a suite");
    run->add_option("--suite", suite_path, "Suite JSON file")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "Results directory")->required();
    run->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    run->add_flag("--smoke", smoke, "CI profile: at most 5 repeats, 150 generations (60 first, 15 between)");

    auto *summarize = app.add_subcommand("summarize", "Per-cell means, t-intervals and paired comparisons");
    summarize->add_option("--in", in_dir, "Results directory")->required()->check(CLI::ExistingDirectory);
    summarize->add_option("--out", out_file, "Summary CSV")->required();

    auto *heatmap = app.add_subcommand("heatmap", "Active-objective frequencies per interaction");
    heatmap->add_option("--in", in_dir, "Results directory")->required()->check(CLI::ExistingDirectory);
    heatmap->add_option("--out", out_file, "Heatmap CSV")->required();

    auto *single = app.add_subcommand("single", "Run one configuration and print its record");
    single->add_option("--config", config_path, "RunConfig JSON file")->required()->check(CLI::ExistingFile);
    single->add_option("--out", out_file, "Record JSON (stdout if omitted)");
    single->add_flag("--smoke", smoke, "Use the short CI schedule");

    std::size_t m = 10, K = 1, n = 0;
    double rho = 0.0;
    std::uint64_t seed = 1;
    auto *gen = app.add_subcommand("rmnk", "Generate a rho-MNK instance file");
    gen->add_option("--m", m, "Objectives")->required();
    gen->add_option("--K", K, "Epistatic links per bit")->required();
    gen->add_option("--rho", rho, "Objective correlation");
    gen->add_option("--n", n, "Bits (default 10/20/30 for m = 4/10/20)");
    gen->add_option("--seed", seed, "Instance seed");
    gen->add_option("--out", rmnk_out, "Output file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            hobj::SuiteOptions opt;
            opt.jobs = jobs;
            opt.smoke = smoke;
            if (const char *env = std::getenv("HO_SEED_BASE")) {
                try {
                    opt.seed_base_override = std::stoull(env);
                } catch (const std::exception &) {
                    throw hobj::config_error(std::string("HO_SEED_BASE is not an unsigned integer: ") + env);
                }
            }
            const auto report = hobj::run_suite(hobj::load_suite(suite_path), out_dir, opt);
            std::cout << report.runs - report.failed << " of " << report.runs << " runs completed; results in " << out_dir
                      << "\n";
            for (const auto &c : report.failed_cells) std::cerr << "cell failed: " << c << " (see manifest.json)\n";
            return report.failed == 0 ? 0 : 2;
        }
        if (*summarize) {
            const auto runs = hobj::load_runs(in_dir);
            write_file(out_file, hobj::summarize_runs(runs, hobj::manifest_baseline(in_dir)));
            std::cout << "summarized " << runs.size() << " runs into " << out_file << "\n";
        }
        if (*heatmap) {
            const auto runs = hobj::load_runs(in_dir);
            write_file(out_file, hobj::heatmap_csv(runs));
            std::cout << "heatmap of " << runs.size() << " runs written to " << out_file << "\n";
        }
        if (*single) {
            std::ifstream in(config_path);
            auto cfg = hobj::run_config_from_json(nlohmann::json::parse(in));
            if (smoke) cfg.apply_smoke();
            const auto text = hobj::to_json(hobj::run(cfg)).dump(2) + "\n";
            if (out_file.empty()) std::cout << text;
            else write_file(out_file, text);
        }
        if (*gen) {
            hobj::rmnk_save(hobj::rmnk_generate(hobj::RmnkParams::make(m, K, rho, seed, n)), rmnk_out);
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
