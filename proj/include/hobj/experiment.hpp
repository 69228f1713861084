#ifndef HOBJ_EXPERIMENT_HPP
#define HOBJ_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include <hobj/bcemoa.hpp>

namespace hobj
{

/// A grid of run configurations, each repeated with derived seeds.
/**
 * Suite files look like
 *
 *     {"seed_base": 1000, "repeats": 20, "baseline": "ol",
 *      "base": {...RunConfig fields...},
 *      "cells": [{"name": "ol", "config": {"mode": "only_learning"}}, ...]}
 *
 * Each cell's config is the base merged with the cell's patch. Run r of a
 * cell uses seed_base + stable_hash(group + "/" + r), where the group is the
 * cell's "seed_group" if given and its name otherwise; cells that share a
 * group share seeds and can be compared pairwise.
 */
struct ExperimentCell {
    std::string name;
    std::string seed_group;
    nlohmann::json config;
};

struct ExperimentSuite {
    std::uint64_t seed_base = 0;
    std::size_t repeats = 20;
    std::string baseline;
    std::vector<ExperimentCell> cells;

    static ExperimentSuite from_json(const nlohmann::json &j);
    nlohmann::json to_json() const;

    std::uint64_t seed_for(const ExperimentCell &cell, std::size_t repeat) const;
    RunConfig config_for(const ExperimentCell &cell, std::size_t repeat, bool smoke) const;
};

ExperimentSuite load_suite(const std::string &path);

struct SuiteOptions {
    std::size_t jobs = 1;
    bool smoke = false;
    // HO_SEED_BASE, when set, replaces the suite's seed_base
    std::optional<std::uint64_t> seed_base_override;
};

struct SuiteReport {
    std::size_t runs = 0;
    std::size_t failed = 0;
    std::vector<std::string> failed_cells;
};

// Writes <out>/runs/<cell>/run_<r>.json and .csv, <out>/manifest.json,
// <out>/summary.csv, <out>/trajectory.csv and <out>/heatmap.csv.
SuiteReport run_suite(const ExperimentSuite &suite, const std::string &out_dir, const SuiteOptions &opt);

// Mean and two-sided 95% Student t interval.
struct TInterval {
    std::size_t n = 0;
    double mean = 0.0;
    double low = 0.0;
    double high = 0.0;
    double half_width() const { return (high - low) / 2.0; }
};

TInterval t_interval(const std::vector<double> &values);

/// One stored run plus the suite coordinates it belongs to.
struct StoredRun {
    std::string cell;
    std::size_t repeat = 0;
    RunRecord record;
};

// Reads every run_*.json below <dir>/runs; unreadable files are reported on
// stderr and skipped.
std::vector<StoredRun> load_runs(const std::string &dir);

// summary.csv text ("ho-summary-v1"): per-cell rows, paired rows against the
// baseline cell, evaluation-reduction rows.
std::string summarize_runs(const std::vector<StoredRun> &runs, const std::string &baseline);
// Long-format per-interaction means ("ho-trajectory-v1").
std::string trajectory_csv(const std::vector<StoredRun> &runs);
// Active-objective frequencies per interaction ("ho-heatmap-v1"); interaction
// 0 is the initial mask.
std::string heatmap_csv(const std::vector<StoredRun> &runs);

// Baseline named in <dir>/manifest.json, empty if absent.
std::string manifest_baseline(const std::string &dir);

} // namespace hobj

#endif
