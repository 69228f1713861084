// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance NAME...    run the named criteria only
//   acceptance --list     print the names
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <hobj/bcemoa.hpp>
#include <hobj/detection.hpp>
#include <hobj/mdm.hpp>
#include <hobj/nsga2.hpp>
#include <hobj/problems.hpp>

#include "oracles.hpp"

using namespace hobj;

namespace
{

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(Clock::time_point t0)
{
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int prec = 4)
{
    std::ostringstream ss;
    ss.precision(prec);
    ss << v;
    return ss.str();
}

// Evidence shared by the property checks: every record produced here.
std::vector<RunRecord> &ledger()
{
    static std::vector<RunRecord> records;
    return records;
}

RunRecord run_logged(const RunConfig &cfg)
{
    auto rec = run(cfg);
    ledger().push_back(rec);
    return rec;
}

std::uint64_t recount(const RunRecord &rec)
{
    std::uint64_t total = rec.initial_charges;
    for (auto [gens, active] : rec.phases) total += gens * rec.config.population * active;
    for (const auto &i : rec.interactions) total += i.interaction_charges + i.reevaluation_charges;
    return total;
}

RunConfig dtlz2_m10(Mode mode, std::uint64_t seed)
{
    RunConfig cfg;
    cfg.problem = DtlzSpec::make(2, 10);
    cfg.utility = UtilitySpec{UtilityKind::uf1, {0, 1}, {}, {}};
    cfg.mode = mode;
    cfg.seed = seed;
    return cfg;
}

// ---------------------------------------------------------------------------

Outcome ftest_oracle()
{
    const auto t0 = Clock::now();
    Rng rng(20240601);
    double worst = 0.0;
    std::size_t checked = 0;
    for (int ds = 0; ds < 200; ++ds) {
        const std::size_t n = 3 + rng.index(28);
        const std::size_t m = 2 + rng.index(19);
        std::vector<ObjectiveVector> t(n, ObjectiveVector(m));
        for (auto &f : t) {
            for (auto &v : f) v = rng.uniform();
        }
        // one constant column and one rank-aligned column now and then
        if (ds % 7 == 0) {
            for (auto &f : t) f[0] = 0.5;
        }
        std::vector<int> r(n);
        for (auto &x : r) x = 1 + static_cast<int>(rng.index(n));
        if (ds % 11 == 0) {
            for (std::size_t k = 0; k < n; ++k) t[k][m - 1] = 2.0 * r[k] + 1.0;
        }
        const auto s = univariate_scores(t, r);
        std::vector<double> rd(r.begin(), r.end());
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> col;
            for (const auto &f : t) col.push_back(f[i]);
            const double want = std::max(oracle::f_test_p(col, rd), min_p_value);
            worst = std::max(worst, std::abs(s.p_value[i] - want));
            ++checked;
        }
    }
    const double secs = seconds_since(t0);
    return {worst <= 1e-8 && secs < 10.0,
            std::to_string(checked) + " p-values, max |diff| " + fmt(worst) + " (tol 1e-8), " + fmt(secs, 3) + " s (limit 10 s)"};
}

Outcome tau_one_degeneracy()
{
    std::size_t runs = 0, mismatches = 0;
    std::vector<RunConfig> cases;
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        auto a = dtlz2_m10(Mode::detection, seed);
        a.apply_smoke();
        cases.push_back(a);

        RunConfig b;
        b.problem = RmnkParams::make(10, 1, 0.0, seed);
        b.utility = UtilitySpec{UtilityKind::uf1, {0, 1}, {}, {}};
        b.seed = seed;
        b.apply_smoke();
        cases.push_back(b);

        RunConfig c;
        c.problem = DtlzSpec::make(1, 4);
        c.utility = UtilitySpec{UtilityKind::tchebychef, {0, 3}, {}, {}};
        c.seed = seed;
        cases.push_back(c);
    }
    for (auto det : cases) {
        det.mode = Mode::detection;
        det.detection.method = DetectionConfig::Method::univariate;
        det.detection.policy = DetectionConfig::Policy::threshold;
        det.detection.tau = 1.0;
        auto ol = det;
        ol.mode = Mode::only_learning;
        const auto a = run_logged(det);
        const auto b = run_logged(ol);
        ++runs;
        bool same = a.interactions.size() == b.interactions.size() && a.final_x == b.final_x && a.final_f == b.final_f
                    && a.initial_mask == b.initial_mask;
        for (std::size_t k = 0; same && k < a.interactions.size(); ++k) {
            same = a.interactions[k].mask_after == b.interactions[k].mask_after
                   && a.interactions[k].mask_before == b.interactions[k].mask_before;
        }
        mismatches += !same;
    }
    return {mismatches == 0, std::to_string(runs) + " seeded pairs, " + std::to_string(mismatches) + " differ (exact equality)"};
}

Outcome detection_power()
{
    const auto t0 = Clock::now();
    std::size_t exact = 0;
    const std::size_t seeds = 20;
    std::vector<std::size_t> sizes;
    const auto target = ActiveMask::from_indices(10, std::vector<std::size_t>{0, 1});
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        RunConfig cfg;
        cfg.problem = RmnkParams::make(10, 1, 0.0, seed, 20);
        cfg.utility = UtilitySpec{UtilityKind::uf1, {0, 1}, {}, {}};
        cfg.mode = Mode::detection;
        cfg.detection.method = DetectionConfig::Method::univariate;
        cfg.detection.policy = DetectionConfig::Policy::threshold;
        cfg.detection.tau = 0.05;
        cfg.seed = seed;
        cfg.apply_smoke();
        const auto rec = run_logged(cfg);
        const auto &first = rec.interactions.front().mask_after;
        exact += first == target;
        sizes.push_back(first.count());
    }
    const double secs = seconds_since(t0);
    const double share = static_cast<double>(exact) / static_cast<double>(seeds);
    std::string sz;
    for (auto s : sizes) sz += (sz.empty() ? "" : ",") + std::to_string(s);
    return {share >= 0.5 && secs < 600.0,
            "mask == {1,2} after interaction 1 in " + std::to_string(exact) + "/" + std::to_string(seeds) + " runs ("
                + fmt(100.0 * share, 3) + "%, need >= 50%); active counts [" + sz + "]; " + fmt(secs, 3) + " s"};
}

Outcome evaluation_reduction()
{
    const auto t0 = Clock::now();
    std::uint64_t ol_total = 0, det_total = 0, det_relevant = 0;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        RunConfig det;
        det.problem = DtlzSpec::make(1, 20);
        det.utility = UtilitySpec{UtilityKind::uf3, {0, 3}, {}, {}};
        det.mode = Mode::detection;
        det.detection.method = DetectionConfig::Method::univariate;
        det.detection.policy = DetectionConfig::Policy::threshold;
        det.detection.tau = 0.2;
        det.seed = seed;
        auto ol = det;
        ol.mode = Mode::only_learning;
        const auto a = run_logged(det);
        const auto b = run_logged(ol);
        det_total += a.post_first_interaction_evaluations();
        det_relevant += a.post_first_interaction_relevant();
        ol_total += b.post_first_interaction_evaluations();
    }
    const double secs = seconds_since(t0);
    const double reduction = 1.0 - static_cast<double>(det_total) / static_cast<double>(ol_total);
    const double share = static_cast<double>(det_relevant) / static_cast<double>(det_total);
    return {reduction >= 0.6 && share >= 0.5 && secs < 1800.0,
            "mean post-first-interaction evaluations: only_learning " + fmt(ol_total / 10.0, 7) + ", tau-HD "
                + fmt(det_total / 10.0, 7) + "; reduction " + fmt(100.0 * reduction, 3) + "% (need >= 60%), relevant share "
                + fmt(100.0 * share, 3) + "% (need >= 50%); " + fmt(secs, 3) + " s"};
}

Outcome mode_ordering()
{
    const std::size_t seeds = 20;
    std::vector<double> golden, khd, ol;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        golden.push_back(*run_logged(dtlz2_m10(Mode::golden, seed)).final_utility);

        auto k = dtlz2_m10(Mode::detection, seed);
        k.detection.method = DetectionConfig::Method::univariate;
        k.detection.policy = DetectionConfig::Policy::fixed_k;
        k.detection.k = 2;
        const auto kr = run_logged(k);
        khd.push_back(*kr.final_utility);

        auto o = k;
        o.mode = Mode::only_learning;
        o.initial_mask = kr.initial_mask;
        ol.push_back(*run_logged(o).final_utility);
    }
    auto mean = [](const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    const double mg = mean(golden), mk = mean(khd), mo = mean(ol);

    // paired bootstrap of mean(only_learning - golden)
    std::vector<double> diff(seeds);
    for (std::size_t i = 0; i < seeds; ++i) diff[i] = ol[i] - golden[i];
    Rng rng(4242);
    std::vector<double> boot;
    for (int b = 0; b < 10000; ++b) {
        double s = 0.0;
        for (std::size_t i = 0; i < seeds; ++i) s += diff[rng.index(seeds)];
        boot.push_back(s / seeds);
    }
    std::sort(boot.begin(), boot.end());
    const double lo = boot[249], hi = boot[9749];
    const bool order = mg <= mk && mk <= mo;
    return {order && lo > 0.0, "mean final utility golden " + fmt(mg) + " <= k-HD " + fmt(mk) + " <= only_learning " + fmt(mo)
                                   + (order ? " holds" : " violated") + "; bootstrap 95% interval of only_learning - golden ["
                                   + fmt(lo, 10) + ", " + fmt(hi, 10) + "]" + (lo > 0.0 ? " excludes 0" : " includes 0")};
}

Outcome monotone_best_so_far()
{
    const std::size_t seeds = 20;
    std::vector<double> sum;
    for (std::uint64_t seed = 1; seed <= seeds; ++seed) {
        auto cfg = dtlz2_m10(Mode::detection, seed);
        cfg.detection.method = DetectionConfig::Method::univariate;
        cfg.detection.policy = DetectionConfig::Policy::threshold;
        cfg.detection.tau = 0.05;
        const auto rec = run_logged(cfg);
        sum.resize(rec.interactions.size(), 0.0);
        for (std::size_t k = 0; k < rec.interactions.size(); ++k) sum[k] += *rec.interactions[k].best_utility_so_far;
    }
    double worst = -1e300;
    std::string traj;
    for (std::size_t k = 0; k < sum.size(); ++k) {
        const double m = sum[k] / seeds;
        traj += (k ? ", " : "") + fmt(m);
        if (k) worst = std::max(worst, m - sum[k - 1] / seeds);
    }
    return {worst <= 1e-3, "mean best-so-far per interaction [" + traj + "], largest step " + fmt(worst) + " (tol 1e-3)"};
}

Outcome property_nondominated_sort()
{
    Rng rng(777);
    std::size_t bad = 0;
    for (int t = 0; t < 500; ++t) {
        const std::size_t n = 1 + rng.index(25);
        const std::size_t m = 2 + rng.index(4);
        std::vector<ObjectiveVector> pts(n, ObjectiveVector(m));
        const bool coarse = t % 2 == 0;
        for (auto &p : pts) {
            for (auto &v : p) v = coarse ? static_cast<double>(rng.index(5)) : rng.uniform();
        }
        std::vector<std::uint8_t> bits(m, 0);
        while (std::count(bits.begin(), bits.end(), 1) == 0) {
            for (auto &b : bits) b = rng.bernoulli(0.6);
        }
        const ActiveMask d(bits);
        auto got = fast_nondominated_sort(pts, d);
        auto want = oracle::brute_fronts(pts, d.indices());
        for (auto &f : got) std::sort(f.begin(), f.end());
        for (auto &f : want) std::sort(f.begin(), f.end());
        bad += got != want;
    }
    return {bad == 0, "500 random masked populations, " + std::to_string(bad) + " disagree with the exhaustive oracle"};
}

Outcome property_dtlz_fronts()
{
    Rng rng(778);
    double worst1 = 0.0, worst2 = 0.0;
    for (std::size_t m : {2u, 3u, 4u, 10u, 20u}) {
        const auto s1 = DtlzSpec::make(1, m);
        const auto s2 = DtlzSpec::make(2, m);
        for (int t = 0; t < 200; ++t) {
            std::vector<double> x1(s1.n, 0.5), x2(s2.n, 0.5);
            for (std::size_t i = 0; i + 1 < m; ++i) {
                x1[i] = rng.uniform(0.25, 0.75);
                x2[i] = rng.uniform();
            }
            double sum = 0.0, sq = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                sum += dtlz_evaluate(s1, x1, i);
                const double v = dtlz_evaluate(s2, x2, i);
                sq += v * v;
            }
            worst1 = std::max(worst1, std::abs(sum - 0.5));
            worst2 = std::max(worst2, std::abs(sq - 1.0));
        }
    }
    return {worst1 <= 1e-9 && worst2 <= 1e-9,
            "DTLZ1 max |sum f - 0.5| " + fmt(worst1) + ", DTLZ2 max |sum f^2 - 1| " + fmt(worst2) + " (tol 1e-9)"};
}

Outcome property_rmnk_exhaustive()
{
    std::size_t bad = 0, evaluated = 0;
    for (std::size_t K : {0u, 1u, 2u, 5u}) {
        const auto inst = rmnk_generate(RmnkParams::make(4, K, 0.3, 900 + K, 12));
        for (unsigned v = 0; v < 4096; ++v) {
            std::vector<std::uint8_t> bits(12);
            for (std::size_t i = 0; i < 12; ++i) bits[i] = (v >> i) & 1U;
            for (std::size_t o = 0; o < 4; ++o) {
                double sum = 0.0;
                for (std::size_t pos = 0; pos < 12; ++pos) {
                    std::size_t key = bits[pos], w = 2;
                    for (auto l : inst.links[pos]) {
                        key += w * bits[l];
                        w *= 2;
                    }
                    sum += inst.tables[o][pos * w + key];
                }
                bad += rmnk_evaluate(inst, bits, o) != 1.0 - sum / 12.0;
                ++evaluated;
            }
        }
    }
    return {bad == 0, std::to_string(evaluated) + " evaluations at n = 12, " + std::to_string(bad) + " differ (exact)"};
}

Outcome property_mask_floor()
{
    // detector outputs on adversarial data, plus every recorded run
    Rng rng(779);
    std::size_t below = 0, checked = 0;
    for (int t = 0; t < 300; ++t) {
        const std::size_t m = 2 + rng.index(10);
        RankedArchive archive(1 + rng.index(3));
        for (auto &b : archive) {
            for (int k = 0; k < 5; ++k) {
                ObjectiveVector f(m);
                for (auto &v : f) v = rng.uniform();
                b.shown.push_back(f);
                b.ranks.push_back(1 + static_cast<int>(rng.index(5)));
            }
        }
        DetectionConfig cfg;
        cfg.method = t % 2 ? DetectionConfig::Method::rfe : DetectionConfig::Method::univariate;
        cfg.policy = t % 3 ? DetectionConfig::Policy::threshold : DetectionConfig::Policy::fixed_k;
        cfg.tau = rng.uniform(1e-6, 1.0);
        cfg.k = 2 + rng.index(m - 1);
        below += detect(archive, cfg, rng).mask.count() < 2;
        ++checked;
    }
    for (const auto &rec : ledger()) {
        ++checked;
        below += rec.initial_mask.count() < 2 || rec.final_mask.count() < 2;
        for (const auto &i : rec.interactions) below += i.mask_after.count() < 2;
    }
    return {below == 0, std::to_string(checked) + " detector calls and recorded runs, " + std::to_string(below)
                            + " masks with fewer than two objectives"};
}

Outcome property_determinism()
{
    std::size_t bad = 0;
    std::vector<RunConfig> cfgs;
    {
        auto a = dtlz2_m10(Mode::detection, 5);
        a.detection.policy = DetectionConfig::Policy::threshold;
        cfgs.push_back(a);
        auto b = a;
        b.detection.method = DetectionConfig::Method::rfe;
        b.apply_smoke();
        cfgs.push_back(b);
        RunConfig c;
        c.problem = RmnkParams::make(10, 1, 0.0, 5);
        c.utility = UtilitySpec{UtilityKind::uf1, {0, 1}, {}, {}};
        c.seed = 5;
        c.apply_smoke();
        cfgs.push_back(c);
        cfgs.push_back(dtlz2_m10(Mode::golden, 5));
    }
    for (const auto &cfg : cfgs) {
        const auto first = to_json(run_logged(cfg)).dump();
        for (int r = 0; r < 2; ++r) bad += to_json(run_logged(cfg)).dump() != first;
    }
    return {bad == 0, std::to_string(cfgs.size()) + " configurations x 3 repeats, " + std::to_string(bad)
                          + " records differ from the first (byte comparison)"};
}

Outcome property_accounting()
{
    if (ledger().size() < 10) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            auto cfg = dtlz2_m10(Mode::detection, seed);
            cfg.apply_smoke();
            run_logged(cfg);
        }
    }
    std::size_t bad = 0;
    for (const auto &rec : ledger()) {
        std::uint64_t per = 0;
        for (auto v : rec.counter.per_objective) per += v;
        bad += rec.counter.total() != recount(rec) || per != rec.counter.total();
    }
    return {bad == 0, std::to_string(ledger().size()) + " recorded runs, " + std::to_string(bad)
                          + " violate total = initial + sum(generations x population x active) + interaction + re-evaluation"};
}

struct Criterion {
    std::string name;
    std::function<Outcome()> check;
};

const std::vector<Criterion> &criteria()
{
    static const std::vector<Criterion> all{
        {"ftest_oracle", ftest_oracle},
        {"tau_one_degeneracy", tau_one_degeneracy},
        {"detection_power", detection_power},
        {"evaluation_reduction", evaluation_reduction},
        {"mode_ordering", mode_ordering},
        {"monotone_best_so_far", monotone_best_so_far},
        {"property_nondominated_sort", property_nondominated_sort},
        {"property_dtlz_fronts", property_dtlz_fronts},
        {"property_rmnk_exhaustive", property_rmnk_exhaustive},
        {"property_mask_floor", property_mask_floor},
        {"property_determinism", property_determinism},
        {"property_accounting", property_accounting},
    };
    return all;
}

} // namespace

int main(int argc, char **argv)
{
    std::vector<std::string> wanted(argv + 1, argv + argc);
    if (wanted.size() == 1 && wanted[0] == "--list") {
        for (const auto &c : criteria()) std::cout << c.name << "\n";
        return 0;
    }
    for (const auto &w : wanted) {
        const bool known = std::any_of(criteria().begin(), criteria().end(), [&](const auto &c) { return c.name == w; });
        if (!known) {
            std::cerr << "unknown criterion '" << w << "' (try --list)\n";
            return 2;
        }
    }
    std::size_t failed = 0, ran = 0;
    for (const auto &c : criteria()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.name) == wanted.end()) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        ++ran;
        failed += !o.pass;
        std::cout << (o.pass ? "PASS " : "FAIL ") << c.name << ": " << o.detail << std::endl;
    }
    std::cout << ran - failed << "/" << ran << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
