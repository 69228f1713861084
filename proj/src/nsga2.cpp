#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <hobj/errors.hpp>
#include <hobj/nsga2.hpp>

namespace hobj
{

Evaluator::Evaluator(const Problem &problem, RelevantSet relevant)
    : m_problem(&problem), m_relevant(std::move(relevant)), m_counter(problem.objectives())
{
}

std::size_t Evaluator::ensure(Individual &ind, const ActiveMask &d)
{
    if (d.size() != m_problem->objectives()) throw dimension_error("Evaluator: mask has wrong length");
    std::size_t charged = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (!d[i] || ind.evaluated[i]) continue;
        ind.f[i] = m_problem->evaluate(ind.x, i);
        ind.evaluated[i] = 1;
        count_evaluation(m_counter, i, m_relevant);
        ++charged;
    }
    return charged;
}

std::size_t Evaluator::ensure_all(Individual &ind)
{
    return ensure(ind, ActiveMask::all(m_problem->objectives()));
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(const std::vector<ObjectiveVector> &points,
                                                             const ActiveMask &d)
{
    const std::size_t n = points.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> counts(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    if (n == 0) return fronts;

    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = p + 1; q < n; ++q) {
            if (dominates(points[p], points[q], d)) {
                dominated[p].push_back(q);
                ++counts[q];
            } else if (dominates(points[q], points[p], d)) {
                dominated[q].push_back(p);
                ++counts[p];
            }
        }
    }
    for (std::size_t p = 0; p < n; ++p) {
        if (counts[p] == 0) current.push_back(p);
    }
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            for (auto q : dominated[p]) {
                if (--counts[q] == 0) next.push_back(q);
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
    }
    return fronts;
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(const std::vector<Individual> &pop, const ActiveMask &d)
{
    std::vector<ObjectiveVector> points;
    points.reserve(pop.size());
    for (const auto &ind : pop) {
        if (!ind.has_all(d)) throw state_error("fast_nondominated_sort: individual not evaluated on an active objective");
        points.push_back(ind.f);
    }
    return fast_nondominated_sort(points, d);
}

std::vector<double> crowding_distance(const std::vector<ObjectiveVector> &front, const ActiveMask &d)
{
    const std::size_t n = front.size();
    if (n == 0) throw parameter_error("crowding_distance: empty front");
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(n, 0.0);
    if (n <= 2) {
        std::fill(dist.begin(), dist.end(), inf);
        return dist;
    }
    std::vector<std::size_t> idx(n);
    for (std::size_t obj = 0; obj < d.size(); ++obj) {
        if (!d[obj]) continue;
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return front[a][obj] < front[b][obj]; });
        const double lo = front[idx.front()][obj];
        const double hi = front[idx.back()][obj];
        // zero range: this objective carries no spacing information
        if (!(hi > lo)) continue;
        dist[idx.front()] = inf;
        dist[idx.back()] = inf;
        for (std::size_t k = 1; k + 1 < n; ++k) {
            dist[idx[k]] += (front[idx[k + 1]][obj] - front[idx[k - 1]][obj]) / (hi - lo);
        }
    }
    return dist;
}

std::vector<std::size_t> Ranking::order() const
{
    std::vector<std::size_t> idx(front.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return better(a, b); });
    return idx;
}

Ranking rank_population(const std::vector<Individual> &pop, const ActiveMask &d, const SecondaryCriterion &criterion)
{
    Ranking r;
    r.front.assign(pop.size(), 0);
    r.key.assign(pop.size(), 0.0);
    const auto fronts = fast_nondominated_sort(pop, d);
    for (std::size_t fi = 0; fi < fronts.size(); ++fi) {
        const auto &members = fronts[fi];
        for (auto i : members) r.front[i] = fi;
        if (criterion.kind == SecondaryCriterion::Kind::crowding_distance || !criterion.scorer) {
            std::vector<ObjectiveVector> pts;
            pts.reserve(members.size());
            for (auto i : members) pts.push_back(pop[i].f);
            const auto cd = crowding_distance(pts, d);
            for (std::size_t k = 0; k < members.size(); ++k) r.key[members[k]] = -cd[k];
        } else {
            for (auto i : members) r.key[i] = criterion.scorer(pop[i]);
        }
    }
    return r;
}

namespace
{

// Simulated binary crossover on one variable pair, bounded form.
void sbx_pair(double &c1, double &c2, double lb, double ub, double eta, Rng &rng)
{
    const double y1 = std::min(c1, c2);
    const double y2 = std::max(c1, c2);
    if (y2 - y1 <= 1e-14) return;
    const double r = rng.uniform();

    double beta = 1.0 + 2.0 * (y1 - lb) / (y2 - y1);
    double alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    double betaq = r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                                    : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
    double a = 0.5 * ((y1 + y2) - betaq * (y2 - y1));

    beta = 1.0 + 2.0 * (ub - y2) / (y2 - y1);
    alpha = 2.0 - std::pow(beta, -(eta + 1.0));
    betaq = r <= 1.0 / alpha ? std::pow(r * alpha, 1.0 / (eta + 1.0))
                             : std::pow(1.0 / (2.0 - r * alpha), 1.0 / (eta + 1.0));
    double b = 0.5 * ((y1 + y2) + betaq * (y2 - y1));

    a = std::clamp(a, lb, ub);
    b = std::clamp(b, lb, ub);
    if (rng.bernoulli(0.5)) std::swap(a, b);
    c1 = a;
    c2 = b;
}

void polynomial_mutation(DecisionVector &x, const Bounds &bounds, const VariationParams &vp, Rng &rng)
{
    const double lb = bounds.lower;
    const double ub = bounds.upper;
    const double eta = vp.mutation_eta;
    for (auto &y : x) {
        if (!rng.bernoulli(vp.mutation_probability)) continue;
        const double d1 = (y - lb) / (ub - lb);
        const double d2 = (ub - y) / (ub - lb);
        const double r = rng.uniform();
        const double mpow = 1.0 / (eta + 1.0);
        double dq;
        if (r < 0.5) {
            const double v = 2.0 * r + (1.0 - 2.0 * r) * std::pow(1.0 - d1, eta + 1.0);
            dq = std::pow(v, mpow) - 1.0;
        } else {
            const double v = 2.0 * (1.0 - r) + 2.0 * (r - 0.5) * std::pow(1.0 - d2, eta + 1.0);
            dq = 1.0 - std::pow(v, mpow);
        }
        y = std::clamp(y + dq * (ub - lb), lb, ub);
    }
}

} // namespace

std::vector<DecisionVector> variation(const DecisionVector &a, const DecisionVector &b, const Bounds &bounds,
                                      const VariationParams &vp, Rng &rng)
{
    if (a.size() != b.size() || a.size() != bounds.n) throw dimension_error("variation: parent length mismatch");
    DecisionVector c1 = a;
    DecisionVector c2 = b;
    if (bounds.encoding == Encoding::real) {
        if (rng.bernoulli(vp.sbx_probability)) {
            for (std::size_t i = 0; i < c1.size(); ++i) {
                if (rng.bernoulli(0.5)) sbx_pair(c1[i], c2[i], bounds.lower, bounds.upper, vp.sbx_eta, rng);
            }
        }
        polynomial_mutation(c1, bounds, vp, rng);
        polynomial_mutation(c2, bounds, vp, rng);
    } else {
        if (rng.bernoulli(vp.uniform_crossover_probability)) {
            for (std::size_t i = 0; i < c1.size(); ++i) {
                if (rng.bernoulli(0.5)) std::swap(c1[i], c2[i]);
            }
        }
        const double rate = vp.bit_flip_rate > 0.0 ? vp.bit_flip_rate : 1.0 / static_cast<double>(bounds.n);
        for (auto *c : {&c1, &c2}) {
            for (auto &bit : *c) {
                if (rng.bernoulli(rate)) bit = bit >= 0.5 ? 0.0 : 1.0;
            }
        }
    }
    return {std::move(c1), std::move(c2)};
}

Population initial_population(Evaluator &eval, const ActiveMask &d, std::size_t size, Rng &rng)
{
    Population pop;
    const std::size_t m = eval.problem().objectives();
    pop.individuals.reserve(size);
    for (std::size_t i = 0; i < size; ++i) {
        Individual ind(eval.problem().random_decision(rng), m);
        eval.ensure(ind, d);
        pop.individuals.push_back(std::move(ind));
    }
    return pop;
}

Population evolve(Population pop, Evaluator &eval, const ActiveMask &d, std::size_t generations,
                  const SecondaryCriterion &criterion, Rng &rng, const EngineParams &params)
{
    const auto &bounds = eval.problem().bounds();
    const std::size_t m = eval.problem().objectives();
    const std::size_t size = params.population_size;

    for (auto &ind : pop.individuals) eval.ensure(ind, d);

    for (std::size_t gen = 0; gen < generations; ++gen) {
        const auto &parents = pop.individuals;
        const auto ranking = rank_population(parents, d, criterion);
        auto tournament = [&]() {
            const std::size_t i = rng.index(parents.size());
            const std::size_t j = rng.index(parents.size());
            return ranking.better(j, i) ? j : i;
        };

        std::vector<Individual> merged = parents;
        merged.reserve(parents.size() + size);
        while (merged.size() < parents.size() + size) {
            const auto &pa = parents[tournament()];
            const auto &pb = parents[tournament()];
            for (auto &child : variation(pa.x, pb.x, bounds, params.variation, rng)) {
                if (merged.size() == parents.size() + size) break;
                Individual ind(std::move(child), m);
                eval.ensure(ind, d);
                merged.push_back(std::move(ind));
            }
        }

        const auto order = rank_population(merged, d, criterion).order();
        std::vector<Individual> next;
        next.reserve(size);
        for (std::size_t k = 0; k < size && k < order.size(); ++k) next.push_back(std::move(merged[order[k]]));
        pop.individuals = std::move(next);
        ++pop.generation;
    }
    return pop;
}

} // namespace hobj
