#ifndef HOBJ_NSGA2_HPP
#define HOBJ_NSGA2_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include <hobj/problems.hpp>
#include <hobj/rng.hpp>
#include <hobj/types.hpp>

namespace hobj
{

/// Lazily evaluates individuals and charges every single-objective evaluation.
class Evaluator
{
public:
    Evaluator(const Problem &problem, RelevantSet relevant);

    // Computes the entries of ind selected by d that are still missing.
    // Returns the number of objective evaluations charged.
    std::size_t ensure(Individual &ind, const ActiveMask &d);
    std::size_t ensure_all(Individual &ind);

    const Problem &problem() const { return *m_problem; }
    const RelevantSet &relevant() const { return m_relevant; }
    const EvalCounter &counter() const { return m_counter; }
    EvalCounter &counter() { return m_counter; }

private:
    const Problem *m_problem;
    RelevantSet m_relevant;
    EvalCounter m_counter;
};

struct Population {
    std::vector<Individual> individuals;
    std::size_t generation = 0;

    std::size_t size() const { return individuals.size(); }
};

/// Within-front ranking used in place of (or as) the crowding distance.
/**
 * For the utility kinds the scorer maps an individual to a value where lower
 * means preferred. Crowding distance needs no scorer.
 */
struct SecondaryCriterion {
    enum class Kind { crowding_distance, learned_utility, true_utility };

    Kind kind = Kind::crowding_distance;
    std::function<double(const Individual &)> scorer;

    static SecondaryCriterion crowding() { return {}; }
    static SecondaryCriterion utility(Kind kind, std::function<double(const Individual &)> scorer)
    {
        return {kind, std::move(scorer)};
    }
};

struct VariationParams {
    double sbx_probability = 0.95;
    double sbx_eta = 10.0;
    double mutation_probability = 0.01;
    double mutation_eta = 50.0;
    double uniform_crossover_probability = 0.9;
    // <= 0 selects 1/n
    double bit_flip_rate = 0.0;
};

struct EngineParams {
    std::size_t population_size = 100;
    VariationParams variation;
};

// Fronts as index lists into the population; front 0 is the non-dominated set.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(const std::vector<ObjectiveVector> &points,
                                                             const ActiveMask &d);
std::vector<std::vector<std::size_t>> fast_nondominated_sort(const std::vector<Individual> &pop, const ActiveMask &d);

std::vector<double> crowding_distance(const std::vector<ObjectiveVector> &front, const ActiveMask &d);

/// Per-individual (front, key) pairs; lower is better on both.
struct Ranking {
    std::vector<std::size_t> front;
    std::vector<double> key;

    bool better(std::size_t a, std::size_t b) const
    {
        if (front[a] != front[b]) return front[a] < front[b];
        return key[a] < key[b];
    }
    // Indices sorted best first, ties in insertion order.
    std::vector<std::size_t> order() const;
};

Ranking rank_population(const std::vector<Individual> &pop, const ActiveMask &d, const SecondaryCriterion &criterion);

// Two children from two parents.
std::vector<DecisionVector> variation(const DecisionVector &a, const DecisionVector &b, const Bounds &bounds,
                                      const VariationParams &params, Rng &rng);

Population initial_population(Evaluator &eval, const ActiveMask &d, std::size_t size, Rng &rng);

Population evolve(Population pop, Evaluator &eval, const ActiveMask &d, std::size_t generations,
                  const SecondaryCriterion &criterion, Rng &rng, const EngineParams &params = {});

} // namespace hobj

#endif
