#ifndef HOBJ_TYPES_HPP
#define HOBJ_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace hobj
{

// Full m-dimensional objective values, minimization orientation.
using ObjectiveVector = std::vector<double>;
using DecisionVector = std::vector<double>;

/// Binary vector selecting the objectives the optimizer currently sees.
class ActiveMask
{
public:
    ActiveMask() = default;
    explicit ActiveMask(std::vector<std::uint8_t> bits);
    ActiveMask(std::initializer_list<int> bits);

    static ActiveMask all(std::size_t m);
    static ActiveMask none(std::size_t m);
    // 0-based indices
    static ActiveMask from_indices(std::size_t m, std::span<const std::size_t> idx);

    std::size_t size() const { return m_bits.size(); }
    bool operator[](std::size_t i) const { return m_bits[i] != 0; }
    void set(std::size_t i, bool on) { m_bits.at(i) = on ? 1 : 0; }
    std::size_t count() const;
    std::vector<std::size_t> indices() const;
    const std::vector<std::uint8_t> &bits() const { return m_bits; }

    // "0101" style rendering, objective 1 first.
    std::string str() const;

    friend bool operator==(const ActiveMask &, const ActiveMask &) = default;

private:
    std::vector<std::uint8_t> m_bits;
};

/// Strictly increasing 0-based indices of the objectives the DM cares about.
class RelevantSet
{
public:
    RelevantSet() = default;
    RelevantSet(std::vector<std::size_t> idx, std::size_t m);

    // From 1-based indices as written in configs and reports.
    static RelevantSet one_based(std::initializer_list<std::size_t> idx, std::size_t m);

    bool contains(std::size_t i) const;
    std::size_t size() const { return m_idx.size(); }
    std::size_t operator[](std::size_t k) const { return m_idx[k]; }
    const std::vector<std::size_t> &indices() const { return m_idx; }
    std::size_t dimension() const { return m_m; }
    ActiveMask mask() const;

    friend bool operator==(const RelevantSet &, const RelevantSet &) = default;

private:
    std::vector<std::size_t> m_idx;
    std::size_t m_m = 0;
};

/// Single-objective evaluation counts for one run.
struct EvalCounter {
    EvalCounter() = default;
    explicit EvalCounter(std::size_t m) : per_objective(m, 0) {}

    std::vector<std::uint64_t> per_objective;
    std::uint64_t relevant_total = 0;
    std::uint64_t irrelevant_total = 0;

    std::uint64_t total() const { return relevant_total + irrelevant_total; }

    friend bool operator==(const EvalCounter &, const EvalCounter &) = default;
};

/// A candidate solution with lazily computed objective entries.
struct Individual {
    DecisionVector x;
    ObjectiveVector f;
    // evaluated[i] != 0 means f[i] holds the exact value f_i(x)
    std::vector<std::uint8_t> evaluated;

    Individual() = default;
    Individual(DecisionVector x, std::size_t m) : x(std::move(x)), f(m, 0.0), evaluated(m, 0) {}

    bool has(std::size_t i) const { return evaluated[i] != 0; }
    bool has_all(const ActiveMask &d) const;
};

/// One interaction's presented objective vectors (all m entries) and the DM's ranks.
struct RankedBatch {
    std::vector<ObjectiveVector> shown;
    // 1 = best, ties allowed
    std::vector<int> ranks;
};

// Pooled interactions, oldest first.
using RankedArchive = std::vector<RankedBatch>;

// f ⊙ d; inactive entries are exactly 0.
ObjectiveVector apply_mask(std::span<const double> f, const ActiveMask &d);

// Keeps only the active coordinates, in index order.
std::vector<double> project(std::span<const double> f, const ActiveMask &d);

// Pareto dominance (minimization) restricted to active coordinates.
bool dominates(std::span<const double> a, std::span<const double> b, const ActiveMask &d);

// Charges one evaluation of objective i.
void count_evaluation(EvalCounter &counter, std::size_t i, const RelevantSet &c);

} // namespace hobj

#endif
