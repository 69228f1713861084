#ifndef HOBJ_PROBLEMS_HPP
#define HOBJ_PROBLEMS_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include <hobj/types.hpp>

namespace hobj
{

class Rng;

enum class Encoding { real, binary };

struct Bounds {
    Encoding encoding = Encoding::real;
    std::size_t n = 0;
    // unused for binary
    double lower = 0.0;
    double upper = 1.0;
};

/// DTLZ1, DTLZ2 or DTLZ7 with the domain transforms that keep projected fronts from collapsing.
/**
 * DTLZ1 is restricted to [0.25, 0.75]^n. DTLZ2 maps every variable through
 * x/2 + 0.25 before the usual formula, so its box stays [0, 1]^n. DTLZ7 is
 * the textbook function.
 */
struct DtlzSpec {
    int variant = 2;
    std::size_t m = 0;
    std::size_t n = 0;

    // n = 0 selects the usual m+4 / m+9 / m+19 dimension.
    static DtlzSpec make(int variant, std::size_t m, std::size_t n = 0);
};

double dtlz_evaluate(const DtlzSpec &spec, std::span<const double> x, std::size_t objective);

struct RmnkParams {
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t K = 0;
    double rho = 0.0;
    std::uint64_t seed = 0;

    // n = 0 selects 10, 20 or 30 bits for m = 4, 10 or 20.
    static RmnkParams make(std::size_t m, std::size_t K, double rho, std::uint64_t seed, std::size_t n = 0);

    friend bool operator==(const RmnkParams &, const RmnkParams &) = default;
};

/// A generated rho-MNK landscape.
/**
 * Each bit position owns, per objective, a table of 2^(K+1) contributions
 * indexed by the bit and its K epistatic links. Contribution tuples across
 * objectives are drawn from a constant-correlation Gaussian and pushed
 * through the normal CDF.
 */
struct RmnkInstance {
    RmnkParams params;
    // links[pos] = K distinct positions other than pos
    std::vector<std::vector<std::size_t>> links;
    // tables[obj][pos * 2^(K+1) + config]
    std::vector<std::vector<double>> tables;

    std::size_t configs() const { return std::size_t{1} << (params.K + 1); }
    double entry(std::size_t obj, std::size_t pos, std::size_t config) const
    {
        return tables[obj][pos * configs() + config];
    }
    // Table column for position pos under the given bit-string.
    std::size_t config_of(std::span<const std::uint8_t> bits, std::size_t pos) const;

    friend bool operator==(const RmnkInstance &, const RmnkInstance &) = default;
};

RmnkInstance rmnk_generate(const RmnkParams &p);

// Mean contribution in [0, 1] (maximization sense).
double rmnk_fitness(const RmnkInstance &inst, std::span<const std::uint8_t> bits, std::size_t objective);
// 1 - fitness, so every problem is minimized.
double rmnk_evaluate(const RmnkInstance &inst, std::span<const std::uint8_t> bits, std::size_t objective);

nlohmann::json rmnk_to_json(const RmnkInstance &inst);
RmnkInstance rmnk_from_json(const nlohmann::json &j);
void rmnk_save(const RmnkInstance &inst, const std::string &path);
RmnkInstance rmnk_load(const std::string &path);

using ProblemSpec = std::variant<DtlzSpec, RmnkParams>;

Bounds problem_bounds(const ProblemSpec &spec);

/// Uniform evaluation surface over both benchmark families.
class Problem
{
public:
    explicit Problem(const ProblemSpec &spec);
    explicit Problem(RmnkInstance inst);

    std::size_t objectives() const { return m_m; }
    const Bounds &bounds() const { return m_bounds; }
    const ProblemSpec &spec() const { return m_spec; }
    std::string name() const;

    // Binary decisions are stored as 0.0 / 1.0.
    double evaluate(std::span<const double> x, std::size_t objective) const;
    ObjectiveVector evaluate_all(std::span<const double> x) const;

    DecisionVector random_decision(Rng &rng) const;

private:
    ProblemSpec m_spec;
    std::variant<DtlzSpec, RmnkInstance> m_impl;
    Bounds m_bounds;
    std::size_t m_m = 0;
};

} // namespace hobj

#endif
