#ifndef HOBJ_MDM_HPP
#define HOBJ_MDM_HPP

#include <span>
#include <string>
#include <vector>

#include <hobj/types.hpp>

namespace hobj
{

enum class UtilityKind { uf1, uf2, uf3, tchebychef };

UtilityKind parse_utility_kind(const std::string &s);
std::string to_string(UtilityKind k);

/// The machine decision maker's true utility (lower is preferred).
/**
 * The quadratic forms read f[c1] and f[c2] only. The Tchebychef form is
 * max_i w_i |f_i - f*_i| over the relevant set; weights of every other
 * objective are held at zero. Default relevant weights are 0.4 and 0.6.
 */
class UtilityFunction
{
public:
    UtilityFunction(UtilityKind kind, RelevantSet c);
    // weights and ideal point are indexed like c (one entry per relevant objective)
    UtilityFunction(UtilityKind kind, RelevantSet c, std::vector<double> weights, std::vector<double> ideal);

    double operator()(std::span<const double> f) const;

    UtilityKind kind() const { return m_kind; }
    const RelevantSet &relevant() const { return m_c; }
    // Full-length weight vector, zero outside c.
    std::vector<double> full_weights() const;
    const std::vector<double> &weights() const { return m_w; }
    const std::vector<double> &ideal() const { return m_ideal; }

private:
    UtilityKind m_kind;
    RelevantSet m_c;
    std::vector<double> m_w;
    std::vector<double> m_ideal;
};

// Competition ranks (1 = best, ties 1,2,2,4), ties within 1e-12.
std::vector<int> competition_ranks(std::span<const double> values, double tie_tolerance = 1e-12);

std::vector<int> mdm_rank(const std::vector<ObjectiveVector> &shown, const UtilityFunction &uf);

} // namespace hobj

#endif
