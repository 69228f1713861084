#include <algorithm>
#include <cmath>
#include <numeric>

#include <hobj/errors.hpp>
#include <hobj/mdm.hpp>

namespace hobj
{

UtilityKind parse_utility_kind(const std::string &s)
{
    if (s == "UF1" || s == "uf1") return UtilityKind::uf1;
    if (s == "UF2" || s == "uf2") return UtilityKind::uf2;
    if (s == "UF3" || s == "uf3") return UtilityKind::uf3;
    if (s == "tchebychef" || s == "Tchebychef" || s == "tch") return UtilityKind::tchebychef;
    throw config_error("unknown utility function '" + s + "'");
}

std::string to_string(UtilityKind k)
{
    switch (k) {
        case UtilityKind::uf1: return "UF1";
        case UtilityKind::uf2: return "UF2";
        case UtilityKind::uf3: return "UF3";
        case UtilityKind::tchebychef: return "tchebychef";
    }
    return "?";
}

UtilityFunction::UtilityFunction(UtilityKind kind, RelevantSet c) : UtilityFunction(kind, std::move(c), {}, {}) {}

UtilityFunction::UtilityFunction(UtilityKind kind, RelevantSet c, std::vector<double> weights,
                                 std::vector<double> ideal)
    : m_kind(kind), m_c(std::move(c)), m_w(std::move(weights)), m_ideal(std::move(ideal))
{
    if (m_kind != UtilityKind::tchebychef) {
        if (m_c.size() != 2) throw parameter_error("quadratic utility functions need exactly two relevant objectives");
        return;
    }
    if (m_c.size() == 0) throw parameter_error("Tchebychef utility needs at least one relevant objective");
    if (m_w.empty()) {
        if (m_c.size() == 2) {
            m_w = {0.4, 0.6};
        } else {
            m_w.assign(m_c.size(), 1.0 / static_cast<double>(m_c.size()));
        }
    }
    if (m_ideal.empty()) m_ideal.assign(m_c.size(), 0.0);
    if (m_w.size() != m_c.size() || m_ideal.size() != m_c.size()) {
        throw dimension_error("Tchebychef weights and ideal point must have one entry per relevant objective");
    }
}

double UtilityFunction::operator()(std::span<const double> f) const
{
    if (f.size() != m_c.dimension()) throw dimension_error("utility: objective vector has wrong length");
    if (m_kind == UtilityKind::tchebychef) {
        double u = 0.0;
        for (std::size_t k = 0; k < m_c.size(); ++k) u = std::max(u, m_w[k] * std::abs(f[m_c[k]] - m_ideal[k]));
        return u;
    }
    const double a = f[m_c[0]];
    const double b = f[m_c[1]];
    switch (m_kind) {
        case UtilityKind::uf1: return 0.28 * a * a + 0.38 * b * b + 0.29 * a * b + 0.05 * a;
        case UtilityKind::uf2: return 0.6 * a * a + 0.05 * a * b + 0.23 * a + 0.38 * b;
        case UtilityKind::uf3: return 0.44 * a * a + 0.14 * b * b + 0.09 * a * b + 0.33 * a;
        default: break;
    }
    return 0.0;
}

std::vector<double> UtilityFunction::full_weights() const
{
    std::vector<double> w(m_c.dimension(), 0.0);
    if (m_kind == UtilityKind::tchebychef) {
        for (std::size_t k = 0; k < m_c.size(); ++k) w[m_c[k]] = m_w[k];
    }
    return w;
}

std::vector<int> competition_ranks(std::span<const double> values, double tie_tolerance)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<int> ranks(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const bool tied = k > 0 && std::abs(values[idx[k]] - values[idx[k - 1]]) <= tie_tolerance;
        ranks[idx[k]] = tied ? ranks[idx[k - 1]] : static_cast<int>(k + 1);
    }
    return ranks;
}

std::vector<int> mdm_rank(const std::vector<ObjectiveVector> &shown, const UtilityFunction &uf)
{
    std::vector<double> u;
    u.reserve(shown.size());
    for (const auto &f : shown) u.push_back(uf(f));
    return competition_ranks(u);
}

} // namespace hobj
