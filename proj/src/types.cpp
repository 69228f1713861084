#include <algorithm>
#include <string>

#include <hobj/errors.hpp>
#include <hobj/types.hpp>

namespace hobj
{

ActiveMask::ActiveMask(std::vector<std::uint8_t> bits) : m_bits(std::move(bits))
{
    for (auto &b : m_bits) b = b ? 1 : 0;
}

ActiveMask::ActiveMask(std::initializer_list<int> bits)
{
    for (int b : bits) m_bits.push_back(b ? 1 : 0);
}

ActiveMask ActiveMask::all(std::size_t m)
{
    return ActiveMask(std::vector<std::uint8_t>(m, 1));
}

ActiveMask ActiveMask::none(std::size_t m)
{
    return ActiveMask(std::vector<std::uint8_t>(m, 0));
}

ActiveMask ActiveMask::from_indices(std::size_t m, std::span<const std::size_t> idx)
{
    auto d = none(m);
    for (auto i : idx) {
        if (i >= m) throw dimension_error("mask index " + std::to_string(i) + " out of range");
        d.set(i, true);
    }
    return d;
}

std::size_t ActiveMask::count() const
{
    return static_cast<std::size_t>(std::count(m_bits.begin(), m_bits.end(), std::uint8_t{1}));
}

std::vector<std::size_t> ActiveMask::indices() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m_bits.size(); ++i) {
        if (m_bits[i]) out.push_back(i);
    }
    return out;
}

std::string ActiveMask::str() const
{
    std::string s;
    for (auto b : m_bits) s.push_back(b ? '1' : '0');
    return s;
}

RelevantSet::RelevantSet(std::vector<std::size_t> idx, std::size_t m) : m_idx(std::move(idx)), m_m(m)
{
    for (std::size_t k = 0; k < m_idx.size(); ++k) {
        if (m_idx[k] >= m) throw parameter_error("relevant objective index out of range");
        if (k > 0 && m_idx[k] <= m_idx[k - 1]) throw parameter_error("relevant set must be strictly increasing");
    }
}

RelevantSet RelevantSet::one_based(std::initializer_list<std::size_t> idx, std::size_t m)
{
    std::vector<std::size_t> v;
    for (auto i : idx) {
        if (i == 0) throw parameter_error("1-based relevant index must be positive");
        v.push_back(i - 1);
    }
    return RelevantSet(std::move(v), m);
}

bool RelevantSet::contains(std::size_t i) const
{
    return std::binary_search(m_idx.begin(), m_idx.end(), i);
}

ActiveMask RelevantSet::mask() const
{
    return ActiveMask::from_indices(m_m, m_idx);
}

bool Individual::has_all(const ActiveMask &d) const
{
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] && !evaluated[i]) return false;
    }
    return true;
}

ObjectiveVector apply_mask(std::span<const double> f, const ActiveMask &d)
{
    if (f.size() != d.size()) throw dimension_error("apply_mask: objective vector and mask lengths differ");
    ObjectiveVector out(f.size(), 0.0);
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (d[i]) out[i] = f[i];
    }
    return out;
}

std::vector<double> project(std::span<const double> f, const ActiveMask &d)
{
    if (f.size() != d.size()) throw dimension_error("project: objective vector and mask lengths differ");
    std::vector<double> out;
    out.reserve(d.count());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (d[i]) out.push_back(f[i]);
    }
    return out;
}

bool dominates(std::span<const double> a, std::span<const double> b, const ActiveMask &d)
{
    if (a.size() != b.size() || a.size() != d.size()) throw dimension_error("dominates: length mismatch");
    bool strictly = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!d[i]) continue;
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

void count_evaluation(EvalCounter &counter, std::size_t i, const RelevantSet &c)
{
    if (i >= counter.per_objective.size()) throw dimension_error("count_evaluation: objective index out of range");
    ++counter.per_objective[i];
    if (c.contains(i)) {
        ++counter.relevant_total;
    } else {
        ++counter.irrelevant_total;
    }
}

} // namespace hobj
