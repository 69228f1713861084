#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include <nlohmann/json.hpp>

#include <hobj/errors.hpp>
#include <hobj/problems.hpp>
#include <hobj/rng.hpp>

namespace hobj
{

namespace
{

constexpr double pi = std::numbers::pi;

void check_box(std::span<const double> x, std::size_t n, double lo, double hi, const char *name)
{
    if (x.size() != n) throw dimension_error(std::string(name) + ": decision vector has wrong length");
    for (double v : x) {
        if (!(v >= lo && v <= hi)) {
            throw domain_error(std::string(name) + ": decision variable " + std::to_string(v) + " outside ["
                               + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        }
    }
}

double dtlz1(std::span<const double> x, std::size_t m, std::size_t obj)
{
    const std::size_t n = x.size();
    const double k = static_cast<double>(n - m + 1);
    double g = 0.0;
    for (std::size_t i = m - 1; i < n; ++i) {
        const double t = x[i] - 0.5;
        g += t * t - std::cos(20.0 * pi * t);
    }
    g = 100.0 * (k + g);
    double f = 0.5 * (1.0 + g);
    const std::size_t upto = m - 1 - obj;
    for (std::size_t j = 0; j < upto; ++j) f *= x[j];
    if (obj > 0) f *= 1.0 - x[upto];
    return f;
}

double dtlz2(std::span<const double> raw, std::size_t m, std::size_t obj)
{
    const std::size_t n = raw.size();
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = raw[i] / 2.0 + 0.25;
    double g = 0.0;
    for (std::size_t i = m - 1; i < n; ++i) {
        const double t = x[i] - 0.5;
        g += t * t;
    }
    double f = 1.0 + g;
    const std::size_t upto = m - 1 - obj;
    for (std::size_t j = 0; j < upto; ++j) f *= std::cos(x[j] * pi / 2.0);
    if (obj > 0) f *= std::sin(x[upto] * pi / 2.0);
    return f;
}

double dtlz7(std::span<const double> x, std::size_t m, std::size_t obj)
{
    if (obj < m - 1) return x[obj];
    const std::size_t n = x.size();
    const double k = static_cast<double>(n - m + 1);
    double g = 0.0;
    for (std::size_t i = m - 1; i < n; ++i) g += x[i];
    g = 1.0 + 9.0 / k * g;
    double h = static_cast<double>(m);
    for (std::size_t i = 0; i < m - 1; ++i) h -= x[i] / (1.0 + g) * (1.0 + std::sin(3.0 * pi * x[i]));
    return (1.0 + g) * h;
}

// Standard normal CDF.
double phi(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

// Lower Cholesky factor of the m x m matrix with unit diagonal and constant
// off-diagonal rho. Pivots that round below zero (rho = -1/(m-1)) are zeroed.
std::vector<double> constant_correlation_factor(std::size_t m, double rho)
{
    std::vector<double> L(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = (i == j) ? 1.0 : rho;
            for (std::size_t k = 0; k < j; ++k) s -= L[i * m + k] * L[j * m + k];
            if (i == j) {
                L[i * m + i] = s > 0.0 ? std::sqrt(s) : 0.0;
            } else {
                L[i * m + j] = L[j * m + j] > 0.0 ? s / L[j * m + j] : 0.0;
            }
        }
    }
    return L;
}

std::vector<std::uint8_t> to_bits(std::span<const double> x)
{
    std::vector<std::uint8_t> bits(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) bits[i] = x[i] >= 0.5 ? 1 : 0;
    return bits;
}

} // namespace

DtlzSpec DtlzSpec::make(int variant, std::size_t m, std::size_t n)
{
    if (variant != 1 && variant != 2 && variant != 7) throw parameter_error("DTLZ variant must be 1, 2 or 7");
    if (m < 2) throw parameter_error("DTLZ needs at least two objectives");
    if (n == 0) n = m + (variant == 1 ? 4 : variant == 2 ? 9 : 19);
    if (n < m) throw parameter_error("DTLZ decision dimension must be at least m");
    return DtlzSpec{variant, m, n};
}

double dtlz_evaluate(const DtlzSpec &spec, std::span<const double> x, std::size_t objective)
{
    if (objective >= spec.m) throw dimension_error("dtlz_evaluate: objective index out of range");
    switch (spec.variant) {
        case 1:
            check_box(x, spec.n, 0.25, 0.75, "DTLZ1");
            return dtlz1(x, spec.m, objective);
        case 2:
            check_box(x, spec.n, 0.0, 1.0, "DTLZ2");
            return dtlz2(x, spec.m, objective);
        case 7:
            check_box(x, spec.n, 0.0, 1.0, "DTLZ7");
            return dtlz7(x, spec.m, objective);
        default:
            throw parameter_error("unsupported DTLZ variant");
    }
}

RmnkParams RmnkParams::make(std::size_t m, std::size_t K, double rho, std::uint64_t seed, std::size_t n)
{
    if (n == 0) {
        switch (m) {
            case 4: n = 10; break;
            case 10: n = 20; break;
            case 20: n = 30; break;
            default: throw parameter_error("rho-MNK: no default bit length for m = " + std::to_string(m));
        }
    }
    return RmnkParams{m, n, K, rho, seed};
}

std::size_t RmnkInstance::config_of(std::span<const std::uint8_t> bits, std::size_t pos) const
{
    std::size_t c = bits[pos] ? 1 : 0;
    const auto &ln = links[pos];
    for (std::size_t k = 0; k < ln.size(); ++k) {
        if (bits[ln[k]]) c |= std::size_t{1} << (k + 1);
    }
    return c;
}

RmnkInstance rmnk_generate(const RmnkParams &p)
{
    if (p.m < 2) throw parameter_error("rho-MNK needs at least two objectives");
    if (p.n == 0) throw parameter_error("rho-MNK needs n >= 1");
    if (p.K >= p.n) throw parameter_error("rho-MNK requires K < n");
    if (p.K > 20) throw parameter_error("rho-MNK: K too large for tabulated contributions");
    const double rho_min = -1.0 / static_cast<double>(p.m - 1);
    if (p.rho < rho_min || p.rho > 1.0) {
        throw parameter_error("rho-MNK requires -1/(m-1) <= rho <= 1, got rho = " + std::to_string(p.rho));
    }

    RmnkInstance inst;
    inst.params = p;
    Rng rng(p.seed);

    inst.links.resize(p.n);
    for (std::size_t pos = 0; pos < p.n; ++pos) {
        std::vector<std::size_t> others;
        for (std::size_t j = 0; j < p.n; ++j) {
            if (j != pos) others.push_back(j);
        }
        // partial Fisher-Yates: first K picks
        for (std::size_t k = 0; k < p.K; ++k) {
            std::swap(others[k], others[k + rng.index(others.size() - k)]);
        }
        inst.links[pos].assign(others.begin(), others.begin() + static_cast<std::ptrdiff_t>(p.K));
    }

    const auto L = constant_correlation_factor(p.m, p.rho);
    const std::size_t cells = p.n * inst.configs();
    inst.tables.assign(p.m, std::vector<double>(cells));
    std::vector<double> e(p.m);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        for (auto &v : e) v = rng.normal();
        for (std::size_t i = 0; i < p.m; ++i) {
            double z = 0.0;
            for (std::size_t k = 0; k <= i; ++k) z += L[i * p.m + k] * e[k];
            inst.tables[i][cell] = phi(z);
        }
    }
    return inst;
}

double rmnk_fitness(const RmnkInstance &inst, std::span<const std::uint8_t> bits, std::size_t objective)
{
    if (bits.size() != inst.params.n) throw dimension_error("rmnk_evaluate: bit-string has wrong length");
    if (objective >= inst.params.m) throw dimension_error("rmnk_evaluate: objective index out of range");
    double sum = 0.0;
    for (std::size_t pos = 0; pos < inst.params.n; ++pos) sum += inst.entry(objective, pos, inst.config_of(bits, pos));
    return sum / static_cast<double>(inst.params.n);
}

double rmnk_evaluate(const RmnkInstance &inst, std::span<const std::uint8_t> bits, std::size_t objective)
{
    return 1.0 - rmnk_fitness(inst, bits, objective);
}

nlohmann::json rmnk_to_json(const RmnkInstance &inst)
{
    const auto &p = inst.params;
    return nlohmann::json{{"format", "rmnk-v1"},
                          {"m", p.m},
                          {"n", p.n},
                          {"K", p.K},
                          {"rho", p.rho},
                          {"seed", p.seed},
                          {"links", inst.links},
                          {"tables", inst.tables}};
}

RmnkInstance rmnk_from_json(const nlohmann::json &j)
{
    if (j.value("format", std::string{}) != "rmnk-v1") throw config_error("rho-MNK file: expected format rmnk-v1");
    RmnkInstance inst;
    inst.params = RmnkParams{j.at("m").get<std::size_t>(), j.at("n").get<std::size_t>(), j.at("K").get<std::size_t>(),
                             j.at("rho").get<double>(), j.at("seed").get<std::uint64_t>()};
    inst.links = j.at("links").get<std::vector<std::vector<std::size_t>>>();
    inst.tables = j.at("tables").get<std::vector<std::vector<double>>>();
    const auto &p = inst.params;
    if (inst.links.size() != p.n || inst.tables.size() != p.m) throw config_error("rho-MNK file: inconsistent sizes");
    for (std::size_t pos = 0; pos < p.n; ++pos) {
        if (inst.links[pos].size() != p.K) throw config_error("rho-MNK file: wrong link count");
        for (auto l : inst.links[pos]) {
            if (l >= p.n || l == pos) throw config_error("rho-MNK file: invalid link");
        }
    }
    for (const auto &t : inst.tables) {
        if (t.size() != p.n * inst.configs()) throw config_error("rho-MNK file: wrong table size");
    }
    return inst;
}

void rmnk_save(const RmnkInstance &inst, const std::string &path)
{
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path);
    out << rmnk_to_json(inst).dump() << '\n';
}

RmnkInstance rmnk_load(const std::string &path)
{
    std::ifstream in(path);
    if (!in) throw config_error("cannot read " + path);
    return rmnk_from_json(nlohmann::json::parse(in));
}

Bounds problem_bounds(const ProblemSpec &spec)
{
    if (const auto *d = std::get_if<DtlzSpec>(&spec)) {
        if (d->variant == 1) return Bounds{Encoding::real, d->n, 0.25, 0.75};
        return Bounds{Encoding::real, d->n, 0.0, 1.0};
    }
    const auto &r = std::get<RmnkParams>(spec);
    return Bounds{Encoding::binary, r.n, 0.0, 1.0};
}

Problem::Problem(const ProblemSpec &spec) : m_spec(spec), m_bounds(problem_bounds(spec))
{
    if (const auto *d = std::get_if<DtlzSpec>(&spec)) {
        m_impl = *d;
        m_m = d->m;
    } else {
        auto inst = rmnk_generate(std::get<RmnkParams>(spec));
        m_m = inst.params.m;
        m_impl = std::move(inst);
    }
}

Problem::Problem(RmnkInstance inst) : m_spec(inst.params), m_bounds(problem_bounds(m_spec)), m_m(inst.params.m)
{
    m_impl = std::move(inst);
}

std::string Problem::name() const
{
    if (const auto *d = std::get_if<DtlzSpec>(&m_spec)) return "DTLZ" + std::to_string(d->variant);
    return "rMNK";
}

double Problem::evaluate(std::span<const double> x, std::size_t objective) const
{
    if (const auto *d = std::get_if<DtlzSpec>(&m_impl)) return dtlz_evaluate(*d, x, objective);
    const auto bits = to_bits(x);
    return rmnk_evaluate(std::get<RmnkInstance>(m_impl), bits, objective);
}

ObjectiveVector Problem::evaluate_all(std::span<const double> x) const
{
    ObjectiveVector f(m_m);
    for (std::size_t i = 0; i < m_m; ++i) f[i] = evaluate(x, i);
    return f;
}

DecisionVector Problem::random_decision(Rng &rng) const
{
    DecisionVector x(m_bounds.n);
    for (auto &v : x) {
        v = m_bounds.encoding == Encoding::binary ? (rng.bernoulli(0.5) ? 1.0 : 0.0)
                                                   : rng.uniform(m_bounds.lower, m_bounds.upper);
    }
    return x;
}

} // namespace hobj
