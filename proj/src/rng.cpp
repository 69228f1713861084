#include <cmath>
#include <numbers>
#include <sstream>

#include <hobj/rng.hpp>

namespace hobj
{

double Rng::uniform()
{
    return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
}

std::size_t Rng::index(std::size_t n)
{
    if (n <= 1) return 0;
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t v;
    do {
        v = m_engine();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
}

double Rng::normal()
{
    // Box-Muller, one value per call so the stream position stays simple.
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Rng Rng::split(std::uint64_t salt)
{
    return Rng(mix_seed(m_engine(), salt));
}

std::string Rng::state() const
{
    std::ostringstream os;
    os << m_engine;
    return os.str();
}

void Rng::restore(const std::string &state)
{
    std::istringstream is(state);
    is >> m_engine;
}

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt)
{
    // splitmix64 finalizer
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t stable_hash(const std::string &s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace hobj
