#ifndef HOBJ_RNG_HPP
#define HOBJ_RNG_HPP

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace hobj
{

/// Seeded random source with portable draws.
/**
 * The standard distribution classes are implementation-defined, so the
 * conversions from raw 64-bit words are done here. Two Rng objects built
 * from the same seed produce identical streams on every platform.
 */
class Rng
{
public:
    explicit Rng(std::uint64_t seed = 0) : m_engine(seed) {}

    std::uint64_t next() { return m_engine(); }

    // [0, 1)
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    // [0, n)
    std::size_t index(std::size_t n);
    bool bernoulli(double p) { return uniform() < p; }
    double normal();

    template <typename T> void shuffle(std::vector<T> &v)
    {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    // Independent child stream, e.g. one per run or per purpose.
    Rng split(std::uint64_t salt);

    std::string state() const;
    void restore(const std::string &state);

private:
    std::mt19937_64 m_engine;
};

// 64-bit mix used to derive seeds from (base, salt) pairs.
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t salt);

// FNV-1a over bytes; stable across builds.
std::uint64_t stable_hash(const std::string &s);

} // namespace hobj

#endif
