#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <hobj/errors.hpp>
#include <hobj/mdm.hpp>
#include <hobj/rng.hpp>

using namespace hobj;

TEST_CASE("quadratic utility functions")
{
    auto c = RelevantSet::one_based({1, 2}, 4);
    UtilityFunction uf1(UtilityKind::uf1, c);
    CHECK(uf1(std::vector<double>{0, 0, 5, 5}) == 0.0);
    CHECK(uf1(std::vector<double>{1, 1, 0, 0}) == doctest::Approx(1.0).epsilon(1e-15));

    // coefficient-by-coefficient substitution at a=2, b=3
    auto c14 = RelevantSet::one_based({1, 4}, 4);
    std::vector<double> f{2, 100, 100, 3};
    CHECK(UtilityFunction(UtilityKind::uf1, c14)(f) == doctest::Approx(0.28 * 4 + 0.38 * 9 + 0.29 * 6 + 0.05 * 2));
    CHECK(UtilityFunction(UtilityKind::uf2, c14)(f) == doctest::Approx(0.6 * 4 + 0.05 * 6 + 0.23 * 2 + 0.38 * 3));
    CHECK(UtilityFunction(UtilityKind::uf3, c14)(f) == doctest::Approx(0.44 * 4 + 0.14 * 9 + 0.09 * 6 + 0.33 * 2));

    CHECK_THROWS_AS(UtilityFunction(UtilityKind::uf1, RelevantSet::one_based({1, 2, 3}, 4)), parameter_error);
    CHECK_THROWS_AS(uf1(std::vector<double>{1, 2}), dimension_error);
}

TEST_CASE("Tchebychef utility")
{
    auto c = RelevantSet::one_based({2, 3}, 4);
    UtilityFunction t(UtilityKind::tchebychef, c, {0.5, 0.5}, {0, 0});
    CHECK(t(std::vector<double>{9, 0.2, 0.4, 9}) == doctest::Approx(0.2));

    UtilityFunction def(UtilityKind::tchebychef, c);
    CHECK(def.weights() == std::vector<double>{0.4, 0.6});
    auto w = def.full_weights();
    CHECK(w == std::vector<double>{0.0, 0.4, 0.6, 0.0});
}

TEST_CASE("Tchebychef is monotone in relevant objectives")
{
    auto c = RelevantSet::one_based({1, 3}, 3);
    UtilityFunction t(UtilityKind::tchebychef, c);
    Rng rng(8);
    for (int i = 0; i < 300; ++i) {
        std::vector<double> f{rng.uniform(), rng.uniform(), rng.uniform()};
        const double u = t(f);
        auto g = f;
        g[rng.bernoulli(0.5) ? 0 : 2] -= rng.uniform(0.0, f[0] < f[2] ? f[0] : f[2]);
        CHECK(t(g) <= u);
    }
}

TEST_CASE("irrelevant objectives never change utility or ranks")
{
    Rng rng(9);
    for (auto kind : {UtilityKind::uf1, UtilityKind::uf2, UtilityKind::uf3, UtilityKind::tchebychef}) {
        auto c = RelevantSet::one_based({2, 5}, 6);
        UtilityFunction uf(kind, c);
        std::vector<ObjectiveVector> shown(5, ObjectiveVector(6));
        for (auto &f : shown) {
            for (auto &v : f) v = rng.uniform();
        }
        const auto ranks = mdm_rank(shown, uf);
        std::vector<double> before;
        for (auto &f : shown) before.push_back(uf(f));
        for (auto &f : shown) {
            for (std::size_t i : {0u, 2u, 3u, 5u}) f[i] = rng.uniform(-50, 50);
        }
        for (std::size_t k = 0; k < shown.size(); ++k) CHECK(uf(shown[k]) == before[k]);
        CHECK(mdm_rank(shown, uf) == ranks);
    }
}

TEST_CASE("competition ranks")
{
    CHECK(competition_ranks(std::vector<double>{0.3, 0.1, 0.2}) == std::vector<int>{3, 1, 2});
    CHECK(competition_ranks(std::vector<double>{0.5, 0.5, 0.5}) == std::vector<int>{1, 1, 1});
    CHECK(competition_ranks(std::vector<double>{0.1, 0.2, 0.2, 0.3}) == std::vector<int>{1, 2, 2, 4});
    CHECK(competition_ranks(std::vector<double>{0.2, 0.2 + 1e-13, 0.1}) == std::vector<int>{2, 2, 1});
}

TEST_CASE("mdm_rank agrees with raw utilities")
{
    auto c = RelevantSet::one_based({1, 2}, 3);
    UtilityFunction uf(UtilityKind::uf2, c);
    Rng rng(10);
    for (int t = 0; t < 100; ++t) {
        std::vector<ObjectiveVector> shown(5, ObjectiveVector(3));
        std::vector<double> u;
        for (auto &f : shown) {
            for (auto &v : f) v = rng.uniform();
            u.push_back(uf(f));
        }
        auto r = mdm_rank(shown, uf);
        const auto best_rank = std::min_element(r.begin(), r.end()) - r.begin();
        const auto best_u = std::min_element(u.begin(), u.end()) - u.begin();
        CHECK(best_rank == best_u);

        // invariance under a strictly increasing transform
        std::vector<double> g;
        for (double v : u) g.push_back(std::exp(3.0 * v) + 1.0);
        CHECK(competition_ranks(g) == r);
    }
    std::vector<ObjectiveVector> same(4, ObjectiveVector{0.3, 0.3, 0.1});
    CHECK(mdm_rank(same, uf) == std::vector<int>{1, 1, 1, 1});
}
