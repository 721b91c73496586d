#include <doctest.h>

#include "opea/ope_engine.hpp"
#include "oracles.hpp"

using namespace opea;

namespace {

using Planted = std::map<std::pair<ExpPair, ExpPair>, Rational>;

Planted random_c(std::mt19937_64& rng) {
    Planted c;
    for (long p0 = 0; p0 <= 1; ++p0)
        for (long p1 = 0; p1 <= 1; ++p1)
            for (long q0 = 0; q0 <= 1; ++q0)
                for (long q1 = 0; q1 <= 1; ++q1) {
                    Rational v = oracle::random_rational(rng, 5, 3);
                    if (sgn(v) != 0) c[{ExpPair(p0, p1), ExpPair(q0, q1)}] = v;
                }
    return c;
}

ScalarDistribution as_polynomial(const Planted& c) {
    std::vector<std::pair<Key, Rational>> terms;
    for (const auto& [k, v] : c) terms.push_back({Key{k.first, k.second}, v});
    return polynomial(2, terms);
}

// sum_i c^i (z-w)^{-h_i} in both sectors
std::pair<ScalarDistribution, ScalarDistribution> assemble(const std::vector<std::pair<ExpPair, Planted>>& planted,
                                                           long expand_depth) {
    std::optional<ScalarDistribution> f, g;
    for (const auto& [h, c] : planted) {
        auto p = as_polynomial(c);
        auto fi = mul(expand_pow(-h, Sector::z_over_w, expand_depth), p);
        auto gi = mul(expand_pow(-h, Sector::w_over_z, expand_depth), p);
        f = f ? add(*f, fi) : fi;
        g = g ? add(*g, gi) : gi;
    }
    return {*f, *g};
}

}  // namespace

TEST_CASE("planted reduced OPEs on two cosets are recovered exactly") {
    std::mt19937_64 rng(20261018);
    const long depth = 6;
    for (int round = 0; round < 3; ++round) {
        std::vector<std::pair<ExpPair, Planted>> planted = {
            {ExpPair(Rational(3, 2), Rational(1, 2)), random_c(rng)},
            {ExpPair(2, 1), random_c(rng)},
        };
        auto [f, g] = assemble(planted, depth + 4);
        auto ope = extract_scalar_ope(f, g, depth);
        REQUIRE(ope.terms.size() == 2);
        for (const auto& t : ope.terms) {
            const auto& want = t.coset == CosetKey::of(ExpPair(Rational(1, 2), Rational(1, 2))) ? planted[0]
                                                                                               : planted[1];
            CHECK(t.h == want.first);
            CHECK(t.c == want.second);
        }
    }
}

TEST_CASE("a planted zero sum extracts to nothing") {
    std::mt19937_64 rng(7);
    auto p = random_c(rng);
    // p/(z-w)^h - (z-w)p/(z-w)^{h+1} = 0
    Planted q;
    for (const auto& [k, v] : p) {
        q[{k.first + ExpPair(1, 0), k.second}] -= v;
        q[{k.first, k.second + ExpPair(1, 0)}] += v;
    }
    for (auto it = q.begin(); it != q.end();)
        it = sgn(it->second) == 0 ? q.erase(it) : std::next(it);
    ExpPair h(2, 1);
    auto [f, g] = assemble({{h, p}, {h + ExpPair(1, 0), q}}, 10);
    auto ope = extract_scalar_ope(f, g, 6);
    CHECK(ope.terms.empty());
}

TEST_CASE("mismatched orderings are not local") {
    std::mt19937_64 rng(11);
    auto p = random_c(rng);
    auto [f, g] = assemble({{ExpPair(1, 0), p}}, 10);
    auto [f2, g2] = assemble({{ExpPair(1, 0), random_c(rng)}}, 10);
    CHECK_THROWS_AS(extract_scalar_ope(f, g2, 6), Error);
}
