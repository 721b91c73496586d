#include <doctest.h>

#include "opea/distribution.hpp"
#include "oracles.hpp"

using namespace opea;

namespace {

Key k2(long a, long ab, long b, long bb) { return {ExpPair(a, ab), ExpPair(b, bb)}; }
Key k1(const Rational& a, const Rational& ab) { return {ExpPair(a, ab)}; }

// Coefficient of z^{h-i} w^{i} (z>w) straight from the series definition.
Rational series_coef(const ExpPair& h, long i, long ib) {
    Rational c = oracle::falling_binom(h.n, i) * oracle::falling_binom(h.nbar, ib);
    return (i + ib) % 2 ? Rational(-c) : c;
}

}  // namespace

TEST_CASE("expand_pow matches the series") {
    auto d = expand_pow({-1, 0}, Sector::z_over_w, 3);
    CHECK(d.terms().size() == 4);
    for (long i = 0; i <= 3; ++i) CHECK(d.coefficient(k2(-1 - i, 0, i, 0)) == 1);
    CHECK_THROWS_AS(d.coefficient(k2(-5, 0, 4, 0)), Error);
    CHECK(d.coefficient(k2(-5, 0, 5, 1)) == 0);  // wrong degree: known zero

    auto one = expand_pow({0, 0}, Sector::w_over_z, 2);
    CHECK(one.terms().size() == 1);
    CHECK(one.fully_known());
    CHECK(one.coefficient(k2(0, 0, 0, 0)) == 1);

    std::mt19937_64 rng(3);
    for (int t = 0; t < 20; ++t) {
        Rational a = oracle::random_rational(rng);
        ExpPair h(a, a + long(rng() % 3));
        auto e = expand_pow(h, Sector::z_over_w, 4);
        for (long i = 0; i <= 4; ++i)
            for (long j = 0; j <= 4; ++j)
                CHECK(e.coefficient({ExpPair(h.n - i, h.nbar - j), ExpPair(i, j)}) == series_coef(h, i, j));
        // w>z is int_sign times the series of (w-z)^h with w large
        auto f = expand_pow(h, Sector::w_over_z, 4);
        for (long i = 0; i <= 4; ++i)
            for (long j = 0; j <= 4; ++j)
                CHECK(f.coefficient({ExpPair(i, j), ExpPair(h.n - i, h.nbar - j)}) ==
                      int_sign(h) * series_coef(h, i, j));
    }
    CHECK_THROWS_AS(expand_pow({Rational(1, 2), Rational(0)}, Sector::w_over_z, 2), Error);
}

TEST_CASE("delta distribution from the two sectors") {
    auto d = sub(expand_pow({-1, 0}, Sector::z_over_w, 4), expand_pow({-1, 0}, Sector::w_over_z, 4));
    for (long i = -5; i <= 4; ++i) CHECK(d.coefficient(k2(-1 - i, 0, i, 0)) == 1);
    CHECK(d.coefficient(k2(0, 0, 0, 0)) == 0);
    CHECK(d.terms().size() == 10);
}

TEST_CASE("products of expansions") {
    auto a = expand_pow({-1, 0}, Sector::z_over_w, 5);
    auto b = expand_pow({1, 0}, Sector::z_over_w, 5);
    auto p = mul(a, b);
    CHECK(p.coefficient(k2(0, 0, 0, 0)) == 1);
    for (long i = 1; i <= 5; ++i) CHECK(p.coefficient(k2(-i, 0, i, 0)) == 0);
    CHECK(p.terms().size() == 1);

    ScalarDistribution zero(2);
    CHECK(mul(a, zero).is_zero());

    auto h1 = expand_pow({Rational(-1, 2), Rational(-1, 2)}, Sector::z_over_w, 4);
    auto h2 = expand_pow({Rational(-1, 2), Rational(1, 2)}, Sector::z_over_w, 4);
    auto h12 = expand_pow({-1, 0}, Sector::z_over_w, 4);
    auto q = mul(h1, h2);
    CHECK(!first_mismatch(q, h12));
    CHECK(q.coefficient(k2(-4, 0, 3, 0)) == 1);

    CHECK_THROWS_AS(mul(a, expand_pow({-1, 0}, Sector::w_over_z, 3)), Error);
}

TEST_CASE("expansion multiplicativity, random exponents") {
    std::mt19937_64 rng(17);
    for (int t = 0; t < 50; ++t) {
        Rational a = oracle::random_rational(rng, 4), b = oracle::random_rational(rng, 4);
        ExpPair h(a, a + long(rng() % 3) - 1), g(b, b + long(rng() % 3) - 1);
        for (Sector s : {Sector::z_over_w, Sector::w_over_z}) {
            if (s == Sector::w_over_z && (!in_vbbk(h) || !in_vbbk(g))) continue;
            auto p = mul(expand_pow(h, s, 4), expand_pow(g, s, 4));
            auto r = expand_pow(h + g, s, 4);
            CHECK(!first_mismatch(p, r));
            CHECK(p.terms().size() >= 1);
        }
    }
}

TEST_CASE("infinite coefficient sums are rejected") {
    // sum_{i>=0} z^{-i} against sum_{i>=0} z^{i}
    ScalarDistribution a(1), b(1);
    a.set_window(0, Interval{Rational(-4), std::nullopt});
    a.set_ceil(0, Rational(0));
    b.set_window(0, Interval{std::nullopt, Rational(4)});
    b.set_floor(0, Rational(0));
    for (int s = 1; s < 2; ++s) {
        a.set_floor(s, Rational(0)); a.set_ceil(s, Rational(0));
        b.set_floor(s, Rational(0)); b.set_ceil(s, Rational(0));
    }
    for (long i = 0; i <= 4; ++i) {
        a.set(k1(-i, 0), Rational(1));
        b.set(k1(i, 0), Rational(1));
    }
    CHECK_THROWS_AS(mul(a, b), Error);
}

TEST_CASE("derivatives") {
    auto zinv = monomial(k1(-1, 0));
    auto d = derive(zinv, 0, 0, 1, false);
    CHECK(d.coefficient(k1(-2, 0)) == -1);
    auto z3 = monomial(k1(3, 0));
    CHECK(derive(z3, 0, 0, 2, true).coefficient(k1(1, 0)) == 3);
    CHECK(derive(z3, 0, 0, 2, false).coefficient(k1(1, 0)) == 6);

    auto e = derive(expand_pow({-1, 0}, Sector::z_over_w, 4), 0, 0, 1, false);
    auto r = expand_pow({-2, 0}, Sector::z_over_w, 4);
    CHECK(!first_mismatch(e, linear_combination(Rational(-1), r, Rational(0), r)));
    CHECK(e.coefficient(k2(-3, 0, 1, 0)) == -2);

    // Leibniz rule on windows
    auto a = expand_pow({Rational(-3, 2), Rational(-1, 2)}, Sector::z_over_w, 5);
    auto b = polynomial(2, {{k2(1, 0, 2, 1), Rational(2, 3)}, {k2(0, 0, 0, 0), Rational(-5)}});
    for (std::size_t var = 0; var < 2; ++var)
        for (int s = 0; s < 2; ++s) {
            auto lhs = derive(mul(a, b), var, s, 1, false);
            auto rhs = add(mul(derive(a, var, s, 1, false), b), mul(a, derive(b, var, s, 1, false)));
            CHECK(!first_mismatch(lhs, rhs));
            CHECK(!lhs.is_zero());
        }
}

TEST_CASE("shift") {
    auto s = shift(monomial(k1(2, 0)), 4);
    CHECK(s.fully_known());
    CHECK(s.terms().size() == 3);
    CHECK(s.coefficient(k2(1, 0, 1, 0)) == 2);
    CHECK(s.coefficient(k2(0, 0, 2, 0)) == 1);
    auto one = shift(monomial(k1(0, 0)), 3);
    CHECK(one.terms().size() == 1);
    auto inv = shift(monomial(k1(-1, 0)), 3);
    CHECK(inv.terms().size() == 4);
    for (long i = 0; i <= 3; ++i) CHECK(inv.coefficient(k2(-1 - i, 0, i, 0)) == (i % 2 ? -1 : 1));
    // shift of a monomial is the z>w expansion of (z+w)^h
    auto h = shift(monomial(k1(Rational(-1, 2), Rational(1, 2))), 3);
    for (long i = 0; i <= 3; ++i)
        for (long j = 0; j <= 3; ++j)
            CHECK(h.coefficient({ExpPair(Rational(-1, 2) - i, Rational(1, 2) - j), ExpPair(i, j)}) ==
                  oracle::falling_binom(Rational(-1, 2), i) * oracle::falling_binom(Rational(1, 2), j));
}

TEST_CASE("diagonal") {
    Rational m(-1, 2);
    auto a = polynomial(2, {{{ExpPair(m, 0), ExpPair(m, 0)}, Rational(1)},
                            {{ExpPair(m + 1, 0), ExpPair(m + 1, 0)}, Rational(1)}});
    auto d = diagonal(a);
    CHECK(d.coefficient(k1(-1, 0)) == 1);
    CHECK(d.coefficient(k1(1, 0)) == 1);
    CHECK(d.terms().size() == 2);
    auto p = polynomial(2, {{k2(1, 0, 2, 0), Rational(3)}, {k2(3, 0, 0, 0), Rational(-3)}, {k2(0, 1, 0, 0), 1}});
    auto pd = diagonal(p);
    CHECK(pd.terms().size() == 1);
    CHECK(pd.coefficient(k1(0, 1)) == 1);
    CHECK_THROWS_AS(diagonal(expand_pow({-1, 0}, Sector::z_over_w, 3)), Error);
}

TEST_CASE("restrict and residue") {
    auto e = expand_pow({-1, 0}, Sector::z_over_w, 3);
    CHECK(!first_mismatch(restrict_to(e, SupportSet::full(2)), e));
    CHECK(restrict_to(e, SupportSet::none()).is_zero());
    CHECK(restrict_to(e, SupportSet::integral(2)).terms().size() == e.terms().size());
    auto half = polynomial(1, {{k1(Rational(-1, 2), 0), 1}, {k1(0, 0), 1}});
    CHECK(restrict_to(half, SupportSet::integral(1)).terms().size() == 1);

    CHECK(residue(monomial(k1(-1, 0)), 0, 0).coefficient(k1(0, 0)) == 1);
    CHECK(residue(monomial(k1(Rational(-1, 2), 0)), 0, 0).is_zero());
    auto r = residue(e, 0, 0);
    CHECK(r.terms().size() == 1);
    CHECK(r.coefficient(k2(0, 0, 0, 0)) == 1);

    std::mt19937_64 rng(9);
    for (int t = 0; t < 10; ++t) {
        ExpPair h(oracle::random_rational(rng), 0);
        auto x = expand_pow(h, Sector::z_over_w, 4);
        CHECK(residue(derive(x, 0, 0, 1, false), 0, 0).is_zero());
        CHECK(residue(derive(x, 1, 0, 1, false), 1, 0).is_zero());
    }
}

TEST_CASE("integer powers agree in both sectors") {
    for (long n = 0; n <= 4; ++n)
        for (long nb = 0; nb <= 3; ++nb) {
            auto a = expand_pow({n, nb}, Sector::z_over_w, 6);
            auto b = expand_pow({n, nb}, Sector::w_over_z, 6);
            CHECK(a.fully_known());
            CHECK(!first_mismatch(a, b));
        }
}

TEST_CASE("serialization is canonical") {
    auto e = expand_pow({-1, 0}, Sector::z_over_w, 1);
    CHECK(serialize(e) ==
          "distribution vars=2 sector=z>w\n"
          "window z=(-inf,+inf) zbar=(-inf,+inf) w=(-inf,1] wbar=(-inf,+inf)\n"
          "(-2,0;1,0) 1\n"
          "(-1,0;0,0) 1\n");
}
