#include <doctest.h>

#include "oracles.hpp"

using namespace opea;

TEST_CASE("gen_binom examples") {
    CHECK(gen_binom(Rational(3), 1) == 3);
    CHECK(gen_binom(Rational(-2), 3) == oracle::falling_binom(Rational(-2), 3));
    CHECK(gen_binom(Rational(-2), 3) == -4);
    CHECK(gen_binom(Rational(1, 2), 2) == Rational(-1, 8));
    CHECK(gen_binom(Rational(5, 3), 0) == 1);
}

TEST_CASE("gen_binom recurrence and integer agreement") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
        Rational n = oracle::random_rational(rng);
        unsigned long i = rng() % 7;
        CHECK(gen_binom(n, i) * (n - i) == gen_binom(n, i + 1) * (i + 1));
        CHECK(gen_binom(n, i) == oracle::falling_binom(n, i));
    }
    for (long m = 0; m < 12; ++m)
        for (long i = 0; i <= m; ++i) {
            mpz_class b;
            mpz_bin_uiui(b.get_mpz_t(), m, i);
            CHECK(gen_binom(Rational(m), i) == Rational(b));
        }
}

TEST_CASE("int_sign") {
    CHECK(int_sign({Rational(1, 2), Rational(-1, 2)}) == -1);
    CHECK(int_sign({3, 3}) == 1);
    CHECK(in_vbbk({Rational(-1, 3), Rational(2, 3)}));
    CHECK_THROWS_AS(int_sign({Rational(-1, 3), Rational(1, 2)}), Error);
    try {
        int_sign({Rational(-1, 3), Rational(1, 2)});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NotInVbbK);
    }
    std::mt19937_64 rng(5);
    for (int t = 0; t < 50; ++t) {
        Rational a = oracle::random_rational(rng), b = oracle::random_rational(rng);
        ExpPair x(a, a + long(rng() % 5) - 2), y(b, b + long(rng() % 5) - 2);
        CHECK(int_sign(x) * int_sign(y) == int_sign(x + y));
    }
}

TEST_CASE("coset keys") {
    CHECK(CosetKey::of({Rational(-1, 2), Rational(3)}) == CosetKey{Rational(1, 2), Rational(0)});
    std::mt19937_64 rng(7);
    for (int t = 0; t < 50; ++t) {
        ExpPair x(oracle::random_rational(rng), oracle::random_rational(rng));
        ExpPair y(oracle::random_rational(rng), oracle::random_rational(rng));
        CHECK((CosetKey::of(x) == CosetKey::of(y)) == (x - y).integral());
        CHECK((CosetKey::of(x) == CosetKey::of(x + ExpPair(long(rng() % 9) - 4, 2))));
        CHECK(CosetKey::of(x).n >= 0);
        CHECK(CosetKey::of(x).n < 1);
    }
}

TEST_CASE("koszul_sign") {
    std::vector<Parity> p3{Parity::odd, Parity::odd, Parity::even};
    std::vector<std::size_t> id{0, 1, 2}, cyc{1, 2, 0}, sw{1, 0};
    std::vector<Parity> p2{Parity::odd, Parity::odd};
    CHECK(koszul_sign(id, p3) == 1);
    CHECK(koszul_sign(sw, p2) == -1);
    CHECK(koszul_sign(cyc, p3) == -1);
    std::vector<Parity> e2{Parity::even, Parity::odd};
    CHECK(koszul_sign(sw, e2) == 1);
}

TEST_CASE("divided_scalar and parsing") {
    CHECK(divided_scalar(0) == 1);
    CHECK(divided_scalar(3) == Rational(1, 6));
    CHECK(divided_scalar(5) == Rational(1, 120));
    CHECK(parse_rational("-6/4") == Rational(-3, 2));
    CHECK(to_string(parse_rational("4/2")) == "2");
    CHECK_THROWS_AS(parse_rational("1/0"), Error);
    CHECK_THROWS_AS(parse_rational("abc"), Error);
}
