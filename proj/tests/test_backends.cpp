#include <doctest.h>

#include "opea/backends.hpp"
#include "oracles.hpp"

using namespace opea;

namespace {

// number of partitions of n, by the pentagonal recurrence
long partition_count(long n) {
    std::vector<long> p(n + 1, 0);
    p[0] = 1;
    for (long m = 1; m <= n; ++m)
        for (long k = 1;; ++k) {
            long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
            if (g1 > m) break;
            long s = (k % 2) ? 1 : -1;
            p[m] += s * p[m - g1];
            if (g2 <= m) p[m] += s * p[m - g2];
        }
    return p[n];
}

StateVector mode(const Field& f, long n, const StateVector& v) { return f.apply(ExpPair(n, -1), v); }

StateVector vec(const Backend& b, const std::string& label) {
    auto i = b.space->find(label);
    REQUIRE(i.has_value());
    return StateVector::basis(*i);
}

}  // namespace

TEST_CASE("heisenberg basis and modes") {
    auto b = build_heisenberg(Rational(1), Rational(2));
    CHECK(b.space->size() == 4);
    auto b8 = build_heisenberg(Rational(1), Rational(8));
    long expect = 0;
    for (long n = 0; n <= 8; ++n) expect += partition_count(n);
    CHECK(b8.space->size() == static_cast<std::size_t>(expect));

    auto k = build_heisenberg(Rational(3, 2), Rational(6));
    const Field& a = *k.generators[0];
    StateVector vac = StateVector::basis(0);
    CHECK(mode(a, 1, mode(a, -1, vac)) == vac.scaled(Rational(3, 2)));
    for (std::size_t j : k.space->up_to(2)) {
        StateVector v = StateVector::basis(j);
        CHECK(mode(a, 0, v).is_zero());
        for (long m = -2; m <= 2; ++m)
            for (long n = -2; n <= 2; ++n) {
                StateVector lhs = mode(a, m, mode(a, n, v));
                lhs.axpy(Rational(-1), mode(a, n, mode(a, m, v)));
                StateVector rhs = (m + n == 0) ? v.scaled(Rational(3, 2) * m) : StateVector();
                CHECK(lhs == rhs);
            }
    }
    // out-of-truncation images are unknown, never zero
    StateVector top = vec(k, "alpha[-6]");
    CHECK(!mode(a, -1, top).known());
    CHECK(a.apply(ExpPair(0, 0), 0).is_zero());
}

TEST_CASE("fermion basis and modes") {
    auto f = build_fermion(Rational(3, 2));
    CHECK(f.space->size() == 3);
    auto big = build_fermion(Rational(5));
    // strict partitions into odd halves: coefficient count of prod (1 + q^{r})
    std::vector<long> c(11, 0);
    c[0] = 1;
    for (int r2 = 1; r2 <= 10; r2 += 2)
        for (int t = 10; t >= r2; --t) c[t] += c[t - r2];
    long expect = 0;
    for (long t = 0; t <= 10; ++t) expect += c[t];
    CHECK(big.space->size() == static_cast<std::size_t>(expect));

    auto wide = build_fermion(Rational(8));
    const Field& psi = *wide.generators[0];
    StateVector vac = StateVector::basis(0);
    // psi_{(n)} = psi_{n+1/2}
    CHECK(mode(psi, 0, mode(psi, -1, vac)) == vac);
    CHECK(mode(psi, -1, mode(psi, -1, vac)).is_zero());
    for (std::size_t j : wide.space->up_to(3)) {
        StateVector v = StateVector::basis(j);
        for (long m = -3; m <= 2; ++m)
            for (long n = -3; n <= 2; ++n) {
                StateVector lhs = mode(psi, m, mode(psi, n, v));
                lhs.axpy(Rational(1), mode(psi, n, mode(psi, m, v)));
                // {psi_{m+1/2}, psi_{n+1/2}} = delta_{m+n+1, 0}
                StateVector rhs = (m + n + 1 == 0) ? v : StateVector();
                CHECK(lhs == rhs);
            }
    }
}

TEST_CASE("translation operators") {
    auto b = build_heisenberg(Rational(1), Rational(6));
    CHECK(b.T->apply(0).is_zero());
    CHECK(b.T->apply(vec(b, "alpha[-1]")) == vec(b, "alpha[-2]"));
    CHECK(b.T->apply(vec(b, "alpha[-2]")) == vec(b, "alpha[-3]").scaled(Rational(2)));

    auto f = build_fermion(Rational(6));
    CHECK(f.T->apply(vec(f, "psi[-1/2]")) == vec(f, "psi[-3/2]"));
    CHECK(f.T->apply(vec(f, "psi[-3/2]")) == vec(f, "psi[-5/2]").scaled(Rational(2)));

    // [T, a_(n)] = -n a_(n-1) on every basis vector below the truncation
    for (const Backend* bk : {&b, &f}) {
        const Field& a = *bk->generators[0];
        for (std::size_t j : bk->space->up_to(3)) {
            StateVector v = StateVector::basis(j);
            for (long n = -3; n <= 3; ++n) {
                StateVector lhs = bk->T->apply(mode(a, n, v));
                lhs.axpy(Rational(-1), mode(a, n, bk->T->apply(v)));
                CHECK(lhs == mode(a, n - 1, v).scaled(Rational(-n)));
            }
        }
    }
}

TEST_CASE("exp_T") {
    auto b = build_heisenberg(Rational(1), Rational(6));
    auto e0 = exp_T(*b.T, *b.Tbar, StateVector::basis(0), 4);
    CHECK(e0.terms().size() == 1);
    auto e1 = exp_T(*b.T, *b.Tbar, vec(b, "alpha[-1]"), 0);
    CHECK(e1.terms().size() == 1);
    auto e = exp_T(*b.T, *b.Tbar, vec(b, "alpha[-1]"), 3);
    for (long i = 0; i <= 3; ++i)
        CHECK(e.coefficient({ExpPair(i, 0)}) == vec(b, "alpha[-" + std::to_string(i + 1) + "]"));
}

TEST_CASE("tensor backends") {
    BackendSpec h{"heisenberg", Rational(1), "alpha", nullptr, nullptr, false};
    BackendSpec hb{"heisenberg", Rational(1), "beta", nullptr, nullptr, false};
    BackendSpec t{"tensor", Rational(1), "", std::make_shared<BackendSpec>(h), std::make_shared<BackendSpec>(hb), true};
    auto one = build_backend(t, Rational(1));
    CHECK(one.space->size() == 3);
    CHECK(one.space->state(0).weight == ExpPair(0, 0));

    auto tb = build_backend(t, Rational(6));
    const Field& a = *tb.generators[0];
    const Field& bb = *tb.generators[1];
    CHECK(a.chirality() == Chirality::holomorphic);
    CHECK(bb.chirality() == Chirality::antiholomorphic);
    CHECK(bb.weight() == ExpPair(0, 1));
    for (std::size_t j : tb.space->up_to(3)) {
        StateVector v = StateVector::basis(j);
        for (long m = -2; m <= 2; ++m)
            for (long n = -2; n <= 2; ++n) {
                StateVector x = a.apply(ExpPair(m, -1), bb.apply(ExpPair(-1, n), v));
                StateVector y = bb.apply(ExpPair(-1, n), a.apply(ExpPair(m, -1), v));
                CHECK(x == y);
            }
    }
    // T and Tbar commute and kill the vacuum
    CHECK(tb.T->apply(0).is_zero());
    CHECK(tb.Tbar->apply(0).is_zero());
    for (std::size_t j : tb.space->up_to(4)) {
        StateVector v = StateVector::basis(j);
        CHECK(tb.T->apply(tb.Tbar->apply(v)) == tb.Tbar->apply(tb.T->apply(v)));
    }

    BackendSpec ff{"fermion", Rational(1), "psi", nullptr, nullptr, false};
    BackendSpec tf{"tensor", Rational(1), "", std::make_shared<BackendSpec>(ff), std::make_shared<BackendSpec>(ff), false};
    auto two = build_backend(tf, Rational(4));
    const Field& p1 = *two.generators[0];
    const Field& p2 = *two.generators[1];
    for (std::size_t j : two.space->up_to(1)) {
        StateVector v = StateVector::basis(j);
        for (long m = -2; m <= 1; ++m)
            for (long n = -2; n <= 1; ++n) {
                StateVector x = mode(p1, m, mode(p2, n, v));
                x.axpy(Rational(1), mode(p2, n, mode(p1, m, v)));
                CHECK(x.known());
                CHECK(x.is_zero());
            }
    }
}

TEST_CASE("native vertex operators against mode sums") {
    auto b = build_heisenberg(Rational(2), Rational(8));
    const Field& a = *b.generators[0];
    auto idx = b.space->find("alpha[-1]");
    CHECK(!compare_fields(*b.native(*idx), a, Rational(4), Rational(4)).mismatch);
    CHECK(!compare_fields(*b.native(0), *identity_field(b.space), Rational(4), Rational(4)).mismatch);
    // :alpha alpha:_(N) = sum_{m<0} alpha_m alpha_{N-1-m} + sum_{m>=0} alpha_{N-1-m} alpha_m
    auto aa = b.native(*b.space->find("alpha[-1]^2"));
    for (std::size_t j : b.space->up_to(3))
        for (long N = -4; N <= 4; ++N) {
            StateVector v = StateVector::basis(j), expect;
            for (long m = -8; m <= 8; ++m) {
                if (m < 0) expect.axpy(Rational(1), mode(a, m, mode(a, N - 1 - m, v)));
                else expect.axpy(Rational(1), mode(a, N - 1 - m, mode(a, m, v)));
            }
            CHECK(aa->apply(ExpPair(N, -1), j) == expect);
        }
    // derived translation from the native fields agrees with the backend T
    auto T1 = derive_translation(b.space, b.native, 0);
    for (std::size_t j : b.space->up_to(5)) CHECK(T1->apply(j) == b.T->apply(j));

    auto f = build_fermion(Rational(8));
    auto T1f = derive_translation(f.space, f.native, 0);
    for (std::size_t j : f.space->up_to(5)) CHECK(T1f->apply(j) == f.T->apply(j));
    auto T1bar = derive_translation(f.space, f.native, 1);
    for (std::size_t j : f.space->up_to(5)) CHECK(T1bar->apply(j).is_zero());
}
