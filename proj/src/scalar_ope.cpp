#include <set>
#include <unordered_map>

#include "opea/ope_engine.hpp"

namespace opea {

namespace {

Rational first_in_coset(const Rational& lo, const Rational& coset) { return lo + frac_of(coset - lo); }

struct PairHash {
    std::size_t operator()(const std::pair<ExpPair, ExpPair>& k) const {
        return hash_value(k.first) * 1000003u + hash_value(k.second);
    }
};

// Hashed view of a distribution's stored coefficients.
struct Lookup {
    const ScalarDistribution& d;
    std::unordered_map<std::pair<ExpPair, ExpPair>, Rational, PairHash> table;
    explicit Lookup(const ScalarDistribution& dist) : d(dist) {
        for (const auto& [k, v] : d.terms()) table.emplace(std::make_pair(k[0], k[1]), v);
    }
    std::optional<Rational> operator()(const ExpPair& P, const ExpPair& Q) const {
        auto it = table.find({P, Q});
        if (it != table.end()) return it->second;
        if (!d.known(Key{P, Q})) return std::nullopt;
        return Rational(0);
    }
};

struct Extractor {
    Lookup f;
    Lookup g;
    ExpPair pf, qf;
    long depth;

    std::optional<Rational> forward(const ExpPair& h, const ExpPair& P, const ExpPair& Q) const {
        Rational out(0);
        long top[2];
        for (int s = 0; s < 2; ++s) top[s] = to_long(floor_of(Q[s] - qf[s]));
        for (long i = 0; i <= top[0]; ++i)
            for (long ib = 0; ib <= top[1]; ++ib) {
                Rational c = binom2(h, i, ib);
                if (sgn(c) == 0) continue;
                ExpPair ii(i, ib);
                auto v = f(P - h + ii, Q - ii);
                if (!v) return std::nullopt;
                out += ((i + ib) % 2 ? -c : c) * *v;
            }
        return out;
    }

    std::optional<Rational> reverse(const ExpPair& h, const ExpPair& P, const ExpPair& Q) const {
        Rational out(0);
        long top[2];
        for (int s = 0; s < 2; ++s) top[s] = to_long(floor_of(P[s] - pf[s]));
        for (long i = 0; i <= top[0]; ++i)
            for (long ib = 0; ib <= top[1]; ++ib) {
                Rational c = binom2(h, i, ib);
                if (sgn(c) == 0) continue;
                ExpPair ii(i, ib);
                auto v = g(P - ii, Q - h + ii);
                if (!v) return std::nullopt;
                out += ((i + ib) % 2 ? -c : c) * *v;
            }
        return out * int_sign(h);
    }

    template <class Fn>
    void for_keys(long margin, Fn fn) const {
        for (long p0 = -margin; p0 <= depth; ++p0)
            for (long p1 = -margin; p1 <= depth; ++p1)
                for (long q0 = -margin; q0 <= depth; ++q0)
                    for (long q1 = -margin; q1 <= depth; ++q1)
                        fn(pf + ExpPair(p0, p1), qf + ExpPair(q0, q1));
    }

    // 1 valid, 0 mismatch, -1 nothing comparable
    int valid(const ExpPair& h, bool& limited) const {
        int state = -1;
        bool bad = false;
        for_keys(1, [&](const ExpPair& P, const ExpPair& Q) {
            if (bad) return;
            auto x = forward(h, P, Q);
            auto y = x ? reverse(h, P, Q) : std::nullopt;
            if (!x || !y) {
                limited = true;
                return;
            }
            state = 1;
            if (*x != *y) bad = true;
        });
        return bad ? 0 : state;
    }
};

ExpPair lower_bound(const ScalarDistribution& f, const CosetKey& kappa, const ExpPair& pf) {
    ExpPair out;
    for (int s = 0; s < 2; ++s) {
        std::optional<Rational> row, zmin;
        for (const auto& [k, v] : f.terms())
            if (CosetKey::of(k[0]) == kappa && (!row || k[1][s] < *row)) row = k[1][s];
        for (const auto& [k, v] : f.terms())
            if (CosetKey::of(k[0]) == kappa && row && k[1][s] == *row && (!zmin || k[0][s] < *zmin)) zmin = k[0][s];
        out[s] = zmin ? pf[s] - *zmin : Rational(0);
    }
    return out;
}

}  // namespace

ScalarOpe extract_scalar_ope(const ScalarDistribution& f, const ScalarDistribution& g, long depth) {
    if (f.vars() != 2 || g.vars() != 2) throw Error(ErrorKind::Inconsistent, "scalar OPE data needs two variables");
    if (!f.floor(2) || !f.floor(3) || !g.floor(0) || !g.floor(1))
        throw Error(ErrorKind::NotInBracketSpace, "scalar OPE data needs a w-floor in z>w and a z-floor in w>z");
    Extractor ex{Lookup(f), Lookup(g), ExpPair(*g.floor(0), *g.floor(1)), ExpPair(*f.floor(2), *f.floor(3)), depth};
    for (int s = 0; s < 2; ++s)
        if (!is_integer(ex.pf[s]) || !is_integer(ex.qf[s]))
            throw Error(ErrorKind::Inconsistent, "scalar OPE floors must be integral");

    std::set<CosetKey> cosets;
    for (const auto& [k, v] : f.terms()) cosets.insert(CosetKey::of(k[0]));
    for (const auto& [k, v] : g.terms()) cosets.insert(CosetKey::of(k[1]));

    ScalarOpe out;
    out.depth = depth;
    for (const auto& kappa : cosets) {
        ExpPair hc = -kappa.pair();
        // On the lowest w-row of f the z-exponents are P - h with P >= pf,
        // which bounds h from below; climb from there to the first valid order.
        ExpPair lower = lower_bound(f, kappa, ex.pf);
        std::optional<ExpPair> found;
        int last = -1;
        for (long t = 0; t <= depth && !found; ++t)
            for (long a = 0; a <= t && !found; ++a) {
                ExpPair h(first_in_coset(lower.n, hc.n) + a, first_in_coset(lower.nbar, hc.nbar) + (t - a));
                if (!in_vbbk(h)) continue;
                int r = ex.valid(h, out.window_limited);
                if (r == 1) found = h;
                else if (r == 0) last = 0;
            }
        if (!found && last == 0)
            throw Error(ErrorKind::NotLocal, "no pole order within the window depth for coset " + to_string(kappa));
        if (!found) throw Error(ErrorKind::WindowTooSmall, "no comparable coefficients for coset " + to_string(kappa));
        ExpPair h = *found;
        bool moved = true;
        while (moved) {
            moved = false;
            for (int s = 0; s < 2; ++s) {
                while (h[s] > -depth) {
                    ExpPair cand = h;
                    cand[s] -= 1;
                    bool lim = false;
                    if (ex.valid(cand, lim) != 1) break;
                    out.window_limited |= lim;
                    h = cand;
                    moved = true;
                }
            }
        }
        ScalarOpeTerm term{h, kappa, {}};
        ex.for_keys(0, [&](const ExpPair& P, const ExpPair& Q) {
            auto x = ex.forward(h, P, Q);
            if (!x) {
                out.window_limited = true;
                return;
            }
            if (sgn(*x) != 0) term.c.emplace(std::make_pair(P, Q), *x);
        });
        if (!term.c.empty()) out.terms.push_back(std::move(term));
    }
    return out;
}

}  // namespace opea
