#include <optional>
#include <unordered_map>

#include "opea/axioms.hpp"

namespace opea {

namespace {

const ExpPair kOne(1, 1);

Rational first_in_coset(const Rational& lo, const Rational& coset) { return lo + frac_of(coset - lo); }

std::optional<long> binom_cap(const Rational& h) {
    if (is_integer(h) && sgn(h) >= 0) return to_long(h);
    return std::nullopt;
}

struct PairKeyHash {
    std::size_t operator()(const std::pair<ExpPair, ExpPair>& k) const {
        return hash_value(k.first) * 1000003u + hash_value(k.second);
    }
};

// Coefficients of a(x+w)b(w)c (x>w) and (a(x)b)(w)c (w>x) for basis states a, b, c.
class Triple {
public:
    Triple(const Algebra& alg, std::size_t a, std::size_t b, std::size_t c)
        : alg_(alg), a_(a), b_(b), c_(c), A_(alg.Y(a)), B_(alg.Y(b)) {
        const auto& s = alg.space();
        wa_ = s.state(a).weight;
        wb_ = s.state(b).weight;
        wc_ = s.state(c).weight;
    }

    ExpPair x_floor() const { return -(wa_ + wb_); }  // of (a(x)b)
    ExpPair w_floor() const { return -(wb_ + wc_); }  // of b(w)c
    ExpPair total_weight() const { return wa_ + wb_ + wc_; }

    const StateVector& L(const ExpPair& X, const ExpPair& W) {
        auto key = std::make_pair(X, W);
        auto it = L_.find(key);
        if (it != L_.end()) return it->second;
        StateVector out;
        ExpPair top = W + wb_ + wc_;
        for (long k = 0; k <= to_long(floor_of(top.n)); ++k)
            for (long kb = 0; kb <= to_long(floor_of(top.nbar)); ++kb) {
                ExpPair kk(k, kb);
                const StateVector& bc = B_->apply(kk - W - kOne, c_);
                if (bc.is_zero()) continue;
                Rational c = choose(X.n + k, k) * choose(X.nbar + kb, kb);
                if (sgn(c) == 0) continue;
                out.axpy(c, A_->apply(-X - kOne - kk, bc));
                if (!out.known()) break;
            }
        return L_.emplace(key, std::move(out)).first->second;
    }

    const StateVector& R(const ExpPair& X, const ExpPair& W) {
        auto key = std::make_pair(X, W);
        auto it = R_.find(key);
        if (it != R_.end()) return it->second;
        StateVector out;
        FieldPtr f = inner(X);
        if (!f) out = StateVector::unknown();
        else out = f->apply(-W - kOne, c_);
        return R_.emplace(key, std::move(out)).first->second;
    }

    // [x^X w^W] (x+w)^h_{x>w} L
    StateVector DL(const ExpPair& h, const ExpPair& X, const ExpPair& W) {
        long top[2];
        ExpPair wf = w_floor();
        for (int s = 0; s < 2; ++s) {
            top[s] = to_long(floor_of(W[s] - wf[s]));
            if (auto cap = binom_cap(h[s])) top[s] = std::min(top[s], *cap);
        }
        StateVector out;
        for (long k = 0; k <= top[0]; ++k)
            for (long kb = 0; kb <= top[1]; ++kb) {
                Rational c = choose(h.n, k) * choose(h.nbar, kb);
                if (sgn(c) == 0) continue;
                ExpPair kk(k, kb);
                out.axpy(c, L(X - h + kk, W - kk));
                if (!out.known()) return out;
            }
        return out;
    }

    // [x^X w^W] (x+w)^h_{w>x} R
    StateVector DR(const ExpPair& h, const ExpPair& X, const ExpPair& W) {
        long top[2];
        ExpPair xf = x_floor();
        for (int s = 0; s < 2; ++s) {
            top[s] = to_long(floor_of(X[s] - xf[s]));
            if (auto cap = binom_cap(h[s])) top[s] = std::min(top[s], *cap);
        }
        StateVector out;
        for (long k = 0; k <= top[0]; ++k)
            for (long kb = 0; kb <= top[1]; ++kb) {
                Rational c = choose(h.n, k) * choose(h.nbar, kb);
                if (sgn(c) == 0) continue;
                ExpPair kk(k, kb);
                out.axpy(c, R(X - kk, W - h + kk));
                if (!out.known()) return out;
            }
        return out;
    }

    // Keys (X, W) of the d(w,x) coefficients landing at weight <= out_level.
    std::vector<std::pair<ExpPair, ExpPair>> keys(const ExpPair& h, const Rational& out_level, long margin) const {
        std::vector<std::pair<ExpPair, ExpPair>> out;
        ExpPair xf = x_floor(), wf = w_floor();
        ExpPair xc = -A_->mode_coset().pair();
        ExpPair wcos = -B_->mode_coset().pair();
        for (const auto& T : alg_.space().weights()) {
            if (T.total() > out_level) continue;
            ExpPair S = T - total_weight() + h;
            std::vector<Rational> xs[2];
            bool ok = true;
            for (int s = 0; s < 2; ++s) {
                Rational lo = first_in_coset(xf[s] - margin, xc[s]);
                Rational hi = S[s] - (wf[s] - margin);
                if (frac_of(S[s] - lo) != frac_of(wcos[s])) {
                    ok = false;
                    break;
                }
                for (Rational x = lo; x <= hi; x += 1) xs[s].push_back(x);
            }
            if (!ok) continue;
            for (const auto& x0 : xs[0])
                for (const auto& x1 : xs[1]) {
                    ExpPair X(x0, x1);
                    out.emplace_back(X, S - X);
                }
        }
        return out;
    }

    const ExpPair& wa() const { return wa_; }
    const ExpPair& wc() const { return wc_; }

private:
    struct ChooseKey {
        Rational x;
        long k;
        bool operator==(const ChooseKey& o) const { return k == o.k && x == o.x; }
    };
    struct ChooseHash {
        std::size_t operator()(const ChooseKey& c) const { return hash_value(c.x) * 131u + static_cast<std::size_t>(c.k); }
    };

    const Rational& choose(const Rational& x, long k) {
        ChooseKey key{x, k};
        auto it = binoms_.find(key);
        if (it != binoms_.end()) return it->second;
        return binoms_.emplace(std::move(key), gen_binom(x, static_cast<unsigned long>(k))).first->second;
    }

    FieldPtr inner(const ExpPair& X) {
        auto it = inner_.find(X);
        if (it != inner_.end()) return it->second;
        FieldPtr f = alg_.field_of(A_->apply(-X - kOne, b_), "inner");
        inner_.emplace(X, f);
        return f;
    }

    const Algebra& alg_;
    std::size_t a_, b_, c_;
    FieldPtr A_, B_;
    ExpPair wa_, wb_, wc_;
    std::unordered_map<std::pair<ExpPair, ExpPair>, StateVector, PairKeyHash> L_, R_;
    std::unordered_map<ExpPair, FieldPtr, ExpPairHash> inner_;
    std::unordered_map<ChooseKey, Rational, ChooseHash> binoms_;
};

struct DCheck {
    bool valid = true;
    bool limited = false;
    bool all_zero = true;
    std::size_t keys = 0;
    std::string mismatch;
};

DCheck check_d(const Algebra& alg, Triple& t, const ExpPair& h) {
    DCheck r;
    for (const auto& [X, W] : t.keys(h, alg.window.out_level, 1)) {
        StateVector x = t.DL(h, X, W);
        if (!x.known()) {
            r.limited = true;
            continue;
        }
        StateVector y = t.DR(h, X, W);
        if (!y.known()) {
            r.limited = true;
            continue;
        }
        ++r.keys;
        if (!x.is_zero() || !y.is_zero()) r.all_zero = false;
        if (!(x == y)) {
            r.valid = false;
            r.mismatch = "at x^" + to_string(X) + " w^" + to_string(W) + ": from a(x+w)b(w)c " + alg.show(x) +
                         ", from (a(x)b)(w)c " + alg.show(y);
            return r;
        }
    }
    return r;
}

struct HSearch {
    std::optional<ExpPair> h;  // empty: no constraint (everything vanishes) or failure
    bool failed = false;
    bool limited = false;
    std::size_t keys = 0;
    std::string mismatch;
};

// Minimal h with (x+w)^h L = (x+w)^h R on the window.
// A valid hint is returned as is: it already bounds the pair-level maximum.
// Without descent the first valid h from the weight bound is returned.
HSearch minimal_h(const Algebra& alg, Triple& t, const std::optional<ExpPair>& hint = std::nullopt,
                  bool descend = true) {
    HSearch out;
    if (hint) {
        DCheck r = check_d(alg, t, *hint);
        if (r.valid) {
            out.limited = r.limited;
            out.keys = r.keys;
            if (!r.all_zero) out.h = hint;
            return out;
        }
    }
    ExpPair top = t.wa() + t.wc();
    ExpPair h(first_in_coset(top.n, Rational(0)), first_in_coset(top.nbar, Rational(0)));
    DCheck first = check_d(alg, t, h);
    out.limited = first.limited;
    out.keys = first.keys;
    if (first.valid && first.all_zero) return out;
    if (!first.valid) {
        bool found = false;
        for (const ExpPair& d : {ExpPair(1, 0), ExpPair(0, 1), ExpPair(1, 1), ExpPair(2, 2)}) {
            DCheck r = check_d(alg, t, h + d);
            if (r.valid) {
                h = h + d;
                out.limited |= r.limited;
                found = true;
                break;
            }
        }
        if (!found) {
            out.failed = true;
            out.mismatch = first.mismatch;
            return out;
        }
    }
    Rational floor_h = -(alg.window.out_level + alg.window.level + 2);
    bool moved = descend;
    while (moved) {
        moved = false;
        for (int s = 0; s < 2; ++s)
            while (true) {
                ExpPair cand = h;
                cand[s] -= 1;
                if (cand[s] < floor_h) {
                    out.limited = true;
                    break;
                }
                DCheck r = check_d(alg, t, cand);
                if (!r.valid) break;
                out.limited |= r.limited;
                out.keys = r.keys;
                h = cand;
                moved = true;
            }
    }
    out.h = h;
    return out;
}

Verdict start(const std::string& check, const std::string& instance, const Algebra& alg) {
    Verdict v;
    v.check = check;
    v.instance = instance;
    v.window = to_string(alg.window);
    return v;
}

// Throws NotLocal when the pair has no pole order.
ExpPair pole_order(const Algebra& alg, std::size_t a, std::size_t b, bool& limited) {
    const PoleOrder& p = alg.pole_order(a, b);
    limited |= p.window_limited;
    if (!p.not_local.empty()) throw Error(ErrorKind::NotLocal, p.not_local);
    if (!p.h) throw Error(ErrorKind::WindowTooSmall, "no pole order for " + alg.label(a) + ", " + alg.label(b));
    return *p.h;
}

// Power-series test for p = x^{h_x} w^{h_w} d on the window keys of t.
std::string power_series_violation(const Algebra& alg, Triple& t, const ExpPair& h_ac, const std::optional<ExpPair>& hx,
                                   const std::optional<ExpPair>& hw, bool& limited, std::size_t& compared) {
    for (const auto& [X, W] : t.keys(h_ac, alg.window.out_level, 1)) {
        bool below = false;
        for (int s = 0; s < 2; ++s) {
            if (hx && X[s] < -(*hx)[s]) below = true;
            if (hw && W[s] < -(*hw)[s]) below = true;
        }
        if (!below) continue;
        StateVector x = t.DL(h_ac, X, W);
        if (!x.known()) {
            limited = true;
            continue;
        }
        ++compared;
        if (!x.is_zero()) return "d(w,x) has x^" + to_string(X) + " w^" + to_string(W) + " coefficient " + alg.show(x);
    }
    return {};
}

}  // namespace

Verdict check_duality_direct(const Algebra& alg, std::size_t a, std::size_t c) {
    Verdict v = start("duality-direct", alg.label(a) + "," + alg.label(c), alg);
    v.quantifiers.push_back("all b of weight <= " + to_string(alg.window.level));
    bool limited = false;
    std::optional<ExpPair> hmax;
    for (std::size_t b : alg.space().up_to(alg.window.level)) {
        Triple t(alg, a, b, c);
        HSearch r = minimal_h(alg, t, hmax);
        limited |= r.limited;
        v.compared += r.keys;
        if (r.failed) {
            v.counterexample = "b = " + alg.label(b) + " " + r.mismatch;
            break;
        }
        if (r.h) {
            if (!hmax) hmax = r.h;
            else
                for (int s = 0; s < 2; ++s) (*hmax)[s] = std::max((*hmax)[s], (*r.h)[s]);
        }
    }
    if (hmax) v.data.push_back({"h_ac", to_string(*hmax)});
    v.settle(limited);
    return v;
}

Verdict check_duality_exchange(const Algebra& alg, std::size_t a, std::size_t b) {
    Verdict v = start("duality-exchange", alg.label(a) + "," + alg.label(b), alg);
    v.quantifiers.push_back("all c of weight <= " + to_string(alg.window.level) +
                            "; x^{h_ab} d(w,x) a power series in x");
    bool limited = false;
    ExpPair h_ab;
    try {
        h_ab = pole_order(alg, a, b, limited);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotLocal && e.kind() != ErrorKind::WindowTooSmall) throw;
        // no exponent data from the OPE: fall back to the weight bound
        h_ab = alg.space().state(a).weight + alg.space().state(b).weight;
        limited |= e.kind() == ErrorKind::WindowTooSmall;
    }
    v.data.push_back({"h_ab", to_string(h_ab)});
    for (std::size_t c : alg.space().up_to(alg.window.level)) {
        Triple t(alg, a, b, c);
        // lowest x power of (x+w)^h L does not depend on which valid h is used
        HSearch r = minimal_h(alg, t, std::nullopt, false);
        limited |= r.limited;
        v.compared += r.keys;
        if (r.failed) {
            v.counterexample = "c = " + alg.label(c) + " " + r.mismatch;
            break;
        }
        if (!r.h) continue;
        std::string bad = power_series_violation(alg, t, *r.h, h_ab, std::nullopt, limited, v.compared);
        if (!bad.empty()) {
            v.counterexample = "c = " + alg.label(c) + ": " + bad + " below x^-" + to_string(h_ab);
            break;
        }
    }
    v.settle(limited);
    return v;
}

Verdict check_module_dual(const Algebra& alg) {
    Verdict v = start("module-dual", "V over V", alg);
    const auto& space = alg.space();
    auto states = space.up_to(alg.window.level);
    v.quantifiers.push_back("all triples (a, b, c) of basis states of weight <= " + to_string(alg.window.level) +
                            " with exponent table from pairwise OPEs");
    bool limited = false;
    std::map<std::pair<std::size_t, std::size_t>, ExpPair> table;
    try {
        for (std::size_t a : states)
            for (std::size_t b : states) table[{a, b}] = pole_order(alg, a, b, limited);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotLocal && e.kind() != ErrorKind::WindowTooSmall) throw;
        if (e.kind() == ErrorKind::NotLocal) v.counterexample = std::string("no exponent table: ") + e.what();
        v.settle(true);
        return v;
    }
    v.data.push_back({"pairs", std::to_string(table.size())});
    for (std::size_t a : states) {
        for (std::size_t b : states) {
            for (std::size_t c : states) {
                Triple t(alg, a, b, c);
                const ExpPair& h_ac = table[{a, c}];
                DCheck r = check_d(alg, t, h_ac);
                limited |= r.limited;
                v.compared += r.keys;
                std::string where = "(" + alg.label(a) + ", " + alg.label(b) + ", " + alg.label(c) + ") ";
                if (!r.valid) {
                    v.counterexample = where + "h_ac = " + to_string(h_ac) + " " + r.mismatch;
                    break;
                }
                std::string bad = power_series_violation(alg, t, h_ac, table[{a, b}], table[{b, c}], limited, v.compared);
                if (!bad.empty()) {
                    v.counterexample = where + "p_ijk is not a power series: " + bad;
                    break;
                }
            }
            if (!v.counterexample.empty()) break;
        }
        if (!v.counterexample.empty()) break;
    }
    v.settle(limited);
    return v;
}

Verdict check_pijk_substitution(const Algebra& alg, std::size_t a, std::size_t b, std::size_t c) {
    Verdict v = start("pijk-substitution", alg.label(a) + "," + alg.label(b) + "," + alg.label(c), alg);
    v.quantifiers.push_back("p^ab(w,x) = zeta (-1)^h_ab p^ba(w+x,-x) at total weight <= " +
                            to_string(alg.window.out_level));
    bool limited = false;
    ExpPair h_ab, h_ac, h_bc;
    try {
        h_ab = pole_order(alg, a, b, limited);
        h_ac = pole_order(alg, a, c, limited);
        h_bc = pole_order(alg, b, c, limited);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotLocal && e.kind() != ErrorKind::WindowTooSmall) throw;
        if (e.kind() == ErrorKind::NotLocal) v.counterexample = std::string("no pole orders: ") + e.what();
        v.settle(true);
        return v;
    }
    const auto& space = alg.space();
    Rational sign(supersign(space.state(a).parity, space.state(b).parity) * int_sign(h_ab));
    Triple tab(alg, a, b, c), tba(alg, b, a, c);
    // p^ab_{X,W} = d^ab_{X - h_ab, W - h_bc}; p^ba_{X,Z} = e_{X - h_ab, Z - h_ac}
    auto pab = [&](const ExpPair& X, const ExpPair& W) { return tab.DL(h_ac, X - h_ab, W - h_bc); };
    auto pba = [&](const ExpPair& X, const ExpPair& Z) { return tba.DL(h_bc, X - h_ab, Z - h_ac); };
    ExpPair base = tab.total_weight() - h_ab - h_ac - h_bc;
    for (const auto& T : space.weights()) {
        if (T.total() > alg.window.out_level) continue;
        ExpPair S = T - base;  // X + W per sector
        if (!S.integral() || sgn(S.n) < 0 || sgn(S.nbar) < 0) continue;
        for (long x0 = 0; x0 <= to_long(S.n); ++x0)
            for (long x1 = 0; x1 <= to_long(S.nbar); ++x1) {
                ExpPair X(x0, x1), W = S - X;
                StateVector lhs = pab(X, W);
                StateVector rhs;
                // p^ba(w+x, -x) at x^X w^W: sum_t p^ba_{X-t, W+t} binom(W+t, t) (-1)^{X-t}
                for (long t0 = 0; t0 <= x0; ++t0)
                    for (long t1 = 0; t1 <= x1; ++t1) {
                        ExpPair t(t0, t1);
                        Rational c = binom2(W + t, t0, t1);
                        if ((x0 - t0 + x1 - t1) % 2) c = -c;
                        rhs.axpy(c, pba(X - t, W + t));
                    }
                rhs = rhs.scaled(sign);
                if (!lhs.known() || !rhs.known()) {
                    limited = true;
                    continue;
                }
                ++v.compared;
                if (!(lhs == rhs)) {
                    v.counterexample = "at x^" + to_string(X) + " w^" + to_string(W) + ": p^ab = " + alg.show(lhs) +
                                       ", zeta (-1)^h p^ba(w+x,-x) = " + alg.show(rhs);
                    v.settle(limited);
                    return v;
                }
            }
    }
    v.data.push_back({"h", to_string(h_ab) + " " + to_string(h_ac) + " " + to_string(h_bc)});
    v.settle(limited);
    return v;
}

}  // namespace opea
