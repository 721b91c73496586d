#pragma once

// Truncated formal distributions in up to three two-sector variables.
//
// A distribution stores the coefficients it knows inside a window. The window
// is a box: one exponent interval per component, component c = 2*var + sector.
// Declared support bounds (floor/ceiling per component, degree per sector)
// make keys outside the support known to be zero even when they fall outside
// the window.

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "opea/scalar.hpp"

namespace opea {

enum class Sector { none, z_over_w, w_over_z };
const char* to_string(Sector s);

using Bound = std::optional<Rational>;  // nullopt = unbounded

struct Interval {
    Bound lo;
    Bound hi;

    bool contains(const Rational& e) const {
        return (!lo || *lo <= e) && (!hi || e <= *hi);
    }
    bool empty() const { return lo && hi && *lo > *hi; }
    bool unbounded() const { return !lo && !hi; }
    static Interval intersect(const Interval& a, const Interval& b);
};

std::string to_string(const Interval& iv);

using Key = std::vector<ExpPair>;  // one exponent pair per variable

struct KeyLess {
    bool operator()(const Key& a, const Key& b) const {
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }
};

std::string key_string(const Key& k);

inline bool coef_zero(const Rational& q) { return sgn(q) == 0; }
inline void axpy(Rational& acc, const Rational& s, const Rational& x) { acc += s * x; }
inline std::string coef_string(const Rational& q) { return to_string(q); }

// Union of coset-and-interval clauses over the components of a key.
struct SupportSet {
    struct Clause {
        std::vector<std::optional<Rational>> coset;  // per component, value in [0,1)
        std::vector<Interval> range;                 // per component
    };
    std::vector<Clause> clauses;

    static SupportSet full(std::size_t vars);
    static SupportSet none();
    static SupportSet integral(std::size_t vars);
    bool contains(const Key& k) const;
};

template <class T>
class Distribution {
public:
    explicit Distribution(std::size_t vars = 1)
        : vars_(vars), window_(2 * vars), floor_(2 * vars), ceil_(2 * vars) {}

    std::size_t vars() const { return vars_; }
    std::size_t components() const { return 2 * vars_; }

    Sector sector = Sector::none;

    const Interval& window(std::size_t c) const { return window_[c]; }
    void set_window(std::size_t c, Interval iv) { window_[c] = std::move(iv); }
    const Bound& floor(std::size_t c) const { return floor_[c]; }
    const Bound& ceil(std::size_t c) const { return ceil_[c]; }
    void set_floor(std::size_t c, Bound b) { floor_[c] = std::move(b); }
    void set_ceil(std::size_t c, Bound b) { ceil_[c] = std::move(b); }
    const Bound& degree(int sector) const { return degree_[sector]; }
    void set_degree(int sector, Bound b) { degree_[sector] = std::move(b); }

    static const Rational& component(const Key& k, std::size_t c) { return k[c / 2][int(c % 2)]; }

    // Window with the part below the floor / above the ceiling folded in.
    Interval effective_window(std::size_t c) const {
        Interval iv = window_[c];
        if (iv.empty()) return iv;
        if (iv.lo && floor_[c] && *iv.lo <= *floor_[c]) iv.lo.reset();
        if (iv.hi && ceil_[c] && *iv.hi >= *ceil_[c]) iv.hi.reset();
        return iv;
    }

    bool outside_support(const Key& k) const {
        for (std::size_t c = 0; c < components(); ++c) {
            const Rational& e = component(k, c);
            if ((floor_[c] && e < *floor_[c]) || (ceil_[c] && e > *ceil_[c])) return true;
        }
        for (int s = 0; s < 2; ++s) {
            if (!degree_[s]) continue;
            Rational sum(0);
            for (const auto& p : k) sum += p[s];
            if (sum != *degree_[s]) return true;
        }
        return false;
    }

    bool in_window(const Key& k) const {
        for (std::size_t c = 0; c < components(); ++c)
            if (!window_[c].contains(component(k, c))) return false;
        return true;
    }

    bool known(const Key& k) const { return outside_support(k) || in_window(k); }

    bool fully_known() const {
        for (std::size_t c = 0; c < components(); ++c)
            if (!effective_window(c).unbounded()) return false;
        return true;
    }

    T coefficient(const Key& k) const {
        if (!known(k))
            throw Error(ErrorKind::WindowTooSmall, "coefficient " + key_string(k) + " is outside the window");
        auto it = coeffs_.find(k);
        return it == coeffs_.end() ? T() : it->second;
    }

    // Stores a coefficient; zero coefficients are dropped, keys outside the window ignored.
    void set(const Key& k, T value) {
        if (!in_window(k)) return;
        if (coef_zero(value)) {
            coeffs_.erase(k);
            return;
        }
        coeffs_[k] = std::move(value);
    }

    void accumulate(const Key& k, const Rational& s, const T& x) {
        if (!in_window(k)) return;
        auto it = coeffs_.find(k);
        if (it == coeffs_.end()) {
            T v{};
            axpy(v, s, x);
            if (!coef_zero(v)) coeffs_.emplace(k, std::move(v));
            return;
        }
        axpy(it->second, s, x);
        if (coef_zero(it->second)) coeffs_.erase(it);
    }

    const std::map<Key, T, KeyLess>& terms() const { return coeffs_; }
    bool is_zero() const { return coeffs_.empty(); }

    // For a fully known distribution the stored keys are the whole support:
    // tighten floors, ceilings and degrees to match.
    void tighten_support() {
        if (!fully_known()) return;
        if (coeffs_.empty()) return;
        for (std::size_t c = 0; c < components(); ++c) {
            Rational lo = component(coeffs_.begin()->first, c), hi = lo;
            for (const auto& [k, v] : coeffs_) {
                const Rational& e = component(k, c);
                if (e < lo) lo = e;
                if (e > hi) hi = e;
            }
            floor_[c] = lo;
            ceil_[c] = hi;
        }
        for (int s = 0; s < 2; ++s) {
            std::optional<Rational> d;
            bool same = true;
            for (const auto& [k, v] : coeffs_) {
                Rational sum(0);
                for (const auto& p : k) sum += p[s];
                if (!d) d = sum;
                else if (*d != sum) { same = false; break; }
            }
            if (same) degree_[s] = d;
        }
    }

private:
    std::size_t vars_;
    std::vector<Interval> window_;
    std::vector<Bound> floor_;
    std::vector<Bound> ceil_;
    Bound degree_[2];
    std::map<Key, T, KeyLess> coeffs_;
};

using ScalarDistribution = Distribution<Rational>;

// A fully known distribution with the given terms.
ScalarDistribution polynomial(std::size_t vars, const std::vector<std::pair<Key, Rational>>& terms);
ScalarDistribution monomial(const Key& k, const Rational& coef = Rational(1));

// (z-w)^vh expanded in the given sector, keeping powers of the small variable up to depth.
ScalarDistribution expand_pow(const ExpPair& vh, Sector sector, long depth);

namespace detail {

Interval product_window(const Interval& wa, const Bound& fa, const Bound& ca,
                        const Interval& wb, const Bound& fb, const Bound& cb);
Bound add_bounds(const Bound& a, const Bound& b);
Sector combine_sectors(Sector a, Sector b);

}  // namespace detail

template <class T>
Distribution<T> mul(const ScalarDistribution& a, const Distribution<T>& b) {
    if (a.vars() != b.vars())
        throw Error(ErrorKind::Inconsistent, "mul: variable counts differ");
    Distribution<T> out(a.vars());
    out.sector = detail::combine_sectors(a.sector, b.sector);
    const std::size_t nc = a.components();

    // Summation range per component; unbounded ranges must be closed by homogeneity.
    std::vector<bool> open(nc);
    for (std::size_t c = 0; c < nc; ++c)
        open[c] = (!a.floor(c) && !b.ceil(c)) || (!a.ceil(c) && !b.floor(c));
    for (std::size_t c = 0; c < nc; ++c) {
        if (!open[c] || a.terms().empty() || b.terms().empty()) continue;
        int s = int(c % 2);
        bool closed = false;
        if (a.degree(s) || b.degree(s)) {
            closed = true;
            for (std::size_t d = s; d < nc; d += 2)
                if (d != c && open[d]) closed = false;
        }
        if (!closed)
            throw Error(ErrorKind::InfiniteCoefficientSum,
                        "product coefficient needs infinitely many terms in component " + std::to_string(c));
    }

    for (std::size_t c = 0; c < nc; ++c) {
        Interval iv = detail::product_window(a.effective_window(c), a.floor(c), a.ceil(c),
                                             b.effective_window(c), b.floor(c), b.ceil(c));
        out.set_window(c, iv);
        out.set_floor(c, detail::add_bounds(a.floor(c), b.floor(c)));
        out.set_ceil(c, detail::add_bounds(a.ceil(c), b.ceil(c)));
    }
    for (int s = 0; s < 2; ++s)
        out.set_degree(s, detail::add_bounds(a.degree(s), b.degree(s)));

    for (const auto& [ka, va] : a.terms())
        for (const auto& [kb, vb] : b.terms()) {
            Key k(ka.size());
            for (std::size_t v = 0; v < ka.size(); ++v) k[v] = ka[v] + kb[v];
            out.accumulate(k, va, vb);
        }
    return out;
}

template <class T>
Distribution<T> linear_combination(const Rational& sa, const Distribution<T>& a,
                                   const Rational& sb, const Distribution<T>& b) {
    if (a.vars() != b.vars())
        throw Error(ErrorKind::Inconsistent, "sum: variable counts differ");
    Distribution<T> out(a.vars());
    out.sector = a.sector == b.sector ? a.sector : Sector::none;
    for (std::size_t c = 0; c < a.components(); ++c) {
        out.set_window(c, Interval::intersect(a.effective_window(c), b.effective_window(c)));
        if (a.floor(c) && b.floor(c)) out.set_floor(c, std::min(*a.floor(c), *b.floor(c)));
        if (a.ceil(c) && b.ceil(c)) out.set_ceil(c, std::max(*a.ceil(c), *b.ceil(c)));
    }
    for (int s = 0; s < 2; ++s)
        if (a.degree(s) && b.degree(s) && *a.degree(s) == *b.degree(s)) out.set_degree(s, a.degree(s));
    if (sgn(sa) != 0)
        for (const auto& [k, v] : a.terms()) out.accumulate(k, sa, v);
    if (sgn(sb) != 0)
        for (const auto& [k, v] : b.terms()) out.accumulate(k, sb, v);
    return out;
}

template <class T>
Distribution<T> add(const Distribution<T>& a, const Distribution<T>& b) {
    return linear_combination(Rational(1), a, Rational(1), b);
}

template <class T>
Distribution<T> sub(const Distribution<T>& a, const Distribution<T>& b) {
    return linear_combination(Rational(1), a, Rational(-1), b);
}

// d/dz in component (var, sector), `order` times; divided form includes 1/order!.
template <class T>
Distribution<T> derive(const Distribution<T>& a, std::size_t var, int sector, unsigned long order,
                       bool divided) {
    Distribution<T> out(a.vars());
    out.sector = a.sector;
    const std::size_t cc = 2 * var + sector;
    const Rational k(static_cast<long>(order));
    for (std::size_t c = 0; c < a.components(); ++c) {
        Interval iv = a.effective_window(c);
        Bound f = a.floor(c), g = a.ceil(c);
        if (c == cc) {
            if (iv.lo) *iv.lo -= k;
            if (iv.hi) *iv.hi -= k;
            if (f) *f -= k;
            if (g) *g -= k;
        }
        out.set_window(c, iv);
        out.set_floor(c, f);
        out.set_ceil(c, g);
    }
    for (int s = 0; s < 2; ++s) {
        Bound d = a.degree(s);
        if (d && s == sector) *d -= k;
        out.set_degree(s, d);
    }
    for (const auto& [key, v] : a.terms()) {
        Key nk = key;
        const Rational& e = key[var][sector];
        Rational factor = divided ? gen_binom(e, order) : gen_binom(e, order) / divided_scalar(order);
        if (sgn(factor) == 0) continue;
        nk[var][sector] = e - k;
        out.accumulate(nk, factor, v);
    }
    return out;
}

// Coefficient of z^{-1} in component (var, sector); that component is pinned to exponent 0.
template <class T>
Distribution<T> residue(const Distribution<T>& a, std::size_t var, int sector) {
    const std::size_t cc = 2 * var + sector;
    const Rational minus_one(-1);
    Key probe(a.vars(), ExpPair(0, 0));
    Interval iv = a.effective_window(cc);
    bool usable = iv.contains(minus_one) || (a.floor(cc) && *a.floor(cc) > minus_one) ||
                  (a.ceil(cc) && *a.ceil(cc) < minus_one);
    Distribution<T> out(a.vars());
    out.sector = a.sector;
    for (std::size_t c = 0; c < a.components(); ++c) {
        if (c == cc) {
            out.set_window(c, usable ? Interval{} : Interval{Rational(1), Rational(0)});
            out.set_floor(c, Rational(0));
            out.set_ceil(c, Rational(0));
        } else {
            out.set_window(c, a.effective_window(c));
            out.set_floor(c, a.floor(c));
            out.set_ceil(c, a.ceil(c));
        }
    }
    for (const auto& [key, v] : a.terms()) {
        if (key[var][sector] != minus_one) continue;
        Key nk = key;
        nk[var][sector] = 0;
        out.accumulate(nk, Rational(1), v);
    }
    return out;
}

template <class T>
Distribution<T> restrict_to(const Distribution<T>& a, const SupportSet& s) {
    Distribution<T> out(a.vars());
    out.sector = a.sector;
    for (std::size_t c = 0; c < a.components(); ++c) {
        out.set_window(c, a.effective_window(c));
        out.set_floor(c, a.floor(c));
        out.set_ceil(c, a.ceil(c));
    }
    for (int t = 0; t < 2; ++t) out.set_degree(t, a.degree(t));
    for (const auto& [k, v] : a.terms())
        if (s.contains(k)) out.accumulate(k, Rational(1), v);
    return out;
}

// a(z, w) -> a(z, z) for a two-variable distribution with floors in every
// component (the monomial-times-power-series witness).
template <class T>
Distribution<T> diagonal(const Distribution<T>& a) {
    if (a.vars() != 2) throw Error(ErrorKind::Inconsistent, "diagonal: needs two variables");
    for (std::size_t c = 0; c < 4; ++c)
        if (!a.floor(c))
            throw Error(ErrorKind::NotInBracketSpace,
                        "diagonal: no monomial-times-power-series witness (component " + std::to_string(c) +
                            " is unbounded below)");
    Distribution<T> out(1);
    for (int s = 0; s < 2; ++s) {
        const std::size_t cz = s, cw = 2 + s;
        Interval wz = a.effective_window(cz), ww = a.effective_window(cw);
        Interval iv;
        if (wz.lo || ww.lo) iv = Interval{Rational(1), Rational(0)};
        else {
            if (wz.hi) iv.hi = *wz.hi + *a.floor(cw);
            if (ww.hi) {
                Rational h = *ww.hi + *a.floor(cz);
                if (!iv.hi || h < *iv.hi) iv.hi = h;
            }
        }
        out.set_window(s, iv);
        out.set_floor(s, *a.floor(cz) + *a.floor(cw));
        if (a.ceil(cz) && a.ceil(cw)) out.set_ceil(s, *a.ceil(cz) + *a.ceil(cw));
        if (a.degree(s)) out.set_degree(s, a.degree(s));
    }
    for (const auto& [k, v] : a.terms()) out.accumulate(Key{k[0] + k[1]}, Rational(1), v);
    return out;
}

// a(z + w) = sum_k w^k d^{(k)} a(z) for a one-variable distribution, w-powers up to depth.
ScalarDistribution shift(const ScalarDistribution& a, long depth);

// First key, inside both windows, where a and b differ.
template <class T>
std::optional<Key> first_mismatch(const Distribution<T>& a, const Distribution<T>& b) {
    std::map<Key, bool, KeyLess> keys;
    for (const auto& [k, v] : a.terms()) keys[k] = true;
    for (const auto& [k, v] : b.terms()) keys[k] = true;
    for (const auto& [k, unused] : keys) {
        if (!a.known(k) || !b.known(k)) continue;
        auto ia = a.terms().find(k);
        auto ib = b.terms().find(k);
        if (ia == a.terms().end() || ib == b.terms().end()) return k;
        if (!(ia->second == ib->second)) return k;
    }
    return std::nullopt;
}

std::string component_name(std::size_t vars, std::size_t c);

template <class T>
std::string serialize(const Distribution<T>& a,
                      const std::function<std::string(const T&)>& fmt = [](const T& v) { return coef_string(v); }) {
    std::ostringstream os;
    os << "distribution vars=" << a.vars() << " sector=" << to_string(a.sector) << "\n";
    os << "window";
    for (std::size_t c = 0; c < a.components(); ++c)
        os << " " << component_name(a.vars(), c) << "=" << to_string(a.effective_window(c));
    os << "\n";
    for (const auto& [k, v] : a.terms()) os << key_string(k) << " " << fmt(v) << "\n";
    return os.str();
}

}  // namespace opea
