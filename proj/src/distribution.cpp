#include "opea/distribution.hpp"

namespace opea {

const char* to_string(Sector s) {
    switch (s) {
        case Sector::z_over_w: return "z>w";
        case Sector::w_over_z: return "w>z";
        default: return "none";
    }
}

Interval Interval::intersect(const Interval& a, const Interval& b) {
    Interval r = a;
    if (b.lo && (!r.lo || *b.lo > *r.lo)) r.lo = b.lo;
    if (b.hi && (!r.hi || *b.hi < *r.hi)) r.hi = b.hi;
    return r;
}

std::string to_string(const Interval& iv) {
    if (iv.empty()) return "empty";
    std::string s = iv.lo ? "[" + to_string(*iv.lo) : "(-inf";
    s += ",";
    s += iv.hi ? to_string(*iv.hi) + "]" : "+inf)";
    return s;
}

std::string key_string(const Key& k) {
    std::string s = "(";
    for (std::size_t v = 0; v < k.size(); ++v) {
        if (v) s += ";";
        s += to_string(k[v].n) + "," + to_string(k[v].nbar);
    }
    return s + ")";
}

std::string component_name(std::size_t vars, std::size_t c) {
    static const char* names3[] = {"z", "zbar", "w", "wbar", "x", "xbar"};
    if (vars <= 3) return names3[c];
    return "c" + std::to_string(c);
}

SupportSet SupportSet::full(std::size_t vars) {
    SupportSet s;
    s.clauses.push_back({std::vector<std::optional<Rational>>(2 * vars), std::vector<Interval>(2 * vars)});
    return s;
}

SupportSet SupportSet::none() { return {}; }

SupportSet SupportSet::integral(std::size_t vars) {
    SupportSet s = full(vars);
    for (auto& c : s.clauses[0].coset) c = Rational(0);
    return s;
}

bool SupportSet::contains(const Key& k) const {
    for (const auto& cl : clauses) {
        bool ok = true;
        for (std::size_t c = 0; ok && c < cl.range.size(); ++c) {
            const Rational& e = k[c / 2][int(c % 2)];
            if (cl.coset[c] && frac_of(e) != *cl.coset[c]) ok = false;
            else if (!cl.range[c].contains(e)) ok = false;
        }
        if (ok) return true;
    }
    return false;
}

ScalarDistribution polynomial(std::size_t vars, const std::vector<std::pair<Key, Rational>>& terms) {
    ScalarDistribution d(vars);
    for (const auto& [k, v] : terms) d.accumulate(k, Rational(1), v);
    d.tighten_support();
    return d;
}

ScalarDistribution monomial(const Key& k, const Rational& coef) {
    return polynomial(k.size(), {{k, coef}});
}

ScalarDistribution expand_pow(const ExpPair& vh, Sector sector, long depth) {
    if (sector == Sector::none) throw Error(ErrorKind::SectorMismatch, "expand_pow needs a sector");
    int overall = 1;
    if (sector == Sector::w_over_z) overall = int_sign(vh);
    // big = expanded in negative powers, small = power-series variable
    const std::size_t big = sector == Sector::z_over_w ? 0 : 1;
    const std::size_t small = 1 - big;
    ScalarDistribution d(2);
    d.sector = sector;
    for (int s = 0; s < 2; ++s) {
        const Rational& h = vh[s];
        d.set_window(2 * small + s, Interval{Rational(0), Rational(depth)});
        d.set_floor(2 * small + s, Rational(0));
        d.set_ceil(2 * big + s, h);
        d.set_degree(s, h);
        if (is_integer(h) && sgn(h) >= 0) {
            d.set_ceil(2 * small + s, h);
            d.set_floor(2 * big + s, Rational(0));
        }
    }
    for (long i = 0; i <= depth; ++i) {
        Rational bi = gen_binom(vh.n, static_cast<unsigned long>(i));
        if (sgn(bi) == 0) continue;
        for (long j = 0; j <= depth; ++j) {
            Rational c = bi * gen_binom(vh.nbar, static_cast<unsigned long>(j));
            if (sgn(c) == 0) continue;
            if ((i + j) % 2) c = -c;
            if (overall < 0) c = -c;
            Key k(2);
            k[big] = ExpPair(vh.n - i, vh.nbar - j);
            k[small] = ExpPair(i, j);
            d.accumulate(k, Rational(1), c);
        }
    }
    return d;
}

namespace detail {

Bound add_bounds(const Bound& a, const Bound& b) {
    if (a && b) return *a + *b;
    return std::nullopt;
}

Sector combine_sectors(Sector a, Sector b) {
    if (a == Sector::none) return b;
    if (b == Sector::none || a == b) return a;
    throw Error(ErrorKind::SectorMismatch, "cannot multiply z>w and w>z expansions");
}

namespace {

// Lower bound on e from: max(f, e - c) >= lo.
struct Req {
    bool never = false;
    Bound lo, hi;
};

void need_lower(Req& r, const Bound& lo, const Bound& f, const Bound& c) {
    if (!lo) return;
    if (f && *f >= *lo) return;
    if (!c) { r.never = true; return; }
    Rational b = *lo + *c;
    if (!r.lo || b > *r.lo) r.lo = b;
}

void need_upper(Req& r, const Bound& hi, const Bound& c, const Bound& f) {
    if (!hi) return;
    if (c && *c <= *hi) return;
    if (!f) { r.never = true; return; }
    Rational b = *hi + *f;
    if (!r.hi || b < *r.hi) r.hi = b;
}

}  // namespace

// Exponents e of the product whose coefficient only involves known factor
// coefficients: every split e = e1 + e2 with e1 in [fa, ca], e2 in [fb, cb]
// must have e1 in wa and e2 in wb.
Interval product_window(const Interval& wa, const Bound& fa, const Bound& ca,
                        const Interval& wb, const Bound& fb, const Bound& cb) {
    if (wa.empty() || wb.empty()) return Interval{Rational(1), Rational(0)};
    Req r;
    need_lower(r, wa.lo, fa, cb);
    need_upper(r, wa.hi, ca, fb);
    need_lower(r, wb.lo, fb, ca);
    need_upper(r, wb.hi, cb, fa);
    if (r.never) return Interval{Rational(1), Rational(0)};
    return Interval{r.lo, r.hi};
}

}  // namespace detail

ScalarDistribution shift(const ScalarDistribution& a, long depth) {
    if (a.vars() != 1) throw Error(ErrorKind::Inconsistent, "shift: needs a one-variable distribution");
    bool poly = a.fully_known();
    for (const auto& [k, v] : a.terms())
        for (int s = 0; s < 2; ++s)
            if (!is_integer(k[0][s]) || sgn(k[0][s]) < 0) poly = false;
    ScalarDistribution d(2);
    for (int s = 0; s < 2; ++s) {
        if (poly) {
            d.set_floor(s, Rational(0));
            d.set_floor(2 + s, Rational(0));
            if (a.ceil(s)) {
                d.set_ceil(s, a.ceil(s));
                d.set_ceil(2 + s, a.ceil(s));
            }
            continue;
        }
        Interval iv = a.effective_window(s);
        if (iv.hi) *iv.hi -= depth;
        d.set_window(s, iv);
        d.set_ceil(s, a.ceil(s));
        d.set_window(2 + s, Interval{Rational(0), Rational(depth)});
        d.set_floor(2 + s, Rational(0));
    }
    long limit = depth;
    if (poly) {
        limit = 0;
        for (const auto& [k, v] : a.terms())
            for (int s = 0; s < 2; ++s) limit = std::max(limit, to_long(k[0][s]));
    }
    for (const auto& [k, v] : a.terms()) {
        for (long i = 0; i <= limit; ++i) {
            Rational bi = gen_binom(k[0].n, static_cast<unsigned long>(i));
            if (sgn(bi) == 0) continue;
            for (long j = 0; j <= limit; ++j) {
                Rational c = bi * gen_binom(k[0].nbar, static_cast<unsigned long>(j));
                if (sgn(c) == 0) continue;
                Key nk{ExpPair(k[0].n - i, k[0].nbar - j), ExpPair(i, j)};
                d.accumulate(nk, c, v);
            }
        }
    }
    if (poly) d.tighten_support();
    else if (a.terms().size() == 1)
        for (int s = 0; s < 2; ++s) d.set_degree(s, a.terms().begin()->first[0][s]);
    return d;
}

}  // namespace opea
