#include "opea/ope_engine.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

namespace opea {

namespace {

// Smallest x >= lo with x = coset (mod 1).
Rational first_in_coset(const Rational& lo, const Rational& coset) { return lo + frac_of(coset - lo); }

// Upper summation bound for binom(h, k): h itself when h is a nonnegative integer.
std::optional<long> binom_cap(const Rational& h) {
    if (is_integer(h) && sgn(h) >= 0) return to_long(h);
    return std::nullopt;
}

long floor_long(const Rational& q) { return to_long(floor_of(q)); }

ExpPair unit(int sector, long k = 1) { return sector == 0 ? ExpPair(k, 0) : ExpPair(0, k); }

const ExpPair kOne(1, 1);

}  // namespace

std::string to_string(const OpeWindow& w) {
    return "level<=" + to_string(w.level) + " out<=" + to_string(w.out_level);
}

OrderedPair::OrderedPair(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_->space() != b_->space()) throw Error(ErrorKind::Inconsistent, "fields live on different spaces");
}

const StateVector& OrderedPair::forward(const ExpPair& P, const ExpPair& Q, std::size_t j) const {
    Key3 key{P, Q, j};
    auto it = fwd_.find(key);
    if (it != fwd_.end()) return it->second;
    StateVector v = a_->apply(-P - kOne, b_->apply(-Q - kOne, j));
    return fwd_.emplace(std::move(key), std::move(v)).first->second;
}

const StateVector& OrderedPair::reverse(const ExpPair& P, const ExpPair& Q, std::size_t j) const {
    Key3 key{P, Q, j};
    auto it = rev_.find(key);
    if (it != rev_.end()) return it->second;
    StateVector v = b_->apply(-Q - kOne, a_->apply(-P - kOne, j));
    return rev_.emplace(std::move(key), std::move(v)).first->second;
}

ExpPair OrderedPair::z_floor(std::size_t j) const { return -(a_->weight() + a_->space()->state(j).weight); }
ExpPair OrderedPair::w_floor(std::size_t j) const { return -(b_->weight() + b_->space()->state(j).weight); }

CosetKey OrderedPair::p_coset(const ExpPair& h) const { return CosetKey::of(h - a_->mode_coset().pair()); }
CosetKey OrderedPair::q_coset() const { return CosetKey::of(-b_->mode_coset().pair()); }

const std::vector<Rational>& OrderedPair::signed_binoms(const Rational& h, long len) const {
    auto& row = binoms_[h];
    while (static_cast<long>(row.size()) < len) {
        long i = static_cast<long>(row.size());
        row.push_back(i == 0 ? Rational(1) : -row.back() * (h - (i - 1)) / i);
    }
    return row;
}

StateVector OrderedPair::c_forward(const ExpPair& h, const ExpPair& P, const ExpPair& Q, std::size_t j) const {
    // Q - i >= w_floor, otherwise b_{(-Q+i-1)} e_j = 0.
    ExpPair qf = w_floor(j);
    long top[2];
    for (int s = 0; s < 2; ++s) {
        top[s] = floor_long(Q[s] - qf[s]);
        if (auto cap = binom_cap(h[s])) top[s] = std::min(top[s], *cap);
    }
    if (top[0] < 0 || top[1] < 0) return {};
    signed_binoms(h.n, top[0] + 1);
    const auto& c1 = signed_binoms(h.nbar, top[1] + 1);
    const auto& c0 = binoms_.at(h.n);  // fetched after both rows are grown
    StateVector out;
    ExpPair base = P - h;
    for (long i = 0; i <= top[0]; ++i)
        for (long ib = 0; ib <= top[1]; ++ib) {
            ExpPair ii(i, ib);
            const StateVector& x = forward(base + ii, Q - ii, j);
            if (x.is_zero()) continue;
            out.axpy(c0[i] * c1[ib], x);
            if (!out.known()) return out;
        }
    return out;
}

StateVector OrderedPair::c_reverse(const ExpPair& h, const ExpPair& P, const ExpPair& Q, std::size_t j) const {
    ExpPair pf = z_floor(j);
    long top[2];
    for (int s = 0; s < 2; ++s) {
        top[s] = floor_long(P[s] - pf[s]);
        if (auto cap = binom_cap(h[s])) top[s] = std::min(top[s], *cap);
    }
    if (top[0] < 0 || top[1] < 0) return {};
    signed_binoms(h.n, top[0] + 1);
    const auto& c1 = signed_binoms(h.nbar, top[1] + 1);
    const auto& c0 = binoms_.at(h.n);  // fetched after both rows are grown
    Rational sign(zeta() * int_sign(h));
    StateVector out;
    ExpPair base = Q - h;
    for (long i = 0; i <= top[0]; ++i)
        for (long ib = 0; ib <= top[1]; ++ib) {
            ExpPair ii(i, ib);
            const StateVector& x = reverse(P - ii, base + ii, j);
            if (x.is_zero()) continue;
            out.axpy(sign * c0[i] * c1[ib], x);
            if (!out.known()) return out;
        }
    return out;
}

std::vector<std::pair<ExpPair, ExpPair>> OrderedPair::window_keys(const ExpPair& h, std::size_t j,
                                                                  const Rational& out_level) const {
    // A margin below each floor catches terms that only one ordering produces.
    const long margin = 1;
    const ExpPair& w = a_->space()->state(j).weight;
    ExpPair pf = z_floor(j), qf = w_floor(j);
    CosetKey pc = p_coset(h), qc = q_coset();
    std::vector<std::pair<ExpPair, ExpPair>> keys;
    for (const auto& T : a_->space()->weights()) {
        if (T.total() > out_level) continue;
        ExpPair S = T - w - a_->weight() - b_->weight() + h;
        std::vector<Rational> ps[2];
        bool ok = true;
        for (int s = 0; s < 2 && ok; ++s) {
            Rational lo = first_in_coset(pf[s] - margin, pc.pair()[s]);
            Rational hi = S[s] - qf[s] + margin;
            if (frac_of(S[s] - lo) != frac_of(qc.pair()[s])) {
                ok = false;
                break;
            }
            for (Rational p = lo; p <= hi; p += 1) ps[s].push_back(p);
        }
        if (!ok) continue;
        for (const auto& p0 : ps[0])
            for (const auto& p1 : ps[1]) {
                ExpPair P(p0, p1);
                keys.emplace_back(P, S - P);
            }
    }
    return keys;
}

std::string describe(const CoefficientMismatch& m, const GradedSpace& space) {
    return "on " + space.state(m.j).label + " at z^" + to_string(m.P) + " w^" + to_string(m.Q) + ": " +
           space.show(m.lhs) + " vs " + space.show(m.rhs);
}

HCheck check_pole_order(const OrderedPair& pair, const ExpPair& h, std::size_t j, const Rational& out_level) {
    HCheck r;
    for (const auto& [P, Q] : pair.window_keys(h, j, out_level)) {
        StateVector x = pair.c_forward(h, P, Q, j);
        if (!x.known()) {
            r.window_limited = true;
            continue;
        }
        StateVector y = pair.c_reverse(h, P, Q, j);
        if (!y.known()) {
            r.window_limited = true;
            continue;
        }
        ++r.keys;
        if (!x.is_zero() || !y.is_zero()) r.all_zero = false;
        if (!(x == y)) {
            r.valid = false;
            r.mismatch = CoefficientMismatch{j, P, Q, std::move(x), std::move(y)};
            return r;
        }
    }
    return r;
}

ReducedOpe extract_reduced_ope(const FieldPtr& a, const FieldPtr& b, const OpeWindow& window,
                               const std::vector<CosetKey>& hint) {
    ReducedOpe ope;
    auto pair = std::make_shared<OrderedPair>(a, b);
    ope.pair = pair;
    ope.window = window;
    const auto& space = *a->space();

    // c(z,w) gets integral z-exponents when h sits in the mode coset of a.
    CosetKey hc = hint.empty() ? a->mode_coset() : hint.front();
    ExpPair top = a->weight() + b->weight();
    ExpPair h0(first_in_coset(top.n, hc.n), first_in_coset(top.nbar, hc.nbar));
    if (!in_vbbk(h0)) throw Error(ErrorKind::NotInVbbK, "pole order " + to_string(h0) + " is not in the bracket lattice");
    Rational floor_h = -(window.out_level + window.level + 2);

    std::optional<ExpPair> hmax;
    for (std::size_t j : space.up_to(window.level)) {
        VectorCertificate cert;
        cert.j = j;
        if (hmax) {
            // an order already valid here cannot raise the maximum
            HCheck r = check_pole_order(*pair, *hmax, j, window.out_level);
            if (r.valid) {
                cert.window_limited = r.window_limited;
                cert.keys = r.keys;
                cert.h = *hmax;
                ope.window_limited |= cert.window_limited;
                ope.certificates.push_back(cert);
                continue;
            }
        }
        HCheck first = check_pole_order(*pair, h0, j, window.out_level);
        cert.window_limited = first.window_limited;
        cert.keys = first.keys;
        if (first.valid && first.all_zero) {
            ope.window_limited |= cert.window_limited;
            ope.certificates.push_back(cert);
            continue;
        }
        ExpPair h = h0;
        if (!first.valid) {
            bool found = false;
            for (const ExpPair& d : {ExpPair(1, 0), ExpPair(0, 1), ExpPair(1, 1), ExpPair(2, 2)}) {
                HCheck r = check_pole_order(*pair, h0 + d, j, window.out_level);
                if (r.valid) {
                    h = h0 + d;
                    cert.window_limited |= r.window_limited;
                    found = true;
                    break;
                }
            }
            if (!found)
                throw Error(ErrorKind::NotLocal, a->name() + " and " + b->name() + " are not local " +
                                                     describe(*first.mismatch, space));
        }
        bool moved = true;
        while (moved) {
            moved = false;
            for (int s = 0; s < 2; ++s) {
                while (true) {
                    ExpPair cand = h - unit(s);
                    if (cand[s] < floor_h) {
                        cert.window_limited = true;
                        break;
                    }
                    HCheck r = check_pole_order(*pair, cand, j, window.out_level);
                    if (!r.valid) break;
                    cert.window_limited |= r.window_limited;
                    cert.keys = r.keys;
                    h = cand;
                    moved = true;
                }
            }
        }
        cert.h = h;
        if (!hmax) hmax = h;
        else
            for (int s = 0; s < 2; ++s) (*hmax)[s] = std::max((*hmax)[s], h[s]);
        ope.window_limited |= cert.window_limited;
        ope.certificates.push_back(cert);
    }
    ExpPair h = hmax ? *hmax : hc.pair();
    ope.terms.push_back(OpeTerm{h, CosetKey::of(h)});
    return ope;
}

namespace {

int chiral_sector(const Field& f) {
    if (f.chirality() == Chirality::holomorphic) return 0;
    if (f.chirality() == Chirality::antiholomorphic) return 1;
    return -1;
}

ExpPair chiral_mode(const Rational& n, int sector) {
    return sector == 0 ? ExpPair(n, Rational(-1)) : ExpPair(Rational(-1), n);
}

}  // namespace

LocalityOrder locality_order(const FieldPtr& a, const FieldPtr& b, const OpeWindow& window) {
    int s = chiral_sector(*a);
    if (s < 0) throw Error(ErrorKind::Inconsistent, "locality order needs a chiral left field, got " + a->name());
    int o = 1 - s;
    const auto& space = *a->space();
    int zeta = supersign(a->parity(), b->parity());
    LocalityOrder result;
    long nmax = floor_long(a->weight()[s] + b->weight()[s]) + 2;
    for (long N = 0; N <= std::max(nmax, 0L); ++N) {
        bool ok = true;
        bool limited = false;
        for (std::size_t j : space.up_to(window.level)) {
            const ExpPair& w = space.state(j).weight;
            for (const auto& T : space.weights()) {
                if (T.total() > window.out_level) continue;
                Rational S = w[s] + a->weight()[s] + b->weight()[s] - N - 2 - T[s];
                Rational nbar = w[o] + a->weight()[o] + b->weight()[o] - 1 - T[o];
                Rational lo = first_in_coset(S - (b->weight()[s] + w[s] - 1) - 1, a->mode_coset().pair()[s]);
                Rational hi = a->weight()[s] + w[s];
                for (Rational m = lo; m <= hi && ok; m += 1) {
                    Rational n = S - m;
                    StateVector acc;
                    for (long i = 0; i <= N; ++i) {
                        Rational c = gen_binom(Rational(N), i);
                        if (i % 2) c = -c;
                        ExpPair am = chiral_mode(m + N - i, s);
                        ExpPair bm = s == 0 ? ExpPair(n + i, nbar) : ExpPair(nbar, n + i);
                        acc.axpy(c, a->apply(am, b->apply(bm, j)));
                        acc.axpy(-c * zeta, b->apply(bm, a->apply(am, j)));
                    }
                    if (!acc.known()) limited = true;
                    else if (!acc.is_zero()) ok = false;
                }
                if (!ok) break;
            }
            if (!ok) break;
        }
        if (ok) {
            result.N = N;
            result.window_limited = limited;
            return result;
        }
    }
    throw Error(ErrorKind::NotLocal, a->name() + " and " + b->name() + " are not local up to order " +
                                         std::to_string(nmax));
}

FieldPtr zero_field(const SpacePtr& space, const ExpPair& weight, Parity parity) {
    return std::make_shared<FunctionField>(space, "0", weight, parity, Chirality::holomorphic,
                                           CosetKey{Rational(0), Rational(0)},
                                           [](const ExpPair&, std::size_t) { return StateVector(); });
}

namespace {

std::string product_name(const Field& a, const ExpPair& vn, const Field& b) {
    return "(" + a.name() + "_" + to_string(vn) + b.name() + ")";
}

class ResidueProduct : public Field {
public:
    ResidueProduct(FieldPtr a, long n, FieldPtr b, int sector)
        : Field(a->space(), product_name(*a, chiral_mode(Rational(n), sector), *b),
                a->weight() + b->weight() - chiral_mode(Rational(n), sector) - kOne, a->parity() + b->parity(),
                combine(a->chirality(), b->chirality()),
                CosetKey::of(a->mode_coset().pair() + b->mode_coset().pair() - chiral_mode(Rational(n), sector))),
          a_(std::move(a)),
          b_(std::move(b)),
          n_(n),
          s_(sector) {}

protected:
    StateVector compute(const ExpPair& m, std::size_t j) const override {
        const ExpPair& w = space_->state(j).weight;
        const int s = s_;
        int zeta = supersign(a_->parity(), b_->parity());
        StateVector out;
        // a_{(n-i)} b_{(m+i)} e_j vanishes once b_{(m+i)} e_j leaves weight >= 0.
        long top1 = floor_long(w[s] + b_->weight()[s] - m[s] - 1);
        if (n_ >= 0) top1 = std::min(top1, n_);
        for (long i = 0; i <= top1; ++i) {
            Rational c = gen_binom(Rational(n_), i);
            if (sgn(c) == 0) continue;
            if (i % 2) c = -c;
            out.axpy(c, a_->apply(chiral_mode(Rational(n_ - i), s), b_->apply(m + unit(s, i), j)));
            if (!out.known()) return out;
        }
        long top2 = floor_long(w[s] + a_->weight()[s] - 1);
        if (n_ >= 0) top2 = std::min(top2, n_);
        Rational sign(-zeta * ((n_ % 2) ? -1 : 1));
        for (long i = 0; i <= top2; ++i) {
            Rational c = gen_binom(Rational(n_), i);
            if (sgn(c) == 0) continue;
            if (i % 2) c = -c;
            out.axpy(c * sign, b_->apply(m + unit(s, n_ - i), a_->apply(chiral_mode(Rational(i), s), j)));
            if (!out.known()) return out;
        }
        return out;
    }

private:
    FieldPtr a_, b_;
    long n_;
    int s_;
};

class OpeProduct : public Field {
public:
    OpeProduct(std::shared_ptr<const ReducedOpe> ope, ExpPair vn, ExpPair k, bool certify)
        : Field(ope->pair->a()->space(), product_name(*ope->pair->a(), vn, *ope->pair->b()),
                ope->pair->a()->weight() + ope->pair->b()->weight() - vn - kOne,
                ope->pair->a()->parity() + ope->pair->b()->parity(),
                combine(ope->pair->a()->chirality(), ope->pair->b()->chirality()),
                CosetKey::of(ope->pair->a()->mode_coset().pair() + ope->pair->b()->mode_coset().pair() - vn)),
          ope_(std::move(ope)),
          k_(std::move(k)),
          certify_(certify) {}

protected:
    StateVector compute(const ExpPair& m, std::size_t j) const override {
        const OrderedPair& pair = *ope_->pair;
        const ExpPair& h = ope_->h();
        ExpPair R = -m - kOne;
        ExpPair pf = pair.z_floor(j), qf = pair.w_floor(j);
        CosetKey pc = pair.p_coset(h);
        std::vector<Rational> ps[2];
        for (int s = 0; s < 2; ++s)
            for (Rational p = first_in_coset(pf[s], pc.pair()[s]); p <= R[s] + k_[s] - qf[s]; p += 1)
                ps[s].push_back(p);
        StateVector out;
        for (const auto& p0 : ps[0])
            for (const auto& p1 : ps[1]) {
                ExpPair P(p0, p1);
                ExpPair Q = R + k_ - P;
                Rational c = binom2(P, to_long(k_.n), to_long(k_.nbar));
                if (sgn(c) == 0) continue;
                StateVector x = pair.c_forward(h, P, Q, j);
                if (certify_ && x.known()) {
                    StateVector y = pair.c_reverse(h, P, Q, j);
                    if (y.known() && !(x == y))
                        throw Error(ErrorKind::NotLocal,
                                    "OPE of " + pair.a()->name() + " and " + pair.b()->name() + " fails " +
                                        describe(CoefficientMismatch{j, P, Q, x, y}, *space_));
                }
                out.axpy(c, x);
                if (!out.known()) return out;
            }
        return out;
    }

private:
    std::shared_ptr<const ReducedOpe> ope_;
    ExpPair k_;
    bool certify_;
};

}  // namespace

FieldPtr holomorphic_product(const FieldPtr& a, long n, const FieldPtr& b, int sector) {
    return std::make_shared<ResidueProduct>(a, n, b, sector);
}

FieldPtr product_from_ope(const std::shared_ptr<const ReducedOpe>& ope, const ExpPair& vn, bool certify) {
    const auto& a = ope->pair->a();
    const auto& b = ope->pair->b();
    ExpPair k = ope->h() - kOne - vn;
    if (!k.integral() || sgn(k.n) < 0 || sgn(k.nbar) < 0)
        return zero_field(a->space(), a->weight() + b->weight() - vn - kOne, a->parity() + b->parity());
    return std::make_shared<OpeProduct>(ope, vn, k, certify);
}

FieldPtr general_product(const FieldPtr& a, const ExpPair& vn, const FieldPtr& b, const OpeWindow& window,
                         ProductRoute route) {
    int s = chiral_sector(*a);
    if (route == ProductRoute::automatic && s >= 0) {
        const Rational& other = vn[1 - s];
        if (other != -1 || !is_integer(vn[s]))
            return zero_field(a->space(), a->weight() + b->weight() - vn - kOne, a->parity() + b->parity());
        return holomorphic_product(a, to_long(vn[s]), b, s);
    }
    auto ope = std::make_shared<ReducedOpe>(extract_reduced_ope(a, b, window));
    return product_from_ope(ope, vn, true);
}

StateVector s1(const Field& f) { return f.apply(ExpPair(-1, -1), f.space()->vacuum()); }

FieldPtr Closure::field_for(const StateVector& v, const std::string& name) const {
    auto coords = span.express(v);
    if (!coords) return nullptr;
    std::vector<std::pair<Rational, FieldPtr>> terms;
    for (const auto& [id, c] : *coords) {
        if (sgn(c) == 0) continue;
        terms.emplace_back(c, fields[span_id_to_field.at(id)]);
    }
    if (terms.empty()) return zero_field(fields.front()->space(), ExpPair(0, 0), Parity::even);
    return linear_combination(terms, name);
}

namespace {

// Products f_{(vn)} g of total weight <= level, most singular first.
std::vector<FieldPtr> products_up_to(const FieldPtr& f, const FieldPtr& g, const Rational& level,
                                     const OpeWindow& window) {
    std::vector<FieldPtr> out;
    ExpPair top = f->weight() + g->weight() - kOne;
    int s = chiral_sector(*f);
    if (s >= 0) {
        // f_{(n)} g has total weight top.total() + 1 - n.
        Rational lo = top.total() + 1 - level;
        Rational coset = f->mode_coset().pair()[s];
        Rational hi = floor_of(top[s] - coset) + coset;
        for (Rational n = hi; n >= lo; n -= 1) {
            if (!is_integer(n)) continue;
            out.push_back(holomorphic_product(f, to_long(n), g, s));
        }
        return out;
    }
    auto ope = std::make_shared<ReducedOpe>(extract_reduced_ope(f, g, window));
    ExpPair base = f->weight() + g->weight() - ope->h();
    for (long kt = 0;; ++kt) {
        if (base.total() + kt > level) break;
        for (long k0 = 0; k0 <= kt; ++k0) {
            ExpPair k(k0, kt - k0);
            ExpPair wt = base + k;
            if (sgn(wt.n) < 0 || sgn(wt.nbar) < 0) continue;
            out.push_back(product_from_ope(ope, ope->h() - kOne - k, true));
        }
    }
    return out;
}

}  // namespace

Closure dong_closure(const std::vector<FieldPtr>& generators, const SpacePtr& space, const ClosureOptions& options) {
    Closure cl;
    auto add = [&](const FieldPtr& f, const std::string& origin) {
        StateVector v = s1(*f);
        if (!v.known()) {
            cl.window_limited = true;
            return false;
        }
        std::size_t id = cl.span.inserted();
        if (!cl.span.insert(v)) return false;
        cl.span_id_to_field[id] = cl.fields.size();
        cl.fields.push_back(f);
        cl.states.push_back(std::move(v));
        cl.origin.push_back(origin);
        return true;
    };
    add(identity_field(space), "1");
    for (const auto& g : generators)
        if (!add(g, "generator " + g->name()))
            cl.issues.push_back({"generator " + g->name() + " is dependent on earlier fields"});

    for (std::size_t i = 0; i < cl.fields.size(); ++i) {
        FieldPtr g = cl.fields[i];
        for (const auto& f : generators) {
            for (const auto& p : products_up_to(f, g, options.level, options.locality_window)) {
                ++cl.products_explored;
                add(p, p->name());
            }
        }
    }

    if (options.verify_products) {
        const auto& win = options.locality_window;
        for (const auto& f : cl.fields)
            for (const auto& g : cl.fields)
                for (const auto& p : products_up_to(f, g, options.level, win)) {
                    StateVector v = s1(*p);
                    if (!v.known()) {
                        cl.window_limited = true;
                        continue;
                    }
                    ++cl.pairs_verified;
                    FieldPtr q = cl.field_for(v, p->name());
                    if (!q) {
                        cl.issues.push_back({p->name() + " leaves the span of the closure"});
                        continue;
                    }
                    if (v.is_zero()) q = zero_field(space, p->weight(), p->parity());
                    auto cmp = compare_fields(*p, *q, win.level, win.out_level);
                    cl.window_limited |= cmp.window_limited;
                    if (cmp.mismatch)
                        cl.issues.push_back({p->name() + " differs from its s_1 preimage at mode " +
                                             to_string(cmp.mismatch->mode) + " on " +
                                             space->state(cmp.mismatch->j).label});
                }
    }
    if (options.verify_locality) {
        for (const auto& f : cl.fields)
            for (const auto& g : cl.fields) {
                try {
                    auto ope = extract_reduced_ope(f, g, options.locality_window);
                    cl.window_limited |= ope.window_limited;
                    ++cl.pairs_verified;
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NotLocal) throw;
                    cl.issues.push_back({e.what()});
                }
            }
    }
    return cl;
}

namespace {

class MultiContext {
public:
    MultiContext(const std::vector<FieldPtr>& fields, const std::vector<std::vector<ExpPair>>& h, std::size_t j)
        : f_(fields), h_(h), j_(j), space_(*fields.front()->space()) {
        for (std::size_t i = 0; i < f_.size(); ++i)
            for (std::size_t k = i + 1; k < f_.size(); ++k) pairs_.emplace_back(i, k);
    }

    // [prod z^P] zeta_sigma prod (z_i - z_k)^{h_ik}_sigma a^{sigma 1}(z_{sigma 1}) ... e_j
    StateVector coefficient(const std::vector<std::size_t>& sigma, const std::vector<ExpPair>& P) {
        const std::size_t r = f_.size();
        std::vector<std::size_t> pos(r);
        for (std::size_t t = 0; t < r; ++t) pos[sigma[t]] = t;
        std::vector<Parity> par;
        for (const auto& f : f_) par.push_back(f->parity());
        int zeta = koszul_sign(sigma, par);

        const std::size_t np = pairs_.size();
        std::vector<long> caps(2 * np);
        long cap = floor_long(space_.truncation()) + 4;
        for (std::size_t p = 0; p < np; ++p)
            for (int s = 0; s < 2; ++s) {
                auto c = binom_cap(h_[pairs_[p].first][pairs_[p].second][s]);
                caps[2 * p + s] = c ? *c : cap;
            }
        StateVector out;
        std::vector<long> k(2 * np, 0);
        std::function<void(std::size_t)> rec = [&](std::size_t idx) {
            if (!out.known()) return;
            if (idx == k.size()) {
                Rational coef(zeta);
                std::vector<ExpPair> Pp = P;
                for (std::size_t p = 0; p < np; ++p) {
                    auto [i, l] = pairs_[p];
                    const ExpPair& hh = h_[i][l];
                    ExpPair kk(k[2 * p], k[2 * p + 1]);
                    coef *= binom2(hh, k[2 * p], k[2 * p + 1]);
                    if ((k[2 * p] + k[2 * p + 1]) % 2) coef = -coef;
                    bool i_dominant = pos[i] < pos[l];
                    std::size_t big = i_dominant ? i : l, small = i_dominant ? l : i;
                    if (!i_dominant) coef *= int_sign(hh);
                    Pp[big] = Pp[big] - (hh - kk);
                    Pp[small] = Pp[small] - kk;
                }
                if (sgn(coef) == 0) return;
                out.axpy(coef, ordered(sigma, Pp));
                return;
            }
            for (long v = 0; v <= caps[idx]; ++v) {
                k[idx] = v;
                rec(idx + 1);
                if (!out.known()) return;
            }
            k[idx] = 0;
        };
        rec(0);
        return out;
    }

private:
    // [prod z^P'] a^{sigma 1}(z_{sigma 1}) ... a^{sigma r}(z_{sigma r}) e_j
    StateVector ordered(const std::vector<std::size_t>& sigma, const std::vector<ExpPair>& P) {
        ExpPair w = space_.state(j_).weight;
        for (std::size_t t = sigma.size(); t-- > 0;) {
            w = w + f_[sigma[t]]->weight() + P[sigma[t]];
            if (sgn(w.n) < 0 || sgn(w.nbar) < 0) return {};
        }
        auto key = std::make_pair(sigma, P);
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        StateVector v = StateVector::basis(j_);
        for (std::size_t t = sigma.size(); t-- > 0;) {
            v = f_[sigma[t]]->apply(-P[sigma[t]] - kOne, v);
            if (v.is_zero() || !v.known()) break;
        }
        memo_.emplace(std::move(key), v);
        return v;
    }

    const std::vector<FieldPtr>& f_;
    const std::vector<std::vector<ExpPair>>& h_;
    std::size_t j_;
    const GradedSpace& space_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::map<std::pair<std::vector<std::size_t>, std::vector<ExpPair>>, StateVector> memo_;
};

std::vector<std::vector<ExpPair>> multi_keys(const std::vector<FieldPtr>& fields,
                                             const std::vector<std::vector<ExpPair>>& h, std::size_t j,
                                             const Rational& out_level) {
    const auto& space = *fields.front()->space();
    const std::size_t r = fields.size();
    const long margin = 0;
    const ExpPair& w = space.state(j).weight;
    ExpPair hsum(0, 0), asum(0, 0);
    for (std::size_t i = 0; i < r; ++i) {
        asum = asum + fields[i]->weight();
        for (std::size_t k = i + 1; k < r; ++k) hsum = hsum + h[i][k];
    }
    std::vector<ExpPair> lo(r);
    for (std::size_t i = 0; i < r; ++i) {
        ExpPair c = -fields[i]->mode_coset().pair();
        for (std::size_t k = i + 1; k < r; ++k) c = c + h[i][k];
        ExpPair f = -(fields[i]->weight() + w);
        for (int s = 0; s < 2; ++s) lo[i][s] = first_in_coset(f[s] - margin, frac_of(c[s]));
    }
    std::vector<std::vector<ExpPair>> keys;
    for (const auto& T : space.weights()) {
        if (T.total() > out_level) continue;
        ExpPair S = T - w - asum + hsum;
        // Compositions of S into r parts above lo, per sector.
        std::vector<std::vector<Rational>> comps[2];
        bool ok = true;
        for (int s = 0; s < 2 && ok; ++s) {
            Rational rest = S[s];
            for (std::size_t i = 0; i < r; ++i) rest -= lo[i][s];
            if (sgn(rest) < 0 || !is_integer(rest)) {
                ok = false;
                break;
            }
            long total = to_long(rest);
            std::vector<long> parts(r, 0);
            std::function<void(std::size_t, long)> rec = [&](std::size_t i, long left) {
                if (i + 1 == r) {
                    parts[i] = left;
                    std::vector<Rational> c(r);
                    for (std::size_t t = 0; t < r; ++t) c[t] = lo[t][s] + parts[t];
                    comps[s].push_back(std::move(c));
                    return;
                }
                for (long v = 0; v <= left; ++v) {
                    parts[i] = v;
                    rec(i + 1, left - v);
                }
            };
            rec(0, total);
        }
        if (!ok) continue;
        for (const auto& c0 : comps[0])
            for (const auto& c1 : comps[1]) {
                std::vector<ExpPair> P(r);
                for (std::size_t i = 0; i < r; ++i) P[i] = ExpPair(c0[i], c1[i]);
                keys.push_back(std::move(P));
            }
    }
    return keys;
}

std::vector<std::vector<ExpPair>> pairwise_orders(const std::vector<FieldPtr>& fields, const OpeWindow& win,
                                                  bool* limited) {
    std::vector<std::vector<ExpPair>> h(fields.size(), std::vector<ExpPair>(fields.size(), ExpPair(0, 0)));
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t k = i + 1; k < fields.size(); ++k) {
            auto ope = extract_reduced_ope(fields[i], fields[k], win);
            h[i][k] = ope.h();
            if (ope.window_limited && limited) *limited = true;
        }
    return h;
}

}  // namespace

std::map<std::vector<ExpPair>, StateVector> multi_coefficients(const std::vector<FieldPtr>& fields,
                                                               const std::vector<std::vector<ExpPair>>& h,
                                                               std::size_t j, const Rational& out_level,
                                                               bool* window_limited) {
    MultiContext ctx(fields, h, j);
    std::vector<std::size_t> id(fields.size());
    std::iota(id.begin(), id.end(), 0);
    std::map<std::vector<ExpPair>, StateVector> out;
    for (auto& P : multi_keys(fields, h, j, out_level)) {
        StateVector v = ctx.coefficient(id, P);
        if (!v.known()) {
            if (window_limited) *window_limited = true;
            continue;
        }
        if (!v.is_zero()) out.emplace(std::move(P), std::move(v));
    }
    return out;
}

MultiLocalityResult verify_multiple_locality(const std::vector<FieldPtr>& fields, const MultiWindow& window) {
    if (fields.size() < 2 || fields.size() > 3)
        throw Error(ErrorKind::InvalidSpec, "multiple locality is checked for two or three fields");
    MultiLocalityResult res;
    OpeWindow pw{window.level, window.out_level};
    res.h = pairwise_orders(fields, pw, &res.window_limited);
    const auto& space = *fields.front()->space();
    std::vector<std::size_t> id(fields.size());
    std::iota(id.begin(), id.end(), 0);
    for (std::size_t j : space.up_to(window.level)) {
        MultiContext ctx(fields, res.h, j);
        auto keys = multi_keys(fields, res.h, j, window.out_level);
        std::vector<std::size_t> sigma = id;
        while (std::next_permutation(sigma.begin(), sigma.end())) {
            if (j == space.up_to(window.level).front()) ++res.orderings;
            for (const auto& P : keys) {
                StateVector x = ctx.coefficient(id, P);
                StateVector y = ctx.coefficient(sigma, P);
                if (!x.known() || !y.known()) {
                    res.window_limited = true;
                    continue;
                }
                ++res.keys;
                if (!(x == y)) {
                    res.holds = false;
                    std::ostringstream os;
                    os << "ordering (";
                    for (std::size_t t = 0; t < sigma.size(); ++t) os << (t ? "," : "") << sigma[t] + 1;
                    os << ") on " << space.state(j).label << " at";
                    for (const auto& p : P) os << " " << to_string(p);
                    auto labels = space.labels();
                    os << ": " << to_string(x, labels) << " vs " << to_string(y, labels);
                    res.counterexample = os.str();
                    return res;
                }
            }
        }
    }
    return res;
}

}  // namespace opea
