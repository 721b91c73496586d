#include "opea/axioms.hpp"

#include <sstream>

namespace opea {

namespace {

const ExpPair kOne(1, 1);

// T^{(i)} Tbar^{(ibar)} v
StateVector divided_powers(const Algebra& alg, const StateVector& v, long i, long ibar) {
    StateVector out = v;
    for (long k = 0; k < i && out.known(); ++k) out = alg.backend.T->apply(out);
    for (long k = 0; k < ibar && out.known(); ++k) out = alg.backend.Tbar->apply(out);
    return out.scaled(divided_scalar(static_cast<unsigned long>(i)) * divided_scalar(static_cast<unsigned long>(ibar)));
}

std::string window_string(const Algebra& alg) { return to_string(alg.window); }

Verdict start(const std::string& check, const std::string& instance, const Algebra& alg) {
    Verdict v;
    v.check = check;
    v.instance = instance;
    v.window = window_string(alg);
    return v;
}

bool is_identity(const Field& f) {
    if (f.name() == "1") return true;
    return false;
}

}  // namespace

const char* to_string(Status s) {
    switch (s) {
        case Status::holds: return "holds";
        case Status::fails: return "fails";
        case Status::window_limited: return "window-limited";
    }
    return "?";
}

void Verdict::settle(bool limited) {
    if (!counterexample.empty()) status = Status::fails;
    else if (limited) status = Status::window_limited;
    else status = Status::holds;
}

FieldPtr Algebra::field_of(const StateVector& v, const std::string& name) const {
    if (!v.known()) return nullptr;
    if (v.is_zero()) return zero_field(backend.space, ExpPair(0, 0), Parity::even);
    std::vector<std::pair<Rational, FieldPtr>> terms;
    for (const auto& [i, c] : v.entries()) {
        FieldPtr f = Y(i);
        if (!f) return nullptr;
        terms.emplace_back(c, f);
    }
    return linear_combination(terms, name);
}

std::string Algebra::show(const StateVector& v) const { return space().show(v); }

const PoleOrder& Algebra::pole_order(std::size_t a, std::size_t b) const {
    FieldPtr A = Y(a), B = Y(b);
    auto key = std::make_tuple(A.get(), B.get(), to_string(window));
    auto it = ope_cache->entries.find(key);
    if (it != ope_cache->entries.end()) return it->second;
    PoleOrder r;
    r.a = A;
    r.b = B;
    try {
        auto ope = extract_reduced_ope(A, B, window);
        r.h = ope.h();
        r.window_limited = ope.window_limited;
        for (const auto& c : ope.certificates) r.compared += c.keys;
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::NotLocal) r.not_local = e.what();
        else if (e.kind() == ErrorKind::WindowTooSmall) r.window_limited = true;
        else throw;
    }
    return ope_cache->entries.emplace(std::move(key), std::move(r)).first->second;
}

Verdict check_creativity(const Algebra& alg, const FieldPtr& a) {
    Verdict v = start("creativity", a->name(), alg);
    v.quantifiers.push_back("modes of " + a->name() + " on the vacuum landing at weight <= " + to_string(alg.window.out_level));
    StateVector s = s1(*a);
    bool limited = !s.known();
    for (const auto& m : modes_between(*a, ExpPair(0, 0), alg.window.out_level)) {
        const StateVector& x = a->apply(m, alg.space().vacuum());
        StateVector want;
        if (m.integral() && m.n <= -1 && m.nbar <= -1)
            want = divided_powers(alg, s, to_long(-1 - m.n), to_long(-1 - m.nbar));
        if (!x.known() || !want.known()) {
            limited = true;
            continue;
        }
        ++v.compared;
        if (!(x == want)) {
            v.counterexample = "mode " + to_string(m) + " on vac: field gives " + alg.show(x) +
                               ", e^{zT} s_1 gives " + alg.show(want);
            break;
        }
    }
    v.settle(limited);
    return v;
}

Verdict check_translation_covariance(const Algebra& alg, const FieldPtr& a) {
    Verdict v = start("translation", a->name(), alg);
    v.quantifiers.push_back("basis vectors of weight <= " + to_string(alg.window.level) +
                            ", both sectors, results at weight <= " + to_string(alg.window.out_level));
    bool limited = false;
    const auto& space = alg.space();
    for (std::size_t j : space.up_to(alg.window.level)) {
        for (int s = 0; s < 2 && v.counterexample.empty(); ++s) {
            const LinearOperator& T = s == 0 ? *alg.backend.T : *alg.backend.Tbar;
            ExpPair e = s == 0 ? ExpPair(1, 0) : ExpPair(0, 1);
            for (const auto& m : modes_between(*a, space.state(j).weight, alg.window.out_level - 1)) {
                StateVector lhs = T.apply(a->apply(m, j));
                lhs.axpy(Rational(-1), a->apply(m, T.apply(j)));
                StateVector rhs = a->apply(m - e, j).scaled(-m[s]);
                if (!lhs.known() || !rhs.known()) {
                    limited = true;
                    continue;
                }
                ++v.compared;
                if (!(lhs == rhs)) {
                    v.counterexample = std::string(s == 0 ? "[T, " : "[Tbar, ") + a->name() + "_" + to_string(m) +
                                       "] on " + space.state(j).label + ": " + alg.show(lhs) + " vs derivative " +
                                       alg.show(rhs);
                    break;
                }
            }
        }
        if (!v.counterexample.empty()) break;
    }
    v.settle(limited);
    return v;
}

Verdict check_completeness(const Algebra& alg, const std::vector<FieldPtr>& generators) {
    std::string names;
    for (const auto& g : generators) names += (names.empty() ? "" : ",") + g->name();
    Verdict v = start("completeness", "{" + names + "}", alg);
    ClosureOptions opt;
    opt.level = alg.window.level;
    opt.locality_window = alg.window;
    Closure cl = dong_closure(generators, alg.backend.space, opt);
    auto basis = alg.space().up_to(alg.window.level);
    v.quantifiers.push_back("s_1 of the Dong closure against " + std::to_string(basis.size()) +
                            " basis states of weight <= " + to_string(alg.window.level));
    v.data.push_back({"closure_fields", std::to_string(cl.fields.size())});
    v.data.push_back({"rank", std::to_string(cl.span.rank())});
    for (std::size_t j : basis) {
        ++v.compared;
        if (!cl.span.express(StateVector::basis(j))) {
            v.counterexample = alg.label(j) + " is not in s_1 of the closure (rank " + std::to_string(cl.span.rank()) +
                               " of " + std::to_string(basis.size()) + ")";
            break;
        }
    }
    v.settle(cl.window_limited && !v.counterexample.empty());
    return v;
}

Verdict check_locality(const Algebra& alg, std::size_t a, std::size_t b) {
    Verdict v = start("locality", alg.label(a) + "," + alg.label(b), alg);
    v.quantifiers.push_back("(z-w)^h a(z)b(w)e = its w>z counterpart for e of weight <= " + to_string(alg.window.level));
    const PoleOrder& p = alg.pole_order(a, b);
    bool limited = p.window_limited;
    v.compared = p.compared;
    if (p.h) v.data.push_back({"h", to_string(*p.h)});
    v.counterexample = p.not_local;
    v.settle(limited);
    return v;
}

Verdict check_skew_symmetry(const Algebra& alg, std::size_t a, std::size_t b) {
    Verdict v = start("skew-symmetry", alg.label(a) + "," + alg.label(b), alg);
    v.quantifiers.push_back("all vn with b_(vn) a at weight <= " + to_string(alg.window.out_level));
    FieldPtr A = alg.Y(a), B = alg.Y(b);
    const auto& space = alg.space();
    const ExpPair& wa = space.state(a).weight;
    const ExpPair& wb = space.state(b).weight;
    Rational zeta(supersign(space.state(a).parity, space.state(b).parity));
    bool limited = false;
    try {
        for (const auto& n : modes_between(*B, wa, alg.window.out_level)) {
            StateVector lhs = B->apply(n, a).scaled(zeta);
            StateVector rhs;
            long top0 = to_long(floor_of(wa.n + wb.n - n.n - 1));
            long top1 = to_long(floor_of(wa.nbar + wb.nbar - n.nbar - 1));
            for (long i = 0; i <= top0; ++i)
                for (long ib = 0; ib <= top1; ++ib) {
                    ExpPair m = n + ExpPair(i, ib);
                    const StateVector& ab = A->apply(m, b);
                    if (ab.is_zero()) continue;
                    rhs.axpy(Rational(int_sign(m)), divided_powers(alg, ab, i, ib));
                }
            if (!lhs.known() || !rhs.known()) {
                limited = true;
                continue;
            }
            ++v.compared;
            if (!(lhs == rhs)) {
                v.counterexample = "vn = " + to_string(n) + ": zeta b_(vn) a = " + alg.show(lhs) +
                                   ", sum (-1)^(vn+vi) T^(vi) a_(vn+vi) b = " + alg.show(rhs);
                break;
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotInVbbK) throw;
        v.counterexample = e.what();
    }
    v.settle(limited);
    return v;
}

Verdict check_identity(const Algebra& alg) {
    Verdict v = start("identity", "1", alg);
    v.quantifiers.push_back("Y(1) = 1(z); a_(-1,-1) 1 = a and 1_(vn) a = delta a for a of weight <= " +
                            to_string(alg.window.level));
    const auto& space = alg.space();
    auto one = identity_field(alg.backend.space);
    auto cmp = compare_fields(*alg.Y(space.vacuum()), *one, alg.window.level, alg.window.out_level);
    v.compared += cmp.compared;
    bool limited = cmp.window_limited;
    if (cmp.mismatch)
        v.counterexample = "Y(1) differs from 1(z) at mode " + to_string(cmp.mismatch->mode) + " on " +
                           alg.label(cmp.mismatch->j);
    for (std::size_t j : space.up_to(alg.window.level)) {
        if (!v.counterexample.empty()) break;
        StateVector x = s1(*alg.Y(j));
        if (!x.known()) {
            limited = true;
            continue;
        }
        ++v.compared;
        if (!(x == StateVector::basis(j))) v.counterexample = "s_1 Y(" + alg.label(j) + ") = " + alg.show(x);
    }
    v.settle(limited);
    return v;
}

Verdict check_morphism(const Algebra& alg, std::size_t a, std::size_t b) {
    Verdict v = start("morphism", alg.label(a) + "," + alg.label(b), alg);
    v.quantifiers.push_back("(a_(vn) b)(z) = a(z)_(vn) b(z) for vn landing at weight <= " +
                            to_string(alg.window.out_level));
    FieldPtr A = alg.Y(a), B = alg.Y(b);
    bool limited = false;
    for (const auto& n : modes_between(*A, alg.space().state(b).weight, alg.window.out_level)) {
        const StateVector& ab = A->apply(n, b);
        FieldPtr lhs = alg.field_of(ab, "Y(" + alg.label(a) + "_" + to_string(n) + alg.label(b) + ")");
        if (!lhs) {
            limited = true;
            continue;
        }
        FieldPtr rhs = general_product(A, n, B, alg.window);
        if (ab.is_zero()) lhs = zero_field(alg.backend.space, rhs->weight(), rhs->parity());
        auto cmp = compare_fields(*lhs, *rhs, alg.window.level, alg.window.out_level);
        limited |= cmp.window_limited;
        v.compared += cmp.compared;
        if (cmp.mismatch) {
            v.counterexample = "vn = " + to_string(n) + ", mode " + to_string(cmp.mismatch->mode) + " on " +
                               alg.label(cmp.mismatch->j) + ": " + alg.show(cmp.mismatch->lhs) + " vs " +
                               alg.show(cmp.mismatch->rhs);
            break;
        }
    }
    v.settle(limited);
    return v;
}

namespace {

// States killed by Tbar (sector 0) or T (sector 1) with zero weight in that sector.
std::vector<std::size_t> chiral_states(const Algebra& alg, int sector) {
    std::vector<std::size_t> out;
    const LinearOperator& D = sector == 0 ? *alg.backend.Tbar : *alg.backend.T;
    for (std::size_t j : alg.space().up_to(alg.window.level)) {
        if (sgn(alg.space().state(j).weight[1 - sector]) != 0) continue;
        if (D.apply(j).is_zero()) out.push_back(j);
    }
    return out;
}

bool in_chiral_part(const Algebra& alg, const StateVector& v, int sector) {
    const LinearOperator& D = sector == 0 ? *alg.backend.Tbar : *alg.backend.T;
    for (const auto& [i, c] : v.entries())
        if (sgn(alg.space().state(i).weight[1 - sector]) != 0) return false;
    return D.apply(v).is_zero();
}

}  // namespace

Verdict check_chiral_subalgebra(const Algebra& alg) {
    Verdict v = start("chiral-subalgebra", "V_z, V_zbar", alg);
    const auto& space = alg.space();
    bool limited = false;
    auto fail = [&](const std::string& s) {
        if (v.counterexample.empty()) v.counterexample = s;
    };
    for (int sector = 0; sector < 2 && v.counterexample.empty(); ++sector) {
        const char* name = sector == 0 ? "V_z" : "V_zbar";
        auto chiral = chiral_states(alg, sector);
        v.quantifiers.push_back(std::string(name) + ": " + std::to_string(chiral.size()) + " states of weight <= " +
                                to_string(alg.window.level));
        if (chiral.empty() || chiral.front() != space.vacuum()) fail(std::string("vacuum is not in ") + name);
        for (std::size_t a : chiral) {
            FieldPtr A = alg.Y(a);
            // a_(vn) b = 0 off the lattice Z x {-1}, for every b
            for (std::size_t b : space.up_to(alg.window.level)) {
                for (const auto& n : modes_between(*A, space.state(b).weight, alg.window.out_level)) {
                    if (n[1 - sector] == -1) continue;
                    const StateVector& x = A->apply(n, b);
                    if (!x.known()) {
                        limited = true;
                        continue;
                    }
                    ++v.compared;
                    if (!x.is_zero())
                        fail(alg.label(a) + "_" + to_string(n) + " " + alg.label(b) + " = " + alg.show(x) +
                             " off the chiral lattice");
                }
            }
            for (std::size_t b : chiral) {
                FieldPtr B = alg.Y(b);
                for (const auto& n : modes_between(*A, space.state(b).weight, alg.window.out_level)) {
                    if (n[1 - sector] != -1 || !is_integer(n[sector])) continue;
                    const StateVector& x = A->apply(n, b);
                    if (!x.known()) {
                        limited = true;
                        continue;
                    }
                    ++v.compared;
                    if (!in_chiral_part(alg, x, sector))
                        fail(alg.label(a) + "_" + to_string(n) + " " + alg.label(b) + " leaves " + name);
                    FieldPtr lhs = alg.field_of(x, "prod");
                    if (!lhs) {
                        limited = true;
                        continue;
                    }
                    FieldPtr rhs = holomorphic_product(A, to_long(n[sector]), B, sector);
                    if (x.is_zero()) lhs = zero_field(alg.backend.space, rhs->weight(), rhs->parity());
                    auto cmp = compare_fields(*lhs, *rhs, alg.window.level, alg.window.out_level);
                    limited |= cmp.window_limited;
                    v.compared += cmp.compared;
                    if (cmp.mismatch)
                        fail("Y(" + alg.label(a) + "_" + to_string(n) + alg.label(b) + ") differs from the residue product at mode " +
                             to_string(cmp.mismatch->mode) + " on " + alg.label(cmp.mismatch->j));
                }
            }
        }
    }
    v.settle(limited);
    return v;
}

Verdict check_vbbk_support(const Algebra& alg) {
    Verdict v = start("vbbk-support", "all pairs", alg);
    v.quantifiers.push_back("nonzero a_(vn) b for a, b of weight <= " + to_string(alg.window.level));
    const auto& space = alg.space();
    std::set<CosetKey> cosets;
    for (std::size_t a : space.up_to(alg.window.level)) {
        FieldPtr A = alg.Y(a);
        for (std::size_t b : space.up_to(alg.window.level))
            for (const auto& n : modes_between(*A, space.state(b).weight, alg.window.out_level)) {
                const StateVector& x = A->apply(n, b);
                if (!x.known() || x.is_zero()) continue;
                ++v.compared;
                cosets.insert(CosetKey::of(n));
                if (!in_vbbk(n) && v.counterexample.empty())
                    v.counterexample = alg.label(a) + "_" + to_string(n) + " " + alg.label(b) + " is nonzero off vbbK";
            }
    }
    std::string cs;
    for (const auto& c : cosets) cs += (cs.empty() ? "" : " ") + to_string(c);
    v.data.push_back({"cosets", cs});
    v.settle(false);
    return v;
}

Verdict check_multiple_locality(const Algebra& alg, const std::vector<FieldPtr>& fields) {
    std::string names;
    std::vector<FieldPtr> rest;
    for (const auto& f : fields) {
        names += (names.empty() ? "" : ",") + f->name();
        if (!is_identity(*f)) rest.push_back(f);
    }
    Verdict v = start("multiple-locality", names, alg);
    if (rest.size() < 2) {
        v.quantifiers.push_back("reduces to fewer than two non-identity fields");
        v.settle(false);
        return v;
    }
    try {
        auto r = verify_multiple_locality(rest, MultiWindow{alg.window.level, alg.window.out_level});
        v.quantifiers.push_back(std::to_string(r.orderings + 1) + " orderings, basis vectors of weight <= " +
                                to_string(alg.window.level));
        v.compared = r.keys;
        if (!r.holds) v.counterexample = r.counterexample;
        std::string hs;
        for (std::size_t i = 0; i < rest.size(); ++i)
            for (std::size_t k = i + 1; k < rest.size(); ++k)
                hs += (hs.empty() ? "" : " ") + std::to_string(i + 1) + std::to_string(k + 1) + ":" + to_string(r.h[i][k]);
        v.data.push_back({"h", hs});
        v.settle(r.window_limited);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NotLocal) throw;
        v.counterexample = e.what();
        v.settle(false);
    }
    return v;
}

Verdict check_singular_support(const Algebra& alg, const std::vector<std::size_t>& states) {
    std::string names;
    std::vector<FieldPtr> fields;
    for (std::size_t s : states) {
        names += (names.empty() ? "" : ",") + alg.label(s);
        fields.push_back(alg.Y(s));
    }
    Verdict v = start("singular-support", names, alg);
    v.quantifiers.push_back("c(z_1..z_r) a for a of weight <= " + to_string(alg.window.level));
    bool limited = false;
    std::vector<std::vector<ExpPair>> h(fields.size(), std::vector<ExpPair>(fields.size(), ExpPair(0, 0)));
    for (std::size_t i = 0; i < fields.size(); ++i)
        for (std::size_t k = i + 1; k < fields.size(); ++k) {
            auto ope = extract_reduced_ope(fields[i], fields[k], alg.window);
            h[i][k] = ope.h();
            limited |= ope.window_limited;
        }
    for (std::size_t a : alg.space().up_to(alg.window.level)) {
        std::vector<ExpPair> bound;
        for (const auto& f : fields) {
            auto ope = extract_reduced_ope(f, alg.Y(a), alg.window);
            limited |= ope.window_limited;
            bound.push_back(-ope.h());
        }
        auto coeffs = multi_coefficients(fields, h, a, alg.window.out_level, &limited);
        for (const auto& [P, x] : coeffs) {
            ++v.compared;
            for (std::size_t i = 0; i < P.size(); ++i)
                for (int s = 0; s < 2; ++s)
                    if (P[i][s] < bound[i][s] && v.counterexample.empty())
                        v.counterexample = "on " + alg.label(a) + " variable " + std::to_string(i + 1) + " has exponent " +
                                           to_string(P[i]) + " below " + to_string(bound[i]);
        }
    }
    v.settle(limited);
    return v;
}

namespace {

std::vector<FieldPtr> probe_products(const Closure& cl, const OpeWindow& win) {
    std::vector<FieldPtr> out;
    for (const auto& f : cl.fields)
        for (const auto& g : cl.fields) {
            ExpPair top = f->weight() + g->weight() - kOne;
            if (f->chirality() == Chirality::mixed) {
                auto ope = std::make_shared<ReducedOpe>(extract_reduced_ope(f, g, win));
                ExpPair base = f->weight() + g->weight() - ope->h();
                for (long k0 = 0; k0 <= 4; ++k0)
                    for (long k1 = 0; k1 <= 4; ++k1) {
                        ExpPair wt = base + ExpPair(k0, k1);
                        if (wt.total() > win.level || sgn(wt.n) < 0 || sgn(wt.nbar) < 0) continue;
                        out.push_back(product_from_ope(ope, ope->h() - kOne - ExpPair(k0, k1), true));
                    }
                continue;
            }
            int s = f->chirality() == Chirality::holomorphic ? 0 : 1;
            Rational lo = top.total() + 1 - win.level;
            for (Rational n = floor_of(top[s]); n >= lo; n -= 1) out.push_back(holomorphic_product(f, to_long(n), g, s));
        }
    return out;
}

}  // namespace

Verdict goddard_probe(const Algebra& alg, const Closure& cl) {
    Verdict v = start("goddard", std::to_string(cl.fields.size()) + " closure fields", alg);
    v.quantifiers.push_back("products f_(n) g of closure fields landing at weight <= " + to_string(alg.window.level) +
                            ": s_1 = 0 forces the zero field");
    bool limited = cl.window_limited;
    // Rank oracle: coefficient data of the closure fields has the same rank as their s_1 images.
    std::map<std::tuple<ExpPair, std::size_t, std::uint32_t>, std::uint32_t> index;
    Span data;
    for (const auto& f : cl.fields) {
        StateVector flat;
        for (std::size_t j : alg.space().up_to(alg.window.level))
            for (const auto& m : modes_between(*f, alg.space().state(j).weight, alg.window.out_level)) {
                const StateVector& x = f->apply(m, j);
                if (!x.known()) {
                    limited = true;
                    continue;
                }
                for (const auto& [i, c] : x.entries()) {
                    auto key = std::make_tuple(m, j, i);
                    auto it = index.find(key);
                    if (it == index.end()) it = index.emplace(key, static_cast<std::uint32_t>(index.size())).first;
                    flat.add_entry(it->second, c);
                }
            }
        data.insert(flat);
    }
    v.data.push_back({"field_rank", std::to_string(data.rank())});
    v.data.push_back({"s1_rank", std::to_string(cl.span.rank())});
    if (data.rank() != cl.span.rank())
        v.counterexample = "field data rank " + std::to_string(data.rank()) + " differs from s_1 rank " +
                           std::to_string(cl.span.rank());
    for (const auto& p : probe_products(cl, alg.window)) {
        if (!v.counterexample.empty()) break;
        StateVector s = s1(*p);
        if (!s.known()) {
            limited = true;
            continue;
        }
        FieldPtr q = cl.field_for(s, p->name());
        if (!q) {
            v.counterexample = p->name() + " leaves s_1 of the closure";
            break;
        }
        if (s.is_zero()) q = zero_field(alg.backend.space, p->weight(), p->parity());
        auto cmp = compare_fields(*p, *q, alg.window.level, alg.window.out_level);
        limited |= cmp.window_limited;
        v.compared += cmp.compared;
        if (cmp.mismatch)
            v.counterexample = p->name() + " minus its s_1 preimage is nonzero at mode " + to_string(cmp.mismatch->mode) +
                               " on " + alg.label(cmp.mismatch->j) + " although s_1 vanishes";
    }
    v.settle(limited);
    return v;
}

Construction construct_by_existence(const Algebra& alg, const std::vector<FieldPtr>& generators) {
    Construction out;
    std::string names;
    for (const auto& g : generators) names += (names.empty() ? "" : ",") + g->name();
    Verdict& v = out.verdict;
    v.check = "construct";
    v.instance = "{" + names + "}";
    v.window = to_string(alg.window);
    bool limited = false;

    // hypotheses on S
    for (const auto& g : generators) {
        for (const Verdict& h : {check_creativity(alg, g), check_translation_covariance(alg, g)}) {
            limited |= h.status == Status::window_limited;
            if (h.status == Status::fails && v.counterexample.empty())
                v.counterexample = "hypothesis " + h.check + " fails for " + g->name() + ": " + h.counterexample;
        }
    }
    for (std::size_t i = 0; i < generators.size(); ++i)
        for (std::size_t k = 0; k < generators.size(); ++k) {
            auto ope = extract_reduced_ope(generators[i], generators[k], alg.window);  // throws NotLocal
            limited |= ope.window_limited;
        }
    v.quantifiers.push_back("S creative, translation covariant and pairwise local");

    ClosureOptions opt;
    opt.level = alg.window.level;
    opt.locality_window = alg.window;
    out.closure = dong_closure(generators, alg.backend.space, opt);
    const Closure& cl = out.closure;
    limited |= cl.window_limited;
    for (std::size_t j : alg.space().up_to(alg.window.level))
        if (!cl.span.express(StateVector::basis(j)))
            throw Error(ErrorKind::NotSpanning, alg.label(j) + " is not reached from {" + names + "} at weight <= " +
                                                    to_string(alg.window.level));
    auto table = std::make_shared<std::map<std::size_t, FieldPtr>>();
    for (std::size_t j : alg.space().up_to(alg.window.level))
        (*table)[j] = cl.field_for(StateVector::basis(j), "Y(" + alg.label(j) + ")");
    out.Y = [table](std::size_t j) -> FieldPtr {
        auto it = table->find(j);
        return it == table->end() ? nullptr : it->second;
    };

    // Y(s_1 a) = a on S, Y(1) = 1(z)
    for (const auto& g : generators) {
        FieldPtr y = cl.field_for(s1(*g), "Y");
        auto cmp = compare_fields(*y, *g, alg.window.level, alg.window.out_level);
        limited |= cmp.window_limited;
        v.compared += cmp.compared;
        if (cmp.mismatch && v.counterexample.empty())
            v.counterexample = "Y(s_1 " + g->name() + ") differs from " + g->name();
    }
    {
        auto cmp = compare_fields(*out.Y(alg.space().vacuum()), *identity_field(alg.backend.space), alg.window.level,
                                  alg.window.out_level);
        if (cmp.mismatch && v.counterexample.empty()) v.counterexample = "Y(1) is not 1(z)";
    }
    v.quantifiers.push_back("Y(s_1 a) = a for a in S and Y(1) = 1(z)");
    // uniqueness: a second construction (the backend's own vertex operators) agrees on the window
    if (alg.Y) {
        for (std::size_t j : alg.space().up_to(alg.window.level)) {
            FieldPtr other = alg.Y(j);
            if (!other) continue;
            auto cmp = compare_fields(*out.Y(j), *other, alg.window.level, alg.window.out_level);
            limited |= cmp.window_limited;
            v.compared += cmp.compared;
            if (cmp.mismatch && v.counterexample.empty())
                v.counterexample = "constructed Y(" + alg.label(j) + ") differs from the backend at mode " +
                                   to_string(cmp.mismatch->mode) + " on " + alg.label(cmp.mismatch->j) + ": " +
                                   alg.show(cmp.mismatch->lhs) + " vs " + alg.show(cmp.mismatch->rhs);
        }
        v.quantifiers.push_back("constructed Y agrees with the backend vertex operators on every basis state of weight <= " +
                                to_string(alg.window.level));
    }
    Verdict g = goddard_probe(alg, cl);
    v.compared += g.compared;
    limited |= g.status == Status::window_limited;
    if (g.status == Status::fails && v.counterexample.empty()) v.counterexample = "Goddard probe: " + g.counterexample;
    v.quantifiers.push_back("s_1 injective on the closure span");
    v.data.push_back({"closure_fields", std::to_string(cl.fields.size())});
    v.settle(limited);
    return out;
}

}  // namespace opea
