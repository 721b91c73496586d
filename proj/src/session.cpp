#include "opea/session.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>

#include <json.hpp>

namespace opea {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

const std::vector<std::string> kChecks = {
    "identity",         "creativity",        "translation",       "completeness",     "locality",
    "skew-symmetry",    "morphism",          "chiral-subalgebra", "vbbk-support",     "multiple-locality",
    "singular-support", "duality-direct",    "duality-exchange",  "module-dual",      "pijk-substitution",
    "existence",        "prop-skew",         "prop-dual-loc",     "prop-dual-skew",
};

std::string sha256_hex(const std::string& data) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
    std::ostringstream s;
    for (unsigned int i = 0; i < len; ++i) s << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return s.str();
}

const char* chirality_name(Chirality c) {
    switch (c) {
        case Chirality::holomorphic: return "holomorphic";
        case Chirality::antiholomorphic: return "antiholomorphic";
        case Chirality::mixed: return "mixed";
    }
    return "?";
}

const char* parity_name(Parity p) { return p == Parity::odd ? "odd" : "even"; }

// Status of "premise => conclusion" on one instance.
Verdict implication(const std::string& check, const std::string& instance, const std::string& window,
                    const std::vector<const Verdict*>& premises, const Verdict& conclusion) {
    Verdict v;
    v.check = check;
    v.instance = instance;
    v.window = window;
    std::string p;
    bool all = true, limited = false;
    for (const Verdict* x : premises) {
        p += (p.empty() ? "" : " and ") + x->check + "(" + x->instance + ")";
        all &= x->holds();
        limited |= x->status == Status::window_limited;
        v.data.push_back({x->check + "(" + x->instance + ")", to_string(x->status)});
    }
    v.data.push_back({conclusion.check + "(" + conclusion.instance + ")", to_string(conclusion.status)});
    v.quantifiers.push_back(p + " implies " + conclusion.check + "(" + conclusion.instance + ")");
    if (all && conclusion.status == Status::fails)
        v.counterexample = "falsified: premises hold but " + conclusion.check + " fails: " + conclusion.counterexample;
    v.settle(all ? conclusion.status == Status::window_limited : limited);
    return v;
}

}  // namespace

const char* tool_version() { return "0.1.0"; }

bool Report::all_hold() const {
    return std::all_of(runs.begin(), runs.end(), [](const CheckRun& r) { return r.verdict.holds(); });
}

std::string Report::render(const std::string& format, bool timing) const {
    std::size_t holds = 0, fails = 0, limited = 0;
    for (const auto& r : runs) {
        if (r.verdict.status == Status::holds) ++holds;
        if (r.verdict.status == Status::fails) ++fails;
        if (r.verdict.status == Status::window_limited) ++limited;
    }
    std::ostringstream out;
    if (format == "json-lines") {
        using nlohmann::ordered_json;
        ordered_json head;
        head["record"] = "header";
        head["tool"] = "opea";
        head["version"] = version;
        head["spec_sha256"] = digest;
        head["seed"] = seed;
        out << head.dump() << "\n";
        for (const auto& r : runs) {
            const Verdict& v = r.verdict;
            ordered_json j;
            j["record"] = "verdict";
            j["check"] = v.check;
            j["instance"] = v.instance;
            j["status"] = to_string(v.status);
            j["window"] = v.window;
            j["quantifiers"] = v.quantifiers;
            j["compared"] = v.compared;
            j["counterexample"] = v.counterexample.empty() ? ordered_json(nullptr) : ordered_json(v.counterexample);
            ordered_json data = ordered_json::object();
            for (const auto& [k, x] : v.data) data[k] = x;
            j["data"] = data;
            if (timing) j["seconds"] = r.seconds;
            out << j.dump() << "\n";
        }
        ordered_json tail;
        tail["record"] = "summary";
        tail["verdicts"] = runs.size();
        tail["holds"] = holds;
        tail["fails"] = fails;
        tail["window_limited"] = limited;
        tail["exit"] = all_hold() ? 0 : 1;
        out << tail.dump() << "\n";
        return out.str();
    }
    out << "opea " << version << "  spec sha256 " << digest << "  seed " << seed << "\n";
    std::map<std::string, double> per_check;
    std::vector<std::string> order;
    for (const auto& r : runs) {
        const Verdict& v = r.verdict;
        if (!per_check.count(v.check)) order.push_back(v.check);
        per_check[v.check] += r.seconds;
        const char* tag = v.status == Status::holds ? "holds" : v.status == Status::fails ? "FAILS" : "LIMITED";
        out << "[" << tag << "] " << v.check << " " << v.instance << "  (" << v.window << ", " << v.compared
            << " compared)\n";
        if (!v.counterexample.empty()) out << "    counterexample: " << v.counterexample << "\n";
        if (v.status != Status::holds)
            for (const auto& q : v.quantifiers) out << "    for " << q << "\n";
    }
    out << "timing:";
    for (const auto& c : order) {
        std::ostringstream t;
        t << std::fixed << std::setprecision(2) << per_check[c];
        out << " " << c << " " << t.str() << "s";
    }
    out << "\nsummary: " << runs.size() << " verdicts, " << holds << " hold, " << fails << " fail, " << limited
        << " window-limited\n";
    return out.str();
}

Session::Session(std::string spec_text) : text_(std::move(spec_text)), spec_(parse_spec(text_)) {}

void Session::set_max_weight(const Rational& L) {
    spec_.max_weight = L;
    alg_.reset();
    pair_cache_.clear();
}

void Session::set_window(const Rational& w) {
    spec_.window = w;
    alg_.reset();
    pair_cache_.clear();
}

std::string Session::digest() const {
    std::string data = text_;
    data += "\n#seed=" + std::to_string(spec_.seed);
    data += "\n#max-weight=" + to_string(spec_.max_weight);
    data += "\n#window=" + to_string(spec_.effective_window());
    return sha256_hex(data);
}

const std::vector<std::string>& Session::check_names() { return kChecks; }

void Session::build() {
    if (alg_) return;
    Backend b = build_backend(spec_.backend, spec_.effective_internal_weight());
    std::function<FieldPtr(std::size_t)> Y = b.native;
    const auto& space = *b.space;
    auto state_of = [&](const Field& f) -> std::optional<std::size_t> {
        StateVector v = s1(f);
        if (v.entries().size() != 1 || v.entries().front().second != 1) return std::nullopt;
        return v.entries().front().first;
    };
    if (spec_.corrupt) {
        const auto& c = *spec_.corrupt;
        std::optional<std::size_t> j;
        FieldPtr base;
        for (const auto& g : b.generators)
            if (g->name() == c.field) {
                base = g;
                j = state_of(*g);
            }
        if (!base) {
            j = space.find(c.field);
            if (j) base = b.native(*j);
        }
        if (!base || !j) throw Error(ErrorKind::InvalidSpec, "[corrupt] field '" + c.field + "' is not in the algebra");
        FieldPtr bad = corrupted(base, c.mode, c.scale);
        std::size_t target = *j;
        auto native = b.native;
        Y = memoize([native, target, bad](std::size_t k) { return k == target ? bad : native(k); });
        for (auto& g : b.generators)
            if (state_of(*g) == target) g = bad;
    }
    generators_.clear();
    if (spec_.generators.empty()) {
        generators_ = b.generators;
    } else {
        for (const auto& name : spec_.generators) {
            FieldPtr f;
            for (const auto& g : b.generators)
                if (g->name() == name) f = g;
            if (!f) {
                auto j = space.find(name);
                if (!j) throw Error(ErrorKind::InvalidSpec, "generator '" + name + "' is not in the algebra");
                f = Y(*j);
            }
            generators_.push_back(f);
        }
    }
    Rational W = spec_.effective_window();
    alg_.emplace(Algebra{std::move(b), std::move(Y), OpeWindow{W, W}});
}

const Algebra& Session::algebra() {
    build();
    return *alg_;
}

const std::vector<FieldPtr>& Session::generators() {
    build();
    return generators_;
}

FieldPtr Session::field(const std::string& name) {
    const Algebra& alg = algebra();
    if (name == "1" || name == "vac") return alg.Y(alg.space().vacuum());
    for (const auto& g : generators_)
        if (g->name() == name) return g;
    for (const auto& g : alg.backend.generators)
        if (g->name() == name) return g;
    if (auto j = alg.space().find(name)) return alg.Y(*j);
    throw Error(ErrorKind::UnknownField, "no field named '" + name + "'");
}

std::vector<std::size_t> Session::corpus() { return algebra().space().up_to(spec_.max_weight); }

const Verdict& Session::pair_verdict(const std::string& check, std::size_t a, std::size_t b, double* seconds) {
    auto key = std::make_tuple(check, a, b);
    auto it = pair_cache_.find(key);
    if (it != pair_cache_.end()) {
        if (seconds) *seconds = 0;
        return it->second;
    }
    const Algebra& alg = algebra();
    auto t = Clock::now();
    Verdict v;
    if (check == "locality") v = check_locality(alg, a, b);
    else if (check == "skew-symmetry") v = check_skew_symmetry(alg, a, b);
    else if (check == "morphism") v = check_morphism(alg, a, b);
    else if (check == "duality-direct") v = check_duality_direct(alg, a, b);
    else if (check == "duality-exchange") v = check_duality_exchange(alg, a, b);
    else throw Error(ErrorKind::Inconsistent, "not a pairwise check: " + check);
    if (seconds) *seconds = seconds_since(t);
    return pair_cache_.emplace(std::move(key), std::move(v)).first->second;
}

std::vector<CheckRun> Session::run(const std::string& name) {
    const Algebra& alg = algebra();
    std::vector<CheckRun> out;
    auto timed = [&](auto&& f) {
        auto t = Clock::now();
        Verdict v = f();
        out.push_back({std::move(v), seconds_since(t)});
    };
    auto states = corpus();
    auto generator_state = [&](const FieldPtr& g) -> std::optional<std::size_t> {
        StateVector v = s1(*g);
        if (v.entries().size() != 1) return std::nullopt;
        return v.entries().front().first;
    };
    if (name == "identity") timed([&] { return check_identity(alg); });
    else if (name == "creativity")
        for (std::size_t j : states) timed([&] { return check_creativity(alg, alg.Y(j)); });
    else if (name == "translation")
        for (std::size_t j : states) timed([&] { return check_translation_covariance(alg, alg.Y(j)); });
    else if (name == "completeness") timed([&] { return check_completeness(alg, generators_); });
    else if (name == "locality" || name == "skew-symmetry" || name == "morphism" || name == "duality-direct" ||
             name == "duality-exchange") {
        for (std::size_t a : states)
            for (std::size_t b : states) {
                double s = 0;
                const Verdict& v = pair_verdict(name, a, b, &s);
                out.push_back({v, s});
            }
    } else if (name == "chiral-subalgebra") timed([&] { return check_chiral_subalgebra(alg); });
    else if (name == "vbbk-support") timed([&] { return check_vbbk_support(alg); });
    else if (name == "multiple-locality") {
        for (const auto& g : generators_) timed([&] { return check_multiple_locality(alg, {g, g, g}); });
    } else if (name == "singular-support") {
        for (const auto& g : generators_) {
            auto j = generator_state(g);
            if (!j) continue;
            timed([&] { return check_singular_support(alg, {*j, *j}); });
            timed([&] { return check_singular_support(alg, {*j, *j, *j}); });
        }
    } else if (name == "module-dual") timed([&] { return check_module_dual(alg); });
    else if (name == "pijk-substitution") {
        auto small = alg.space().up_to(alg.window.level);
        std::vector<std::array<std::size_t, 3>> triples;
        for (std::size_t a : small)
            for (std::size_t b : small)
                for (std::size_t c : small) triples.push_back({a, b, c});
        long sample = spec_.sample ? *spec_.sample : 20;
        if (sample > 0 && static_cast<std::size_t>(sample) < triples.size()) {
            std::mt19937_64 rng(spec_.seed);
            std::shuffle(triples.begin(), triples.end(), rng);
            triples.resize(static_cast<std::size_t>(sample));
            std::sort(triples.begin(), triples.end());
        }
        for (const auto& [a, b, c] : triples) timed([&] { return check_pijk_substitution(alg, a, b, c); });
    } else if (name == "existence") {
        timed([&] {
            try {
                Verdict v = construct_by_existence(alg, generators_).verdict;
                v.check = "existence";
                return v;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::NotSpanning && e.kind() != ErrorKind::NotLocal) throw;
                Verdict v;
                v.check = "existence";
                v.instance = "generators";
                v.window = to_string(alg.window);
                v.counterexample = std::string(error_kind_name(e.kind())) + ": " + e.what();
                v.settle(false);
                return v;
            }
        });
    } else if (name == "prop-skew" || name == "prop-dual-loc" || name == "prop-dual-skew") {
        std::string w = to_string(alg.window);
        for (std::size_t a : states)
            for (std::size_t b : states) {
                double s1t = 0, s2t = 0, s3t = 0, s4t = 0;
                std::string inst = alg.label(a) + "," + alg.label(b);
                const Verdict& loc = pair_verdict("locality", a, b, &s1t);
                Verdict v;
                if (name == "prop-skew") {
                    v = implication(name, inst, w, {&loc}, pair_verdict("skew-symmetry", a, b, &s2t));
                } else if (name == "prop-dual-loc") {
                    const Verdict& dir = pair_verdict("duality-direct", a, b, &s2t);
                    Verdict fwd = implication(name, inst, w, {&loc}, dir);
                    Verdict bwd = implication(name, inst, w, {&dir}, loc);
                    v = fwd.status != Status::holds ? fwd : bwd;
                    if (v.status == Status::holds) v.quantifiers = {"locality(" + inst + ") iff duality-direct(" + inst + ")"};
                } else {
                    const Verdict& ab = pair_verdict("duality-exchange", a, b, &s2t);
                    const Verdict& ba = pair_verdict("duality-exchange", b, a, &s3t);
                    const Verdict& sk = pair_verdict("skew-symmetry", a, b, &s4t);
                    v = implication(name, inst, w, {&ab, &ba, &sk}, loc);
                }
                out.push_back({std::move(v), s1t + s2t + s3t + s4t});
            }
    } else {
        throw Error(ErrorKind::InvalidSpec, "unknown check '" + name + "'");
    }
    return out;
}

Report Session::check(const std::vector<std::string>& only) {
    std::vector<std::string> names = only.empty() ? spec_.checks : only;
    if (names.empty()) names = kChecks;
    for (const auto& n : names)
        if (std::find(kChecks.begin(), kChecks.end(), n) == kChecks.end())
            throw Error(ErrorKind::InvalidSpec, "unknown check '" + n + "'");
    Report r;
    r.version = tool_version();
    r.digest = digest();
    r.seed = spec_.seed;
    build();
    for (const auto& n : kChecks) {
        if (std::find(names.begin(), names.end(), n) == names.end()) continue;
        auto runs = run(n);
        r.runs.insert(r.runs.end(), runs.begin(), runs.end());
    }
    return r;
}

std::string Session::ope(const std::string& an, const std::string& bn) {
    FieldPtr a = field(an), b = field(bn);
    const Algebra& alg = algebra();
    auto ope = std::make_shared<ReducedOpe>(extract_reduced_ope(a, b, alg.window));
    const ExpPair& h = ope->h();
    int zeta = supersign(a->parity(), b->parity());
    std::ostringstream out;
    out << "ope " << a->name() << " " << b->name() << "\n";
    out << "window " << to_string(alg.window) << (ope->window_limited ? " (window-limited)" : "") << "\n";
    out << "term 1: coset " << to_string(ope->terms.front().coset) << ", pole order " << to_string(h) << ", parity "
        << parity_name(a->parity()) << " x " << parity_name(b->parity()) << ", zeta " << zeta << "\n";
    // a(z)b(w) = sum over vn of (a_(vn) b)(w) (z-w)^{-vn-1}
    long k0 = is_integer(h.n) && sgn(h.n) >= 0 ? to_long(h.n) : to_long(floor_of(h.n));
    long k1 = is_integer(h.nbar) && sgn(h.nbar) >= 0 ? to_long(h.nbar) : to_long(floor_of(h.nbar));
    for (long i = 0; i <= k0; ++i)
        for (long ib = 0; ib <= k1; ++ib) {
            ExpPair vn = h - ExpPair(1, 1) - ExpPair(i, ib);
            ExpPair pole = vn + ExpPair(1, 1);
            bool singular = sgn(pole.n) > 0 || sgn(pole.nbar) > 0;
            out << "  " << (singular ? "singular" : "regular ") << " (z-w)^-" << to_string(pole) << "  "
                << a->name() << "_" << to_string(vn) << " " << b->name() << " = ";
            try {
                out << alg.show(s1(*product_from_ope(ope, vn)));
            } catch (const Error& e) {
                out << "? (" << e.what() << ")";
            }
            out << "\n";
        }
    return out.str();
}

std::string Session::product(const std::string& an, const ExpPair& vn, const std::string& bn) {
    FieldPtr a = field(an), b = field(bn);
    const Algebra& alg = algebra();
    FieldPtr p = general_product(a, vn, b, alg.window);
    std::ostringstream out;
    out << "product " << a->name() << "_" << to_string(vn) << " " << b->name() << "\n";
    out << "state: " << alg.show(s1(*p)) << "\n";
    out << "field: weight " << to_string(p->weight()) << ", parity " << parity_name(p->parity()) << ", "
        << chirality_name(p->chirality()) << "\n";
    for (std::size_t j : alg.space().up_to(alg.window.level))
        for (const auto& m : modes_between(*p, alg.space().state(j).weight, alg.window.out_level)) {
            const StateVector& x = p->apply(m, j);
            if (x.is_zero()) continue;
            out << "  mode " << to_string(m) << " on " << alg.label(j) << ": " << alg.show(x) << "\n";
        }
    return out.str();
}

std::string Session::construct(bool* holds) {
    const Algebra& alg = algebra();
    Construction c = construct_by_existence(alg, generators_);
    const Closure& cl = c.closure;
    std::ostringstream out;
    out << "construct " << c.verdict.instance << "\n";
    out << "closure: " << cl.fields.size() << " fields, rank " << cl.span.rank() << "\n";
    for (std::size_t j : alg.space().up_to(alg.window.level)) {
        auto coords = cl.span.express(StateVector::basis(j));
        std::string expr;
        for (const auto& [id, q] : *coords) {
            if (sgn(q) == 0) continue;
            expr += (expr.empty() ? "" : " + ") + to_string(q) + "*" + cl.fields[cl.span_id_to_field.at(id)]->name();
        }
        out << "Y(" << alg.label(j) << ") = " << (expr.empty() ? "0" : expr) << "\n";
    }
    out << "verdict: " << to_string(c.verdict.status) << " (" << c.verdict.compared << " compared)\n";
    for (const auto& q : c.verdict.quantifiers) out << "  " << q << "\n";
    if (!c.verdict.counterexample.empty()) out << "  counterexample: " << c.verdict.counterexample << "\n";
    if (holds) *holds = c.verdict.holds();
    return out.str();
}

std::string Session::closure() {
    const Algebra& alg = algebra();
    ClosureOptions opt;
    opt.level = alg.window.level;
    opt.locality_window = alg.window;
    Closure cl = dong_closure(generators_, alg.backend.space, opt);
    std::ostringstream out;
    out << "closure level<=" << to_string(opt.level) << ": " << cl.fields.size() << " fields, rank " << cl.span.rank()
        << ", " << cl.products_explored << " products explored" << (cl.window_limited ? " (window-limited)" : "")
        << "\n";
    for (std::size_t i = 0; i < cl.fields.size(); ++i)
        out << "  " << cl.fields[i]->name() << "  s_1 = " << alg.show(cl.states[i]) << "  from " << cl.origin[i]
            << "\n";
    std::size_t missing = 0;
    for (std::size_t j : alg.space().up_to(opt.level))
        if (!cl.span.express(StateVector::basis(j))) ++missing;
    out << "spanning: " << (missing == 0 ? "yes" : "no, " + std::to_string(missing) + " basis states missing") << "\n";
    for (const auto& i : cl.issues) out << "  issue: " << i.what << "\n";
    return out.str();
}

}  // namespace opea
