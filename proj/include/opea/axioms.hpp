#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "opea/ope_engine.hpp"

namespace opea {

enum class Status { holds, fails, window_limited };
const char* to_string(Status s);

struct Verdict {
    std::string check;
    std::string instance;
    Status status = Status::holds;
    std::string window;
    std::vector<std::string> quantifiers;
    std::string counterexample;
    std::size_t compared = 0;
    std::vector<std::pair<std::string, std::string>> data;

    bool holds() const { return status == Status::holds; }
    // fails if a counterexample was recorded, window-limited if some
    // coefficient inside the window could not be determined
    void settle(bool limited);
};

// Pole order of Y(a), Y(b) from the reduced OPE. Without h the pair is
// either not local (not_local holds the mismatch) or the window was too small.
struct PoleOrder {
    FieldPtr a, b;  // kept alive so the cache key cannot be reused
    std::optional<ExpPair> h;
    bool window_limited = false;
    std::size_t compared = 0;
    std::string not_local;
};

struct OpeCache {
    std::map<std::tuple<const Field*, const Field*, std::string>, PoleOrder> entries;
};

// A backend with a state-field map.
struct Algebra {
    Backend backend;
    std::function<FieldPtr(std::size_t)> Y;
    OpeWindow window;
    // keyed by field identity and window, so copies with another Y stay correct
    std::shared_ptr<OpeCache> ope_cache = std::make_shared<OpeCache>();

    const GradedSpace& space() const { return *backend.space; }
    // Y extended linearly; nullptr if some component has no field.
    FieldPtr field_of(const StateVector& v, const std::string& name) const;
    std::string label(std::size_t j) const { return space().state(j).label; }
    std::string show(const StateVector& v) const;
    const PoleOrder& pole_order(std::size_t a, std::size_t b) const;
};

Verdict check_creativity(const Algebra& alg, const FieldPtr& a);
Verdict check_translation_covariance(const Algebra& alg, const FieldPtr& a);
Verdict check_completeness(const Algebra& alg, const std::vector<FieldPtr>& generators);
Verdict check_locality(const Algebra& alg, std::size_t a, std::size_t b);
Verdict check_skew_symmetry(const Algebra& alg, std::size_t a, std::size_t b);
Verdict check_identity(const Algebra& alg);
Verdict check_morphism(const Algebra& alg, std::size_t a, std::size_t b);
Verdict check_chiral_subalgebra(const Algebra& alg);
Verdict check_vbbk_support(const Algebra& alg);
Verdict check_multiple_locality(const Algebra& alg, const std::vector<FieldPtr>& fields);
Verdict check_singular_support(const Algebra& alg, const std::vector<std::size_t>& states);

// Duality. L = a(x+w)b(w)c in x>w, R = (a(x)b)(w)c in w>x.
Verdict check_duality_direct(const Algebra& alg, std::size_t a, std::size_t c);
Verdict check_duality_exchange(const Algebra& alg, std::size_t a, std::size_t b);
Verdict check_module_dual(const Algebra& alg);
// p^{ab}(w,x) = zeta (-1)^{h_ab} p^{ba}(w+x,-x) on one triple.
Verdict check_pijk_substitution(const Algebra& alg, std::size_t a, std::size_t b, std::size_t c);

struct Construction {
    Closure closure;
    std::function<FieldPtr(std::size_t)> Y;
    Verdict verdict;
};

Verdict goddard_probe(const Algebra& alg, const Closure& closure);
// Throws NotSpanning if the closure misses part of the weight <= level subspace.
Construction construct_by_existence(const Algebra& alg, const std::vector<FieldPtr>& generators);

}  // namespace opea
