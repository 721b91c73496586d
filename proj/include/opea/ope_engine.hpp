#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "opea/backends.hpp"

namespace opea {

// Which basis vectors and which output weights a computation quantifies over.
struct OpeWindow {
    Rational level{3};      // basis vectors v with total weight <= level
    Rational out_level{3};  // coefficients landing at total weight <= out_level
};

std::string to_string(const OpeWindow& w);

// Coefficients of a(z)b(w)v and b(w)a(z)v, memoized per basis vector.
class OrderedPair {
public:
    OrderedPair(FieldPtr a, FieldPtr b);

    const FieldPtr& a() const { return a_; }
    const FieldPtr& b() const { return b_; }
    int zeta() const { return supersign(a_->parity(), b_->parity()); }

    // [z^P w^Q] a(z) b(w) e_j  and  [z^P w^Q] b(w) a(z) e_j
    const StateVector& forward(const ExpPair& P, const ExpPair& Q, std::size_t j) const;
    const StateVector& reverse(const ExpPair& P, const ExpPair& Q, std::size_t j) const;

    // [z^P w^Q] (z-w)^h a(z)b(w) e_j, and the w>z counterpart with supersign.
    StateVector c_forward(const ExpPair& h, const ExpPair& P, const ExpPair& Q, std::size_t j) const;
    StateVector c_reverse(const ExpPair& h, const ExpPair& P, const ExpPair& Q, std::size_t j) const;

    // Lowest z (resp. w) exponent that can carry a nonzero coefficient on e_j.
    ExpPair z_floor(std::size_t j) const;
    ExpPair w_floor(std::size_t j) const;
    // Exponent cosets of P (given h) and Q in c(z, w).
    CosetKey p_coset(const ExpPair& h) const;
    CosetKey q_coset() const;

    // Keys (P, Q) of c_h(z,w) e_j landing at output weight <= out_level.
    std::vector<std::pair<ExpPair, ExpPair>> window_keys(const ExpPair& h, std::size_t j,
                                                         const Rational& out_level) const;

private:
    struct Key3 {
        ExpPair P, Q;
        std::size_t j;
        bool operator==(const Key3& o) const { return j == o.j && P == o.P && Q == o.Q; }
    };
    struct Key3Hash {
        std::size_t operator()(const Key3& k) const {
            return (hash_value(k.P) * 31u + hash_value(k.Q)) * 1000003u + k.j;
        }
    };
    // (-1)^i binom(h, i) for i < len
    const std::vector<Rational>& signed_binoms(const Rational& h, long len) const;

    FieldPtr a_, b_;
    mutable std::unordered_map<Key3, StateVector, Key3Hash> fwd_, rev_;
    mutable std::map<Rational, std::vector<Rational>> binoms_;
};

struct CoefficientMismatch {
    std::size_t j;
    ExpPair P, Q;
    StateVector lhs, rhs;
};

std::string describe(const CoefficientMismatch& m, const GradedSpace& space);

// Whether (z-w)^h a(z)b(w)e_j equals its w>z counterpart on the window.
struct HCheck {
    bool valid = true;
    bool window_limited = false;
    bool all_zero = true;
    std::size_t keys = 0;
    std::optional<CoefficientMismatch> mismatch;
};
HCheck check_pole_order(const OrderedPair& pair, const ExpPair& h, std::size_t j, const Rational& out_level);

struct VectorCertificate {
    std::size_t j = 0;
    std::optional<ExpPair> h;  // minimal pole order on this vector; empty if a(z)b(w)e_j vanishes
    bool window_limited = false;
    std::size_t keys = 0;
};

struct OpeTerm {
    ExpPair h;
    CosetKey coset;
};

// Reduced OPE of a field pair, certified on a window. Each field lives in a
// single mode coset, so the OPE has exactly one term.
struct ReducedOpe {
    std::shared_ptr<const OrderedPair> pair;
    std::vector<OpeTerm> terms;
    OpeWindow window;
    bool window_limited = false;
    std::vector<VectorCertificate> certificates;

    const ExpPair& h() const { return terms.front().h; }
    // [z^P w^Q] c(z, w) e_j
    StateVector c(const ExpPair& P, const ExpPair& Q, std::size_t j) const { return pair->c_forward(h(), P, Q, j); }
};

// Throws NotLocal (with a counterexample in the message) if no pole order works.
ReducedOpe extract_reduced_ope(const FieldPtr& a, const FieldPtr& b, const OpeWindow& window,
                               const std::vector<CosetKey>& hint = {});

struct LocalityOrder {
    long N = 0;
    bool window_limited = false;
};
LocalityOrder locality_order(const FieldPtr& a, const FieldPtr& b, const OpeWindow& window);

FieldPtr zero_field(const SpacePtr& space, const ExpPair& weight, Parity parity);

// res_z (z-w)^n [a(z), b(w)] for holomorphic a (sector 0) or its barred analogue (sector 1).
FieldPtr holomorphic_product(const FieldPtr& a, long n, const FieldPtr& b, int sector = 0);

enum class ProductRoute { automatic, ope };

// sum_i d_z^{(h_i - 1 - vn)} c^i(z, w)|_{z=w}. The automatic route uses the
// residue formula when a is (anti-)holomorphic.
FieldPtr general_product(const FieldPtr& a, const ExpPair& vn, const FieldPtr& b, const OpeWindow& window,
                         ProductRoute route = ProductRoute::automatic);
FieldPtr product_from_ope(const std::shared_ptr<const ReducedOpe>& ope, const ExpPair& vn, bool certify = true);

// s_1 a(vz) = a_{(-1,-1)} 1
StateVector s1(const Field& f);

struct ClosureOptions {
    Rational level{2};
    bool verify_products = false;
    bool verify_locality = false;
    OpeWindow locality_window;
};

struct ClosureIssue {
    std::string what;
};

struct Closure {
    std::vector<FieldPtr> fields;     // fields[0] is 1(z)
    std::vector<StateVector> states;  // s_1 images
    std::vector<std::string> origin;
    Span span;
    std::map<std::size_t, std::size_t> span_id_to_field;
    bool window_limited = false;
    std::size_t products_explored = 0;
    std::size_t pairs_verified = 0;
    std::vector<ClosureIssue> issues;

    // Field in span(fields) whose s_1 image is v; nullopt if v is not spanned.
    FieldPtr field_for(const StateVector& v, const std::string& name) const;
};

Closure dong_closure(const std::vector<FieldPtr>& generators, const SpacePtr& space, const ClosureOptions& options);

// Multiple locality for up to three fields.
struct MultiWindow {
    Rational level{2};
    Rational out_level{4};
};

struct MultiLocalityResult {
    bool holds = true;
    bool window_limited = false;
    std::vector<std::vector<ExpPair>> h;  // pairwise pole orders, h[i][j] for i < j
    std::size_t orderings = 0;
    std::size_t keys = 0;
    std::string counterexample;
};

MultiLocalityResult verify_multiple_locality(const std::vector<FieldPtr>& fields, const MultiWindow& window);

// [z_1^{P_1} ... z_r^{P_r}] c(z_1, ..., z_r) e_j extracted from the identity ordering.
std::map<std::vector<ExpPair>, StateVector> multi_coefficients(const std::vector<FieldPtr>& fields,
                                                               const std::vector<std::vector<ExpPair>>& h,
                                                               std::size_t j, const Rational& out_level,
                                                               bool* window_limited);

}  // namespace opea

namespace opea {

// Reduced OPE of scalar two-variable data, for checking uniqueness on
// synthetic inputs. `f` holds the z>w expansion, `g` the w>z expansion with
// the supersign already applied. f needs a declared w-floor, g a z-floor, and
// each c^i is assumed to have integral exponents.
struct ScalarOpeTerm {
    ExpPair h;
    CosetKey coset;  // z-exponent coset of the term in f
    std::map<std::pair<ExpPair, ExpPair>, Rational> c;
};

struct ScalarOpe {
    std::vector<ScalarOpeTerm> terms;
    bool window_limited = false;
    long depth = 0;
};

ScalarOpe extract_scalar_ope(const ScalarDistribution& f, const ScalarDistribution& g, long depth);

}  // namespace opea
