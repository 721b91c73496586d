#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "opea/distribution.hpp"
#include "opea/state_vector.hpp"

namespace opea {

struct BasisState {
    std::string label;
    ExpPair weight;  // (Delta, Delta-bar)
    Parity parity = Parity::even;
};

class GradedSpace {
public:
    GradedSpace(std::vector<BasisState> basis, Rational truncation);

    std::size_t size() const { return basis_.size(); }
    const BasisState& state(std::size_t i) const { return basis_[i]; }
    const Rational& truncation() const { return truncation_; }
    std::size_t vacuum() const { return 0; }

    // Whether some basis state has this weight.
    bool has_weight(const ExpPair& w) const { return weights_.count(w) != 0; }
    bool beyond_truncation(const ExpPair& w) const { return w.total() > truncation_; }
    std::vector<std::size_t> up_to(const Rational& level) const;
    std::vector<std::size_t> of_weight(const ExpPair& w) const;
    const std::set<ExpPair>& weights() const { return weights_; }
    std::optional<std::size_t> find(const std::string& label) const;
    std::vector<std::string> labels() const;
    std::string show(const StateVector& v) const;
    ExpPair weight_of(const StateVector& v) const;  // weight of a nonzero homogeneous vector
    Parity parity_of(const StateVector& v) const;

private:
    std::vector<BasisState> basis_;
    Rational truncation_;
    std::set<ExpPair> weights_;
    std::unordered_map<std::string, std::size_t> by_label_;
};

using SpacePtr = std::shared_ptr<const GradedSpace>;

// Even linear operator of fixed weight shift, evaluated lazily per basis column.
class LinearOperator {
public:
    LinearOperator(SpacePtr space, ExpPair shift, std::function<StateVector(std::size_t)> column)
        : space_(std::move(space)), shift_(std::move(shift)), column_(std::move(column)) {}

    const StateVector& apply(std::size_t j) const;
    StateVector apply(const StateVector& v) const;
    const ExpPair& shift() const { return shift_; }
    const SpacePtr& space() const { return space_; }

private:
    SpacePtr space_;
    ExpPair shift_;
    std::function<StateVector(std::size_t)> column_;
    mutable std::unordered_map<std::size_t, StateVector> memo_;
};

using OperatorPtr = std::shared_ptr<const LinearOperator>;

enum class Chirality { holomorphic, antiholomorphic, mixed };

// A homogeneous field a(vz) = sum_vn a_vn vz^{-vn-1} on a graded space.
// Modes are evaluated on demand and memoized; images that would leave the
// truncation are returned as unknown vectors.
class Field {
public:
    Field(SpacePtr space, std::string name, ExpPair weight, Parity parity, Chirality chirality,
          CosetKey mode_coset = CosetKey{Rational(0), Rational(0)});
    virtual ~Field() = default;

    const std::string& name() const { return name_; }
    const ExpPair& weight() const { return weight_; }
    Parity parity() const { return parity_; }
    Chirality chirality() const { return chirality_; }
    const CosetKey& mode_coset() const { return mode_coset_; }
    const SpacePtr& space() const { return space_; }

    // Weight of a_vn applied to a vector of weight w.
    ExpPair target_weight(const ExpPair& mode, const ExpPair& w) const { return w + weight_ - mode - ExpPair(1, 1); }
    // Mode that maps weight `from` to weight `to`.
    ExpPair mode_for(const ExpPair& from, const ExpPair& to) const { return from + weight_ - to - ExpPair(1, 1); }

    const StateVector& apply(const ExpPair& mode, std::size_t j) const;
    StateVector apply(const ExpPair& mode, const StateVector& v) const;

protected:
    // Called only when the target weight exists inside the truncation.
    virtual StateVector compute(const ExpPair& mode, std::size_t j) const = 0;

    SpacePtr space_;

private:
    struct MemoKey {
        ExpPair mode;
        std::size_t j;
        bool operator==(const MemoKey& o) const { return j == o.j && mode == o.mode; }
    };
    struct MemoHash {
        std::size_t operator()(const MemoKey& k) const { return hash_value(k.mode) * 1000003u + k.j; }
    };

    std::string name_;
    ExpPair weight_;
    Parity parity_;
    Chirality chirality_;
    CosetKey mode_coset_;
    mutable std::unordered_map<MemoKey, StateVector, MemoHash> memo_;
};

using FieldPtr = std::shared_ptr<const Field>;

class FunctionField : public Field {
public:
    using Fn = std::function<StateVector(const ExpPair&, std::size_t)>;
    FunctionField(SpacePtr space, std::string name, ExpPair weight, Parity parity, Chirality chirality,
                  CosetKey coset, Fn fn)
        : Field(std::move(space), std::move(name), std::move(weight), parity, chirality, std::move(coset)),
          fn_(std::move(fn)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override { return fn_(mode, j); }

private:
    Fn fn_;
};

FieldPtr identity_field(const SpacePtr& space);

// sum_k c_k f_k for fields of equal weight and parity.
FieldPtr linear_combination(const std::vector<std::pair<Rational, FieldPtr>>& terms, const std::string& name);

// A copy of `base` with one mode multiplied by `factor` (negative controls).
FieldPtr corrupted(const FieldPtr& base, const ExpPair& mode, const Rational& factor);

Chirality combine(Chirality a, Chirality b);

// First (mode, basis index) where two fields differ, over basis vectors of
// weight <= level and all modes landing at weight <= out_level.
struct FieldMismatch {
    ExpPair mode;
    std::size_t j;
    StateVector lhs;
    StateVector rhs;
};
struct FieldComparison {
    std::optional<FieldMismatch> mismatch;
    bool window_limited = false;
    std::size_t compared = 0;
};
FieldComparison compare_fields(const Field& a, const Field& b, const Rational& level, const Rational& out_level);

// Every mode of f that maps a weight-<=level basis vector to weight <= out_level.
std::vector<ExpPair> modes_between(const Field& f, const ExpPair& from, const Rational& out_level);

}  // namespace opea
