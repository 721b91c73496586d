#include "opea/graded_space.hpp"

namespace opea {

GradedSpace::GradedSpace(std::vector<BasisState> basis, Rational truncation)
    : basis_(std::move(basis)), truncation_(std::move(truncation)) {
    if (basis_.empty() || basis_[0].weight != ExpPair(0, 0) || basis_[0].parity != Parity::even)
        throw Error(ErrorKind::InvalidSpec, "basis must start with an even vacuum of weight (0,0)");
    for (std::size_t i = 0; i < basis_.size(); ++i) {
        weights_.insert(basis_[i].weight);
        by_label_.emplace(basis_[i].label, i);
    }
}

std::vector<std::size_t> GradedSpace::up_to(const Rational& level) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i].weight.total() <= level) out.push_back(i);
    return out;
}

std::vector<std::size_t> GradedSpace::of_weight(const ExpPair& w) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < basis_.size(); ++i)
        if (basis_[i].weight == w) out.push_back(i);
    return out;
}

std::optional<std::size_t> GradedSpace::find(const std::string& label) const {
    auto it = by_label_.find(label);
    if (it == by_label_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> GradedSpace::labels() const {
    std::vector<std::string> out;
    for (const auto& b : basis_) out.push_back(b.label);
    return out;
}

std::string GradedSpace::show(const StateVector& v) const {
    if (!v.known()) return "?";
    if (v.entries().empty()) return "0";
    std::string s;
    for (const auto& [i, c] : v.entries()) {
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*" + basis_[i].label;
    }
    return s;
}

ExpPair GradedSpace::weight_of(const StateVector& v) const {
    if (v.entries().empty()) throw Error(ErrorKind::Inconsistent, "weight of the zero vector");
    const ExpPair& w = basis_[v.entries().front().first].weight;
    for (const auto& [i, c] : v.entries())
        if (basis_[i].weight != w) throw Error(ErrorKind::Inconsistent, "vector is not homogeneous");
    return w;
}

Parity GradedSpace::parity_of(const StateVector& v) const {
    if (v.entries().empty()) return Parity::even;
    return basis_[v.entries().front().first].parity;
}

const StateVector& LinearOperator::apply(std::size_t j) const {
    auto it = memo_.find(j);
    if (it != memo_.end()) return it->second;
    ExpPair tw = space_->state(j).weight + shift_;
    StateVector v;
    if (space_->beyond_truncation(tw)) v = StateVector::unknown();
    else if (space_->has_weight(tw)) v = column_(j);
    return memo_.emplace(j, std::move(v)).first->second;
}

StateVector LinearOperator::apply(const StateVector& v) const {
    if (!v.known()) return StateVector::unknown();
    StateVector out;
    for (const auto& [i, c] : v.entries()) out.axpy(c, apply(i));
    return out;
}

Field::Field(SpacePtr space, std::string name, ExpPair weight, Parity parity, Chirality chirality,
             CosetKey mode_coset)
    : space_(std::move(space)),
      name_(std::move(name)),
      weight_(std::move(weight)),
      parity_(parity),
      chirality_(chirality),
      mode_coset_(std::move(mode_coset)) {}

const StateVector& Field::apply(const ExpPair& mode, std::size_t j) const {
    MemoKey key{mode, j};
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    StateVector v;
    bool off_chiral = (chirality_ == Chirality::holomorphic && mode.nbar != -1) ||
                      (chirality_ == Chirality::antiholomorphic && mode.n != -1);
    if (!off_chiral && CosetKey::of(mode) == mode_coset_) {
        ExpPair tw = target_weight(mode, space_->state(j).weight);
        if (space_->beyond_truncation(tw) && sgn(tw.n) >= 0 && sgn(tw.nbar) >= 0)
            v = StateVector::unknown();
        else if (space_->has_weight(tw))
            v = compute(mode, j);
    }
    return memo_.emplace(std::move(key), std::move(v)).first->second;
}

StateVector Field::apply(const ExpPair& mode, const StateVector& v) const {
    if (!v.known()) return StateVector::unknown();
    StateVector out;
    for (const auto& [i, c] : v.entries()) {
        out.axpy(c, apply(mode, i));
        if (!out.known()) break;
    }
    return out;
}

namespace {

class IdentityField : public Field {
public:
    explicit IdentityField(SpacePtr space)
        : Field(std::move(space), "1", ExpPair(0, 0), Parity::even, Chirality::holomorphic) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        if (mode == ExpPair(-1, -1)) return StateVector::basis(j);
        return {};
    }
};

class CombinationField : public Field {
public:
    CombinationField(std::vector<std::pair<Rational, FieldPtr>> terms, const std::string& name, Chirality ch)
        : Field(terms.front().second->space(), name, terms.front().second->weight(),
                terms.front().second->parity(), ch, terms.front().second->mode_coset()),
          terms_(std::move(terms)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        StateVector out;
        for (const auto& [c, f] : terms_) out.axpy(c, f->apply(mode, j));
        return out;
    }

private:
    std::vector<std::pair<Rational, FieldPtr>> terms_;
};

class CorruptedField : public Field {
public:
    CorruptedField(FieldPtr base, ExpPair mode, Rational factor)
        : Field(base->space(), base->name(), base->weight(), base->parity(), base->chirality(), base->mode_coset()),
          base_(std::move(base)),
          mode_(std::move(mode)),
          factor_(std::move(factor)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        const StateVector& v = base_->apply(mode, j);
        return mode == mode_ ? v.scaled(factor_) : v;
    }

private:
    FieldPtr base_;
    ExpPair mode_;
    Rational factor_;
};

}  // namespace

FieldPtr identity_field(const SpacePtr& space) { return std::make_shared<IdentityField>(space); }

Chirality combine(Chirality a, Chirality b) { return a == b ? a : Chirality::mixed; }

FieldPtr linear_combination(const std::vector<std::pair<Rational, FieldPtr>>& terms, const std::string& name) {
    if (terms.empty()) throw Error(ErrorKind::Inconsistent, "empty linear combination of fields");
    Chirality ch = terms.front().second->chirality();
    for (const auto& [c, f] : terms) {
        if (f->weight() != terms.front().second->weight())
            throw Error(ErrorKind::Inconsistent, "linear combination of fields of different weight");
        ch = combine(ch, f->chirality());
    }
    if (terms.size() == 1 && terms.front().first == 1) return terms.front().second;
    return std::make_shared<CombinationField>(terms, name, ch);
}

FieldPtr corrupted(const FieldPtr& base, const ExpPair& mode, const Rational& factor) {
    return std::make_shared<CorruptedField>(base, mode, factor);
}

std::vector<ExpPair> modes_between(const Field& f, const ExpPair& from, const Rational& out_level) {
    std::vector<ExpPair> out;
    for (const auto& w : f.space()->weights()) {
        if (w.total() > out_level) continue;
        ExpPair m = f.mode_for(from, w);
        if (CosetKey::of(m) == f.mode_coset()) out.push_back(m);
    }
    return out;
}

FieldComparison compare_fields(const Field& a, const Field& b, const Rational& level, const Rational& out_level) {
    FieldComparison r;
    const auto& space = *a.space();
    for (std::size_t j : space.up_to(level)) {
        std::set<ExpPair> modes;
        for (const auto& m : modes_between(a, space.state(j).weight, out_level)) modes.insert(m);
        for (const auto& m : modes_between(b, space.state(j).weight, out_level)) modes.insert(m);
        for (const auto& m : modes) {
            const StateVector& x = a.apply(m, j);
            const StateVector& y = b.apply(m, j);
            if (!x.known() || !y.known()) {
                r.window_limited = true;
                continue;
            }
            ++r.compared;
            if (!(x == y)) {
                r.mismatch = FieldMismatch{m, j, x, y};
                return r;
            }
        }
    }
    return r;
}

}  // namespace opea
