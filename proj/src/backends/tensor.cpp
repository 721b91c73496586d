// Graded tensor product A (x) B. With bar_swap the B factor lives in the
// barred variable: its weights and mode pairs are swapped.

#include <map>

#include "opea/backends.hpp"

namespace opea {
namespace {

ExpPair swapped(const ExpPair& e) { return {e.nbar, e.n}; }

Chirality swapped(Chirality c) {
    switch (c) {
        case Chirality::holomorphic: return Chirality::antiholomorphic;
        case Chirality::antiholomorphic: return Chirality::holomorphic;
        default: return Chirality::mixed;
    }
}

struct Pairing {
    SpacePtr a, b;
    bool swap = false;
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> index;

    ExpPair bweight(std::size_t j) const {
        return swap ? swapped(b->state(j).weight) : b->state(j).weight;
    }
};

// x (x) y from factor vectors; unknown if any product leaves the truncation.
StateVector tensor(const Pairing& p, const StateVector& x, const StateVector& y, const Rational& c) {
    if (!x.known() || !y.known()) return StateVector::unknown();
    StateVector v;
    for (const auto& [i, cx] : x.entries())
        for (const auto& [j, cy] : y.entries()) {
            auto it = p.index.find({i, j});
            if (it == p.index.end()) return StateVector::unknown();
            v.add_entry(it->second, c * cx * cy);
        }
    return v;
}

class LeftField : public Field {
public:
    LeftField(SpacePtr space, std::shared_ptr<const Pairing> p, FieldPtr f)
        : Field(std::move(space), f->name(), f->weight(), f->parity(), f->chirality(), f->mode_coset()),
          p_(std::move(p)),
          f_(std::move(f)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        auto [x, y] = p_->pairs[j];
        return tensor(*p_, f_->apply(mode, x), StateVector::basis(y), Rational(1));
    }

private:
    std::shared_ptr<const Pairing> p_;
    FieldPtr f_;
};

class RightField : public Field {
public:
    RightField(SpacePtr space, std::shared_ptr<const Pairing> p, FieldPtr g)
        : Field(std::move(space), g->name(), p->swap ? swapped(g->weight()) : g->weight(), g->parity(),
                p->swap ? swapped(g->chirality()) : g->chirality(),
                p->swap ? CosetKey{g->mode_coset().nbar, g->mode_coset().n} : g->mode_coset()),
          p_(std::move(p)),
          g_(std::move(g)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        auto [x, y] = p_->pairs[j];
        Rational sign(supersign(g_->parity(), p_->a->state(x).parity));
        ExpPair m = p_->swap ? swapped(mode) : mode;
        return tensor(*p_, StateVector::basis(x), g_->apply(m, y), sign);
    }

private:
    std::shared_ptr<const Pairing> p_;
    FieldPtr g_;
};

// Y(x (x) y)(vz) = Y(x)(vz) (x) Y(y)(vz): mode vn = vi + vk + 1.
class ProductVertex : public Field {
public:
    ProductVertex(SpacePtr space, std::shared_ptr<const Pairing> p, FieldPtr fx, FieldPtr fy, std::string name)
        : Field(std::move(space), std::move(name),
                fx->weight() + (p->swap ? swapped(fy->weight()) : fy->weight()), fx->parity() + fy->parity(),
                combine(fx->chirality(), p->swap ? swapped(fy->chirality()) : fy->chirality())),
          p_(std::move(p)),
          fx_(std::move(fx)),
          fy_(std::move(fy)) {}

protected:
    StateVector compute(const ExpPair& mode, std::size_t j) const override {
        auto [u, t] = p_->pairs[j];
        const ExpPair wu = p_->a->state(u).weight;
        Rational sign(supersign(fy_->parity(), p_->a->state(u).parity));
        StateVector out;
        for (const auto& target : p_->a->weights()) {
            ExpPair vi = fx_->mode_for(wu, target);
            if (CosetKey::of(vi) != fx_->mode_coset()) continue;
            ExpPair vk = mode - vi - ExpPair(1, 1);
            ExpPair mk = p_->swap ? swapped(vk) : vk;
            const StateVector& left = fx_->apply(vi, u);
            if (left.is_zero()) continue;
            const StateVector& right = fy_->apply(mk, t);
            if (right.is_zero()) continue;
            out.axpy(Rational(1), tensor(*p_, left, right, sign));
            if (!out.known()) break;
        }
        return out;
    }

private:
    std::shared_ptr<const Pairing> p_;
    FieldPtr fx_, fy_;
};

StateVector lift_operator(const Pairing& p, std::size_t j, const LinearOperator* onA, const LinearOperator* onB) {
    auto [x, y] = p.pairs[j];
    StateVector out;
    if (onA) out.axpy(Rational(1), tensor(p, onA->apply(x), StateVector::basis(y), Rational(1)));
    if (onB) out.axpy(Rational(1), tensor(p, StateVector::basis(x), onB->apply(y), Rational(1)));
    return out;
}

}  // namespace

Backend build_tensor(const Backend& A, const Backend& B, bool bar_swap, const Rational& truncation) {
    auto p = std::make_shared<Pairing>();
    p->a = A.space;
    p->b = B.space;
    p->swap = bar_swap;
    std::vector<BasisState> basis;
    std::vector<std::tuple<Rational, std::size_t, std::size_t>> order;
    for (std::size_t i = 0; i < A.space->size(); ++i)
        for (std::size_t j = 0; j < B.space->size(); ++j) {
            ExpPair w = A.space->state(i).weight + p->bweight(j);
            if (w.total() <= truncation) order.emplace_back(w.total(), i, j);
        }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    for (const auto& [tw, i, j] : order) {
        const auto& sa = A.space->state(i);
        const auto& sb = B.space->state(j);
        std::string label = (i == 0 && j == 0) ? "vac" : sa.label + "*" + sb.label;
        p->index.emplace(std::make_pair(i, j), p->pairs.size());
        p->pairs.emplace_back(i, j);
        basis.push_back({label, sa.weight + p->bweight(j), sa.parity + sb.parity});
    }
    auto space = std::make_shared<GradedSpace>(std::move(basis), truncation);
    std::shared_ptr<const Pairing> cp = p;

    Backend out;
    out.space = space;
    out.description = "tensor(" + A.description + "," + B.description + (bar_swap ? ",bar-swap)" : ")");
    for (const auto& g : A.generators) out.generators.push_back(std::make_shared<LeftField>(space, cp, g));
    for (const auto& g : B.generators) out.generators.push_back(std::make_shared<RightField>(space, cp, g));

    const OperatorPtr TA = A.T, TbA = A.Tbar;
    const OperatorPtr TB = bar_swap ? B.Tbar : B.T, TbB = bar_swap ? B.T : B.Tbar;
    out.T = std::make_shared<LinearOperator>(space, ExpPair(1, 0), [cp, TA, TB](std::size_t j) {
        return lift_operator(*cp, j, TA.get(), TB.get());
    });
    out.Tbar = std::make_shared<LinearOperator>(space, ExpPair(0, 1), [cp, TbA, TbB](std::size_t j) {
        return lift_operator(*cp, j, TbA.get(), TbB.get());
    });
    auto nA = A.native, nB = B.native;
    out.native = memoize([space, cp, nA, nB](std::size_t j) -> FieldPtr {
        if (j == 0) return identity_field(space);
        auto [x, y] = cp->pairs[j];
        return std::make_shared<ProductVertex>(space, cp, nA(x), nB(y), space->state(j).label);
    });
    return out;
}

}  // namespace opea
