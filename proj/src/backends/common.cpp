#include "opea/backends.hpp"

namespace opea {

std::function<FieldPtr(std::size_t)> memoize(std::function<FieldPtr(std::size_t)> f) {
    auto cache = std::make_shared<std::vector<FieldPtr>>();
    return [f = std::move(f), cache](std::size_t j) {
        if (cache->size() <= j) cache->resize(j + 1);
        if (!(*cache)[j]) (*cache)[j] = f(j);
        return (*cache)[j];
    };
}

Distribution<StateVector> exp_T(const LinearOperator& T, const LinearOperator& Tbar, const StateVector& v,
                                long budget) {
    Distribution<StateVector> d(1);
    for (int s = 0; s < 2; ++s) {
        d.set_window(s, Interval{Rational(0), Rational(budget)});
        d.set_floor(s, Rational(0));
    }
    StateVector row = v;  // T^{(i)} v
    for (long i = 0; i <= budget; ++i) {
        StateVector col = row;  // Tbar^{(ibar)} T^{(i)} v
        for (long ib = 0; ib <= budget; ++ib) {
            d.set({ExpPair(i, ib)}, col);
            col = Tbar.apply(col).scaled(Rational(1, ib + 1));
        }
        row = T.apply(row).scaled(Rational(1, i + 1));
    }
    return d;
}

OperatorPtr derive_translation(const SpacePtr& space, const std::function<FieldPtr(std::size_t)>& Y, int sector) {
    ExpPair mode = sector == 0 ? ExpPair(-2, -1) : ExpPair(-1, -2);
    ExpPair shift = sector == 0 ? ExpPair(1, 0) : ExpPair(0, 1);
    return std::make_shared<LinearOperator>(space, shift, [space, Y, mode](std::size_t j) {
        return Y(j)->apply(mode, space->vacuum());
    });
}

Backend build_backend(const BackendSpec& spec, const Rational& truncation) {
    if (spec.kind == "heisenberg") {
        if (sgn(spec.level) == 0) throw Error(ErrorKind::InvalidSpec, "heisenberg level must be nonzero");
        return build_heisenberg(spec.level, truncation, spec.generator.empty() ? "alpha" : spec.generator);
    }
    if (spec.kind == "fermion") return build_fermion(truncation, spec.generator.empty() ? "psi" : spec.generator);
    if (spec.kind == "tensor") {
        if (!spec.left || !spec.right) throw Error(ErrorKind::InvalidSpec, "tensor needs left and right factors");
        return build_tensor(build_backend(*spec.left, truncation), build_backend(*spec.right, truncation),
                            spec.bar_swap, truncation);
    }
    throw Error(ErrorKind::InvalidSpec, "unknown backend kind '" + spec.kind + "'");
}

}  // namespace opea
