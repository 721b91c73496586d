#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "opea/graded_space.hpp"

namespace opea {

struct BackendSpec {
    std::string kind;  // heisenberg | fermion | tensor
    Rational level{1};
    std::string generator;
    std::shared_ptr<BackendSpec> left;
    std::shared_ptr<BackendSpec> right;
    bool bar_swap = false;
};

struct Backend {
    SpacePtr space;
    std::vector<FieldPtr> generators;
    OperatorPtr T;
    OperatorPtr Tbar;
    // Vertex operator of a basis state built directly from the modes
    // (normal-ordered products); used as an independent reference.
    std::function<FieldPtr(std::size_t)> native;
    std::string description;
};

Backend build_heisenberg(const Rational& level, const Rational& truncation, const std::string& name = "alpha");
Backend build_fermion(const Rational& truncation, const std::string& name = "psi");
Backend build_tensor(const Backend& a, const Backend& b, bool bar_swap, const Rational& truncation);
Backend build_backend(const BackendSpec& spec, const Rational& truncation);

// e^{vz vT} v = sum_{i,ibar} T^{(i)} Tbar^{(ibar)} v z^i zbar^ibar, powers up to budget.
Distribution<StateVector> exp_T(const LinearOperator& T, const LinearOperator& Tbar, const StateVector& v,
                                long budget);

// T_1 a := a_{(-2,-1)} 1 (sector 0) or Tbar_1 a := a_{(-1,-2)} 1 (sector 1).
OperatorPtr derive_translation(const SpacePtr& space, const std::function<FieldPtr(std::size_t)>& Y, int sector);

// Memoizing wrapper for a state -> field map.
std::function<FieldPtr(std::size_t)> memoize(std::function<FieldPtr(std::size_t)> f);

}  // namespace opea
