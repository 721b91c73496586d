#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "opea/scalar.hpp"

namespace opea {

// Sparse exact vector over the truncated basis. `known == false` marks a
// vector that depends on states beyond the truncation.
class StateVector {
public:
    using Entry = std::pair<std::uint32_t, Rational>;

    StateVector() = default;
    static StateVector basis(std::size_t index, const Rational& coef = Rational(1));
    static StateVector unknown();

    bool known() const { return known_; }
    bool is_zero() const { return known_ && entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }
    Rational get(std::size_t index) const;

    void axpy(const Rational& s, const StateVector& x);
    void add_entry(std::size_t index, const Rational& coef);
    StateVector scaled(const Rational& s) const;
    void mark_unknown() { known_ = false; entries_.clear(); }

    bool operator==(const StateVector& o) const { return known_ == o.known_ && entries_ == o.entries_; }

private:
    std::vector<Entry> entries_;
    bool known_ = true;
};

inline bool coef_zero(const StateVector& v) { return v.is_zero(); }
inline void axpy(StateVector& acc, const Rational& s, const StateVector& x) { acc.axpy(s, x); }
std::string coef_string(const StateVector& v);
std::string to_string(const StateVector& v, const std::vector<std::string>& labels);

// Incremental row echelon form; remembers how each pivot row was built from
// the inserted vectors so membership queries return coordinates.
class Span {
public:
    // Returns true when v is independent of what was inserted before.
    bool insert(const StateVector& v);
    // Coordinates of v in terms of the inserted vectors (by insertion order).
    std::optional<std::map<std::size_t, Rational>> express(const StateVector& v) const;
    std::size_t rank() const { return rows_.size(); }
    std::size_t inserted() const { return count_; }

private:
    struct Row {
        StateVector vec;                      // leading entry at pivot, normalized to 1
        std::map<std::size_t, Rational> how;  // combination of inserted vectors
    };
    void reduce(StateVector& v, std::map<std::size_t, Rational>& how) const;
    std::map<std::uint32_t, Row> rows_;  // keyed by pivot index
    std::size_t count_ = 0;
};

}  // namespace opea
