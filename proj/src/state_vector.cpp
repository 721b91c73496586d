#include "opea/state_vector.hpp"

#include <algorithm>

namespace opea {

StateVector StateVector::basis(std::size_t index, const Rational& coef) {
    StateVector v;
    if (sgn(coef) != 0) v.entries_.emplace_back(static_cast<std::uint32_t>(index), coef);
    return v;
}

StateVector StateVector::unknown() {
    StateVector v;
    v.known_ = false;
    return v;
}

Rational StateVector::get(std::size_t index) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::size_t i) { return e.first < i; });
    if (it != entries_.end() && it->first == index) return it->second;
    return Rational(0);
}

void StateVector::axpy(const Rational& s, const StateVector& x) {
    if (!known_) return;
    if (!x.known_) {
        mark_unknown();
        return;
    }
    if (sgn(s) == 0 || x.entries_.empty()) return;
    std::vector<Entry> out;
    out.reserve(entries_.size() + x.entries_.size());
    auto a = entries_.begin();
    auto b = x.entries_.begin();
    while (a != entries_.end() || b != x.entries_.end()) {
        if (b == x.entries_.end() || (a != entries_.end() && a->first < b->first)) {
            out.push_back(std::move(*a));
            ++a;
        } else if (a == entries_.end() || b->first < a->first) {
            out.emplace_back(b->first, s * b->second);
            ++b;
        } else {
            Rational c = a->second + s * b->second;
            if (sgn(c) != 0) out.emplace_back(a->first, std::move(c));
            ++a;
            ++b;
        }
    }
    entries_ = std::move(out);
}

void StateVector::add_entry(std::size_t index, const Rational& coef) {
    if (!known_ || sgn(coef) == 0) return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                               [](const Entry& e, std::size_t i) { return e.first < i; });
    if (it != entries_.end() && it->first == index) {
        it->second += coef;
        if (sgn(it->second) == 0) entries_.erase(it);
        return;
    }
    entries_.insert(it, Entry(static_cast<std::uint32_t>(index), coef));
}

StateVector StateVector::scaled(const Rational& s) const {
    if (!known_) return unknown();
    StateVector v;
    if (sgn(s) == 0) return v;
    v.entries_ = entries_;
    for (auto& e : v.entries_) e.second *= s;
    return v;
}

std::string coef_string(const StateVector& v) {
    if (!v.known()) return "?";
    if (v.entries().empty()) return "0";
    std::string s;
    for (const auto& [i, c] : v.entries()) {
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*e" + std::to_string(i);
    }
    return s;
}

std::string to_string(const StateVector& v, const std::vector<std::string>& labels) {
    if (!v.known()) return "?";
    if (v.entries().empty()) return "0";
    std::string s;
    for (const auto& [i, c] : v.entries()) {
        if (!s.empty()) s += " + ";
        s += to_string(c) + "*" + (i < labels.size() ? labels[i] : "e" + std::to_string(i));
    }
    return s;
}

void Span::reduce(StateVector& v, std::map<std::size_t, Rational>& how) const {
    // Eliminate pivots in increasing order; rows only touch indices >= their pivot.
    std::size_t pos = 0;
    while (pos < v.entries().size()) {
        const auto [idx, coef] = v.entries()[pos];
        auto it = rows_.find(idx);
        if (it == rows_.end()) {
            ++pos;
            continue;
        }
        Rational f = -coef;
        v.axpy(f, it->second.vec);
        for (const auto& [k, c] : it->second.how) {
            Rational& h = how[k];
            h += f * c;
            if (sgn(h) == 0) how.erase(k);
        }
    }
}

bool Span::insert(const StateVector& v) {
    if (!v.known()) throw Error(ErrorKind::WindowTooSmall, "cannot insert an unknown vector into a span");
    std::size_t id = count_++;
    StateVector w = v;
    std::map<std::size_t, Rational> how{{id, Rational(1)}};
    reduce(w, how);
    if (w.entries().empty()) return false;
    Rational lead = w.entries().front().second;
    std::uint32_t pivot = w.entries().front().first;
    Rational inv = 1 / lead;
    w = w.scaled(inv);
    for (auto& [k, c] : how) c *= inv;
    // Keep the basis reduced so later rows never need the new pivot.
    for (auto& [p, row] : rows_) {
        Rational c = row.vec.get(pivot);
        if (sgn(c) == 0) continue;
        row.vec.axpy(-c, w);
        for (const auto& [k, h] : how) {
            Rational& r = row.how[k];
            r -= c * h;
            if (sgn(r) == 0) row.how.erase(k);
        }
    }
    rows_.emplace(pivot, Row{std::move(w), std::move(how)});
    return true;
}

std::optional<std::map<std::size_t, Rational>> Span::express(const StateVector& v) const {
    if (!v.known()) return std::nullopt;
    StateVector w = v;
    std::map<std::size_t, Rational> how;
    reduce(w, how);
    if (!w.entries().empty()) return std::nullopt;
    for (auto& [k, c] : how) c = -c;
    return how;
}

}  // namespace opea
