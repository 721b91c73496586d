#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "opea/error.hpp"

namespace opea {

using Rational = mpq_class;

Rational parse_rational(const std::string& text);
Rational ratio(long num, long den);  // canonical num/den
std::string to_string(const Rational& q);
bool is_integer(const Rational& q);
Rational floor_of(const Rational& q);
Rational frac_of(const Rational& q);  // q - floor(q), in [0,1)
long to_long(const Rational& q);      // q must be an integer that fits

// Exponent pair vn = (n, nbar), one component per sector.
struct ExpPair {
    Rational n;
    Rational nbar;

    ExpPair() = default;
    ExpPair(Rational a, Rational b) : n(std::move(a)), nbar(std::move(b)) {}
    ExpPair(long a, long b) : n(a), nbar(b) {}

    const Rational& operator[](int sector) const { return sector == 0 ? n : nbar; }
    Rational& operator[](int sector) { return sector == 0 ? n : nbar; }

    ExpPair operator+(const ExpPair& o) const { return {n + o.n, nbar + o.nbar}; }
    ExpPair operator-(const ExpPair& o) const { return {n - o.n, nbar - o.nbar}; }
    ExpPair operator-() const { return {-n, -nbar}; }
    bool operator==(const ExpPair& o) const { return n == o.n && nbar == o.nbar; }
    bool operator!=(const ExpPair& o) const { return !(*this == o); }
    bool operator<(const ExpPair& o) const {
        if (n != o.n) return n < o.n;
        return nbar < o.nbar;
    }
    bool integral() const { return is_integer(n) && is_integer(nbar); }
    Rational total() const { return n + nbar; }
};

std::string to_string(const ExpPair& e);
std::size_t hash_value(const Rational& q);
std::size_t hash_value(const ExpPair& e);

struct ExpPairHash {
    std::size_t operator()(const ExpPair& e) const { return hash_value(e); }
};

// Canonical representative of vn + Z^2, both components in [0,1).
struct CosetKey {
    Rational n;
    Rational nbar;

    static CosetKey of(const ExpPair& e);
    bool operator==(const CosetKey& o) const { return n == o.n && nbar == o.nbar; }
    bool operator<(const CosetKey& o) const {
        if (n != o.n) return n < o.n;
        return nbar < o.nbar;
    }
    ExpPair pair() const { return {n, nbar}; }
};

std::string to_string(const CosetKey& c);

enum class Parity { even = 0, odd = 1 };

inline Parity operator+(Parity a, Parity b) {
    return a == b ? Parity::even : Parity::odd;
}
inline int supersign(Parity a, Parity b) {
    return (a == Parity::odd && b == Parity::odd) ? -1 : 1;
}
const char* to_string(Parity p);

Rational gen_binom(const Rational& n, unsigned long i);
Rational binom2(const ExpPair& n, unsigned long i, unsigned long ibar);
Rational divided_scalar(unsigned long n);

bool in_vbbk(const ExpPair& e);
int int_sign(const ExpPair& e);

// perm[k] is the item sitting at position k.
int koszul_sign(std::span<const std::size_t> perm, std::span<const Parity> parities);

}  // namespace opea
