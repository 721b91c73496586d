#include "opea/scalar.hpp"

#include <climits>

namespace opea {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NotInVbbK: return "NotInVbbK";
        case ErrorKind::InfiniteCoefficientSum: return "InfiniteCoefficientSum";
        case ErrorKind::NotInBracketSpace: return "NotInBracketSpace";
        case ErrorKind::SectorMismatch: return "SectorMismatch";
        case ErrorKind::NotLocal: return "NotLocal";
        case ErrorKind::WindowTooSmall: return "WindowTooSmall";
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::NotSpanning: return "NotSpanning";
        case ErrorKind::NotDual: return "NotDual";
        case ErrorKind::Inconsistent: return "Inconsistent";
        case ErrorKind::UnknownField: return "UnknownField";
    }
    return "Unknown";
}

Rational parse_rational(const std::string& text) {
    std::string t;
    for (char c : text)
        if (c != ' ' && c != '\t') t.push_back(c);
    if (t.empty()) throw Error(ErrorKind::ParseError, "empty number");
    if (t[0] == '+') t.erase(0, 1);
    auto slash = t.find('/');
    auto digits = [](const std::string& s, bool sign_ok) {
        std::size_t i = 0;
        if (sign_ok && !s.empty() && s[0] == '-') i = 1;
        if (i >= s.size()) return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9') return false;
        return true;
    };
    if (slash == std::string::npos) {
        if (!digits(t, true)) throw Error(ErrorKind::ParseError, "not a rational: " + text);
        return Rational(mpz_class(t));
    }
    std::string num = t.substr(0, slash), den = t.substr(slash + 1);
    if (!digits(num, true) || !digits(den, false))
        throw Error(ErrorKind::ParseError, "not a rational: " + text);
    mpz_class d(den);
    if (d == 0) throw Error(ErrorKind::ParseError, "zero denominator: " + text);
    Rational q(mpz_class(num), d);
    q.canonicalize();
    return q;
}

Rational ratio(long num, long den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

std::string to_string(const Rational& q) { return q.get_str(); }

bool is_integer(const Rational& q) { return q.get_den() == 1; }

Rational floor_of(const Rational& q) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return Rational(f);
}

Rational frac_of(const Rational& q) { return q - floor_of(q); }

long to_long(const Rational& q) {
    if (!is_integer(q) || !q.get_num().fits_slong_p())
        throw Error(ErrorKind::Inconsistent, "expected a small integer, got " + to_string(q));
    return q.get_num().get_si();
}

std::string to_string(const ExpPair& e) {
    return "(" + to_string(e.n) + "," + to_string(e.nbar) + ")";
}

std::size_t hash_value(const Rational& q) {
    const mpz_srcptr num = q.get_num_mpz_t();
    const mpz_srcptr den = q.get_den_mpz_t();
    std::size_t h = static_cast<std::size_t>(mpz_size(num) ? mpz_getlimbn(num, 0) : 0);
    h = h * 1000003u ^ static_cast<std::size_t>(mpz_sgn(num) + 1);
    h = h * 1000003u ^ static_cast<std::size_t>(mpz_getlimbn(den, 0));
    return h;
}

std::size_t hash_value(const ExpPair& e) {
    return hash_value(e.n) * 31u + hash_value(e.nbar);
}

CosetKey CosetKey::of(const ExpPair& e) { return {frac_of(e.n), frac_of(e.nbar)}; }

std::string to_string(const CosetKey& c) {
    return "(" + to_string(c.n) + "," + to_string(c.nbar) + ")+Z2";
}

const char* to_string(Parity p) { return p == Parity::odd ? "odd" : "even"; }

Rational gen_binom(const Rational& n, unsigned long i) {
    Rational r(1);
    for (unsigned long k = 0; k < i; ++k) {
        r *= n - k;
        r /= k + 1;
    }
    return r;
}

Rational binom2(const ExpPair& n, unsigned long i, unsigned long ibar) {
    return gen_binom(n.n, i) * gen_binom(n.nbar, ibar);
}

Rational divided_scalar(unsigned long n) {
    mpz_class f;
    mpz_fac_ui(f.get_mpz_t(), n);
    return Rational(mpz_class(1), f);
}

bool in_vbbk(const ExpPair& e) { return is_integer(e.n - e.nbar); }

int int_sign(const ExpPair& e) {
    Rational d = e.n - e.nbar;
    if (!is_integer(d))
        throw Error(ErrorKind::NotInVbbK, "exponent " + to_string(e) + " has non-integral difference");
    return mpz_odd_p(d.get_num_mpz_t()) ? -1 : 1;
}

int koszul_sign(std::span<const std::size_t> perm, std::span<const Parity> parities) {
    if (perm.size() != parities.size())
        throw Error(ErrorKind::Inconsistent, "koszul_sign: permutation and parity list differ in length");
    int s = 1;
    for (std::size_t k = 0; k < perm.size(); ++k)
        for (std::size_t l = k + 1; l < perm.size(); ++l)
            if (perm[k] > perm[l] && parities[perm[k]] == Parity::odd &&
                parities[perm[l]] == Parity::odd)
                s = -s;
    return s;
}

}  // namespace opea
