#include "tdiff/rational.hpp"

#include "tdiff/error.hpp"

#include <mpfr.h>

#include <cctype>
#include <climits>
#include <vector>

namespace tdiff {

Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw InvalidArgument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

BigInt parse_bigint(std::string_view text) {
    std::string s(text);
    if (s.empty()) throw InvalidArgument("empty integer");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw InvalidArgument("malformed integer '" + s + "'");
    for (std::size_t k = i; k < s.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(s[k])))
            throw InvalidArgument("malformed integer '" + s + "'");
    if (s[0] == '+') s.erase(0, 1);
    return BigInt(s, 10);
}

Rational parse_rational(std::string_view text) {
    std::string s(text);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(0, 1);
    if (s.empty()) throw InvalidArgument("empty rational");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        BigInt p = parse_bigint(s.substr(0, slash));
        BigInt q = parse_bigint(s.substr(slash + 1));
        if (q <= 0) throw InvalidArgument("denominator must be positive in '" + s + "'");
        return make_rational(p, q);
    }
    if (auto dot = s.find('.'); dot != std::string::npos) {
        std::string whole = s.substr(0, dot);
        std::string frac = s.substr(dot + 1);
        bool neg = !whole.empty() && whole[0] == '-';
        if (!whole.empty() && (whole[0] == '-' || whole[0] == '+')) whole.erase(0, 1);
        if (whole.empty()) whole = "0";
        if (frac.empty()) frac = "0";
        BigInt w = parse_bigint(whole);
        BigInt f = parse_bigint(frac);
        if (frac[0] == '-' || frac[0] == '+') throw InvalidArgument("malformed decimal '" + s + "'");
        BigInt scale = pow(BigInt(10), frac.size());
        Rational r = make_rational(w * scale + f, scale);
        return neg ? Rational(-r) : r;
    }
    return Rational(parse_bigint(s));
}

std::string to_string(const Rational& r) {
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

std::string to_string(const BigInt& z) { return z.get_str(); }

std::string to_decimal(const Rational& r, int digits) {
    mpfr_t x;
    mpfr_init2(x, 256);
    mpfr_set_q(x, r.get_mpq_t(), MPFR_RNDN);
    std::vector<char> buf(64 + digits);
    std::string fmt = "%." + std::to_string(digits) + "Rg";
    mpfr_snprintf(buf.data(), buf.size(), fmt.c_str(), x);
    mpfr_clear(x);
    return std::string(buf.data());
}

double to_double(const Rational& r) {
    mpfr_t x;
    mpfr_init2(x, 128);
    mpfr_set_q(x, r.get_mpq_t(), MPFR_RNDN);
    double d = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return d;
}

BigInt pow2_int(unsigned long e) {
    BigInt z;
    mpz_ui_pow_ui(z.get_mpz_t(), 2, e);
    return z;
}

Rational pow2(long e) {
    if (e >= 0) return Rational(pow2_int(static_cast<unsigned long>(e)));
    return make_rational(1, pow2_int(static_cast<unsigned long>(-e)));
}

BigInt pow(const BigInt& base, unsigned long e) {
    BigInt z;
    mpz_pow_ui(z.get_mpz_t(), base.get_mpz_t(), e);
    return z;
}

Rational pow(const Rational& base, unsigned long e) {
    return make_rational(pow(BigInt(base.get_num()), e), pow(BigInt(base.get_den()), e));
}

bool is_integer(const Rational& r) { return r.get_den() == 1; }

int dyadic_level(const Rational& r) {
    const mpz_class& q = r.get_den();
    if (mpz_popcount(q.get_mpz_t()) != 1) return -1;
    return static_cast<int>(mpz_scan1(q.get_mpz_t(), 0));
}

bool is_dyadic(const Rational& r) { return dyadic_level(r) >= 0; }

BigInt floor_int(const Rational& r) {
    BigInt z;
    mpz_fdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return z;
}

BigInt ceil_int(const Rational& r) {
    BigInt z;
    mpz_cdiv_q(z.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
    return z;
}

long to_long(const BigInt& z) {
    if (!z.fits_slong_p()) throw CapExceeded("integer " + z.get_str() + " does not fit in a machine word");
    return z.get_si();
}

}  // namespace tdiff
