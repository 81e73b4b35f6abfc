#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace tdiff {

using BigInt = mpz_class;
using Rational = mpq_class;

Rational make_rational(const BigInt& num, const BigInt& den);

// Accepts "p/q", "p", and plain decimals such as "1.99" or "-0.5".
Rational parse_rational(std::string_view text);
BigInt parse_bigint(std::string_view text);

// Always "p/q", also for integers ("3/1", "0/1").
std::string to_string(const Rational& r);
std::string to_string(const BigInt& z);
// 12 significant digits unless asked otherwise.
std::string to_decimal(const Rational& r, int digits = 12);
double to_double(const Rational& r);

Rational pow2(long e);
BigInt pow2_int(unsigned long e);
Rational pow(const Rational& base, unsigned long e);
BigInt pow(const BigInt& base, unsigned long e);

bool is_integer(const Rational& r);
bool is_dyadic(const Rational& r);
// Smallest k >= 0 with r * 2^k an integer, or -1 when the denominator is not a power of two.
int dyadic_level(const Rational& r);

BigInt floor_int(const Rational& r);
BigInt ceil_int(const Rational& r);

long to_long(const BigInt& z);

}  // namespace tdiff
