#include "tdiff/real.hpp"

#include "tdiff/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace tdiff {

RealInterval::RealInterval(mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
}

RealInterval::RealInterval(const Rational& r, mpfr_prec_t prec) : prec_(prec) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set_q(lo_, r.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi_, r.get_mpq_t(), MPFR_RNDU);
}

RealInterval::RealInterval(const RealInterval& other) : prec_(other.prec_) {
    mpfr_init2(lo_, prec_);
    mpfr_init2(hi_, prec_);
    mpfr_set(lo_, other.lo_, MPFR_RNDD);
    mpfr_set(hi_, other.hi_, MPFR_RNDU);
}

RealInterval::RealInterval(RealInterval&& other) noexcept : RealInterval(other.prec_) {
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
}

RealInterval& RealInterval::operator=(const RealInterval& other) {
    if (this != &other) {
        prec_ = other.prec_;
        mpfr_set_prec(lo_, prec_);
        mpfr_set_prec(hi_, prec_);
        mpfr_set(lo_, other.lo_, MPFR_RNDD);
        mpfr_set(hi_, other.hi_, MPFR_RNDU);
    }
    return *this;
}

RealInterval& RealInterval::operator=(RealInterval&& other) noexcept {
    std::swap(prec_, other.prec_);
    mpfr_swap(lo_, other.lo_);
    mpfr_swap(hi_, other.hi_);
    return *this;
}

RealInterval::~RealInterval() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
}

RealInterval RealInterval::hull(const RealInterval& a, const RealInterval& b) {
    RealInterval r(std::max(a.prec_, b.prec_));
    mpfr_min(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::max(const RealInterval& a, const RealInterval& b) {
    RealInterval r(std::max(a.prec_, b.prec_));
    mpfr_max(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_max(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval operator+(const RealInterval& a, const RealInterval& b) {
    RealInterval r(std::max(a.prec_, b.prec_));
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
}

RealInterval operator-(const RealInterval& a, const RealInterval& b) {
    RealInterval r(std::max(a.prec_, b.prec_));
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
}

namespace {

using BinOp = int (*)(mpfr_ptr, mpfr_srcptr, mpfr_srcptr, mpfr_rnd_t);

// Min and max of op over the four endpoint combinations.
RealInterval corners(const RealInterval& a, const RealInterval& b, BinOp op, mpfr_prec_t prec) {
    mpfr_srcptr as[2] = {a.lo_ptr(), a.hi_ptr()};
    mpfr_srcptr bs[2] = {b.lo_ptr(), b.hi_ptr()};
    RealInterval r(prec);
    mpfr_t t;
    mpfr_init2(t, prec);
    mpfr_set_inf(const_cast<mpfr_ptr>(r.lo_ptr()), 1);
    mpfr_set_inf(const_cast<mpfr_ptr>(r.hi_ptr()), -1);
    for (auto x : as)
        for (auto y : bs) {
            op(t, x, y, MPFR_RNDD);
            if (mpfr_less_p(t, r.lo_ptr())) mpfr_set(const_cast<mpfr_ptr>(r.lo_ptr()), t, MPFR_RNDD);
            op(t, x, y, MPFR_RNDU);
            if (mpfr_greater_p(t, r.hi_ptr())) mpfr_set(const_cast<mpfr_ptr>(r.hi_ptr()), t, MPFR_RNDU);
        }
    mpfr_clear(t);
    return r;
}

}  // namespace

RealInterval operator*(const RealInterval& a, const RealInterval& b) {
    return corners(a, b, mpfr_mul, std::max(a.prec_, b.prec_));
}

RealInterval operator/(const RealInterval& a, const RealInterval& b) {
    if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0)
        throw PreconditionError("interval division by an enclosure of zero");
    return corners(a, b, mpfr_div, std::max(a.prec_, b.prec_));
}

RealInterval RealInterval::pow(const RealInterval& exponent) const {
    if (mpfr_sgn(lo_) <= 0) throw PreconditionError("interval power needs a positive base");
    // x^y is monotone in each argument for x > 0, so the corners bound it.
    return corners(*this, exponent, mpfr_pow, std::max(prec_, exponent.prec_));
}

RealInterval RealInterval::pow(const Rational& exponent) const {
    if (exponent == 0) return RealInterval(Rational(1), prec_);
    if (is_integer(exponent) && exponent > 0 && mpfr_sgn(lo_) >= 0) {
        RealInterval r(prec_);
        unsigned long n = exponent.get_num().get_ui();
        mpfr_pow_ui(r.lo_, lo_, n, MPFR_RNDD);
        mpfr_pow_ui(r.hi_, hi_, n, MPFR_RNDU);
        return r;
    }
    return pow(RealInterval(exponent, prec_));
}

RealInterval RealInterval::log() const {
    if (mpfr_sgn(lo_) <= 0) throw PreconditionError("interval log needs a positive argument");
    RealInterval r(prec_);
    mpfr_log(r.lo_, lo_, MPFR_RNDD);
    mpfr_log(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::exp() const {
    RealInterval r(prec_);
    mpfr_exp(r.lo_, lo_, MPFR_RNDD);
    mpfr_exp(r.hi_, hi_, MPFR_RNDU);
    return r;
}

RealInterval RealInterval::e(mpfr_prec_t prec) { return RealInterval(Rational(1), prec).exp(); }

double RealInterval::lo() const { return mpfr_get_d(lo_, MPFR_RNDD); }
double RealInterval::hi() const { return mpfr_get_d(hi_, MPFR_RNDU); }

double RealInterval::mid() const {
    mpfr_t m;
    mpfr_init2(m, prec_ + 1);
    mpfr_add(m, lo_, hi_, MPFR_RNDN);
    mpfr_div_2ui(m, m, 1, MPFR_RNDN);
    double d = mpfr_get_d(m, MPFR_RNDN);
    mpfr_clear(m);
    return d;
}

namespace {
Rational mpfr_to_rational(mpfr_srcptr x) {
    if (!mpfr_number_p(x)) throw PreconditionError("non-finite enclosure endpoint");
    mpz_t m;
    mpz_init(m);
    mpfr_exp_t e = mpfr_get_z_2exp(m, x);
    BigInt mant(m);
    mpz_clear(m);
    return Rational(mant) * pow2(e);
}
}  // namespace

Rational RealInterval::lo_rational() const { return mpfr_to_rational(lo_); }
Rational RealInterval::hi_rational() const { return mpfr_to_rational(hi_); }

double RealInterval::width_log2() const {
    mpfr_t w;
    mpfr_init2(w, prec_);
    mpfr_sub(w, hi_, lo_, MPFR_RNDU);
    double r = mpfr_zero_p(w) ? -std::numeric_limits<double>::infinity()
                              : std::log2(mpfr_get_d(w, MPFR_RNDU));
    mpfr_clear(w);
    return r;
}

bool RealInterval::certainly_less(const RealInterval& o) const { return mpfr_less_p(hi_, o.lo_); }
bool RealInterval::certainly_leq(const RealInterval& o) const { return mpfr_lessequal_p(hi_, o.lo_); }

bool RealInterval::contains(const Rational& r) const {
    return mpfr_cmp_q(lo_, r.get_mpq_t()) <= 0 && mpfr_cmp_q(hi_, r.get_mpq_t()) >= 0;
}

bool RealInterval::overlaps(const RealInterval& o) const {
    return mpfr_lessequal_p(lo_, o.hi_) && mpfr_lessequal_p(o.lo_, hi_);
}

bool RealInterval::positive() const { return mpfr_sgn(lo_) > 0; }

std::string RealInterval::str(int digits) const {
    std::vector<char> a(80 + digits), b(80 + digits);
    std::string fmt_lo = "%." + std::to_string(digits) + "RDg";
    std::string fmt_hi = "%." + std::to_string(digits) + "RUg";
    mpfr_snprintf(a.data(), a.size(), fmt_lo.c_str(), lo_);
    mpfr_snprintf(b.data(), b.size(), fmt_hi.c_str(), hi_);
    return "[" + std::string(a.data()) + ", " + std::string(b.data()) + "]";
}

}  // namespace tdiff
