#pragma once

#include "tdiff/rational.hpp"

#include <mpfr.h>

#include <string>

namespace tdiff {

// Closed enclosure [lo, hi] of a real number with MPFR endpoints rounded outward.
class RealInterval {
public:
    static constexpr mpfr_prec_t kDefaultPrec = 256;

    explicit RealInterval(mpfr_prec_t prec = kDefaultPrec);
    RealInterval(const Rational& r, mpfr_prec_t prec = kDefaultPrec);
    RealInterval(const RealInterval& other);
    RealInterval(RealInterval&& other) noexcept;
    RealInterval& operator=(const RealInterval& other);
    RealInterval& operator=(RealInterval&& other) noexcept;
    ~RealInterval();

    static RealInterval hull(const RealInterval& a, const RealInterval& b);
    // Enclosure of max(x, y) for x in a, y in b.
    static RealInterval max(const RealInterval& a, const RealInterval& b);

    friend RealInterval operator+(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator-(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator*(const RealInterval& a, const RealInterval& b);
    friend RealInterval operator/(const RealInterval& a, const RealInterval& b);

    // Requires a positive enclosure for the base.
    RealInterval pow(const Rational& exponent) const;
    RealInterval pow(const RealInterval& exponent) const;
    RealInterval log() const;
    RealInterval exp() const;
    static RealInterval e(mpfr_prec_t prec = kDefaultPrec);

    double lo() const;   // rounded down
    double hi() const;   // rounded up
    double mid() const;
    Rational lo_rational() const;
    Rational hi_rational() const;
    // log2 of the width, or -inf for a point.
    double width_log2() const;
    mpfr_prec_t precision() const { return prec_; }

    bool certainly_less(const RealInterval& o) const;      // hi < o.lo
    bool certainly_leq(const RealInterval& o) const;       // hi <= o.lo
    bool contains(const Rational& r) const;
    bool overlaps(const RealInterval& o) const;
    bool positive() const;

    std::string str(int digits = 15) const;

    const __mpfr_struct* lo_ptr() const { return lo_; }
    const __mpfr_struct* hi_ptr() const { return hi_; }

private:
    mpfr_prec_t prec_;
    mpfr_t lo_;
    mpfr_t hi_;
};

}  // namespace tdiff
