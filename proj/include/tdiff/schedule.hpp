#pragma once

#include "tdiff/error.hpp"
#include "tdiff/rational.hpp"
#include "tdiff/real.hpp"
#include "tdiff/report.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace tdiff {

struct ScheduleLevel {
    int j = 0;
    long d = 0;
    Rational eps;            // dyadic, in [target/2, target]
    RealInterval target;     // the prescribed value before quantization
    std::string target_text;
    int m = 0;
};

// eps_j d_j^{1/p} grows like j^{1/p - a} log^b(j+1).
struct GrowthDescriptor {
    Rational a;
    Rational b;
};

enum class Variant { geq, gt, custom };
std::string to_string(Variant v);
Variant parse_variant(const std::string& s);

struct Schedule {
    Variant variant = Variant::custom;
    Rational p0;
    int eps_bits = 0;  // extra binary digits kept when quantizing eps
    std::vector<ScheduleLevel> levels;
    std::optional<GrowthDescriptor> growth;
    bool degenerate = false;  // p0 = 1 with geq: R0 itself already has the range
    std::string note;

    int depth() const { return static_cast<int>(levels.size()); }
    const ScheduleLevel& level(int j) const { return levels.at(j - 1); }
};

// The m with 2^-m in (j^-2 (1+d-eps d)/4, j^-2 (1+d-eps d)/2].
int solve_m(int j, long d, const Rational& eps);

// d_j = j, eps_j = j^{-1/p0}/2 quantized.
Schedule schedule_geq(const Rational& p0, int J, int eps_bits = 0);
// d_j = j, eps_j = (j log^-2(j+1))^{-1/p0}/2 quantized.
Schedule schedule_gt(const Rational& p0, int J, int eps_bits = 0);
Schedule make_schedule(Variant v, const Rational& p0, int J, int eps_bits = 0);
// Levels given directly; no growth descriptor.
Schedule custom_schedule(const std::vector<std::pair<long, Rational>>& d_eps);

// Largest dyadic with (bits + k) binary digits not above target, where 2^-k is the
// largest power of two not above it. `sign(q)` returns the sign of target - q.
template <class SignFn>
Rational quantize_dyadic(SignFn&& sign, int bits);

enum class Range { in, out };
std::string to_string(Range r);
Range classify_diff_range(const GrowthDescriptor& g, const Rational& p);
Range classify_diff_range(const Schedule& s, const Rational& p);

Report check_schedule(const Schedule& s);

template <class SignFn>
Rational quantize_dyadic(SignFn&& sign, int bits) {
    int k = 0;
    while (sign(pow2(-k)) < 0) {
        if (++k > 4096) throw InvalidArgument("eps target too small to quantize");
    }
    long n = k + bits;
    // numerator in [2^bits, 2^{bits+1}); binary search on the exact sign
    BigInt lo = pow2_int(static_cast<unsigned long>(bits)), hi = lo * 2;
    while (hi - lo > 1) {
        BigInt mid = (lo + hi) / 2;
        if (sign(Rational(mid) * pow2(-n)) >= 0) lo = mid;
        else hi = mid;
    }
    return Rational(lo) * pow2(-n);
}

}  // namespace tdiff
