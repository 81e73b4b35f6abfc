#include "tdiff/schedule.hpp"

#include "tdiff/error.hpp"

#include <sstream>

namespace tdiff {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::geq: return "geq";
        case Variant::gt: return "gt";
        default: return "custom";
    }
}

Variant parse_variant(const std::string& s) {
    if (s == "geq") return Variant::geq;
    if (s == "gt") return Variant::gt;
    if (s == "custom") return Variant::custom;
    throw InvalidArgument("unknown schedule variant '" + s + "' (expected geq or gt)");
}

std::string to_string(Range r) { return r == Range::in ? "in" : "out"; }

int solve_m(int j, long d, const Rational& eps) {
    if (j < 1) throw InvalidArgument("level j must be >= 1");
    if (d < 1) throw InvalidArgument("d must be >= 1");
    if (!(eps > 0 && eps <= Rational(1, 2))) throw InvalidArgument("eps must lie in (0, 1/2]");
    Rational x = (1 + Rational(d) - eps * d) / (2 * Rational(j) * j);
    if (x > 1)
        throw InvalidArgument("j^-2 (1+d-eps d)/2 = " + to_string(x) + " exceeds 1 at level " + std::to_string(j) +
                              "; no m satisfies j^-2/4 < 2^-m (1+d-eps d)^-1 <= j^-2/2");
    int m = 0;
    while (pow2(-m) > x) ++m;
    if (m == 0)
        throw InvalidArgument("j^-2 (1+d-eps d)/2 = 1 at level " + std::to_string(j) + " forces m = 0");
    return m;
}

namespace {

// sign(a - b) for two enclosures, refining by the caller when ambiguous
int sign_of(const RealInterval& t, const Rational& q) {
    RealInterval Q(q, t.precision());
    if (Q.certainly_less(t)) return 1;
    if (t.certainly_less(Q)) return -1;
    return 0;  // undecided
}

RealInterval gt_target(int j, const Rational& p0, mpfr_prec_t prec) {
    // (j / log^2(j+1))^{-1/p0} / 2 = (log^2(j+1) / j)^{1/p0} / 2
    RealInterval l = RealInterval(Rational(j + 1), prec).log();
    RealInterval base = l * l / RealInterval(Rational(j), prec);
    return base.pow(1 / p0) / RealInterval(Rational(2), prec);
}

RealInterval geq_target(int j, const Rational& p0, mpfr_prec_t prec) {
    return RealInterval(Rational(j), prec).pow(-1 / p0) / RealInterval(Rational(2), prec);
}

std::string fmt_p0(const Rational& p0) {
    return is_integer(p0) ? p0.get_num().get_str() : "(" + p0.get_str() + ")";
}

void fill_level(Schedule& s, int j, const Rational& eps, RealInterval target, std::string text) {
    ScheduleLevel L;
    L.j = j;
    L.d = j;
    L.eps = eps;
    L.target = std::move(target);
    L.target_text = std::move(text);
    L.m = solve_m(j, L.d, eps);
    s.levels.push_back(std::move(L));
}

}  // namespace

Schedule schedule_geq(const Rational& p0, int J, int eps_bits) {
    if (p0 < 1) throw InvalidArgument("p0 must be >= 1");
    if (J < 0) throw InvalidArgument("depth must be >= 0");
    if (eps_bits < 0 || eps_bits > 30) throw InvalidArgument("eps granularity must lie in 0..30");
    Schedule s;
    s.variant = Variant::geq;
    s.p0 = p0;
    s.eps_bits = eps_bits;
    s.growth = GrowthDescriptor{1 / p0, Rational(0)};
    if (p0 == 1) {
        s.degenerate = true;
        s.note = "p0 = 1: R0 itself serves as the basis for this range";
    }
    const BigInt a = p0.get_num(), b = p0.get_den();
    for (int j = 1; j <= J; ++j) {
        // target >= q  <=>  j^{-b/a} >= 2q  <=>  (2q)^a j^b <= 1, decided with integers
        auto sign = [&](const Rational& q) {
            Rational lhs = pow(2 * q, a.get_ui()) * Rational(pow(BigInt(j), b.get_ui()));
            return lhs < 1 ? 1 : (lhs == 1 ? 0 : -1);
        };
        Rational eps = quantize_dyadic(sign, eps_bits);
        fill_level(s, j, eps, geq_target(j, p0, 256), std::to_string(j) + "^(-1/" + fmt_p0(p0) + ")/2");
    }
    return s;
}

Schedule schedule_gt(const Rational& p0, int J, int eps_bits) {
    if (p0 < 1) throw InvalidArgument("p0 must be >= 1");
    if (J < 0) throw InvalidArgument("depth must be >= 0");
    if (eps_bits < 0 || eps_bits > 30) throw InvalidArgument("eps granularity must lie in 0..30");
    Schedule s;
    s.variant = Variant::gt;
    s.p0 = p0;
    s.eps_bits = eps_bits;
    s.growth = GrowthDescriptor{1 / p0, 2 / p0};
    for (int j = 1; j <= J; ++j) {
        // the target is transcendental, so refining the enclosure always separates it from q
        auto sign = [&](const Rational& q) {
            for (mpfr_prec_t prec = 128; prec <= 8192; prec *= 2) {
                int sg = sign_of(gt_target(j, p0, prec), q);
                if (sg != 0) return sg;
            }
            throw PreconditionError("could not separate the eps target from " + to_string(q));
        };
        Rational eps = quantize_dyadic(sign, eps_bits);
        fill_level(s, j, eps, gt_target(j, p0, 256),
                   "(" + std::to_string(j) + " log^-2(" + std::to_string(j + 1) + "))^(-1/" + fmt_p0(p0) + ")/2");
    }
    return s;
}

Schedule make_schedule(Variant v, const Rational& p0, int J, int eps_bits) {
    if (v == Variant::geq) return schedule_geq(p0, J, eps_bits);
    if (v == Variant::gt) return schedule_gt(p0, J, eps_bits);
    throw InvalidArgument("custom schedules are given level by level");
}

Schedule custom_schedule(const std::vector<std::pair<long, Rational>>& d_eps) {
    Schedule s;
    s.variant = Variant::custom;
    int j = 0;
    for (const auto& [d, eps] : d_eps) {
        ++j;
        if (!is_dyadic(eps)) throw InvalidArgument("custom eps at level " + std::to_string(j) + " is not dyadic");
        ScheduleLevel L;
        L.j = j;
        L.d = d;
        L.eps = eps;
        L.target = RealInterval(eps);
        L.target_text = to_string(eps);
        L.m = solve_m(j, d, eps);
        s.levels.push_back(std::move(L));
    }
    return s;
}

Range classify_diff_range(const GrowthDescriptor& g, const Rational& p) {
    if (p < 1) throw InvalidArgument("p must be >= 1");
    Rational e = 1 / p - g.a;
    if (e < 0) return Range::in;
    if (e == 0 && g.b <= 0) return Range::in;
    return Range::out;
}

Range classify_diff_range(const Schedule& s, const Rational& p) {
    if (!s.growth) throw InvalidArgument("schedule has no growth descriptor to classify");
    return classify_diff_range(*s.growth, p);
}

Report check_schedule(const Schedule& s) {
    Report rep;
    for (const auto& L : s.levels) {
        std::string tag = "level " + std::to_string(L.j);
        Rational jj = Rational(L.j) * L.j;
        Rational v = pow2(-L.m) / (1 + Rational(L.d) - L.eps * L.d);
        bool m_ok = 1 / (4 * jj) < v && v <= 1 / (2 * jj);
        rep.add(tag + " m bound", m_ok, m_ok ? "" : "2^-m (1+d-eps d)^-1 = " + to_string(v) + " outside (j^-2/4, j^-2/2]");
        bool eps_ok = is_dyadic(L.eps) && L.eps > 0 && L.eps <= Rational(1, 2);
        if (s.variant != Variant::custom) {
            RealInterval e(L.eps);
            // eps <= target and target <= 2 eps
            eps_ok = eps_ok && (e.certainly_leq(L.target) || L.target.contains(L.eps));
            RealInterval twice(2 * L.eps);
            eps_ok = eps_ok && (L.target.certainly_less(twice));
        }
        rep.add(tag + " eps band", eps_ok, eps_ok ? "" : "eps = " + to_string(L.eps) + " not in [target/2, target]");
    }
    return rep;
}

}  // namespace tdiff
