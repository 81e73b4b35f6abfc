#pragma once

#include "tdiff/box.hpp"
#include "tdiff/rational.hpp"
#include "tdiff/real.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tdiff {

// Q0 plus d translates; translate i moves the i-th constrained coordinate of Q0 by
// (1 - eps) times that side.
struct Configuration {
    Box q0;
    int d = 0;
    Rational eps;
    std::vector<int> shift_coords;   // coordinate index of translate i (size d)
    std::vector<Box> translates;     // Q_1..Q_d

    // Q0 first, then Q_1..Q_d.
    std::vector<Box> members() const;
    Rational union_measure() const;  // (1 + d - eps d)|Q0|
    Configuration shifted(const std::vector<Rational>& offset) const;
};

Configuration make_configuration(const Box& q0, const Rational& eps, int d);
// Q0 = [0, 2^-k)^d with the smallest k allowed by the measure bound.
Configuration standard_configuration(const Rational& eps, int d);

struct ConfigCell {
    Box box;
    std::uint64_t members = 0;  // bit 0: Q0, bit i: Q_i
    int subset = -1;            // inside cells: subset of {1..d} as a bitmask over bits 0..d-1
    int outside = 0;            // outside cells: i for Q_i \ Q0
};

inline constexpr int kAtomModeCap = 12;

// 2^d cells inside Q0 (by subset) followed by the d cells Q_i \ Q0.
std::vector<ConfigCell> configuration_cells(const Configuration& c, int cap = kAtomModeCap);

// Closed-form ledger used above the atom-mode cap.
struct CellMeasureLedger {
    // inside[k]: measure of each of the C(d,k) inside cells with |S| = k
    std::vector<Rational> inside;
    Rational outside;  // measure of each Q_i \ Q0
    Rational total;
};
CellMeasureLedger cell_measure_ledger(const Configuration& c);

enum class NormRegime { small, log, linear };
std::string to_string(NormRegime r);

struct NormEstimate {
    Rational p;
    Rational p_star;
    long double a_p = 0;
    NormRegime regime = NormRegime::small;
    long double value = 0;
};

NormEstimate config_norm_oracle(const Rational& eps, long d, const Rational& p);

// Cells of the overlay of a family of boxes, grouped by membership signature.
// Points outside every box are not represented.
struct Arrangement {
    struct Atom {
        std::vector<std::uint64_t> signature;
        Rational measure;
        std::vector<Box> pieces;  // elementary boxes, kept on request
        bool in(std::size_t k) const { return (signature[k / 64] >> (k % 64)) & 1u; }
    };
    std::vector<Box> boxes;
    std::vector<Atom> atoms;

    Rational measure_of(std::size_t k) const { return boxes[k].measure(); }
};
Arrangement build_arrangement(const std::vector<Box>& boxes, bool keep_pieces = false);

// Nonnegative function given by values on pairwise disjoint boxes; 0 elsewhere.
struct ExplicitFunction {
    std::vector<Box> cells;
    std::vector<Rational> values;

    static ExplicitFunction indicator(const Box& b, const Rational& value = Rational(1));
    static ExplicitFunction constant(const Rational& value);
    Rational integral() const;
    RealInterval norm_pow(const Rational& p) const;  // ||f||_p^p
};

Rational average(const ExplicitFunction& f, const Box& S);

struct WeakRatio {
    RealInterval value;           // sup over lambda of lambda mu{Mf > lambda}^{1/p} / ||f||_p
    Rational lambda;              // attained maximal value realising the sup (from below)
    Rational level_measure;       // mu{Mf >= lambda}
    std::optional<Rational> value_pow;  // value^p, exact when p is an integer
};

struct LevelSet {
    Rational value;    // a value of Mf
    Rational measure;  // measure of the set where Mf takes it
};

// Ratio from the distribution of Mf and ||f||_p^p (exact when p is an integer).
WeakRatio ratio_from_distribution(std::vector<LevelSet> dist, const std::optional<Rational>& norm_exact,
                                  const RealInterval& norm_pp, const Rational& p);

// Maximal operator of the collection: sup of averages of |f| over members containing x.
WeakRatio weak_type_ratio(const std::vector<Box>& collection, const ExplicitFunction& f, const Rational& p);

struct WeakTypeSearchResult {
    Rational lower_bound;  // exact rational, never above the best ratio found
    RealInterval enclosure;
    std::string best;      // description of the maximising candidate
    std::size_t candidates = 0;
};

WeakTypeSearchResult weak_type_lower_search(const std::vector<Box>& collection, const Rational& p, long budget,
                                            std::uint64_t seed);

struct CoveringWitness {
    std::vector<int> chosen;      // indices into E
    bool exhaustive = false;
    Rational union_e;
    Rational union_f;
    Rational c_union;             // mu(U E) / mu(U F)
    RealInterval overlap_norm;    // || sum 1_F ||_{p*}
    RealInterval c_overlap;       // overlap_norm / mu(U E)^{1/p*}
    RealInterval constant;        // max of the two constants
};

// Subcollection F with mu(U F) >= mu(U E)/2 minimising the covering constant
// max(mu(U E)/mu(U F), ||sum 1_F||_{p*} / mu(U E)^{1/p*}); ties prefer the smaller
// overlap norm, then fewer boxes, then the lexicographically first index set.
CoveringWitness covering_witness_search(const std::vector<Box>& E, const Rational& p_star, long budget);

}  // namespace tdiff
