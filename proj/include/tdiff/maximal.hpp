#pragma once

#include "tdiff/basis.hpp"
#include "tdiff/configuration.hpp"
#include "tdiff/real.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tdiff {

// Simple function over the chain tree: one value on the uncovered part of every
// atom type (for the deepest level, the whole atom). Constant across instances.
struct BasisFunction {
    std::vector<Rational> values;  // indexed by node

    static BasisFunction constant(const LeveledBasis& b, const Rational& c);
    static BasisFunction random(const LeveledBasis& b, std::uint64_t seed, long max_value = 8);
};

// f = sup_j eps_j^{-1} 1_{F_j}
BasisFunction counterexample_function(const LeveledBasis& b);

struct Window {
    int lo = 1;
    int hi = 1 << 30;
    bool has(int j) const { return lo <= j && j <= hi; }
};

struct Evaluation {
    std::vector<Rational> piece;                  // per node: measure of its uncovered part
    std::vector<Rational> integral;               // per node: integral over one atom instance
    std::vector<std::vector<Rational>> avg;       // per group and member: the average
};

Evaluation evaluate(const LeveledBasis& b, const BasisFunction& f);

// Average of f over member k of the representative configuration of group g.
Rational average(const LeveledBasis& b, const Evaluation& e, int group, int member);

// Maximal function on the uncovered part of every node, members restricted to the window.
std::vector<Rational> maximal_values(const LeveledBasis& b, const Evaluation& e, const Window& w);
Rational maximal_value(const LeveledBasis& b, const BasisFunction& f, int node, const Window& w);
// Deepest node whose representative atom holds the cell.
int locate_cell(const LeveledBasis& b, const Box& cell);

RealInterval norm_pow(const LeveledBasis& b, const Evaluation& e, const BasisFunction& f, const Rational& p);
std::optional<Rational> norm_pow_exact(const LeveledBasis& b, const Evaluation& e, const BasisFunction& f, const Rational& p);

WeakRatio weak_type_ratio(const LeveledBasis& b, const BasisFunction& f, const Rational& p, const Window& w = {});

struct DerivateBounds {
    int node = 0;
    Window window;
    std::optional<Rational> upper_lb;  // max average over members in the window holding the atom
    std::optional<Rational> lower_ub;  // min of the same averages
};
DerivateBounds derivate_bounds(const LeveledBasis& b, const Evaluation& e, int node, const Window& w);

struct LpRow {
    int j = 0;
    Rational f_measure;       // |F_j|
    RealInterval term;        // eps^-p |F_j|
    std::optional<Rational> term_exact;
    RealInterval partial;     // sum of terms up to j
    RealInterval bound;       // eps^-p j^-2 / 2
    RealInterval target_bound; // target^-p j^-2 / 2
    bool within_bound = false;
    bool within_target_bound = false;
};

struct LpLedger {
    Rational p;
    std::vector<LpRow> rows;
    RealInterval total;
    RealInterval target_total;  // sum of the target bounds over the listed levels
};

// From closed-form ledger rows (limit or truncated) of the schedule.
LpLedger lp_ledger(const Schedule& s, const std::vector<LedgerRow>& rows, const Rational& p);
LpLedger lp_ledger(const Schedule& s, const std::vector<LedgerRow>& rows, const Rational& p, const Rational& domain_measure);
LpLedger lp_ledger(const LeveledBasis& b, const Rational& p);

struct ExceptionalBound {
    Rational value;        // max(0, union - sum_f)
    Rational core;
    Rational union_fstar;  // |U F*_j inside the core|
    Rational sum_f;        // sum |F_j|
};
// Core is the level-J covered measure of the ledger.
ExceptionalBound exceptional_lower_bound(const std::vector<LedgerRow>& rows, int J);
ExceptionalBound exceptional_lower_bound(const LeveledBasis& b, int J);

struct DisjointnessResult {
    bool ok = true;
    std::size_t lambdas = 0;
    std::size_t maximal = 0;      // maximal member types found (summed over lambdas for a fixed lambda)
    std::size_t pairs = 0;        // intersecting cross-level pairs examined
    std::string detail;
};

// Member types of the basis with the members containing them (same configuration or
// an ancestor). Throws PreconditionError if a pair overlaps without nesting.
struct NestingIndex {
    struct Member {
        int group = 0;
        int k = 0;
        int level = 0;
        std::vector<std::size_t> containing;
        std::vector<std::size_t> ancestors;  // containing members at shallower levels
    };
    std::vector<Member> members;
};
NestingIndex nesting_index(const LeveledBasis& b);

// Members with average above lambda, their maximal elements, and disjointness across levels.
DisjointnessResult maximal_disjointness_check(const LeveledBasis& b, const BasisFunction& f, const Rational& lambda);
DisjointnessResult maximal_disjointness_check(const LeveledBasis& b, const NestingIndex& ix, const BasisFunction& f,
                                              const Rational& lambda);
// The same over every attained average as lambda.
DisjointnessResult maximal_disjointness_grid(const LeveledBasis& b, const BasisFunction& f);
DisjointnessResult maximal_disjointness_grid(const LeveledBasis& b, const NestingIndex& ix, const BasisFunction& f);
// Explicit collection tagged by level; rejects collections violating the nesting property.
DisjointnessResult maximal_disjointness_check(const std::vector<std::pair<int, Box>>& members, const ExplicitFunction& f,
                                              const Rational& lambda);

}  // namespace tdiff
