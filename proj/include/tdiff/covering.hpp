#pragma once

#include "tdiff/box.hpp"
#include "tdiff/configuration.hpp"
#include "tdiff/rational.hpp"
#include "tdiff/rdf.hpp"
#include "tdiff/report.hpp"

#include <gmpxx.h>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tdiff {

// What one child cube S* = [0, 2^-t)^{t+1} receives, in coordinates relative to its corner.
struct ConfigTemplate {
    int level = 0;                 // t
    Configuration config;          // around Q* = [0, 2^-t-1)^d x [0, 2^-t)^{t+1-d}
    std::vector<QBlock> residual;  // maximal Q-blocks of S* minus the configuration union
    Rational union_measure;

    Box cube() const;
};

ConfigTemplate make_template(int t, const Rational& eps, int d);

// One configuration of a plan, located by its 0-based position in the enumeration.
struct ConfigInstance {
    BigInt index;
    int round = 0;
    int level = 0;                  // template level t
    std::vector<Rational> corner;   // absolute corner of S*
    BigInt group;                   // ceil((index + 1) / 2^m)
    bool selected = false;
    BigInt sibling;                 // position among the children of its parent cube

    Configuration configuration(const ConfigTemplate& tpl) const { return tpl.config.shifted(corner); }
};

// Step of a path through the recursion: which block, which cube in it, which child S*.
struct PathStep {
    int slot = 0;
    BigInt cube;
    BigInt child;
};

class CoveringPlan {
public:
    Box domain;
    Rational eps;
    int d = 0;
    int m = 0;
    int rounds = 0;
    Rational c;
    std::vector<QBlock> initial;
    std::map<int, ConfigTemplate> templates;
    // cubes_at[k][s]: number of Q_s cubes handed to round k+1 (k = rounds: leftover residual)
    std::vector<std::map<int, BigInt>> cubes_at;
    // selected iff sibling index mod 2^m equals this offset
    BigInt selection_offset;
    // 0-based indices of configurations removed from the plan
    std::vector<BigInt> deleted;

    const ConfigTemplate& tpl(int t) const;
    BigInt block_size() const { return pow2_int(static_cast<unsigned long>(m)); }

    BigInt total_configs() const;
    BigInt configs_in_round(int r) const;
    BigInt configs_in_round(int r, int t) const;
    // Per template level over all rounds.
    std::map<int, BigInt> configs_per_template() const;
    std::map<int, BigInt> selected_per_template() const;

    Rational covered_measure() const;
    Rational residual_measure() const;
    Rational covered_in_round(int r) const;

    ConfigInstance locate(const BigInt& index) const;
    BigInt index_of(int round, const std::vector<PathStep>& path) const;
    std::vector<PathStep> path_of(const BigInt& index, int* round = nullptr) const;
    // Sum of union measures of configurations with smaller index.
    Rational prefix_measure(const BigInt& index) const;
    // First configuration of template level t with the given selection status.
    std::optional<ConfigInstance> first_instance(int t, bool selected) const;
    ConfigInstance sample_instance(int t, bool selected, gmp_randclass& rng) const;

    bool is_selected_sibling(const BigInt& sibling) const;

    // Explicit enumeration in index order; stops early when the callback returns false.
    void for_each_config(const std::function<bool(const ConfigInstance&)>& fn) const;
    // Leftover blocks after the last round, in absolute coordinates.
    void for_each_residual_block(const std::function<bool(const QBlock&)>& fn) const;

private:
    friend CoveringPlan cover_rectangle(const Box&, const Rational&, int, int, int);
    const BigInt& per_cube(int s, int j) const;        // round-(depth+j+1) configs under one Q_s cube
    const Rational& per_cube_weight(int s, int j) const;
    const BigInt& reach(int s, int j, int target) const;  // level-target cubes j rounds below one Q_s cube
    std::vector<Rational> child_offset(int s, const BigInt& child) const;
    int block_level(int parent_t, int slot) const;
    const QBlock& block(int parent_t, int slot) const;

    mutable std::map<std::pair<int, int>, BigInt> per_cube_;
    mutable std::map<std::pair<int, int>, Rational> per_cube_weight_;
    mutable std::map<std::tuple<int, int, int>, BigInt> reach_;
};

CoveringPlan cover_rectangle(const Box& U, const Rational& eps, int d, int m, int T);

Report verify_plan(const CoveringPlan& plan, std::uint64_t seed = 1);

struct ExplicitPlan {
    Box domain;
    int m = 0;
    std::vector<ConfigInstance> configs;
    std::vector<Configuration> configurations;
    std::vector<QBlock> residual;
};

ExplicitPlan materialize(const CoveringPlan& plan, std::size_t cap = 100000);
// Brute-force checks: all union pairs disjoint, inside the domain, residual disjoint
// from everything, exact measure balance, and 2^m congruent equal-measure members per label.
Report verify_explicit_plan(const ExplicitPlan& plan);

}  // namespace tdiff
