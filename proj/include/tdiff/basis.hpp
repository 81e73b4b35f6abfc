#pragma once

#include "tdiff/box.hpp"
#include "tdiff/configuration.hpp"
#include "tdiff/covering.hpp"
#include "tdiff/report.hpp"
#include "tdiff/schedule.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

namespace tdiff {

// One covering plan, shared by every atom of the same shape. Domains are given
// relative to the corner of the parent cube S* (the root plan covers U itself).
struct PlanClass {
    int j = 0;
    int parent_t = 0;     // template level of the parent configuration, 0 at the root
    int parent_cell = -1;
    Box domain;
    CoveringPlan plan;
    std::map<int, BigInt> per_template;
    std::map<std::pair<int, bool>, ConfigInstance> reps;
};

// Configurations of one template and selection status inside one parent atom type.
struct ConfigGroup {
    int level = 0;
    int parent = -1;  // node
    int t = 0;
    bool selected = false;
    BigInt count;     // configurations of this type in the whole basis
    std::vector<Rational> origin;  // corner of S* for the representative realization
    std::vector<int> cells;        // nodes, in configuration_cells order
};

// A chain type: one atom of Sigma_level together with its ancestry. Level 0 is U.
struct BasisNode {
    int level = 0;
    int parent = -1;
    int group = -1;
    int t = 0;
    bool selected = false;
    int cell = -1;
    std::uint64_t members = 0;   // which members of its configuration contain it
    std::uint64_t sel_mask = 0;  // bit j-1: the level-j configuration of the chain is selected
    std::uint64_t q0_mask = 0;   // bit j-1: the level-j cell lies in the central box
    BigInt count;
    Rational measure;            // of one instance
    int plan = -1;               // plan covering it at level + 1
    std::vector<int> groups;     // configuration groups inside it at level + 1
};

struct BuildOptions {
    std::size_t chain_cap = 1000000;
    std::vector<long> selection_shift;  // per level, added to the default offset 2^m - 1
};

struct LedgerRow {
    int j = 0;
    long d = 0;
    Rational eps;
    int m = 0;
    Rational c;
    Rational kappa;          // fraction of each atom covered by the level-j plan
    Rational covered;        // |E_j| total
    Rational f_star;         // |F*_j|
    Rational f;              // |F_j|
};

class LeveledBasis {
public:
    Box domain;
    Schedule schedule;
    int rounds = 0;
    BuildOptions options;
    std::vector<PlanClass> plans;
    std::map<std::tuple<int, int, int>, int> plan_index;
    std::map<std::pair<int, int>, std::vector<ConfigCell>> cells;  // (j, t), relative to S*
    std::vector<BasisNode> nodes;
    std::vector<ConfigGroup> groups;
    std::vector<BigInt> extra_selected;  // level-1 indices forced into Lambda_1
    int deferred = 0;

    int depth() const { return schedule.depth(); }
    const ConfigTemplate& tpl(int j, int t) const;
    const std::vector<ConfigCell>& template_cells(int j, int t) const;
    // Representative realization, absolute coordinates.
    Configuration group_configuration(int g) const;
    Box node_box(int n) const;
    std::vector<int> nodes_at(int level) const;
    std::vector<int> groups_at(int level) const;
    // Per instance: the part of the atom left uncovered by the next level.
    Rational residual_measure(int n) const;
    std::vector<LedgerRow> ledger() const;
    Rational core_measure() const;
};

LeveledBasis build_basis(const Box& U, const Schedule& s, int T, const BuildOptions& opt = {});

// Closed-form ledger from the schedule alone. No rounds means the T -> infinity limit.
std::vector<LedgerRow> ledger_oracle(const Schedule& s, std::optional<int> T, const Rational& domain_measure);

struct AxiomOptions {
    std::uint64_t seed = 1;
    int random_chains = 200;
};

Report verify_axioms(const LeveledBasis& b, const AxiomOptions& opt = {});

// |intersection over J' of F*_j, inside the core| from the chain tree.
Rational independence_measure(const LeveledBasis& b, std::uint64_t subset);

}  // namespace tdiff
