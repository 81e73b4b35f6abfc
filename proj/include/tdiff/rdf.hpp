#pragma once

#include "tdiff/box.hpp"
#include "tdiff/rational.hpp"

#include <optional>
#include <vector>

namespace tdiff {

// V_m = prod_i [0, 2^-e_i) x free tail.
struct RdfCell {
    long m = 0;
    std::vector<int> exponents;

    Box box() const;
    Rational measure() const;
};

RdfCell v_cell(long m);
Box q_cube(int k);

// Corners of P_k = H_{k^2+k}: multiples of 2^-k on coordinates 1..k+1.
class CornerGrid {
public:
    explicit CornerGrid(int k);
    int level() const { return k_; }
    BigInt size() const;                       // 2^{k(k+1)}
    std::vector<Rational> corner(const BigInt& index) const;  // lexicographic, coordinate 1 most significant

private:
    int k_;
};

// Corners of H_m for the cell v_cell(m), enumerated lexicographically.
class HGrid {
public:
    explicit HGrid(long m);
    BigInt size() const;
    bool done() const { return done_; }
    const std::vector<Rational>& corner() const { return corner_; }
    void next();

private:
    RdfCell cell_;
    std::vector<BigInt> digit_;
    std::vector<Rational> corner_;
    bool done_ = false;
};

// Tiles U by translates g + Q_k in lexicographic order of g.
std::vector<Box> split_into_qcubes(const Box& U, int k);
BigInt count_qcubes(const Box& U, int k);

struct RdfMatch {
    bool member = false;
    long m = 0;
    std::vector<Rational> corner;
};

RdfMatch is_rdf0_element(const Box& b);

// A region tiled by Q_level cubes: sides on coordinates 1..level+1 are aligned to the
// level grid and every other coordinate is free.
struct QBlock {
    Box region;
    int level = 0;

    BigInt count() const;
    // Corner of cube number `index` (lexicographic over coordinates 1..level+1).
    std::vector<Rational> cube_corner(const BigInt& index) const;
    Box cube(const BigInt& index) const;
    bool aligned() const;
};

// Maximal Q-family decomposition of a box into blocks of level >= min_level.
// Blocks are pairwise disjoint, cover the box, and no block cube lies in a
// coarser Q-cube contained in the box.
std::vector<QBlock> qblocks_of_box(const Box& b, int min_level);

}  // namespace tdiff
