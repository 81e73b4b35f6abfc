#pragma once

#include "tdiff/basis.hpp"
#include "tdiff/covering.hpp"
#include "tdiff/spaces.hpp"

#include "json.hpp"

#include <string>

namespace tdiff {

using Json = nlohmann::json;

// Always "p/q", also for integers.
std::string rational_text(const Rational& r);
Rational rational_from_json(const Json& j);

Json box_to_json(const Box& b);
Box box_from_json(const Json& j);

Json plan_to_json(const CoveringPlan& plan, std::size_t listing_cap = 256);

struct BasisParams {
    std::string variant = "geq";
    Rational p0 = Rational(2);
    int depth = 1;
    int rounds = 1;
    int eps_bits = 0;
    Box domain;
    std::size_t chain_cap = 1000000;
    std::vector<std::pair<long, Rational>> custom;  // (d, eps) per level for the custom variant

    Schedule schedule() const;
    LeveledBasis build() const;
};

Json params_to_json(const BasisParams& p);
BasisParams params_from_json(const Json& j);

Json schedule_to_json(const Schedule& s);
Json ledger_to_json(const std::vector<LedgerRow>& rows);
Json basis_to_json(const LeveledBasis& b, const BasisParams& p, std::size_t listing_cap = 64);
Json transfer_to_json(const LeveledBasis& b, const IntervalUnionBasis& t);

Json read_json_file(const std::string& path);
// Canonical text: sorted keys, no whitespace, trailing newline.
std::string canonical(const Json& j);

}  // namespace tdiff
