#pragma once

#include <set>
#include <string>
#include <string_view>

#include "fmalg/opalg.hpp"

namespace fmalg {

/// A pair of disjoint mode sets covering {1..M}, neither side empty.
class Bipartition {
public:
    /// First side {1..m}, second side {m+1..M}; requires 1 <= m < M.
    static Bipartition contiguous(int m, int modes);
    static Bipartition from_sets(std::set<int> side1, std::set<int> side2);

    /// Accepts "1,2|3,4" (explicit mode lists) or the shorthand "m:2/4".
    static Bipartition parse(std::string_view literal);
    std::string to_literal() const;  // always the explicit "1,2|3,4" form

    int modes() const { return modes_; }
    const std::set<int>& side(int which) const;  // which in {1, 2}

private:
    Bipartition(int modes, std::set<int> s1, std::set<int> s2)
        : modes_(modes), side1_(std::move(s1)), side2_(std::move(s2)) {}
    int modes_;
    std::set<int> side1_, side2_;
};

/// True iff every mode of p lies in the given side; scalars (including the
/// zero poly and the identity) belong to both sides.
bool membership(const OperatorPoly& p, const Bipartition& b, int side);

/// True iff p is supported on side 1 and q on side 2.
bool is_local(const OperatorPoly& p, const OperatorPoly& q, const Bipartition& b);

/// Max |entry| over all anticommutators {a#_i, a#_j} with i in side 1 and
/// j in side 2; exactly 0 for any bipartition.
double check_microcausality(const Bipartition& b);

/// True iff [p, q] = 0 for a local pair; throws std::domain_error when the
/// pair is not local. Always true when either parity is even.
bool check_algebraic_independence(const OperatorPoly& p, const OperatorPoly& q,
                                  const Bipartition& b);

} // namespace fmalg
