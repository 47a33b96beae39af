#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "fmalg/bipartition.hpp"
#include "fmalg/car_ops.hpp"
#include "fmalg/fock.hpp"
#include "fmalg/opalg.hpp"

namespace fmalg {

cplx expectation(const FockVector& psi, const OperatorPoly& p);
cplx expectation(const DensityOperator& rho, const OperatorPoly& p);
cplx expectation(const FockVector& psi, const SparseOperator& op);
cplx expectation(const DensityOperator& rho, const SparseOperator& op);

enum class WitnessVerdict { entangled_certified, no_certificate };

struct WitnessReport {
    WitnessVerdict verdict = WitnessVerdict::no_certificate;
    std::optional<std::pair<OperatorPoly, OperatorPoly>> witness_pair;
    cplx value{0, 0};
    int search_degree = 0;
};

/// All monomials (coefficient 1) over the given modes whose degree has the
/// given parity and is at most max_degree, ordered by degree then by factor
/// list. Degree 0 (the identity) is included when parity_mod2 == 0.
std::vector<OperatorPoly> enumerate_monomials(const std::set<int>& modes,
                                              int max_degree, int parity_mod2);

/// Searches odd monomial pairs (A1 over side 1, A2 over side 2) of degree
/// <= max_degree for one with |<A1 A2>| above the certification threshold.
/// The full-block pair (a_1..a_m, a^+_{m+1}..a^+_M) is always added to the
/// candidate list even when its degree exceeds the cap; it can only certify
/// when its block sizes are odd. A no-certificate verdict is not a
/// separability claim.
WitnessReport odd_odd_witness(const FockVector& state, const Bipartition& b, int max_degree);
WitnessReport odd_odd_witness(const DensityOperator& state, const Bipartition& b, int max_degree);

struct ConsistencyResult {
    bool consistent = true;
    std::optional<std::pair<OperatorPoly, OperatorPoly>> witness;
};

/// Checks whether the product functional w(A1 A2) := w1(A1) w2(A2) can be a
/// state: it cannot when some self-adjoint odd p on side 1 and q on side 2
/// have w1(p) != 0 and w2(q) != 0 (hermiticity would force w(pq) to be both
/// real and purely imaginary). Searches degree <= max_degree exhaustively.
ConsistencyResult product_functional_consistency(const DensityOperator& w1,
                                                 const DensityOperator& w2,
                                                 const Bipartition& b, int max_degree);

struct EvenRestrictionResult {
    bool equal = false;
    double max_diff = 0;
    std::optional<std::pair<OperatorPoly, OperatorPoly>> worst_pair;
};

/// Compares expectations of all cross products of even monomials (degree <=
/// max_degree per side) between two states; equal iff the largest
/// difference stays below 1e-10.
template <class State1, class State2>
EvenRestrictionResult even_restriction_equal(const State1& s1, const State2& s2,
                                             const Bipartition& b, int max_degree);

/// (1 + a_i + a_i^+)/2 — a projection supported on one mode.
OperatorPoly paper_projection(int mode);

struct MeetResult {
    SparseOperator meet;
    int iterations = 0;
    enum class Method { iterated_product, range_intersection } method =
        Method::range_intersection;
    double residual = 0;
    bool converged = true;
};

/// Largest projection below both P and Q, computed two ways: spectrally as
/// the projector onto the eigenvalue-2 eigenspace of P+Q (returned), and as
/// the limit of (PQP)^n with the spectrum snapped to {0,1} (cross-check).
/// `residual` is the max-norm distance between the two routes; they must
/// agree within 1e-8. Throws on non-projection input.
MeetResult projection_meet(const SparseOperator& P, const SparseOperator& Q,
                           double tol = 1e-10, int max_iter = 200);

struct UncorrelatedResult {
    bool uncorrelated = false;
    double lhs = 0;
    double rhs = 0;
};

/// Tests w(P1 ^ P2) = w(P1) w(P2) for projection polys p, q.
template <class State>
UncorrelatedResult is_uncorrelated(const State& state, const OperatorPoly& p,
                                   const OperatorPoly& q, double tol);

struct SeparableFit {
    std::vector<double> weights;  // nonnegative, summing to 1
    std::vector<std::pair<DensityOperator, DensityOperator>> dictionary;
    double residual = 0;
};

/// Combines two vectors supported on complementary mode sets into the state
/// created by applying side-1 creation strings before side-2 ones, with the
/// crossing signs that reordering into the canonical mode order produces.
FockVector product_state(const FockVector& f1, const FockVector& f2, const Bipartition& b);

/// Fits rho by a convex combination of product states: all occupation-basis
/// products plus dict_size sampled parity-fixed pure products per the seed.
/// A near-zero residual is evidence of even-sector separability only; a
/// large residual is not by itself an entanglement proof.
SeparableFit separable_fit(const DensityOperator& rho, const Bipartition& b,
                           int dict_size, std::uint64_t seed);

} // namespace fmalg
