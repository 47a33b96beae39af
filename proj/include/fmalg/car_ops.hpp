#pragma once

#include <map>
#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "fmalg/common.hpp"
#include "fmalg/fock.hpp"
#include "fmalg/opalg.hpp"

namespace fmalg {

/// Sparse complex matrix on the 2^M-dimensional Fock basis. Entries with
/// magnitude below the drop tolerance are never stored, so matrices whose
/// entries are exact integers stay exact through sums and products.
class SparseOperator {
public:
    using Index = std::size_t;
    using EntryMap = std::map<std::pair<Index, Index>, cplx>;

    explicit SparseOperator(int modes);
    static SparseOperator identity(int modes);

    int modes() const { return modes_; }
    Index dim() const { return Index{1} << modes_; }
    std::size_t nnz() const { return entries_.size(); }
    const EntryMap& entries() const { return entries_; }

    cplx entry(Index row, Index col) const;
    void add_entry(Index row, Index col, cplx value);

    SparseOperator& operator+=(const SparseOperator& rhs);
    SparseOperator& operator-=(const SparseOperator& rhs);
    SparseOperator& operator*=(cplx scale);
    friend SparseOperator operator+(SparseOperator a, const SparseOperator& b) { return a += b; }
    friend SparseOperator operator-(SparseOperator a, const SparseOperator& b) { return a -= b; }
    friend SparseOperator operator*(SparseOperator a, cplx s) { return a *= s; }
    friend SparseOperator operator*(cplx s, SparseOperator a) { return a *= s; }
    friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);
    friend bool operator==(const SparseOperator& a, const SparseOperator& b) {
        return a.modes_ == b.modes_ && a.entries_ == b.entries_;
    }

    SparseOperator adjoint() const;
    double max_abs() const;
    cplx trace() const;

    Eigen::MatrixXcd to_dense() const;
    static SparseOperator from_dense(const Eigen::MatrixXcd& m, int modes,
                                     double drop = kDropTol);

private:
    int modes_;
    EntryMap entries_;
};

/// Result of applying one mode operator to a basis state.
struct SignedState {
    int sign;  // +1 or -1
    OccupationState state;
};

/// a_i on a basis state: empty if the mode is unoccupied, otherwise the
/// cleared pattern with sign (-1)^{occupied modes below i}.
std::optional<SignedState> apply_annihilate(const OccupationState& s, int mode);

/// a_i^+ on a basis state: empty if the mode is already occupied (Pauli).
std::optional<SignedState> apply_create(const OccupationState& s, int mode);

/// Matrix of a_i or a_i^+ assembled column-by-column from apply_*.
SparseOperator mode_op_matrix(int mode, bool dagger, int modes);

/// The same matrix built independently as a spin chain string: a Kronecker
/// product of 2x2 blocks, sigma_z on every mode below i and a lowering
/// (raising) block on mode i. Bit value 0 is identified with the sigma_z
/// = +1 eigenstate so the vacuum is annihilated by every a_i and the string
/// reproduces the occupation sign rule exactly.
SparseOperator jw_matrix(int mode, bool dagger, int modes);

/// Max deviation over all i, j of ||{a_i, a_j^+} - delta_ij||, ||{a_i, a_j}||
/// and ||{a_i^+, a_j^+}|| on assembled matrices. Exactly 0 for a correct
/// implementation: all arithmetic is on exact +-1 entries.
double verify_car(int modes);

/// Matrix of a symbolic polynomial; written operator order means the
/// leftmost factor acts last. Throws if a mode of p exceeds `modes`.
SparseOperator poly_to_matrix(const OperatorPoly& p, int modes);

/// Applies a polynomial to a sparse state vector via apply_* (no matrix).
FockVector apply_poly(const OperatorPoly& p, const FockVector& psi);

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);
SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b);

} // namespace fmalg
