#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fmalg/common.hpp"

namespace fmalg {

/// One Fock basis vector as an M-bit occupation pattern.
/// Mode i (1-based) lives at bit i-1, so the basis index of a pattern is
/// the bit word itself: index = sum_i n_i 2^{i-1}.
struct OccupationState {
    std::uint64_t bits = 0;
    int modes = 0;

    static OccupationState vacuum(int modes);
    static OccupationState from_bits(std::uint64_t bits, int modes);
    /// Pattern with the given (1-based) modes occupied.
    static OccupationState from_modes(const std::vector<int>& occupied, int modes);

    bool occupied(int mode) const;   // 1-based
    int particle_count() const;

    /// Occupied modes strictly below `mode`; the CAR sign is (-1)^count.
    int count_below(int mode) const;

    /// Mode-1-first bit string, e.g. "110000" = modes 1 and 2 occupied.
    std::string to_bit_string() const;
    static OccupationState from_bit_string(const std::string& s);

    friend auto operator<=>(const OccupationState&, const OccupationState&) = default;
};

std::size_t basis_index(const OccupationState& s);
OccupationState state_from_index(std::size_t index, int modes);

/// All C(M,N) patterns with exactly N particles, ascending basis index.
std::vector<OccupationState> sector_basis(int modes, int particles);

/// Sparse pure state on the 2^M-dimensional Fock space.
struct FockVector {
    int modes = 0;
    std::map<std::uint64_t, cplx> amplitudes;  // keyed by basis index

    FockVector() = default;
    explicit FockVector(int modes) : modes(modes) {}

    cplx amplitude(const OccupationState& s) const;
    void add(const OccupationState& s, cplx value);
    void add(std::uint64_t bits, cplx value);

    double norm() const;
    bool is_normalized(double tol = kNormTol) const;
    void normalize();
    void prune(double tol = kCoeffTol);

    cplx inner(const FockVector& other) const;  // <this|other>
};

/// Dense density operator on the Fock space, validated on construction.
class DensityOperator {
public:
    /// Validates hermiticity (1e-12), positivity (min eig >= -1e-10) and
    /// unit trace (1e-12); throws std::invalid_argument on violation.
    static DensityOperator from_matrix(int modes, Eigen::MatrixXcd matrix);
    static DensityOperator pure(const FockVector& psi);

    int modes() const { return modes_; }
    std::size_t dim() const { return std::size_t{1} << modes_; }
    const Eigen::MatrixXcd& matrix() const { return matrix_; }

    double purity() const;  // Tr(rho^2)

private:
    DensityOperator(int modes, Eigen::MatrixXcd matrix)
        : modes_(modes), matrix_(std::move(matrix)) {}
    int modes_;
    Eigen::MatrixXcd matrix_;
};

/// Balanced superposition of N particles in the first N of 2N modes and
/// N particles in the last N: (|N;0> + |0;N>)/sqrt(2).
FockVector make_state_psi(int n);

/// Rank-2 mixture (|N;0><N;0| + |0;N><0;N|)/2 on 2N modes.
DensityOperator make_rho_sep(int n);

} // namespace fmalg
