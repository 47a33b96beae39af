#include "fmalg/fock.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace fmalg {

int max_mode_guard() {
    static const int guard = [] {
        if (const char* s = std::getenv("FMA_MAX_MODES")) {
            char* end = nullptr;
            long v = std::strtol(s, &end, 10);
            if (end != s && *end == '\0' && v >= 1 && v <= 62)
                return static_cast<int>(v);
        }
        return 14;
    }();
    return guard;
}

void check_mode_guard(int modes) {
    if (modes < 1)
        throw std::domain_error("mode count must be >= 1");
    if (modes > max_mode_guard())
        throw std::domain_error("mode count " + std::to_string(modes) +
                                " exceeds the memory guard of " +
                                std::to_string(max_mode_guard()) +
                                " modes (set FMA_MAX_MODES to override)");
}

namespace {

void check_mode_range(int mode, int modes) {
    if (mode < 1 || mode > modes)
        throw std::domain_error("mode " + std::to_string(mode) +
                                " out of range [1, " + std::to_string(modes) + "]");
}

void check_symbolic_modes(int modes) {
    if (modes < 1 || modes > 62)
        throw std::domain_error("mode count must be in [1, 62]");
}

} // namespace

OccupationState OccupationState::vacuum(int modes) {
    check_symbolic_modes(modes);
    return {0, modes};
}

OccupationState OccupationState::from_bits(std::uint64_t bits, int modes) {
    check_symbolic_modes(modes);
    if (modes < 64 && (bits >> modes) != 0)
        throw std::domain_error("bit pattern has occupation beyond mode count");
    return {bits, modes};
}

OccupationState OccupationState::from_modes(const std::vector<int>& occupied, int modes) {
    OccupationState s = vacuum(modes);
    for (int m : occupied) {
        check_mode_range(m, modes);
        s.bits |= std::uint64_t{1} << (m - 1);
    }
    return s;
}

bool OccupationState::occupied(int mode) const {
    check_mode_range(mode, modes);
    return (bits >> (mode - 1)) & 1;
}

int OccupationState::particle_count() const {
    return std::popcount(bits);
}

int OccupationState::count_below(int mode) const {
    check_mode_range(mode, modes);
    const std::uint64_t mask = (std::uint64_t{1} << (mode - 1)) - 1;
    return std::popcount(bits & mask);
}

std::string OccupationState::to_bit_string() const {
    std::string s(static_cast<std::size_t>(modes), '0');
    for (int i = 1; i <= modes; ++i)
        if ((bits >> (i - 1)) & 1) s[static_cast<std::size_t>(i - 1)] = '1';
    return s;
}

OccupationState OccupationState::from_bit_string(const std::string& s) {
    check_symbolic_modes(static_cast<int>(s.size()));
    std::uint64_t bits = 0;
    for (std::size_t k = 0; k < s.size(); ++k) {
        if (s[k] == '1')
            bits |= std::uint64_t{1} << k;
        else if (s[k] != '0')
            throw std::domain_error("bit string must contain only '0' and '1'");
    }
    return {bits, static_cast<int>(s.size())};
}

std::size_t basis_index(const OccupationState& s) {
    return static_cast<std::size_t>(s.bits);
}

OccupationState state_from_index(std::size_t index, int modes) {
    return OccupationState::from_bits(static_cast<std::uint64_t>(index), modes);
}

std::vector<OccupationState> sector_basis(int modes, int particles) {
    check_symbolic_modes(modes);
    if (particles < 0 || particles > modes)
        throw std::domain_error("particle number must be in [0, modes]");
    std::vector<OccupationState> out;
    const std::uint64_t dim = std::uint64_t{1} << modes;
    for (std::uint64_t b = 0; b < dim; ++b)
        if (std::popcount(b) == particles)
            out.push_back({b, modes});
    return out;
}

cplx FockVector::amplitude(const OccupationState& s) const {
    auto it = amplitudes.find(s.bits);
    return it == amplitudes.end() ? cplx{0, 0} : it->second;
}

void FockVector::add(const OccupationState& s, cplx value) {
    if (s.modes != modes)
        throw std::invalid_argument("occupation state has wrong mode count");
    add(s.bits, value);
}

void FockVector::add(std::uint64_t bits, cplx value) {
    auto& a = amplitudes[bits];
    a += value;
    if (std::abs(a) < kCoeffTol) amplitudes.erase(bits);
}

double FockVector::norm() const {
    double n2 = 0;
    for (const auto& [_, a] : amplitudes) n2 += std::norm(a);
    return std::sqrt(n2);
}

bool FockVector::is_normalized(double tol) const {
    return std::abs(norm() - 1.0) <= tol;
}

void FockVector::normalize() {
    const double n = norm();
    if (n == 0) throw std::domain_error("cannot normalize the zero vector");
    for (auto& [_, a] : amplitudes) a /= n;
}

void FockVector::prune(double tol) {
    for (auto it = amplitudes.begin(); it != amplitudes.end();) {
        if (std::abs(it->second) < tol)
            it = amplitudes.erase(it);
        else
            ++it;
    }
}

cplx FockVector::inner(const FockVector& other) const {
    if (modes != other.modes)
        throw std::invalid_argument("mode count mismatch in inner product");
    cplx acc{0, 0};
    const auto& small = amplitudes.size() <= other.amplitudes.size() ? amplitudes : other.amplitudes;
    const bool self_small = &small == &amplitudes;
    const auto& big = self_small ? other.amplitudes : amplitudes;
    for (const auto& [bits, a] : small) {
        auto it = big.find(bits);
        if (it == big.end()) continue;
        acc += self_small ? std::conj(a) * it->second : std::conj(it->second) * a;
    }
    return acc;
}

DensityOperator DensityOperator::from_matrix(int modes, Eigen::MatrixXcd matrix) {
    check_mode_guard(modes);
    const Eigen::Index dim = Eigen::Index{1} << modes;
    if (matrix.rows() != dim || matrix.cols() != dim)
        throw std::invalid_argument("density matrix dimension does not match 2^modes");
    if ((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() > kNormTol)
        throw std::invalid_argument("density matrix is not Hermitian within 1e-12");
    if (std::abs(matrix.trace() - cplx{1, 0}) > kNormTol)
        throw std::invalid_argument("density matrix trace differs from 1 beyond 1e-12");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kPsdTol)
        throw std::invalid_argument("density matrix is not positive semidefinite");
    return DensityOperator(modes, std::move(matrix));
}

DensityOperator DensityOperator::pure(const FockVector& psi) {
    check_mode_guard(psi.modes);
    if (!psi.is_normalized(1e-9))
        throw std::invalid_argument("pure-state density requires a normalized vector");
    const Eigen::Index dim = Eigen::Index{1} << psi.modes;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
    for (const auto& [bits, a] : psi.amplitudes)
        v(static_cast<Eigen::Index>(bits)) = a;
    return DensityOperator(psi.modes, v * v.adjoint());
}

double DensityOperator::purity() const {
    return (matrix_ * matrix_).trace().real();
}

FockVector make_state_psi(int n) {
    if (n < 1)
        throw std::domain_error("make_state_psi requires n >= 1");
    const int modes = 2 * n;
    check_symbolic_modes(modes);
    FockVector psi(modes);
    const std::uint64_t first = (std::uint64_t{1} << n) - 1;       // modes 1..n
    const std::uint64_t second = first << n;                       // modes n+1..2n
    const double w = 1.0 / std::sqrt(2.0);
    psi.add(first, w);
    psi.add(second, w);
    return psi;
}

DensityOperator make_rho_sep(int n) {
    if (n < 1)
        throw std::domain_error("make_rho_sep requires n >= 1");
    const int modes = 2 * n;
    check_mode_guard(modes);
    const Eigen::Index dim = Eigen::Index{1} << modes;
    const auto first = static_cast<Eigen::Index>((std::uint64_t{1} << n) - 1);
    const auto second = static_cast<Eigen::Index>(((std::uint64_t{1} << n) - 1) << n);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
    m(first, first) = 0.5;
    m(second, second) = 0.5;
    return DensityOperator::from_matrix(modes, std::move(m));
}

} // namespace fmalg
