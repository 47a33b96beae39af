#include "fmalg/car_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace fmalg {

SparseOperator::SparseOperator(int modes) : modes_(modes) {
    check_mode_guard(modes);
}

SparseOperator SparseOperator::identity(int modes) {
    SparseOperator out(modes);
    for (Index k = 0; k < out.dim(); ++k) out.entries_.emplace(std::make_pair(k, k), cplx{1, 0});
    return out;
}

cplx SparseOperator::entry(Index row, Index col) const {
    auto it = entries_.find({row, col});
    return it == entries_.end() ? cplx{0, 0} : it->second;
}

void SparseOperator::add_entry(Index row, Index col, cplx value) {
    if (row >= dim() || col >= dim())
        throw std::domain_error("sparse entry index out of range");
    auto it = entries_.find({row, col});
    if (it == entries_.end()) {
        if (std::abs(value) >= kDropTol) entries_.emplace(std::make_pair(row, col), value);
        return;
    }
    it->second += value;
    if (std::abs(it->second) < kDropTol) entries_.erase(it);
}

SparseOperator& SparseOperator::operator+=(const SparseOperator& rhs) {
    if (modes_ != rhs.modes_)
        throw std::invalid_argument("mode count mismatch in sparse sum");
    for (const auto& [rc, v] : rhs.entries_) add_entry(rc.first, rc.second, v);
    return *this;
}

SparseOperator& SparseOperator::operator-=(const SparseOperator& rhs) {
    if (modes_ != rhs.modes_)
        throw std::invalid_argument("mode count mismatch in sparse difference");
    for (const auto& [rc, v] : rhs.entries_) add_entry(rc.first, rc.second, -v);
    return *this;
}

SparseOperator& SparseOperator::operator*=(cplx scale) {
    if (std::abs(scale) < kDropTol) {
        entries_.clear();
        return *this;
    }
    for (auto& [_, v] : entries_) v *= scale;
    return *this;
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
    if (a.modes_ != b.modes_)
        throw std::invalid_argument("mode count mismatch in sparse product");
    SparseOperator out(a.modes_);
    for (const auto& [rc, va] : a.entries_) {
        const auto [row, k] = rc;
        // all entries of b with row index k
        auto it = b.entries_.lower_bound({k, 0});
        const auto end = b.entries_.lower_bound({k + 1, 0});
        for (; it != end; ++it) out.add_entry(row, it->first.second, va * it->second);
    }
    return out;
}

SparseOperator SparseOperator::adjoint() const {
    SparseOperator out(modes_);
    for (const auto& [rc, v] : entries_)
        out.entries_.emplace(std::make_pair(rc.second, rc.first), std::conj(v));
    return out;
}

double SparseOperator::max_abs() const {
    double m = 0;
    for (const auto& [_, v] : entries_) m = std::max(m, std::abs(v));
    return m;
}

cplx SparseOperator::trace() const {
    cplx acc{0, 0};
    for (const auto& [rc, v] : entries_)
        if (rc.first == rc.second) acc += v;
    return acc;
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
    const auto n = static_cast<Eigen::Index>(dim());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& [rc, v] : entries_)
        m(static_cast<Eigen::Index>(rc.first), static_cast<Eigen::Index>(rc.second)) = v;
    return m;
}

SparseOperator SparseOperator::from_dense(const Eigen::MatrixXcd& m, int modes, double drop) {
    SparseOperator out(modes);
    const auto n = static_cast<Eigen::Index>(out.dim());
    if (m.rows() != n || m.cols() != n)
        throw std::invalid_argument("dense matrix dimension does not match 2^modes");
    for (Eigen::Index c = 0; c < n; ++c)
        for (Eigen::Index r = 0; r < n; ++r)
            if (std::abs(m(r, c)) >= drop)
                out.entries_.emplace(
                    std::make_pair(static_cast<SparseOperator::Index>(r),
                                   static_cast<SparseOperator::Index>(c)),
                    m(r, c));
    return out;
}

std::optional<SignedState> apply_annihilate(const OccupationState& s, int mode) {
    if (!s.occupied(mode)) return std::nullopt;  // range-checks the mode too
    OccupationState out = s;
    out.bits &= ~(std::uint64_t{1} << (mode - 1));
    const int sign = (s.count_below(mode) % 2 == 0) ? 1 : -1;
    return SignedState{sign, out};
}

std::optional<SignedState> apply_create(const OccupationState& s, int mode) {
    if (s.occupied(mode)) return std::nullopt;
    OccupationState out = s;
    out.bits |= std::uint64_t{1} << (mode - 1);
    const int sign = (s.count_below(mode) % 2 == 0) ? 1 : -1;
    return SignedState{sign, out};
}

SparseOperator mode_op_matrix(int mode, bool dagger, int modes) {
    check_mode_guard(modes);
    if (mode < 1 || mode > modes)
        throw std::domain_error("mode out of range");
    SparseOperator out(modes);
    for (std::size_t col = 0; col < out.dim(); ++col) {
        const OccupationState s = state_from_index(col, modes);
        const auto r = dagger ? apply_create(s, mode) : apply_annihilate(s, mode);
        if (r) out.add_entry(basis_index(r->state), col, cplx(r->sign, 0));
    }
    return out;
}

namespace {

using Block = Eigen::Matrix2cd;

Block lowering_block() {
    // occupation basis ordering (|0>, |1>): maps |1> to |0>
    Block b = Block::Zero();
    b(0, 1) = 1;
    return b;
}

Block raising_block() {
    Block b = Block::Zero();
    b(1, 0) = 1;
    return b;
}

Block z_block() {
    Block b = Block::Zero();
    b(0, 0) = 1;
    b(1, 1) = -1;
    return b;
}

// kron with `local` on the high bits: mode j occupies bit j-1, so the chain
// is assembled low mode first
Eigen::MatrixXcd kron_high(const Block& local, const Eigen::MatrixXcd& low) {
    const Eigen::Index n = low.rows();
    Eigen::MatrixXcd out(2 * n, 2 * n);
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            out.block(r * n, c * n, n, n) = local(r, c) * low;
    return out;
}

} // namespace

SparseOperator jw_matrix(int mode, bool dagger, int modes) {
    check_mode_guard(modes);
    if (mode < 1 || mode > modes)
        throw std::domain_error("mode out of range");
    Eigen::MatrixXcd chain = Eigen::MatrixXcd::Identity(1, 1);
    for (int j = 1; j <= modes; ++j) {
        Block local;
        if (j < mode)
            local = z_block();
        else if (j == mode)
            local = dagger ? raising_block() : lowering_block();
        else
            local = Block::Identity();
        chain = kron_high(local, chain);
    }
    return SparseOperator::from_dense(chain, modes);
}

double verify_car(int modes) {
    check_mode_guard(modes);
    std::vector<SparseOperator> a, adag;
    for (int i = 1; i <= modes; ++i) {
        a.push_back(mode_op_matrix(i, false, modes));
        adag.push_back(mode_op_matrix(i, true, modes));
    }
    const SparseOperator one = SparseOperator::identity(modes);
    double dev = 0;
    for (int i = 0; i < modes; ++i) {
        for (int j = 0; j < modes; ++j) {
            SparseOperator mixed = anticommutator(a[i], adag[j]);
            if (i == j) mixed -= one;
            dev = std::max(dev, mixed.max_abs());
            dev = std::max(dev, anticommutator(a[i], a[j]).max_abs());
            dev = std::max(dev, anticommutator(adag[i], adag[j]).max_abs());
        }
    }
    return dev;
}

SparseOperator poly_to_matrix(const OperatorPoly& p, int modes) {
    check_mode_guard(modes);
    if (max_mode(p) > modes)
        throw std::domain_error("polynomial touches a mode beyond the matrix size");
    SparseOperator out(modes);
    std::map<Factor, SparseOperator> cache;
    for (const auto& [factors, coeff] : p.terms()) {
        SparseOperator term = SparseOperator::identity(modes);
        // rightmost factor acts first; building the product left to right
        // keeps written operator order
        for (const Factor& f : factors) {
            auto it = cache.find(f);
            if (it == cache.end())
                it = cache.emplace(f, mode_op_matrix(f.mode, f.dagger, modes)).first;
            term = term * it->second;
        }
        term *= coeff;
        out += term;
    }
    return out;
}

FockVector apply_poly(const OperatorPoly& p, const FockVector& psi) {
    FockVector out(psi.modes);
    for (const auto& [factors, coeff] : p.terms()) {
        for (const auto& [bits, amp] : psi.amplitudes) {
            OccupationState s = OccupationState::from_bits(bits, psi.modes);
            int sign = 1;
            bool alive = true;
            for (auto it = factors.rbegin(); it != factors.rend(); ++it) {
                const auto r =
                    it->dagger ? apply_create(s, it->mode) : apply_annihilate(s, it->mode);
                if (!r) {
                    alive = false;
                    break;
                }
                sign *= r->sign;
                s = r->state;
            }
            if (alive) out.add(s.bits, coeff * static_cast<double>(sign) * amp);
        }
    }
    return out;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
    return a * b - b * a;
}

SparseOperator anticommutator(const SparseOperator& a, const SparseOperator& b) {
    return a * b + b * a;
}

} // namespace fmalg
