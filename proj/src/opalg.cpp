#include "fmalg/opalg.hpp"

#include <algorithm>
#include <cmath>

namespace fmalg {

namespace {

// A factor pair (x, y) at adjacent positions violates canonical order when
// swapping (or contracting) it is required. Returns true with `contract`
// set when x and y are an a_i a_i^+ pair producing a delta term.
struct Violation {
    std::size_t pos;
    bool same_mode_contraction;
};

bool find_violation(const FactorList& f, Violation& v) {
    for (std::size_t k = 0; k + 1 < f.size(); ++k) {
        const Factor& x = f[k];
        const Factor& y = f[k + 1];
        if (x == y) {
            // repeated identical factor: monomial vanishes (nilpotency)
            v = {k, false};
            return true;
        }
        if (!x.dagger && y.dagger) {
            v = {k, x.mode == y.mode};
            return true;
        }
        if (x.dagger == y.dagger) {
            const bool out_of_order = x.dagger ? (x.mode > y.mode) : (x.mode < y.mode);
            if (out_of_order) {
                v = {k, false};
                return true;
            }
        }
    }
    return false;
}

bool has_repeated_factor(const FactorList& f, std::size_t at) {
    return f[at] == f[at + 1];
}

} // namespace

OperatorPoly OperatorPoly::scalar(cplx value) {
    OperatorPoly p;
    p.add_term({}, value);
    return p;
}

OperatorPoly OperatorPoly::annihilate(int mode) {
    return monomial(1.0, {ann(mode)});
}

OperatorPoly OperatorPoly::create(int mode) {
    return monomial(1.0, {cre(mode)});
}

OperatorPoly OperatorPoly::monomial(cplx coeff, const FactorList& factors) {
    OperatorPoly p;
    p.accumulate(coeff, factors);
    return p;
}

bool OperatorPoly::is_identity() const {
    return terms_.size() == 1 && terms_.begin()->first.empty() &&
           std::abs(terms_.begin()->second - cplx{1, 0}) < kCoeffTol;
}

void OperatorPoly::add_term(const FactorList& canonical, cplx coeff) {
    if (std::abs(coeff) < kCoeffTol) return;
    auto it = terms_.find(canonical);
    if (it == terms_.end()) {
        terms_.emplace(canonical, coeff);
        return;
    }
    it->second += coeff;
    if (std::abs(it->second) < kCoeffTol) terms_.erase(it);
}

void OperatorPoly::accumulate(cplx coeff, const FactorList& factors) {
    for (const Factor& f : factors)
        if (f.mode < 1)
            throw std::domain_error("mode indices must be >= 1");

    // Worklist of pending monomials; adjacent transpositions either flip the
    // sign or, for an a_i a_i^+ pair, also emit the shorter delta term.
    std::vector<std::pair<cplx, FactorList>> work;
    work.emplace_back(coeff, factors);
    while (!work.empty()) {
        auto [c, f] = std::move(work.back());
        work.pop_back();
        if (std::abs(c) < kCoeffTol) continue;

        Violation v{};
        if (!find_violation(f, v)) {
            add_term(f, c);
            continue;
        }
        if (has_repeated_factor(f, v.pos)) continue;  // x^2 = 0

        if (v.same_mode_contraction) {
            FactorList shorter(f.begin(), f.end());
            shorter.erase(shorter.begin() + static_cast<std::ptrdiff_t>(v.pos),
                          shorter.begin() + static_cast<std::ptrdiff_t>(v.pos) + 2);
            work.emplace_back(c, std::move(shorter));
        }
        std::swap(f[v.pos], f[v.pos + 1]);
        work.emplace_back(-c, std::move(f));
    }
}

OperatorPoly& OperatorPoly::operator+=(const OperatorPoly& rhs) {
    for (const auto& [f, c] : rhs.terms_) add_term(f, c);
    return *this;
}

OperatorPoly& OperatorPoly::operator-=(const OperatorPoly& rhs) {
    for (const auto& [f, c] : rhs.terms_) add_term(f, -c);
    return *this;
}

OperatorPoly& OperatorPoly::operator*=(cplx scale) {
    if (std::abs(scale) < kCoeffTol) {
        terms_.clear();
        return *this;
    }
    for (auto& [_, c] : terms_) c *= scale;
    return *this;
}

OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b) {
    OperatorPoly out;
    for (const auto& [fa, ca] : a.terms_) {
        for (const auto& [fb, cb] : b.terms_) {
            FactorList joined;
            joined.reserve(fa.size() + fb.size());
            joined.insert(joined.end(), fa.begin(), fa.end());
            joined.insert(joined.end(), fb.begin(), fb.end());
            out.accumulate(ca * cb, joined);
        }
    }
    return out;
}

OperatorPoly normal_order(const OperatorPoly& p) {
    OperatorPoly out;
    for (const auto& [f, c] : p.terms()) out.accumulate(c, f);
    return out;
}

OperatorPoly theta(const OperatorPoly& p) {
    OperatorPoly flipped;
    for (const auto& [f, c] : p.terms())
        flipped.accumulate((f.size() % 2 == 0) ? c : -c, f);
    return flipped;
}

Parity parity(const OperatorPoly& p) {
    bool has_even = false, has_odd = false;
    for (const auto& [f, _] : p.terms())
        (f.size() % 2 == 0 ? has_even : has_odd) = true;
    if (has_even && has_odd) return Parity::mixed;
    if (has_odd) return Parity::odd;
    return Parity::even;  // includes the zero poly
}

std::pair<OperatorPoly, OperatorPoly> even_odd_split(const OperatorPoly& p) {
    OperatorPoly even, odd;
    for (const auto& [f, c] : p.terms())
        (f.size() % 2 == 0 ? even : odd).accumulate(c, f);
    return {even, odd};
}

OperatorPoly commutator(const OperatorPoly& p, const OperatorPoly& q) {
    return p * q - q * p;
}

OperatorPoly anticommutator(const OperatorPoly& p, const OperatorPoly& q) {
    return p * q + q * p;
}

std::set<int> support_modes(const OperatorPoly& p) {
    std::set<int> out;
    for (const auto& [f, _] : p.terms())
        for (const Factor& x : f) out.insert(x.mode);
    return out;
}

OperatorPoly adjoint(const OperatorPoly& p) {
    OperatorPoly out;
    for (const auto& [f, c] : p.terms()) {
        FactorList rev(f.rbegin(), f.rend());
        for (Factor& x : rev) x.dagger = !x.dagger;
        out.accumulate(std::conj(c), rev);
    }
    return out;
}

int max_mode(const OperatorPoly& p) {
    int m = 0;
    for (const auto& [f, _] : p.terms())
        for (const Factor& x : f) m = std::max(m, x.mode);
    return m;
}

} // namespace fmalg
