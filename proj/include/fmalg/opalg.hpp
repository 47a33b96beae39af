#pragma once

#include <compare>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fmalg/common.hpp"

namespace fmalg {

/// One creation (dagger) or annihilation factor acting on a mode.
struct Factor {
    int mode = 0;   // 1-based
    bool dagger = false;

    friend bool operator==(const Factor&, const Factor&) = default;
    friend std::strong_ordering operator<=>(const Factor& a, const Factor& b) {
        // creation factors sort before annihilation; canonical lists rely on this
        if (a.dagger != b.dagger)
            return a.dagger ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.mode <=> b.mode;
    }
};

using FactorList = std::vector<Factor>;

inline Factor ann(int mode) { return {mode, false}; }
inline Factor cre(int mode) { return {mode, true}; }

enum class Parity { even, odd, mixed };

/// Complex-linear combination of normal-ordered monomials in mode operators.
///
/// Stored monomials are always canonical: creation factors first in strictly
/// ascending mode order, then annihilation factors in strictly descending
/// mode order. The anti-commutation rewrite happens on construction, so two
/// polynomials are equal as operators iff their term maps are identical.
class OperatorPoly {
public:
    using TermMap = std::map<FactorList, cplx>;

    OperatorPoly() = default;

    static OperatorPoly zero() { return {}; }
    static OperatorPoly identity() { return scalar(1.0); }
    static OperatorPoly scalar(cplx value);
    static OperatorPoly annihilate(int mode);
    static OperatorPoly create(int mode);
    /// Builds coeff * f1 * f2 * ... (leftmost factor acts last) and
    /// normal-orders it.
    static OperatorPoly monomial(cplx coeff, const FactorList& factors);

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_identity() const;

    OperatorPoly& operator+=(const OperatorPoly& rhs);
    OperatorPoly& operator-=(const OperatorPoly& rhs);
    OperatorPoly& operator*=(cplx scale);
    friend OperatorPoly operator+(OperatorPoly a, const OperatorPoly& b) { return a += b; }
    friend OperatorPoly operator-(OperatorPoly a, const OperatorPoly& b) { return a -= b; }
    friend OperatorPoly operator*(OperatorPoly a, cplx s) { return a *= s; }
    friend OperatorPoly operator*(cplx s, OperatorPoly a) { return a *= s; }
    friend OperatorPoly operator-(OperatorPoly a) { return a *= cplx{-1, 0}; }
    friend OperatorPoly operator*(const OperatorPoly& a, const OperatorPoly& b);
    friend bool operator==(const OperatorPoly& a, const OperatorPoly& b) {
        return a.terms_ == b.terms_;
    }

    /// Accumulates coeff * factors (any order) into this poly, rewriting to
    /// canonical form via the anti-commutation relations.
    void accumulate(cplx coeff, const FactorList& factors);

private:
    void add_term(const FactorList& canonical, cplx coeff);
    TermMap terms_;
};

/// Re-canonicalizes; idempotent (stored polys are already normal-ordered).
OperatorPoly normal_order(const OperatorPoly& p);

/// The grading automorphism: every factor picks up a minus sign, so each
/// monomial is scaled by (-1)^degree.
OperatorPoly theta(const OperatorPoly& p);

Parity parity(const OperatorPoly& p);

/// p = even + odd with theta(even) = even and theta(odd) = -odd.
std::pair<OperatorPoly, OperatorPoly> even_odd_split(const OperatorPoly& p);

OperatorPoly commutator(const OperatorPoly& p, const OperatorPoly& q);
OperatorPoly anticommutator(const OperatorPoly& p, const OperatorPoly& q);

/// Union of mode indices over nonzero monomials; empty for scalars.
std::set<int> support_modes(const OperatorPoly& p);

OperatorPoly adjoint(const OperatorPoly& p);

/// Largest mode index appearing in p, or 0 for scalar polys.
int max_mode(const OperatorPoly& p);

/// Syntax error with the offending offset into the input text.
struct ParseError : std::runtime_error {
    ParseError(std::size_t position, const std::string& expected, const std::string& found);
    std::size_t position;
    std::string expected;
};

/// Parses the expression grammar:
///   expr   := term (('+' | '-') term)*
///   term   := factor ('*' factor)*
///   factor := literal | op | '(' expr ')'
///   op     := 'a' INT | 'A' INT          (a = annihilation, A = creation)
///   literal:= FLOAT | FLOAT 'i' | '(' FLOAT ('+'|'-') FLOAT 'i' ')'
/// Whitespace is insignificant; '*' is required between factors. A single
/// leading sign before the first term is also accepted.
OperatorPoly parse(std::string_view text);

/// Serializes in the same grammar; parse(to_string(p)) == p.
std::string to_string(const OperatorPoly& p);

} // namespace fmalg
