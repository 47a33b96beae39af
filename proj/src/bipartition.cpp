#include "fmalg/bipartition.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

#include "fmalg/car_ops.hpp"

namespace fmalg {

Bipartition Bipartition::contiguous(int m, int modes) {
    if (modes < 2)
        throw std::domain_error("a bipartition needs at least 2 modes");
    if (m < 1 || m >= modes)
        throw std::domain_error("split point m must satisfy 1 <= m < modes");
    std::set<int> s1, s2;
    for (int i = 1; i <= m; ++i) s1.insert(i);
    for (int i = m + 1; i <= modes; ++i) s2.insert(i);
    return Bipartition(modes, std::move(s1), std::move(s2));
}

Bipartition Bipartition::from_sets(std::set<int> side1, std::set<int> side2) {
    if (side1.empty() || side2.empty())
        throw std::domain_error("neither side of a bipartition may be empty");
    for (int i : side2)
        if (side1.count(i))
            throw std::domain_error("bipartition sides overlap at mode " + std::to_string(i));
    const int modes = std::max(*side1.rbegin(), *side2.rbegin());
    if (*side1.begin() < 1 || *side2.begin() < 1)
        throw std::domain_error("mode indices must be >= 1");
    if (static_cast<int>(side1.size() + side2.size()) != modes)
        throw std::domain_error("bipartition sides must cover all modes 1..M");
    return Bipartition(modes, std::move(side1), std::move(side2));
}

namespace {

std::set<int> parse_mode_list(std::string_view text) {
    std::set<int> out;
    std::size_t k = 0;
    while (k < text.size()) {
        std::size_t j = text.find(',', k);
        if (j == std::string_view::npos) j = text.size();
        int mode = 0;
        auto [ptr, ec] = std::from_chars(text.data() + k, text.data() + j, mode);
        if (ec != std::errc{} || ptr != text.data() + j || mode < 1)
            throw std::domain_error("bad mode list in bipartition literal: '" +
                                    std::string(text) + "'");
        if (!out.insert(mode).second)
            throw std::domain_error("repeated mode in bipartition literal");
        k = j + 1;
    }
    if (out.empty())
        throw std::domain_error("empty mode list in bipartition literal");
    return out;
}

} // namespace

Bipartition Bipartition::parse(std::string_view literal) {
    if (literal.rfind("m:", 0) == 0) {
        const auto slash = literal.find('/');
        if (slash == std::string_view::npos)
            throw std::domain_error("shorthand bipartition must look like m:2/4");
        int m = 0, modes = 0;
        auto body = literal.substr(2, slash - 2);
        auto tail = literal.substr(slash + 1);
        auto r1 = std::from_chars(body.data(), body.data() + body.size(), m);
        auto r2 = std::from_chars(tail.data(), tail.data() + tail.size(), modes);
        if (r1.ec != std::errc{} || r1.ptr != body.data() + body.size() ||
            r2.ec != std::errc{} || r2.ptr != tail.data() + tail.size())
            throw std::domain_error("shorthand bipartition must look like m:2/4");
        return contiguous(m, modes);
    }
    const auto bar = literal.find('|');
    if (bar == std::string_view::npos)
        throw std::domain_error("bipartition literal needs a '|' separator");
    return from_sets(parse_mode_list(literal.substr(0, bar)),
                     parse_mode_list(literal.substr(bar + 1)));
}

std::string Bipartition::to_literal() const {
    std::string out;
    bool first = true;
    for (int i : side1_) {
        if (!first) out += ',';
        out += std::to_string(i);
        first = false;
    }
    out += '|';
    first = true;
    for (int i : side2_) {
        if (!first) out += ',';
        out += std::to_string(i);
        first = false;
    }
    return out;
}

const std::set<int>& Bipartition::side(int which) const {
    if (which == 1) return side1_;
    if (which == 2) return side2_;
    throw std::domain_error("bipartition side must be 1 or 2");
}

bool membership(const OperatorPoly& p, const Bipartition& b, int side) {
    const std::set<int>& allowed = b.side(side);
    for (int m : support_modes(p))
        if (!allowed.count(m)) return false;
    return true;
}

bool is_local(const OperatorPoly& p, const OperatorPoly& q, const Bipartition& b) {
    return membership(p, b, 1) && membership(q, b, 2);
}

double check_microcausality(const Bipartition& b) {
    const int modes = b.modes();
    check_mode_guard(modes);
    double dev = 0;
    for (int i : b.side(1)) {
        for (int j : b.side(2)) {
            for (bool di : {false, true}) {
                const SparseOperator mi = mode_op_matrix(i, di, modes);
                for (bool dj : {false, true}) {
                    const SparseOperator mj = mode_op_matrix(j, dj, modes);
                    dev = std::max(dev, anticommutator(mi, mj).max_abs());
                }
            }
        }
    }
    return dev;
}

bool check_algebraic_independence(const OperatorPoly& p, const OperatorPoly& q,
                                  const Bipartition& b) {
    if (!membership(p, b, 1))
        throw std::domain_error("first operand is not supported on side 1");
    if (!membership(q, b, 2))
        throw std::domain_error("second operand is not supported on side 2");
    return commutator(p, q).is_zero();
}

} // namespace fmalg
