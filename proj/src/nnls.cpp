#include "fmalg/nnls.hpp"

#include <limits>
#include <vector>

namespace fmalg {

// Lawson-Hanson on the normal equations: gram = A^T A, atb = A^T b.
Eigen::VectorXd nnls(const Eigen::MatrixXd& gram, const Eigen::VectorXd& atb,
                     double dual_tol, int max_iter) {
    const Eigen::Index n = gram.rows();
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    std::vector<bool> passive(static_cast<std::size_t>(n), false);

    auto solve_passive = [&](Eigen::VectorXd& z) {
        std::vector<Eigen::Index> idx;
        for (Eigen::Index k = 0; k < n; ++k)
            if (passive[static_cast<std::size_t>(k)]) idx.push_back(k);
        const auto p = static_cast<Eigen::Index>(idx.size());
        Eigen::MatrixXd g(p, p);
        Eigen::VectorXd c(p);
        for (Eigen::Index r = 0; r < p; ++r) {
            c(r) = atb(idx[static_cast<std::size_t>(r)]);
            for (Eigen::Index s = 0; s < p; ++s)
                g(r, s) = gram(idx[static_cast<std::size_t>(r)], idx[static_cast<std::size_t>(s)]);
        }
        const Eigen::VectorXd sol = g.ldlt().solve(c);
        z.setZero(n);
        for (Eigen::Index r = 0; r < p; ++r) z(idx[static_cast<std::size_t>(r)]) = sol(r);
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        // dual: gradient of -0.5||Ax-b||^2 restricted to the active set
        const Eigen::VectorXd grad = atb - gram * x;
        Eigen::Index enter = -1;
        double best = dual_tol;
        for (Eigen::Index k = 0; k < n; ++k)
            if (!passive[static_cast<std::size_t>(k)] && grad(k) > best) {
                best = grad(k);
                enter = k;
            }
        if (enter < 0) break;
        passive[static_cast<std::size_t>(enter)] = true;

        Eigen::VectorXd z(n);
        solve_passive(z);
        // inner loop: back off until the passive solution is feasible
        while (true) {
            double alpha = 1.0;
            Eigen::Index blocker = -1;
            for (Eigen::Index k = 0; k < n; ++k) {
                if (!passive[static_cast<std::size_t>(k)] || z(k) > 0) continue;
                const double step = x(k) / (x(k) - z(k));
                if (step < alpha) {
                    alpha = step;
                    blocker = k;
                }
            }
            if (blocker < 0) {
                x = z;
                break;
            }
            x += alpha * (z - x);
            for (Eigen::Index k = 0; k < n; ++k)
                if (passive[static_cast<std::size_t>(k)] &&
                    x(k) <= std::numeric_limits<double>::epsilon())
                    passive[static_cast<std::size_t>(k)] = false;
            x = x.cwiseMax(0.0);
            solve_passive(z);
        }
    }
    return x.cwiseMax(0.0);
}

} // namespace fmalg
