#include "gkdv/linsolve.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace gkdv {

Eigen::VectorXd quadrature_weights(const Grid1D& grid) {
    const std::size_t n = grid.count();
    Eigen::VectorXd w = Eigen::VectorXd::Constant(static_cast<long>(n), grid.spacing());
    if (!grid.periodic()) {
        w(0) *= 0.5;
        w(static_cast<long>(n) - 1) *= 0.5;
    }
    return w;
}

ConstrainedSolution solve_constrained(const LinearSystem& sys, double rel_tol) {
    const long n = sys.op.rows();
    if (sys.op.cols() != n) throw std::invalid_argument("solve_constrained: operator must be square");
    if (static_cast<long>(sys.rhs.size()) != n)
        throw std::invalid_argument("solve_constrained: rhs size mismatch");
    const long m = static_cast<long>(sys.constraint_fields.size());

    const Eigen::VectorXd w = quadrature_weights(sys.rhs.grid());
    Eigen::MatrixXd C(m, n);
    for (long j = 0; j < m; ++j) {
        const Field& c = sys.constraint_fields[static_cast<std::size_t>(j)];
        if (c.grid() != sys.rhs.grid())
            throw std::invalid_argument("solve_constrained: constraint grid mismatch");
        for (long i = 0; i < n; ++i)
            C(j, i) = c[static_cast<std::size_t>(i)] * w(i);
    }

    if (m > 0) {
        const Eigen::MatrixXd gram = C * C.transpose();
        Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
        lu.setThreshold(1e-12);
        if (lu.rank() < m)
            throw std::invalid_argument("solve_constrained: constraint rows are linearly dependent");
    }

    Eigen::VectorXd b(n);
    for (long i = 0; i < n; ++i) b(i) = sys.rhs[static_cast<std::size_t>(i)];

    // Bordered KKT (Lagrange) system: A x + C^T mu = b, C x = d. The
    // multiplier block absorbs the rhs component along the operator's
    // near-cokernel, which is exactly the direction the constraints pin
    // down; solving the square system directly avoids the conditioning
    // squeeze of normal equations.
    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n + m, n + m);
    K.topLeftCorner(n, n) = sys.op;
    if (m > 0) {
        K.topRightCorner(n, m) = C.transpose();
        K.bottomLeftCorner(m, n) = C;
    }
    Eigen::VectorXd rhs_kkt(n + m);
    rhs_kkt.head(n) = b;
    for (long j = 0; j < m; ++j) rhs_kkt(n + j) = sys.constraint_targets[static_cast<std::size_t>(j)];

    Eigen::PartialPivLU<Eigen::MatrixXd> solver(K);
    const Eigen::VectorXd xz = solver.solve(rhs_kkt);
    const Eigen::VectorXd x = xz.head(n);

    // Row-normalized relative residual; the operator rows may carry very
    // different scales (equation rows vs boundary rows).
    Eigen::VectorXd r = sys.op * x - b;
    double num = 0.0, den = 0.0;
    for (long i = 0; i < n; ++i) {
        const double s = std::max(sys.op.row(i).norm(), 1e-300);
        num += (r(i) / s) * (r(i) / s);
        den += (b(i) / s) * (b(i) / s);
    }
    const double res = std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
    if (!(res <= rel_tol)) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "solve_constrained: relative residual %.3e above tolerance",
                      res);
        throw std::runtime_error(msg);
    }

    std::vector<double> samples(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) samples[static_cast<std::size_t>(i)] = x(i);
    Field sol(sys.rhs.grid(), std::move(samples));
    sol.check_finite("solve_constrained solution");

    ConstrainedSolution out{std::move(sol), res, {}};
    if (m > 0) {
        const Eigen::VectorXd cres = C * x;
        for (long j = 0; j < m; ++j)
            out.constraint_residuals.push_back(cres(j) -
                                               sys.constraint_targets[static_cast<std::size_t>(j)]);
    }
    return out;
}

}  // namespace gkdv
