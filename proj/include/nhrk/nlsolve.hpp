#pragma once

#include "nhrk/tableau.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace nhrk {

struct SolverConfig {
    double tol = 1e-12;
    int max_iters = 50;
    /// Relative forward-difference step; ≤ 0 selects √eps.
    double fd_step = 0.0;

    void validate() const;
};

struct SolveReport {
    int iterations = 0;
    double residual_norm = 0.0;
    bool converged = false;
    /// ‖F‖∞ after each iterate, starting with x0.
    std::vector<double> history;
};

using ResidualFn = std::function<Vector(const Vector&)>;
using JacobianFn = std::function<Matrix(const Vector&)>;

struct SolveResult {
    Vector x;
    SolveReport report;
};

/// Full Newton iteration. Throws SingularJacobian or Divergence; returns
/// a non-converged report when max_iters is exhausted.
SolveResult newton_solve(const ResidualFn& f, const Vector& x0, const SolverConfig& cfg,
                         const JacobianFn& jac = nullptr);

/// Forward-difference Jacobian of f at x, with f(x) supplied.
Matrix fd_jacobian(const ResidualFn& f, const Vector& x, const Vector& fx, double rel_step = 0.0);

/// Partial-pivoting LU solve. Throws SingularMatrix when a row-scaled pivot
/// falls below 1e-14.
Vector lu_solve(const Matrix& a, const Vector& rhs);

/// Same as lu_solve for several right-hand sides.
Matrix lu_solve(const Matrix& a, const Matrix& rhs);

} // namespace nhrk
