#include "nhrk/nlsolve.hpp"

#include "nhrk/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace nhrk {

namespace {

constexpr double kPivotTol = 1e-14;

struct ScaledLU {
    Eigen::PartialPivLU<Matrix> lu;
    Vector row_scale;
};

/// Factorizes diag(1/max|row|)·A; returns false when a pivot is below kPivotTol.
bool factor(const Matrix& a, ScaledLU& out) {
    const Eigen::Index n = a.rows();
    out.row_scale.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = a.row(i).cwiseAbs().maxCoeff();
        if (!(m > 0.0) || !std::isfinite(m)) return false;
        out.row_scale(i) = 1.0 / m;
    }
    out.lu.compute(out.row_scale.asDiagonal() * a);
    const Matrix& u = out.lu.matrixLU();
    for (Eigen::Index i = 0; i < n; ++i)
        if (!(std::abs(u(i, i)) >= kPivotTol)) return false;
    return true;
}

double inf_norm(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

} // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw InvalidArgument("solver tol must be positive");
    if (max_iters < 1) throw InvalidArgument("solver max_iters must be >= 1");
}

Matrix fd_jacobian(const ResidualFn& f, const Vector& x, const Vector& fx, double rel_step) {
    const double eps = rel_step > 0.0 ? rel_step : std::sqrt(std::numeric_limits<double>::epsilon());
    Matrix j(fx.size(), x.size());
    Vector xp = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double step = eps * std::max(1.0, std::abs(x(k)));
        xp(k) = x(k) + step;
        const double actual = xp(k) - x(k);
        j.col(k) = (f(xp) - fx) / actual;
        xp(k) = x(k);
    }
    return j;
}

SolveResult newton_solve(const ResidualFn& f, const Vector& x0, const SolverConfig& cfg,
                         const JacobianFn& jac) {
    cfg.validate();
    SolveResult out;
    out.x = x0;
    if (x0.size() == 0) {
        out.report.converged = true;
        return out;
    }
    Vector fx = f(out.x);
    double norm = inf_norm(fx);
    out.report.history.push_back(norm);
    // Once ‖F‖ ≤ tol, one more step is taken while the last increment is still
    // large, since unknowns entering F with a small factor are not yet resolved.
    double last_step = std::numeric_limits<double>::infinity();
    for (int it = 0;; ++it) {
        if (!std::isfinite(norm))
            throw Divergence("newton_solve: non-finite residual at iteration " + std::to_string(it), it);
        const bool small = norm <= cfg.tol;
        if (small && (it == cfg.max_iters || last_step <= cfg.tol * std::max(1.0, inf_norm(out.x)))) {
            out.report.converged = true;
            break;
        }
        if (it == cfg.max_iters) break;
        const Matrix j = jac ? jac(out.x) : fd_jacobian(f, out.x, fx, cfg.fd_step);
        ScaledLU lu;
        if (!factor(j, lu))
            throw SingularJacobian("newton_solve: singular Jacobian at iteration " + std::to_string(it), it);
        const Vector dx = lu.lu.solve(lu.row_scale.asDiagonal() * fx);
        const Vector next = out.x - dx;
        const Vector fnext = f(next);
        const double nnext = inf_norm(fnext);
        if (small) {
            // polishing step: keep it only if the residual stays within tol
            if (nnext <= cfg.tol) {
                out.x = next;
                norm = nnext;
                out.report.iterations = it + 1;
                out.report.history.push_back(norm);
            }
            out.report.converged = true;
            break;
        }
        out.x = next;
        fx = fnext;
        norm = nnext;
        last_step = inf_norm(dx);
        out.report.iterations = it + 1;
        out.report.history.push_back(norm);
    }
    out.report.residual_norm = norm;
    return out;
}

Vector lu_solve(const Matrix& a, const Vector& rhs) {
    return lu_solve(a, Matrix(rhs)).col(0);
}

Matrix lu_solve(const Matrix& a, const Matrix& rhs) {
    if (a.rows() != a.cols()) throw InvalidArgument("lu_solve: matrix is not square");
    if (a.rows() != rhs.rows()) throw InvalidArgument("lu_solve: dimension mismatch");
    if (a.rows() == 0) return rhs;
    ScaledLU lu;
    if (!factor(a, lu)) throw SingularMatrix("lu_solve: matrix is numerically singular");
    return lu.lu.solve(lu.row_scale.asDiagonal() * rhs);
}

} // namespace nhrk
