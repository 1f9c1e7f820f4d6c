#include "nhrk/mechanics.hpp"

#include "nhrk/errors.hpp"

#include <cmath>

namespace nhrk {

Vector legendre(const VecNHSystem& sys, const Vector& q, const Vector& v) {
    return sys.D2L(q, v);
}

Matrix mass_matrix(const VecNHSystem& sys, const Vector& q, const Vector& v) {
    if (sys.D22L) return sys.D22L(q, v);
    Matrix g(sys.n, sys.n);
    Vector vp = v, vm = v;
    for (int k = 0; k < sys.n; ++k) {
        const double step = 1e-5 * std::max(1.0, std::abs(v(k)));
        vp(k) = v(k) + step;
        vm(k) = v(k) - step;
        g.col(k) = (sys.D2L(q, vp) - sys.D2L(q, vm)) / (2.0 * step);
        vp(k) = vm(k) = v(k);
    }
    return 0.5 * (g + g.transpose());
}

Vector legendre_inverse(const VecNHSystem& sys, const Vector& q, const Vector& p) {
    SolverConfig cfg;
    cfg.tol = 1e-13 * std::max(1.0, p.size() ? p.cwiseAbs().maxCoeff() : 0.0);
    const auto f = [&](const Vector& v) { return Vector(sys.D2L(q, v) - p); };
    const auto j = [&](const Vector& v) { return mass_matrix(sys, q, v); };
    try {
        SolveResult r = newton_solve(f, p, cfg, j);
        if (!r.report.converged)
            throw RegularityViolation("legendre_inverse: Newton did not converge");
        return r.x;
    } catch (const SingularJacobian&) {
        throw RegularityViolation("legendre_inverse: singular Hessian of L");
    }
}

Matrix compatibility_matrix(const VecNHSystem& sys, const Vector& q, const Vector& v) {
    const Matrix d2phi = sys.D2Phi(q, v);
    try {
        const Matrix ginv_dt = lu_solve(mass_matrix(sys, q, v), Matrix(d2phi.transpose()));
        return d2phi * ginv_dt;
    } catch (const SingularMatrix&) {
        throw RegularityViolation("compatibility_matrix: singular Hessian of L");
    }
}

Vector consistent_multiplier(const VecNHSystem& sys, const Vector& q, const Vector& v) {
    if (sys.m == 0) return Vector(0);
    // (∂_q D2L)·v by Richardson-extrapolated central differences along v
    const double vn = std::max(1.0, v.cwiseAbs().maxCoeff());
    const auto central = [&](double eps) {
        return Vector((sys.D2L(q + eps * v, v) - sys.D2L(q - eps * v, v)) / (2.0 * eps));
    };
    const double eps = 1e-3 / vn;
    const Vector mixed = (4.0 * central(0.5 * eps) - central(eps)) / 3.0;

    const Matrix g = mass_matrix(sys, q, v);
    const Matrix d2phi = sys.D2Phi(q, v);
    Vector ginv_force;
    Matrix c;
    try {
        ginv_force = lu_solve(g, Vector(sys.D1L(q, v) - mixed));
        c = d2phi * lu_solve(g, Matrix(d2phi.transpose()));
    } catch (const SingularMatrix&) {
        throw RegularityViolation("consistent_multiplier: singular Hessian of L");
    }
    const Vector xi = sys.D1Phi(q, v) * v + d2phi * ginv_force;
    try {
        return lu_solve(c, Vector(-xi));
    } catch (const SingularMatrix&) {
        throw CompatibilityViolation("consistent_multiplier: compatibility matrix is singular");
    }
}

double energy(const VecNHSystem& sys, const Vector& q, const Vector& v) {
    return v.dot(sys.D2L(q, v)) - sys.L(q, v);
}

ExtendedState make_state(const VecNHSystem& sys, const Vector& q, const Vector& v, double t) {
    ExtendedState s;
    s.t = t;
    s.q = q;
    s.v = v;
    s.p = legendre(sys, q, v);
    s.lambda = consistent_multiplier(sys, q, v);
    return s;
}

ExtendedState complete_state(const VecNHSystem& sys, ExtendedState state) {
    if (state.p.size() == 0 && state.v.size() == 0)
        throw InvalidArgument("state needs p or v");
    if (state.p.size() == 0) state.p = legendre(sys, state.q, state.v);
    if (state.v.size() == 0) state.v = legendre_inverse(sys, state.q, state.p);
    if (state.lambda.size() != sys.m) state.lambda = consistent_multiplier(sys, state.q, state.v);
    return state;
}

} // namespace nhrk
