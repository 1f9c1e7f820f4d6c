#include "nhrk/prk_lie.hpp"

#include "nhrk/errors.hpp"

#include <cmath>
#include <string>

namespace nhrk {

namespace {

constexpr double kInitialConstraintTol = 1e-8;

double inf_norm(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

SolveResult solve_stage_system(const ResidualFn& f, const Vector& x0, const SolverConfig& cfg,
                               const char* who) {
    SolveResult r;
    try {
        r = newton_solve(f, x0, cfg);
    } catch (const SingularJacobian& e) {
        throw StepFailure(std::string(who) + ": " + e.what(), e.iteration(), NAN);
    } catch (const Divergence& e) {
        throw StepFailure(std::string(who) + ": " + e.what(), e.iteration(), NAN);
    }
    if (!r.report.converged)
        throw StepFailure(std::string(who) + ": Newton did not converge", r.report.iterations,
                          r.report.residual_norm);
    return r;
}

/// Derivative of f(g τ(εη)) at ε = 0 by Richardson-extrapolated central differences.
template <class F>
Vector group_directional(const Retraction& ret, const Matrix& g, const Vector& eta, F&& f) {
    const double scale = std::max(1.0, eta.size() ? eta.cwiseAbs().maxCoeff() : 0.0);
    const double eps = 1e-3 / scale;
    const auto central = [&](double e) {
        return Vector((f(g * ret.tau(e * eta)) - f(g * ret.tau(-e * eta))) / (2.0 * e));
    };
    return (4.0 * central(0.5 * eps) - central(eps)) / 3.0;
}

/// Shared kinematic quantities of one Lie step, recomputed from H.
struct LieKinematics {
    const Retraction& ret;
    const Matrix& a;
    const Vector& b;
    int s, k;
    double h;

    std::vector<Matrix> D, Dinv_neg;  ///< d^Lτ_{Ξ^i}, (d^Lτ_{−Ξ^i})^{-1}
    Matrix Dinv_xi, Dinv_negxi, Ad_xi_T;
    std::vector<Vector> U;  ///< d^Lτ_{Ξ^i} H^i

    void update(const Matrix& g, LieStageWork& w) {
        const GroupDescriptor& grp = ret.group();
        w.xi = Vector::Zero(k);
        for (int j = 0; j < s; ++j) w.xi += h * b(j) * w.H[j];
        D.resize(s);
        Dinv_neg.resize(s);
        U.resize(s);
        w.G.resize(s);
        for (int i = 0; i < s; ++i) {
            w.Xi[i] = Vector::Zero(k);
            for (int j = 0; j < s; ++j) w.Xi[i] += h * a(i, j) * w.H[j];
            w.G[i] = g * ret.tau(w.Xi[i]);
            D[i] = ret.dtau(w.Xi[i]);
            Dinv_neg[i] = ret.dtau_inv(-w.Xi[i]);
            U[i] = D[i] * w.H[i];
        }
        Dinv_xi = ret.dtau_inv(w.xi);
        Dinv_negxi = ret.dtau_inv(-w.xi);
        Ad_xi_T = grp.Ad(ret.tau(w.xi)).transpose();
    }

    /// M^i − RHS^i for all stages; sign = +1 (Lagrangian) or −1 (Hamiltonian).
    Vector momentum_residual(const Vector& mu, const LieStageWork& w, double sign) const {
        std::vector<Vector> dd(s);
        for (int j = 0; j < s; ++j) dd[j] = ret.ddtau_adjoint(w.Xi[j], w.H[j], w.Pi[j]);
        Vector r(s * k);
        for (int i = 0; i < s; ++i) {
            Vector inner = w.Pi[i];
            for (int j = 0; j < s; ++j) inner += h * b(j) * a(j, i) / b(i) * dd[j];
            const Vector m = Dinv_xi.transpose() * inner;
            Vector acc = mu;
            for (int j = 0; j < s; ++j)
                acc += sign * h * b(j) *
                       (Dinv_neg[j] - a(j, i) / b(i) * Dinv_negxi).transpose() * w.N[j];
            r.segment(i * k, k) = m - Ad_xi_T * acc;
        }
        return r;
    }

    Vector stage_momentum(const Vector& mu, const LieStageWork& w, int i, double sign) const {
        Vector acc = mu;
        for (int j = 0; j < s; ++j) acc += sign * h * a(i, j) * Dinv_neg[j].transpose() * w.N[j];
        return ret.group().Ad(ret.tau(w.Xi[i])).transpose() * acc;
    }

    Vector next_momentum(const Vector& mu, const LieStageWork& w, double sign) const {
        Vector acc = mu;
        for (int j = 0; j < s; ++j) acc += sign * h * b(j) * Dinv_neg[j].transpose() * w.N[j];
        return Ad_xi_T * acc;
    }
};

void resize_stages(LieStageWork& w, int s) {
    for (auto* v : {&w.Xi, &w.H, &w.N, &w.Pi, &w.M, &w.Lambda, &w.mu, &w.eta}) v->assign(s, Vector());
    w.G.assign(s, Matrix());
}

void fill_M(const LieKinematics& kin, LieStageWork& w) {
    for (int i = 0; i < kin.s; ++i) {
        Vector inner = w.Pi[i];
        for (int j = 0; j < kin.s; ++j)
            inner += kin.h * kin.b(j) * kin.a(j, i) / kin.b(i) *
                     kin.ret.ddtau_adjoint(w.Xi[j], w.H[j], w.Pi[j]);
        w.M[i] = kin.Dinv_xi.transpose() * inner;
    }
}

void check_step_domain(const Retraction& ret, const LieStageWork& w) {
    try {
        ret.check_domain(w.xi);
        for (const Vector& x : w.Xi) ret.check_domain(x);
    } catch (const RetractionDomain&) {
        throw RetractionDomain("step size too large: increment leaves the retraction domain");
    }
}

} // namespace

Vector lie_legendre(const LieNHSystem& sys, const Matrix& g, const Vector& eta) {
    return sys.D2ell(g, eta);
}

Matrix lie_mass_matrix(const LieNHSystem& sys, const Matrix& g, const Vector& eta) {
    if (sys.D22ell) return sys.D22ell(g, eta);
    const int k = sys.k();
    Matrix m(k, k);
    Vector ep = eta, em = eta;
    for (int j = 0; j < k; ++j) {
        const double step = 1e-5 * std::max(1.0, std::abs(eta(j)));
        ep(j) = eta(j) + step;
        em(j) = eta(j) - step;
        m.col(j) = (sys.D2ell(g, ep) - sys.D2ell(g, em)) / (2.0 * step);
        ep(j) = em(j) = eta(j);
    }
    return 0.5 * (m + m.transpose());
}

Vector lie_legendre_inverse(const LieNHSystem& sys, const Matrix& g, const Vector& mu) {
    SolverConfig cfg;
    cfg.tol = 1e-13 * std::max(1.0, mu.cwiseAbs().maxCoeff());
    const auto f = [&](const Vector& eta) { return Vector(sys.D2ell(g, eta) - mu); };
    const auto j = [&](const Vector& eta) { return lie_mass_matrix(sys, g, eta); };
    try {
        SolveResult r = newton_solve(f, mu, cfg, j);
        if (!r.report.converged)
            throw RegularityViolation("lie_legendre_inverse: Newton did not converge");
        return r.x;
    } catch (const SingularJacobian&) {
        throw RegularityViolation("lie_legendre_inverse: singular Hessian of l");
    }
}

double lie_energy(const LieNHSystem& sys, const Matrix& g, const Vector& eta) {
    return eta.dot(sys.D2ell(g, eta)) - sys.ell(g, eta);
}

Vector lie_consistent_multiplier(const LieNHSystem& sys, const Matrix& g, const Vector& eta) {
    if (sys.m == 0) return Vector(0);
    const Retraction ret(sys.group, sys.retraction);
    const Vector mu = sys.D2ell(g, eta);
    const Vector dphi_g = group_directional(ret, g, eta, [&](const Matrix& x) { return sys.phi(x, eta); });
    const Vector dmu_g =
        group_directional(ret, g, eta, [&](const Matrix& x) { return sys.D2ell(x, eta); });
    const Vector force = sys.group->ad(eta).transpose() * mu + sys.D1ell(g, eta) - dmu_g;
    const Matrix mm = lie_mass_matrix(sys, g, eta);
    const Matrix d2phi = sys.D2phi(g, eta);
    Vector ginv_force;
    Matrix c;
    try {
        ginv_force = lu_solve(mm, force);
        c = d2phi * lu_solve(mm, Matrix(d2phi.transpose()));
    } catch (const SingularMatrix&) {
        throw RegularityViolation("lie_consistent_multiplier: singular Hessian of l");
    }
    try {
        return lu_solve(c, Vector(-(dphi_g + d2phi * ginv_force)));
    } catch (const SingularMatrix&) {
        throw CompatibilityViolation("lie_consistent_multiplier: compatibility matrix is singular");
    }
}

LieState complete_lie_state(const LieNHSystem& sys, LieState state) {
    if (state.mu.size() == 0 && state.eta.size() == 0)
        throw InvalidArgument("Lie state needs mu or eta");
    if (state.mu.size() == 0) state.mu = sys.D2ell(state.g, state.eta);
    if (state.eta.size() == 0) state.eta = lie_legendre_inverse(sys, state.g, state.mu);
    if (state.lambda.size() != sys.m)
        state.lambda = lie_consistent_multiplier(sys, state.g, state.eta);
    return state;
}

LieStepResult step_vprkmk(const LieNHSystem& sys, const PartitionedTableau& tab,
                          const LieState& state, double h, const SolverConfig& cfg) {
    const LieState st = complete_lie_state(sys, state);
    const Retraction ret(sys.group, sys.retraction);
    const int s = tab.stages();
    const int k = sys.k();
    LieKinematics kin{ret, tab.primal.a, tab.primal.b, s, k, h, {}, {}, {}, {}, {}, {}};

    LieStageWork w;
    resize_stages(w, s);
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) w.H[i] = x.segment(i * k, k);
        kin.update(st.g, w);
        for (int i = 0; i < s; ++i) {
            w.N[i] = kin.D[i].transpose() * sys.D1ell(w.G[i], kin.U[i]);
            w.Pi[i] = kin.D[i].transpose() * sys.D2ell(w.G[i], kin.U[i]);
        }
        return kin.momentum_residual(st.mu, w, 1.0);
    };

    Vector x0(s * k);
    for (int i = 0; i < s; ++i) x0.segment(i * k, k) = st.eta;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_vprkmk");
    eval(sol.x);
    check_step_domain(ret, w);
    fill_M(kin, w);

    LieStepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.g = st.g * ret.tau(w.xi);
    out.state.mu = kin.next_momentum(st.mu, w, 1.0);
    out.state.eta = lie_legendre_inverse(sys, out.state.g, out.state.mu);
    out.state.lambda = st.lambda;
    out.stages = std::move(w);
    return out;
}

LieStepResult step_lie_holonomic(const LieNHSystem& sys, const LiePositionConstraint& con,
                                 const PartitionedTableau& tab, const LieState& state, double h,
                                 const SolverConfig& cfg) {
    tab.require_lobatto_structure();
    LieState st = state;
    if (st.mu.size() == 0) st.mu = sys.D2ell(st.g, st.eta);
    if (st.eta.size() == 0) st.eta = lie_legendre_inverse(sys, st.g, st.mu);
    if (st.lambda.size() != con.m) st.lambda = Vector::Zero(con.m);
    const Retraction ret(sys.group, sys.retraction);
    const int s = tab.stages();
    const int k = sys.k();
    const int m = con.m;
    LieKinematics kin{ret, tab.primal.a, tab.primal.b, s, k, h, {}, {}, {}, {}, {}, {}};

    LieStageWork w;
    resize_stages(w, s);
    Matrix g_next;
    Vector mu_next;
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) {
            w.H[i] = x.segment(i * k, k);
            w.Lambda[i] = x.segment(s * k + i * m, m);
        }
        kin.update(st.g, w);
        for (int i = 0; i < s; ++i) {
            const Vector force = sys.D1ell(w.G[i], kin.U[i]) + con.jacobian(w.G[i]).transpose() * w.Lambda[i];
            w.N[i] = kin.D[i].transpose() * force;
            w.Pi[i] = kin.D[i].transpose() * sys.D2ell(w.G[i], kin.U[i]);
        }
        Vector r(s * k + s * m);
        r.head(s * k) = kin.momentum_residual(st.mu, w, 1.0);
        for (int i = 1; i < s; ++i) r.segment(s * k + (i - 1) * m, m) = con.value(w.G[i]);
        g_next = st.g * ret.tau(w.xi);
        mu_next = kin.next_momentum(st.mu, w, 1.0);
        const Vector eta_next = sys.has_hamiltonian() ? sys.D2h(g_next, mu_next)
                                                      : lie_legendre_inverse(sys, g_next, mu_next);
        r.segment(s * k + (s - 1) * m, m) = con.jacobian(g_next) * eta_next;
        return r;
    };

    Vector x0(s * k + s * m);
    for (int i = 0; i < s; ++i) {
        x0.segment(i * k, k) = st.eta;
        x0.segment(s * k + i * m, m) = st.lambda;
    }
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_lie_holonomic");
    eval(sol.x);
    check_step_domain(ret, w);
    fill_M(kin, w);

    LieStepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.g = g_next;
    out.state.mu = mu_next;
    out.state.eta = lie_legendre_inverse(sys, g_next, mu_next);
    out.state.lambda = w.Lambda[s - 1];
    for (int i = 0; i < s; ++i)
        out.constraint_residual = std::max(out.constraint_residual, inf_norm(con.value(w.G[i])));
    out.stages = std::move(w);
    return out;
}

namespace {

LieStepResult step_nh_lie_lagrangian(const LieNHSystem& sys, const PartitionedTableau& tab,
                                     const LieState& st, double h, const SolverConfig& cfg) {
    const Retraction ret(sys.group, sys.retraction);
    const int s = tab.stages();
    const int k = sys.k();
    const int m = sys.m;
    LieKinematics kin{ret, tab.primal.a, tab.primal.b, s, k, h, {}, {}, {}, {}, {}, {}};

    LieStageWork w;
    resize_stages(w, s);
    w.Lambda[0] = st.lambda;
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) w.H[i] = x.segment(i * k, k);
        for (int i = 1; i < s; ++i) w.Lambda[i] = x.segment(s * k + (i - 1) * m, m);
        kin.update(st.g, w);
        for (int i = 0; i < s; ++i) {
            Vector force = sys.D1ell(w.G[i], kin.U[i]);
            if (m > 0) force += sys.D2phi(w.G[i], kin.U[i]).transpose() * w.Lambda[i];
            w.N[i] = kin.D[i].transpose() * force;
            w.Pi[i] = kin.D[i].transpose() * sys.D2ell(w.G[i], kin.U[i]);
        }
        Vector r(s * k + (s - 1) * m);
        r.head(s * k) = kin.momentum_residual(st.mu, w, 1.0);
        for (int i = 1; i < s; ++i) {
            w.mu[i] = kin.stage_momentum(st.mu, w, i, 1.0);
            w.eta[i] = lie_legendre_inverse(sys, w.G[i], w.mu[i]);
            if (m > 0) r.segment(s * k + (i - 1) * m, m) = sys.phi(w.G[i], w.eta[i]);
        }
        return r;
    };

    Vector x0(s * k + (s - 1) * m);
    for (int i = 0; i < s; ++i) x0.segment(i * k, k) = st.eta;
    for (int i = 1; i < s; ++i) x0.segment(s * k + (i - 1) * m, m) = st.lambda;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_nh_lie");
    eval(sol.x);
    check_step_domain(ret, w);
    fill_M(kin, w);
    w.mu[0] = kin.stage_momentum(st.mu, w, 0, 1.0);
    w.eta[0] = lie_legendre_inverse(sys, w.G[0], w.mu[0]);

    LieStepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.g = st.g * ret.tau(w.xi);
    out.state.mu = kin.next_momentum(st.mu, w, 1.0);
    out.state.eta = lie_legendre_inverse(sys, out.state.g, out.state.mu);
    out.state.lambda = w.Lambda[s - 1];
    if (m > 0)
        for (int i = 0; i < s; ++i)
            out.constraint_residual =
                std::max(out.constraint_residual, inf_norm(sys.phi(w.G[i], w.eta[i])));
    out.stages = std::move(w);
    return out;
}

LieStepResult step_nh_lie_hamiltonian(const LieNHSystem& sys, const PartitionedTableau& tab,
                                      const LieState& st, double h, const SolverConfig& cfg) {
    if (!sys.has_hamiltonian())
        throw InvalidArgument("step_nh_lie: system " + sys.name + " has no Hamiltonian");
    const Retraction ret(sys.group, sys.retraction);
    const int s = tab.stages();
    const int k = sys.k();
    const int m = sys.m;
    const int nu = 2 * s * k;
    LieKinematics kin{ret, tab.primal.a, tab.primal.b, s, k, h, {}, {}, {}, {}, {}, {}};

    // ♭_𝒽(D2ψ) with ∂ψ/∂μ = D2φ(g, D2𝒽)·D22𝒽
    const auto flat_dpsi = [&](const Matrix& g, const Vector& mu) {
        const Matrix gh = sys.D22h(g, mu);
        const Matrix dpsi = sys.D2phi(g, sys.D2h(g, mu)) * gh;
        return Matrix(lu_solve(gh, Matrix(dpsi.transpose())));
    };

    LieStageWork w;
    resize_stages(w, s);
    w.Lambda[0] = st.lambda;
    std::vector<Matrix> dinv(s);
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) {
            w.H[i] = x.segment(i * k, k);
            w.Pi[i] = x.segment(s * k + i * k, k);
        }
        for (int i = 1; i < s; ++i) w.Lambda[i] = x.segment(nu + (i - 1) * m, m);
        kin.update(st.g, w);
        Vector r(nu + (s - 1) * m);
        for (int i = 0; i < s; ++i) {
            dinv[i] = ret.dtau_inv(w.Xi[i]);
            const Vector nu_i = dinv[i].transpose() * w.Pi[i];
            Vector force = sys.D1h(w.G[i], nu_i);
            if (m > 0) force -= flat_dpsi(w.G[i], nu_i) * w.Lambda[i];
            w.N[i] = kin.D[i].transpose() * force;
            r.segment(i * k, k) = w.H[i] - dinv[i] * sys.D2h(w.G[i], nu_i);
        }
        r.segment(s * k, s * k) = kin.momentum_residual(st.mu, w, -1.0);
        for (int i = 1; i < s; ++i) {
            w.mu[i] = kin.stage_momentum(st.mu, w, i, -1.0);
            w.eta[i] = sys.D2h(w.G[i], w.mu[i]);
            if (m > 0) r.segment(nu + (i - 1) * m, m) = sys.phi(w.G[i], w.eta[i]);
        }
        return r;
    };

    Vector x0(nu + (s - 1) * m);
    for (int i = 0; i < s; ++i) {
        x0.segment(i * k, k) = st.eta;
        x0.segment(s * k + i * k, k) = st.mu;
    }
    for (int i = 1; i < s; ++i) x0.segment(nu + (i - 1) * m, m) = st.lambda;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_nh_lie");
    eval(sol.x);
    check_step_domain(ret, w);
    fill_M(kin, w);
    w.mu[0] = kin.stage_momentum(st.mu, w, 0, -1.0);
    w.eta[0] = sys.D2h(w.G[0], w.mu[0]);

    LieStepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.g = st.g * ret.tau(w.xi);
    out.state.mu = kin.next_momentum(st.mu, w, -1.0);
    out.state.eta = sys.D2h(out.state.g, out.state.mu);
    out.state.lambda = w.Lambda[s - 1];
    if (m > 0)
        for (int i = 0; i < s; ++i)
            out.constraint_residual =
                std::max(out.constraint_residual, inf_norm(sys.phi(w.G[i], w.eta[i])));
    out.stages = std::move(w);
    return out;
}

} // namespace

LieStepResult step_nh_lie(const LieNHSystem& sys, const PartitionedTableau& tab,
                          const LieState& state, double h, const SolverConfig& cfg, LieForm form) {
    tab.require_lobatto_structure();
    const LieState st = complete_lie_state(sys, state);
    if (sys.m > 0) {
        const double r = inf_norm(sys.phi(st.g, st.eta));
        if (r > kInitialConstraintTol)
            throw InconsistentInitialState("initial state violates the constraint: |phi| = " +
                                           std::to_string(r));
    }
    return form == LieForm::lagrangian ? step_nh_lie_lagrangian(sys, tab, st, h, cfg)
                                       : step_nh_lie_hamiltonian(sys, tab, st, h, cfg);
}

Matrix translation_element(const Vector& q) {
    const int n = static_cast<int>(q.size());
    Matrix g = Matrix::Identity(n + 1, n + 1);
    g.col(n).head(n) = q;
    return g;
}

LieNHSystem lie_from_vector(const VecNHSystem& sys) {
    LieNHSystem out;
    out.name = sys.name + "@R^" + std::to_string(sys.n);
    out.group = translation_group(sys.n);
    out.retraction = RetractionKind::cay;
    out.m = sys.m;
    const int n = sys.n;
    const auto pos = [n](const Matrix& g) { return Vector(g.col(n).head(n)); };
    out.ell = [=](const Matrix& g, const Vector& v) { return sys.L(pos(g), v); };
    out.D1ell = [=](const Matrix& g, const Vector& v) { return sys.D1L(pos(g), v); };
    out.D2ell = [=](const Matrix& g, const Vector& v) { return sys.D2L(pos(g), v); };
    if (sys.D22L) out.D22ell = [=](const Matrix& g, const Vector& v) { return sys.D22L(pos(g), v); };
    if (sys.m > 0) {
        out.phi = [=](const Matrix& g, const Vector& v) { return sys.Phi(pos(g), v); };
        out.D2phi = [=](const Matrix& g, const Vector& v) { return sys.D2Phi(pos(g), v); };
    }
    if (sys.has_hamiltonian()) {
        out.h = [=](const Matrix& g, const Vector& p) { return sys.H(pos(g), p); };
        out.D1h = [=](const Matrix& g, const Vector& p) { return sys.D1H(pos(g), p); };
        out.D2h = [=](const Matrix& g, const Vector& p) { return sys.D2H(pos(g), p); };
        out.D22h = [=](const Matrix& g, const Vector& p) { return sys.D22H(pos(g), p); };
    }
    return out;
}

} // namespace nhrk
