#include "nhrk/prk_vec.hpp"

#include "nhrk/errors.hpp"

#include <cmath>
#include <string>

namespace nhrk {

namespace {

constexpr double kInitialConstraintTol = 1e-8;

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

double inf_norm(const Vector& v) {
    return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

void resize_stages(StageWork& w, int s) {
    w.Q.assign(s, Vector());
    w.V.assign(s, Vector());
    w.P.assign(s, Vector());
    w.W.assign(s, Vector());
    w.Lambda.assign(s, Vector());
    w.p.assign(s, Vector());
    w.v.assign(s, Vector());
}

/// Q^i = q + h Σ_j a_ij V^j.
void stage_positions(const Matrix& a, const Vector& q, double h, StageWork& w) {
    const int s = static_cast<int>(a.rows());
    for (int i = 0; i < s; ++i) {
        w.Q[i] = q;
        for (int j = 0; j < s; ++j) w.Q[i] += h * a(i, j) * w.V[j];
    }
}

Vector weighted_sum(const Eigen::Ref<const Vector>& weights, const std::vector<Vector>& xs) {
    Vector acc = Vector::Zero(xs.front().size());
    for (size_t j = 0; j < xs.size(); ++j) acc += weights(static_cast<Eigen::Index>(j)) * xs[j];
    return acc;
}

void check_initial_constraint(const VecNHSystem& sys, const ExtendedState& st) {
    if (sys.m == 0) return;
    const double r = inf_norm(sys.Phi(st.q, st.v));
    if (r > kInitialConstraintTol)
        throw InconsistentInitialState("initial state violates the constraint: |Φ| = " +
                                       std::to_string(r));
}

} // namespace

StepResult step_vprk(const VecNHSystem& sys, const PartitionedTableau& tab,
                     const ExtendedState& state, double h, const SolverConfig& cfg) {
    const ExtendedState st = complete_state(sys, state);
    const int s = tab.stages();
    const int n = sys.n;
    const Matrix& a = tab.primal.a;
    const Matrix& ah = tab.dual.a;

    StageWork w;
    resize_stages(w, s);
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) w.V[i] = x.segment(i * n, n);
        stage_positions(a, st.q, h, w);
        for (int i = 0; i < s; ++i) {
            w.W[i] = sys.D1L(w.Q[i], w.V[i]);
            w.P[i] = sys.D2L(w.Q[i], w.V[i]);
        }
        Vector r(s * n);
        for (int i = 0; i < s; ++i)
            r.segment(i * n, n) = w.P[i] - st.p - h * weighted_sum(ah.row(i).transpose(), w.W);
        return r;
    };

    Vector x0(s * n);
    for (int i = 0; i < s; ++i) x0.segment(i * n, n) = st.v;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_vprk");
    eval(sol.x);

    StepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.q = st.q + h * weighted_sum(tab.primal.b, w.V);
    out.state.p = st.p + h * weighted_sum(tab.dual.b, w.W);
    out.state.v = legendre_inverse(sys, out.state.q, out.state.p);
    out.state.lambda = st.lambda;
    out.stages = std::move(w);
    return out;
}

StepResult step_holonomic(const VecNHSystem& sys, const PositionConstraint& con,
                          const PartitionedTableau& tab, const ExtendedState& state, double h,
                          const SolverConfig& cfg) {
    tab.require_lobatto_structure();
    ExtendedState st = state;
    if (st.p.size() == 0) st.p = legendre(sys, st.q, st.v);
    if (st.v.size() == 0) st.v = legendre_inverse(sys, st.q, st.p);
    if (st.lambda.size() != con.m) st.lambda = Vector::Zero(con.m);
    const int s = tab.stages();
    const int n = sys.n;
    const int m = con.m;
    const Matrix& a = tab.primal.a;
    const Matrix& ah = tab.dual.a;

    StageWork w;
    resize_stages(w, s);
    Vector q_next, p_next;
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) {
            w.V[i] = x.segment(i * n, n);
            w.Lambda[i] = x.segment(s * n + i * m, m);
        }
        stage_positions(a, st.q, h, w);
        for (int i = 0; i < s; ++i) {
            w.W[i] = sys.D1L(w.Q[i], w.V[i]) + con.jacobian(w.Q[i]).transpose() * w.Lambda[i];
            w.P[i] = sys.D2L(w.Q[i], w.V[i]);
        }
        q_next = st.q + h * weighted_sum(tab.primal.b, w.V);
        p_next = st.p + h * weighted_sum(tab.dual.b, w.W);
        const Vector v_next = sys.has_hamiltonian() ? sys.D2H(q_next, p_next)
                                                    : legendre_inverse(sys, q_next, p_next);
        Vector r(s * n + s * m);
        for (int i = 0; i < s; ++i)
            r.segment(i * n, n) = w.P[i] - st.p - h * weighted_sum(ah.row(i).transpose(), w.W);
        for (int i = 1; i < s; ++i) r.segment(s * n + (i - 1) * m, m) = con.value(w.Q[i]);
        r.segment(s * n + (s - 1) * m, m) = con.jacobian(q_next) * v_next;
        return r;
    };

    Vector x0(s * n + s * m);
    for (int i = 0; i < s; ++i) {
        x0.segment(i * n, n) = st.v;
        x0.segment(s * n + i * m, m) = st.lambda;
    }
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_holonomic");
    eval(sol.x);

    StepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.q = q_next;
    out.state.p = p_next;
    out.state.v = legendre_inverse(sys, q_next, p_next);
    out.state.lambda = w.Lambda[s - 1];
    for (int i = 0; i < s; ++i)
        out.constraint_residual = std::max(out.constraint_residual, inf_norm(con.value(w.Q[i])));
    out.stages = std::move(w);
    return out;
}

StepResult step_nh_lagrangian(const VecNHSystem& sys, const PartitionedTableau& tab,
                              const ExtendedState& state, double h, const SolverConfig& cfg) {
    tab.require_lobatto_structure();
    const ExtendedState st = complete_state(sys, state);
    check_initial_constraint(sys, st);
    const int s = tab.stages();
    const int n = sys.n;
    const int m = sys.m;
    const Matrix& a = tab.primal.a;
    const Matrix& ah = tab.dual.a;

    StageWork w;
    resize_stages(w, s);
    w.Lambda[0] = st.lambda;
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) w.V[i] = x.segment(i * n, n);
        for (int i = 1; i < s; ++i) w.Lambda[i] = x.segment(s * n + (i - 1) * m, m);
        stage_positions(a, st.q, h, w);
        for (int i = 0; i < s; ++i) {
            w.W[i] = sys.D1L(w.Q[i], w.V[i]);
            if (m > 0) w.W[i] += sys.D2Phi(w.Q[i], w.V[i]).transpose() * w.Lambda[i];
            w.P[i] = sys.D2L(w.Q[i], w.V[i]);
        }
        Vector r(s * n + (s - 1) * m);
        for (int i = 0; i < s; ++i)
            r.segment(i * n, n) = w.P[i] - st.p - h * weighted_sum(ah.row(i).transpose(), w.W);
        for (int i = 1; i < s; ++i) {
            w.p[i] = st.p + h * weighted_sum(a.row(i).transpose(), w.W);
            w.v[i] = legendre_inverse(sys, w.Q[i], w.p[i]);
            if (m > 0) r.segment(s * n + (i - 1) * m, m) = sys.Phi(w.Q[i], w.v[i]);
        }
        return r;
    };

    Vector x0(s * n + (s - 1) * m);
    for (int i = 0; i < s; ++i) x0.segment(i * n, n) = st.v;
    for (int i = 1; i < s; ++i) x0.segment(s * n + (i - 1) * m, m) = st.lambda;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_nh_lagrangian");
    eval(sol.x);
    w.p[0] = st.p + h * weighted_sum(a.row(0).transpose(), w.W);
    w.v[0] = legendre_inverse(sys, w.Q[0], w.p[0]);

    StepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.q = st.q + h * weighted_sum(tab.primal.b, w.V);
    out.state.p = st.p + h * weighted_sum(tab.dual.b, w.W);
    out.state.v = legendre_inverse(sys, out.state.q, out.state.p);
    out.state.lambda = w.Lambda[s - 1];
    if (m > 0)
        for (int i = 0; i < s; ++i)
            out.constraint_residual =
                std::max(out.constraint_residual, inf_norm(sys.Phi(w.Q[i], w.v[i])));
    out.stages = std::move(w);
    return out;
}

StepResult step_nh_hamiltonian(const VecNHSystem& sys, const PartitionedTableau& tab,
                               const ExtendedState& state, double h, const SolverConfig& cfg) {
    if (!sys.has_hamiltonian())
        throw InvalidArgument("step_nh_hamiltonian: system " + sys.name + " has no Hamiltonian");
    tab.require_lobatto_structure();
    const ExtendedState st = complete_state(sys, state);
    check_initial_constraint(sys, st);
    const int s = tab.stages();
    const int n = sys.n;
    const int m = sys.m;
    const Matrix& a = tab.primal.a;
    const Matrix& ah = tab.dual.a;
    const int np = 2 * s * n;

    // ♭_H(D2Ψ) with ∂Ψ/∂p = D2Φ(q, D2H)·g_H
    const auto flat_dpsi = [&](const Vector& q, const Vector& p) {
        const Matrix gh = sys.D22H(q, p);
        const Matrix dpsi = sys.D2Phi(q, sys.D2H(q, p)) * gh;
        return Matrix(lu_solve(gh, Matrix(dpsi.transpose())));
    };

    StageWork w;
    resize_stages(w, s);
    w.Lambda[0] = st.lambda;
    const auto eval = [&](const Vector& x) {
        for (int i = 0; i < s; ++i) {
            w.V[i] = x.segment(i * n, n);
            w.P[i] = x.segment(s * n + i * n, n);
        }
        for (int i = 1; i < s; ++i) w.Lambda[i] = x.segment(np + (i - 1) * m, m);
        stage_positions(a, st.q, h, w);
        for (int i = 0; i < s; ++i) {
            w.W[i] = sys.D1H(w.Q[i], w.P[i]);
            if (m > 0) w.W[i] -= flat_dpsi(w.Q[i], w.P[i]) * w.Lambda[i];
        }
        Vector r(np + (s - 1) * m);
        for (int i = 0; i < s; ++i) {
            r.segment(i * n, n) = w.V[i] - sys.D2H(w.Q[i], w.P[i]);
            r.segment(s * n + i * n, n) =
                w.P[i] - (st.p - h * weighted_sum(ah.row(i).transpose(), w.W));
        }
        for (int i = 1; i < s; ++i) {
            w.p[i] = st.p - h * weighted_sum(a.row(i).transpose(), w.W);
            w.v[i] = sys.D2H(w.Q[i], w.p[i]);
            if (m > 0) r.segment(np + (i - 1) * m, m) = sys.Phi(w.Q[i], w.v[i]);
        }
        return r;
    };

    Vector x0(np + (s - 1) * m);
    for (int i = 0; i < s; ++i) {
        x0.segment(i * n, n) = st.v;
        x0.segment(s * n + i * n, n) = st.p;
    }
    for (int i = 1; i < s; ++i) x0.segment(np + (i - 1) * m, m) = st.lambda;
    const SolveResult sol = solve_stage_system(eval, x0, cfg, "step_nh_hamiltonian");
    eval(sol.x);
    w.p[0] = st.p - h * weighted_sum(a.row(0).transpose(), w.W);
    w.v[0] = sys.D2H(w.Q[0], w.p[0]);

    StepResult out;
    out.report = sol.report;
    out.state.t = st.t + h;
    out.state.q = st.q + h * weighted_sum(tab.primal.b, w.V);
    out.state.p = st.p - h * weighted_sum(tab.dual.b, w.W);
    out.state.v = sys.D2H(out.state.q, out.state.p);
    out.state.lambda = w.Lambda[s - 1];
    if (m > 0)
        for (int i = 0; i < s; ++i)
            out.constraint_residual =
                std::max(out.constraint_residual, inf_norm(sys.Phi(w.Q[i], w.v[i])));
    out.stages = std::move(w);
    return out;
}

} // namespace nhrk
