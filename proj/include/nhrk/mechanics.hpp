#pragma once

#include "nhrk/nlsolve.hpp"

#include <functional>
#include <string>

namespace nhrk {

using ScalarFn = std::function<double(const Vector&, const Vector&)>;
using VectorFn = std::function<Vector(const Vector&, const Vector&)>;
using MatrixFn = std::function<Matrix(const Vector&, const Vector&)>;

/// Nonholonomic system on a vector space: Lagrangian L(q, v), constraints Φ(q, v)
/// and an optional Hamiltonian H(q, p).
struct VecNHSystem {
    std::string name;
    int n = 0;
    int m = 0;

    ScalarFn L;
    VectorFn D1L, D2L;
    MatrixFn D22L;  ///< optional; finite-differenced from D2L when empty

    VectorFn Phi;
    MatrixFn D1Phi, D2Phi;  ///< m×n

    ScalarFn H;
    VectorFn D1H, D2H;
    MatrixFn D22H;

    bool has_hamiltonian() const { return static_cast<bool>(H) && D1H && D2H && D22H; }
};

/// Position-level constraint Φ(q) = 0 for the holonomic stepper.
struct PositionConstraint {
    int m = 0;
    std::function<Vector(const Vector&)> value;
    std::function<Matrix(const Vector&)> jacobian;  ///< m×n
};

struct ExtendedState {
    double t = 0.0;
    Vector q, p, v, lambda;
};

Vector legendre(const VecNHSystem& sys, const Vector& q, const Vector& v);

/// Solves D2L(q, v) = p by Newton from v = p.
Vector legendre_inverse(const VecNHSystem& sys, const Vector& q, const Vector& p);

/// g_L = D22L, analytic when supplied.
Matrix mass_matrix(const VecNHSystem& sys, const Vector& q, const Vector& v);

/// C = D2Φ g_L^{-1} D2Φᵀ.
Matrix compatibility_matrix(const VecNHSystem& sys, const Vector& q, const Vector& v);

/// Continuous-time multiplier keeping dΦ/dt = 0.
Vector consistent_multiplier(const VecNHSystem& sys, const Vector& q, const Vector& v);

/// E_L = v·D2L − L.
double energy(const VecNHSystem& sys, const Vector& q, const Vector& v);

/// State at (q, v) with p from the Legendre transform and the consistent multiplier.
ExtendedState make_state(const VecNHSystem& sys, const Vector& q, const Vector& v, double t = 0.0);

/// Fills whichever of p, v is missing, and λ from consistent_multiplier when absent.
ExtendedState complete_state(const VecNHSystem& sys, ExtendedState state);

} // namespace nhrk
