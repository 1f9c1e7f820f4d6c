#pragma once

#include "nhrk/liegroup.hpp"
#include "nhrk/mechanics.hpp"
#include "nhrk/nlsolve.hpp"

#include <functional>
#include <string>
#include <vector>

namespace nhrk {

using LieScalarFn = std::function<double(const Matrix&, const Vector&)>;
using LieVectorFn = std::function<Vector(const Matrix&, const Vector&)>;
using LieMatrixFn = std::function<Matrix(const Matrix&, const Vector&)>;

/// Left-trivialized nonholonomic system on a matrix Lie group.
/// D1ell and D1h are pulled back to 𝔤* by left translation.
struct LieNHSystem {
    std::string name;
    GroupPtr group;
    RetractionKind retraction = RetractionKind::cay;
    int m = 0;

    LieScalarFn ell;
    LieVectorFn D1ell, D2ell;
    LieMatrixFn D22ell;  ///< optional

    LieVectorFn phi;
    LieMatrixFn D2phi;  ///< m×k

    LieScalarFn h;
    LieVectorFn D1h, D2h;
    LieMatrixFn D22h;

    int k() const { return group->k; }
    bool has_hamiltonian() const { return static_cast<bool>(h) && D1h && D2h && D22h; }
};

/// Holonomic constraint Φ: G → ℝ^m with its left-trivialized derivative (m×k).
struct LiePositionConstraint {
    int m = 0;
    std::function<Vector(const Matrix&)> value;
    std::function<Matrix(const Matrix&)> jacobian;
};

struct LieState {
    double t = 0.0;
    Matrix g;
    Vector eta, mu, lambda;
};

struct LieStageWork {
    std::vector<Vector> Xi, H, N, Pi, M, Lambda, mu, eta;
    std::vector<Matrix> G;
    Vector xi;
};

struct LieStepResult {
    LieState state;
    LieStageWork stages;
    SolveReport report;
    double constraint_residual = 0.0;
};

Vector lie_legendre(const LieNHSystem& sys, const Matrix& g, const Vector& eta);
/// Solves D2ℓ(g, η) = μ by Newton from η = μ.
Vector lie_legendre_inverse(const LieNHSystem& sys, const Matrix& g, const Vector& mu);
Matrix lie_mass_matrix(const LieNHSystem& sys, const Matrix& g, const Vector& eta);
/// ⟨μ, η⟩ − ℓ.
double lie_energy(const LieNHSystem& sys, const Matrix& g, const Vector& eta);
/// Continuous-time multiplier keeping dφ/dt = 0 along the reduced equations.
Vector lie_consistent_multiplier(const LieNHSystem& sys, const Matrix& g, const Vector& eta);
/// Fills whichever of μ, η is missing, and λ when absent.
LieState complete_lie_state(const LieNHSystem& sys, LieState state);

LieStepResult step_vprkmk(const LieNHSystem& sys, const PartitionedTableau& tab,
                          const LieState& state, double h, const SolverConfig& cfg = {});

LieStepResult step_lie_holonomic(const LieNHSystem& sys, const LiePositionConstraint& con,
                                 const PartitionedTableau& tab, const LieState& state, double h,
                                 const SolverConfig& cfg = {});

enum class LieForm { lagrangian, hamiltonian };

LieStepResult step_nh_lie(const LieNHSystem& sys, const PartitionedTableau& tab,
                          const LieState& state, double h, const SolverConfig& cfg = {},
                          LieForm form = LieForm::lagrangian);

/// The vector system viewed on the translation group (ℝ^n, +).
LieNHSystem lie_from_vector(const VecNHSystem& sys);
/// Translation matrix of q.
Matrix translation_element(const Vector& q);

} // namespace nhrk
