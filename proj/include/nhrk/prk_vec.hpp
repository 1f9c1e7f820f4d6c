#pragma once

#include "nhrk/mechanics.hpp"
#include "nhrk/tableau.hpp"

#include <vector>

namespace nhrk {

/// Internal stage values of one step.
struct StageWork {
    std::vector<Vector> Q, V, P, W, Lambda;
    std::vector<Vector> p, v;  ///< stage momenta and velocities
};

struct StepResult {
    ExtendedState state;
    StageWork stages;
    SolveReport report;
    /// max_i ‖Φ(q^i, v^i)‖∞ (or ‖Φ(Q^i)‖∞ for the holonomic stepper).
    double constraint_residual = 0.0;
};

/// Unconstrained variational partitioned RK step.
StepResult step_vprk(const VecNHSystem& sys, const PartitionedTableau& tab,
                     const ExtendedState& state, double h, const SolverConfig& cfg = {});

/// Holonomically constrained PRK step; reduces to RATTLE for s = 2.
StepResult step_holonomic(const VecNHSystem& sys, const PositionConstraint& con,
                          const PartitionedTableau& tab, const ExtendedState& state, double h,
                          const SolverConfig& cfg = {});

/// Nonholonomic PRK step, Lagrangian form. The input multiplier is Λ¹.
StepResult step_nh_lagrangian(const VecNHSystem& sys, const PartitionedTableau& tab,
                              const ExtendedState& state, double h, const SolverConfig& cfg = {});

/// Nonholonomic PRK step, Hamiltonian form. Needs H and its derivatives.
StepResult step_nh_hamiltonian(const VecNHSystem& sys, const PartitionedTableau& tab,
                               const ExtendedState& state, double h, const SolverConfig& cfg = {});

} // namespace nhrk
