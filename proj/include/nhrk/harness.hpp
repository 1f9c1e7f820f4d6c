#pragma once

#include "nhrk/prk_lie.hpp"
#include "nhrk/prk_vec.hpp"
#include "nhrk/systems.hpp"

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace nhrk {

enum class IntegratorKind { vprk, holonomic, nh_lagrangian, nh_hamiltonian, vprkmk, nh_lie, lie_holonomic };

std::string to_string(IntegratorKind kind);
IntegratorKind integrator_from_string(const std::string& name);
bool is_lie_integrator(IntegratorKind kind);

struct RunConfig {
    std::string system;
    ParamMap params;
    IntegratorKind integrator = IntegratorKind::nh_lagrangian;
    int stages = 2;
    RetractionKind retraction = RetractionKind::cay;
    LieForm form = LieForm::lagrangian;
    double h = 0.01;
    long steps = 100;

    std::string preset;  ///< empty selects the system default
    std::optional<Vector> initial_q, initial_v, initial_lambda;

    SolverConfig solver;
    std::string output;

    std::vector<double> h_list{0.2, 0.1, 0.05, 0.025, 0.0125};
    double h_ref = 1e-4;
    double t_final = 2.0;
    double noise_floor = 1e-12;

    int ensemble_size = 20;  ///< J; members j = 0..J

    /// Throws ConfigError on h ≤ 0, steps < 1, stages < 2 and similar.
    void validate() const;
};

/// Parses `key = value` lines. `origin` names the source in error messages.
RunConfig parse_config_text(const std::string& text, const std::string& origin = "<config>");
RunConfig parse_config(const std::filesystem::path& path);
/// Applies one `key=value` assignment with the same rules as a config line.
void apply_override(RunConfig& cfg, const std::string& assignment);

/// One integrator bound to one system, advancing a single trajectory.
class Runner {
public:
    struct Snapshot {
        double t = 0.0;
        Vector config;  ///< q, or the system's coordinates of g
        Vector p;       ///< p or μ
        Vector v;       ///< v or η
        Vector lambda;
        double constraint_residual = 0.0;
        int newton_iterations = 0;
        Vector diagnostics;
    };

    explicit Runner(const RunConfig& cfg);
    /// Starts from explicit initial data instead of the configured preset.
    Runner(const RunConfig& cfg, const Preset& initial);

    /// Advances by h; throws StepFailure and leaves the state untouched.
    void step(double h);
    const Snapshot& current() const { return snap_; }
    /// Raw group element for Lie runs (the translation matrix for vector systems on ℝ^n).
    const Matrix& element() const { return lie_state_.g; }
    bool is_lie() const { return lie_; }
    int dimension() const;
    int multipliers() const;

    std::vector<std::string> columns() const;
    std::vector<double> row() const;

    const SystemCatalogEntry& entry() const { return entry_; }

private:
    void init(const Preset& initial);
    void refresh(double residual, int iterations);

    RunConfig cfg_;
    SystemCatalogEntry entry_;
    PartitionedTableau tab_;
    bool lie_ = false;
    std::optional<LieNHSystem> lie_sys_;
    std::optional<LiePositionConstraint> lie_con_;
    ExtendedState vec_state_;
    LieState lie_state_;
    Snapshot snap_;
};

struct Trajectory {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
    bool failed = false;
    long failed_step = -1;  ///< index of the step that failed
    std::string failure;
};

Trajectory simulate(const RunConfig& cfg);

struct ConvergenceReport {
    std::vector<double> h;
    std::vector<double> err_q, err_p, err_lambda;
    double slope_q = 0.0, slope_p = 0.0, slope_lambda = 0.0;
    double h_ref = 0.0, t_final = 0.0;
};

/// Errors at t_final against a reference run at h_ref; slopes by least squares
/// over the points above the noise floor.
ConvergenceReport converge(const RunConfig& cfg);
/// Least-squares slope of log err against log h, ignoring points ≤ floor.
/// Returns NaN when fewer than two points remain.
double fit_slope(const std::vector<double>& h, const std::vector<double>& err, double floor);

struct EnsembleReport {
    double h = 0.0;
    int exponent = 0;  ///< 2(2s − 2)
    std::vector<double> t, mu, mu_normalized;
    std::vector<int> members;  ///< surviving member count at each k
    std::vector<double> initial_energy;
    std::vector<int> dropped;  ///< indices of failed members
    bool any_failed = false;
};

/// Mean squared energy error over chaotic members j = 0..J.
EnsembleReport ensemble(const RunConfig& cfg);

void write_csv(std::ostream& os, const Trajectory& traj);
void write_csv(std::ostream& os, const ConvergenceReport& rep);
void write_csv(std::ostream& os, const EnsembleReport& rep);
/// "%.16e" formatting used in every CSV.
std::string format_value(double x);

} // namespace nhrk
