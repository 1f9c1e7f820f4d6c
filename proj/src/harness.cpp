#include "nhrk/harness.hpp"

#include "nhrk/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace nhrk {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const double x = std::stod(text, &used);
        if (used == text.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(where + ": expected a number, got '" + text + "'");
}

long parse_integer(const std::string& text, const std::string& where) {
    try {
        std::size_t used = 0;
        const long x = std::stol(text, &used);
        if (used == text.size()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError(where + ": expected an integer, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& text, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item), where));
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

Vector to_vector(const std::vector<double>& xs) {
    return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void assign(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
    if (value.empty()) throw ConfigError(where + ": key '" + key + "' has no value");
    try {
        if (key == "system") cfg.system = value;
        else if (key == "integrator") cfg.integrator = integrator_from_string(value);
        else if (key == "stages") cfg.stages = static_cast<int>(parse_integer(value, where));
        else if (key == "retraction") cfg.retraction = retraction_from_string(value);
        else if (key == "form") {
            if (value == "lagrangian") cfg.form = LieForm::lagrangian;
            else if (value == "hamiltonian") cfg.form = LieForm::hamiltonian;
            else throw ConfigError(where + ": form must be lagrangian or hamiltonian");
        } else if (key == "h") cfg.h = parse_double(value, where);
        else if (key == "steps") cfg.steps = parse_integer(value, where);
        else if (key == "output") cfg.output = value;
        else if (key == "initial.preset") cfg.preset = value;
        else if (key == "initial.q") cfg.initial_q = to_vector(parse_list(value, where));
        else if (key == "initial.v") cfg.initial_v = to_vector(parse_list(value, where));
        else if (key == "initial.lambda") cfg.initial_lambda = to_vector(parse_list(value, where));
        else if (key == "solver.tol") cfg.solver.tol = parse_double(value, where);
        else if (key == "solver.max_iters") cfg.solver.max_iters = static_cast<int>(parse_integer(value, where));
        else if (key == "solver.fd_step") cfg.solver.fd_step = parse_double(value, where);
        else if (key == "converge.h_list") cfg.h_list = parse_list(value, where);
        else if (key == "converge.h_ref") cfg.h_ref = parse_double(value, where);
        else if (key == "converge.t_final") cfg.t_final = parse_double(value, where);
        else if (key == "converge.noise_floor") cfg.noise_floor = parse_double(value, where);
        else if (key == "ensemble.J") cfg.ensemble_size = static_cast<int>(parse_integer(value, where));
        else if (key.rfind("system.", 0) == 0 && key.size() > 7)
            cfg.params[key.substr(7)] = parse_double(value, where);
        else throw ConfigError(where + ": unknown key '" + key + "'");
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(where + ": " + e.what());
    }
}

double inf_norm(const Vector& v) { return v.size() == 0 ? 0.0 : v.lpNorm<Eigen::Infinity>(); }

long steps_for(double t_final, double h) {
    const double n = t_final / h;
    const long r = std::lround(n);
    if (r < 1 || std::abs(n - static_cast<double>(r)) > 1e-9 * std::max(1.0, n))
        throw ConfigError("final time " + format_value(t_final) + " is not a multiple of h = " +
                          format_value(h));
    return r;
}

} // namespace

std::string to_string(IntegratorKind kind) {
    switch (kind) {
    case IntegratorKind::vprk: return "vprk";
    case IntegratorKind::holonomic: return "holonomic";
    case IntegratorKind::nh_lagrangian: return "nh-lagrangian";
    case IntegratorKind::nh_hamiltonian: return "nh-hamiltonian";
    case IntegratorKind::vprkmk: return "vprkmk";
    case IntegratorKind::nh_lie: return "nh-lie";
    case IntegratorKind::lie_holonomic: return "lie-holonomic";
    }
    return "?";
}

IntegratorKind integrator_from_string(const std::string& name) {
    for (auto k : {IntegratorKind::vprk, IntegratorKind::holonomic, IntegratorKind::nh_lagrangian,
                   IntegratorKind::nh_hamiltonian, IntegratorKind::vprkmk, IntegratorKind::nh_lie,
                   IntegratorKind::lie_holonomic})
        if (to_string(k) == name) return k;
    throw InvalidArgument("unknown integrator '" + name + "'");
}

bool is_lie_integrator(IntegratorKind kind) {
    return kind == IntegratorKind::vprkmk || kind == IntegratorKind::nh_lie ||
           kind == IntegratorKind::lie_holonomic;
}

void RunConfig::validate() const {
    if (system.empty()) throw ConfigError("missing required key 'system'");
    if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("h must be positive");
    if (steps < 1) throw ConfigError("steps must be at least 1");
    if (stages < 2) throw ConfigError("stages must be at least 2");
    if (!(solver.tol > 0.0) || solver.max_iters < 1) throw ConfigError("invalid solver settings");
    if (!(h_ref > 0.0) || !(t_final > 0.0)) throw ConfigError("converge.h_ref and converge.t_final must be positive");
    for (double x : h_list)
        if (!(x > 0.0)) throw ConfigError("converge.h_list entries must be positive");
    if (ensemble_size < 1) throw ConfigError("ensemble.J must be at least 1");
    try {
        make_system(system, params);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = origin + ":" + std::to_string(lineno);
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
        assign(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), where);
    }
    if (cfg.system.empty()) throw ConfigError(origin + ": missing required key 'system'");
    return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path.string());
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override '" + assignment + "' is not key=value");
    assign(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)),
           "override '" + assignment + "'");
}

Runner::Runner(const RunConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    entry_ = make_system(cfg_.system, cfg_.params);
    Preset p = entry_.preset(cfg_.preset);
    if (cfg_.initial_q) p.q = *cfg_.initial_q;
    if (cfg_.initial_v) p.v = *cfg_.initial_v;
    init(p);
}

Runner::Runner(const RunConfig& cfg, const Preset& initial) : cfg_(cfg) {
    cfg_.validate();
    entry_ = make_system(cfg_.system, cfg_.params);
    init(initial);
}

void Runner::init(const Preset& initial) {
    const IntegratorKind kind = cfg_.integrator;
    const std::string label = "integrator " + to_string(kind) + " on system " + entry_.name;
    tab_ = lobatto_pair(cfg_.stages);
    lie_ = is_lie_integrator(kind);

    if (lie_) {
        if (entry_.lie) {
            lie_sys_ = *entry_.lie;
            lie_sys_->retraction = cfg_.retraction;
            lie_con_ = entry_.lie_constraint;
        } else {
            lie_sys_ = lie_from_vector(*entry_.vec);
            if (entry_.vec_constraint) {
                const PositionConstraint con = *entry_.vec_constraint;
                const int n = entry_.vec->n;
                lie_con_ = LiePositionConstraint{
                    con.m, [con, n](const Matrix& g) { return con.value(g.topRightCorner(n, 1)); },
                    [con, n](const Matrix& g) { return con.jacobian(g.topRightCorner(n, 1)); }};
            }
        }
        if (kind == IntegratorKind::vprkmk && lie_sys_->m > 0)
            throw ConfigError(label + ": vprkmk does not handle nonholonomic constraints");
        if (kind == IntegratorKind::lie_holonomic && !lie_con_)
            throw ConfigError(label + ": system has no position constraint");
        if (kind == IntegratorKind::nh_lie && cfg_.form == LieForm::hamiltonian &&
            !lie_sys_->has_hamiltonian())
            throw ConfigError(label + ": system has no Hamiltonian");
    } else {
        if (!entry_.vec) throw ConfigError(label + ": a vector-space integrator needs a vector-space system");
        const VecNHSystem& sys = *entry_.vec;
        if (kind == IntegratorKind::vprk && sys.m > 0)
            throw ConfigError(label + ": vprk does not handle nonholonomic constraints");
        if (kind == IntegratorKind::holonomic && !entry_.vec_constraint)
            throw ConfigError(label + ": system has no position constraint");
        if (kind == IntegratorKind::nh_hamiltonian && !sys.has_hamiltonian())
            throw ConfigError(label + ": system has no Hamiltonian");
    }

    const int n = entry_.vec ? entry_.vec->n : static_cast<int>(initial.v.size());
    if (entry_.vec && (initial.q.size() != n || initial.v.size() != n))
        throw ConfigError("initial state of " + entry_.name + " needs " + std::to_string(n) +
                          " coordinates and velocities");
    if (entry_.lie && initial.v.size() != entry_.lie->k())
        throw ConfigError("initial velocity of " + entry_.name + " needs " +
                          std::to_string(entry_.lie->k()) + " components");

    if (lie_) {
        LieState st;
        st.g = entry_.lie ? entry_.element(initial.q) : translation_element(initial.q);
        st.eta = initial.v;
        st.mu = lie_sys_->D2ell(st.g, st.eta);
        st.lambda = lie_con_ ? Vector(Vector::Zero(lie_con_->m))
                             : lie_consistent_multiplier(*lie_sys_, st.g, st.eta);
        lie_state_ = st;
    } else {
        const VecNHSystem& sys = *entry_.vec;
        vec_state_ = make_state(sys, initial.q, initial.v);
        if (kind == IntegratorKind::holonomic) vec_state_.lambda = Vector::Zero(entry_.vec_constraint->m);
    }
    if (cfg_.initial_lambda) {
        const int m = multipliers();
        if (cfg_.initial_lambda->size() != m)
            throw ConfigError("initial.lambda needs " + std::to_string(m) + " components");
        (lie_ ? lie_state_.lambda : vec_state_.lambda) = *cfg_.initial_lambda;
    }

    double residual = 0.0;
    if (lie_) {
        if (kind == IntegratorKind::lie_holonomic) residual = inf_norm(lie_con_->value(lie_state_.g));
        else if (lie_sys_->m > 0) residual = inf_norm(lie_sys_->phi(lie_state_.g, lie_state_.eta));
    } else {
        if (kind == IntegratorKind::holonomic) residual = inf_norm(entry_.vec_constraint->value(vec_state_.q));
        else if (entry_.vec->m > 0) residual = inf_norm(entry_.vec->Phi(vec_state_.q, vec_state_.v));
    }
    refresh(residual, 0);
}

int Runner::dimension() const { return static_cast<int>(snap_.p.size()); }

int Runner::multipliers() const {
    if (lie_) return cfg_.integrator == IntegratorKind::lie_holonomic ? lie_con_->m : lie_sys_->m;
    return cfg_.integrator == IntegratorKind::holonomic ? entry_.vec_constraint->m : entry_.vec->m;
}

void Runner::refresh(double residual, int iterations) {
    snap_.constraint_residual = residual;
    snap_.newton_iterations = iterations;
    if (lie_) {
        const LieState& st = lie_state_;
        snap_.t = st.t;
        snap_.p = st.mu;
        snap_.v = st.eta;
        snap_.lambda = st.lambda;
        if (entry_.lie) {
            snap_.config = entry_.coordinates(st.g);
            snap_.diagnostics = entry_.lie_diagnostics ? entry_.lie_diagnostics(st.g, st.eta) : Vector();
        } else {
            snap_.config = st.g.topRightCorner(st.g.rows() - 1, 1);
            snap_.diagnostics = entry_.vec_diagnostics ? entry_.vec_diagnostics(snap_.config, st.eta) : Vector();
        }
    } else {
        const ExtendedState& st = vec_state_;
        snap_.t = st.t;
        snap_.config = st.q;
        snap_.p = st.p;
        snap_.v = st.v;
        snap_.lambda = st.lambda;
        snap_.diagnostics = entry_.vec_diagnostics ? entry_.vec_diagnostics(st.q, st.v) : Vector();
    }
}

void Runner::step(double h) {
    const SolverConfig& sc = cfg_.solver;
    if (lie_) {
        LieStepResult r;
        switch (cfg_.integrator) {
        case IntegratorKind::vprkmk: r = step_vprkmk(*lie_sys_, tab_, lie_state_, h, sc); break;
        case IntegratorKind::nh_lie: r = step_nh_lie(*lie_sys_, tab_, lie_state_, h, sc, cfg_.form); break;
        default: r = step_lie_holonomic(*lie_sys_, *lie_con_, tab_, lie_state_, h, sc); break;
        }
        lie_state_ = r.state;
        refresh(r.constraint_residual, r.report.iterations);
        return;
    }
    StepResult r;
    switch (cfg_.integrator) {
    case IntegratorKind::vprk: r = step_vprk(*entry_.vec, tab_, vec_state_, h, sc); break;
    case IntegratorKind::holonomic:
        r = step_holonomic(*entry_.vec, *entry_.vec_constraint, tab_, vec_state_, h, sc);
        break;
    case IntegratorKind::nh_hamiltonian: r = step_nh_hamiltonian(*entry_.vec, tab_, vec_state_, h, sc); break;
    default: r = step_nh_lagrangian(*entry_.vec, tab_, vec_state_, h, sc); break;
    }
    vec_state_ = r.state;
    refresh(r.constraint_residual, r.report.iterations);
}

std::vector<std::string> Runner::columns() const {
    std::vector<std::string> cols{"t"};
    if (lie_ && entry_.lie) {
        cols.insert(cols.end(), entry_.coordinate_names.begin(), entry_.coordinate_names.end());
    } else {
        for (int i = 0; i < snap_.config.size(); ++i) cols.push_back("q" + std::to_string(i));
    }
    const std::string pn = lie_ ? "mu" : "p";
    const std::string vn = lie_ ? "eta" : "v";
    for (int i = 0; i < snap_.p.size(); ++i) cols.push_back(pn + std::to_string(i));
    for (int i = 0; i < snap_.v.size(); ++i) cols.push_back(vn + std::to_string(i));
    for (int i = 0; i < snap_.lambda.size(); ++i) cols.push_back("lambda" + std::to_string(i));
    cols.push_back("constraint_residual");
    cols.push_back("newton_iterations");
    cols.insert(cols.end(), entry_.diagnostic_names.begin(), entry_.diagnostic_names.end());
    return cols;
}

std::vector<double> Runner::row() const {
    std::vector<double> r{snap_.t};
    for (const Vector* v : {&snap_.config, &snap_.p, &snap_.v, &snap_.lambda})
        r.insert(r.end(), v->data(), v->data() + v->size());
    r.push_back(snap_.constraint_residual);
    r.push_back(snap_.newton_iterations);
    r.insert(r.end(), snap_.diagnostics.data(), snap_.diagnostics.data() + snap_.diagnostics.size());
    return r;
}

Trajectory simulate(const RunConfig& cfg) {
    Runner run(cfg);
    Trajectory traj;
    traj.columns = run.columns();
    traj.rows.reserve(static_cast<std::size_t>(cfg.steps) + 1);
    traj.rows.push_back(run.row());
    for (long k = 0; k < cfg.steps; ++k) {
        try {
            run.step(cfg.h);
        } catch (const Error& e) {
            traj.failed = true;
            traj.failed_step = k;
            traj.failure = e.what();
            break;
        }
        traj.rows.push_back(run.row());
    }
    return traj;
}

double fit_slope(const std::vector<double>& h, const std::vector<double>& err, double floor) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < h.size() && i < err.size(); ++i) {
        if (!std::isfinite(err[i]) || !(err[i] > floor)) continue;
        const double x = std::log(h[i]), y = std::log(err[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceReport converge(const RunConfig& cfg) {
    cfg.validate();
    const auto final_state = [&](double h) {
        const long n = steps_for(cfg.t_final, h);
        Runner run(cfg);
        for (long k = 0; k < n; ++k) run.step(h);
        return run.current();
    };
    ConvergenceReport rep;
    rep.h_ref = cfg.h_ref;
    rep.t_final = cfg.t_final;
    const Runner::Snapshot ref = final_state(cfg.h_ref);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double h : cfg.h_list) {
        rep.h.push_back(h);
        try {
            const Runner::Snapshot s = final_state(h);
            rep.err_q.push_back(inf_norm(s.config - ref.config));
            rep.err_p.push_back(inf_norm(s.p - ref.p));
            rep.err_lambda.push_back(s.lambda.size() ? inf_norm(s.lambda - ref.lambda) : nan);
        } catch (const Error&) {
            rep.err_q.push_back(nan);
            rep.err_p.push_back(nan);
            rep.err_lambda.push_back(nan);
        }
    }
    rep.slope_q = fit_slope(rep.h, rep.err_q, cfg.noise_floor);
    rep.slope_p = fit_slope(rep.h, rep.err_p, cfg.noise_floor);
    rep.slope_lambda = fit_slope(rep.h, rep.err_lambda, cfg.noise_floor);
    return rep;
}

EnsembleReport ensemble(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.system != "chaotic") throw ConfigError("ensemble needs system = chaotic");
    const int m = static_cast<int>(make_system(cfg.system, cfg.params).params.at("m"));
    const int J = cfg.ensemble_size;
    const long n = cfg.steps;

    EnsembleReport rep;
    rep.h = cfg.h;
    rep.exponent = 2 * (2 * cfg.stages - 2);
    std::vector<double> sum(static_cast<std::size_t>(n) + 1, 0.0);
    int alive = 0;
    for (int j = 0; j <= J; ++j) {
        Runner run(cfg, chaotic_initial_state(m, j, J));
        const double e0 = run.current().diagnostics(0);
        rep.initial_energy.push_back(e0);
        std::vector<double> sq(static_cast<std::size_t>(n) + 1, 0.0);
        bool ok = true;
        for (long k = 1; k <= n && ok; ++k) {
            try {
                run.step(cfg.h);
                const double de = run.current().diagnostics(0) - e0;
                sq[k] = de * de;
            } catch (const Error&) {
                ok = false;
            }
        }
        if (!ok) {
            rep.dropped.push_back(j);
            rep.any_failed = true;
            continue;
        }
        ++alive;
        for (long k = 0; k <= n; ++k) sum[k] += sq[k];
    }
    const double scale = std::pow(cfg.h, rep.exponent);
    for (long k = 0; k <= n; ++k) {
        const double mu = alive > 0 ? sum[k] / alive : std::numeric_limits<double>::quiet_NaN();
        rep.t.push_back(k * cfg.h);
        rep.mu.push_back(mu);
        rep.mu_normalized.push_back(mu / scale);
        rep.members.push_back(alive);
    }
    return rep;
}

std::string format_value(double x) {
    if (x == 0.0) x = 0.0;  // drop the sign of negative zero
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.16e", x);
    return buf;
}

namespace {

void write_row(std::ostream& os, const std::vector<double>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_value(row[i]);
    os << '\n';
}

void write_header(std::ostream& os, const std::vector<std::string>& cols) {
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
}

} // namespace

void write_csv(std::ostream& os, const Trajectory& traj) {
    write_header(os, traj.columns);
    for (const auto& r : traj.rows) write_row(os, r);
}

void write_csv(std::ostream& os, const ConvergenceReport& rep) {
    os << "# slope_q=" << format_value(rep.slope_q) << " slope_p=" << format_value(rep.slope_p)
       << " slope_lambda=" << format_value(rep.slope_lambda) << " h_ref=" << format_value(rep.h_ref)
       << " t_final=" << format_value(rep.t_final) << '\n';
    write_header(os, {"h", "err_q", "err_p", "err_lambda"});
    for (std::size_t i = 0; i < rep.h.size(); ++i)
        write_row(os, {rep.h[i], rep.err_q[i], rep.err_p[i], rep.err_lambda[i]});
}

void write_csv(std::ostream& os, const EnsembleReport& rep) {
    os << "# h=" << format_value(rep.h) << " exponent=" << rep.exponent << " dropped=";
    for (std::size_t i = 0; i < rep.dropped.size(); ++i) os << (i ? ";" : "") << rep.dropped[i];
    os << '\n';
    write_header(os, {"k", "t", "mu_E", "mu_over_h2p", "members"});
    for (std::size_t k = 0; k < rep.t.size(); ++k)
        write_row(os, {static_cast<double>(k), rep.t[k], rep.mu[k], rep.mu_normalized[k],
                       static_cast<double>(rep.members[k])});
}

} // namespace nhrk
