#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhrk/errors.hpp"
#include "nhrk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace nhrk;

namespace {

int column(const Trajectory& t, const std::string& name) {
    const auto it = std::find(t.columns.begin(), t.columns.end(), name);
    REQUIRE(it != t.columns.end());
    return static_cast<int>(it - t.columns.begin());
}

std::string error_of(const std::string& text) {
    try {
        parse_config_text(text, "run.cfg");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

} // namespace

TEST_CASE("config parsing") {
    const RunConfig cfg = parse_config_text("# comment\nsystem = cvt\nh = 0.1\nsteps=10  # trailing\n"
                                            "initial.q = 1, 0, 1\nsystem.epsilon = 0.25\n"
                                            "integrator = nh-hamiltonian\nstages = 3\n"
                                            "converge.h_list = 0.1, 0.05\n");
    CHECK(cfg.system == "cvt");
    CHECK(cfg.h == 0.1);
    CHECK(cfg.steps == 10);
    REQUIRE(cfg.initial_q);
    CHECK(cfg.initial_q->size() == 3);
    CHECK((*cfg.initial_q)(2) == 1.0);
    CHECK(cfg.params.at("epsilon") == 0.25);
    CHECK(cfg.integrator == IntegratorKind::nh_hamiltonian);
    CHECK(cfg.stages == 3);
    CHECK(cfg.h_list == std::vector<double>{0.1, 0.05});
    CHECK_NOTHROW(cfg.validate());

    CHECK(error_of("h = 0.1\n").find("missing required key 'system'") != std::string::npos);
    CHECK(error_of("system = cvt\n\nbogus = 1\n").find("run.cfg:3") != std::string::npos);
    CHECK(error_of("system = cvt\n\nbogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
    CHECK(error_of("system = cvt\nsteps = ten\n").find("run.cfg:2") != std::string::npos);
    CHECK(error_of("system = cvt\nh = 0.1x\n").find("expected a number") != std::string::npos);
    CHECK(error_of("system = cvt\nintegrator = rk4\n").find("run.cfg:2") != std::string::npos);
    CHECK(error_of("system = cvt\njust text\n").find("key = value") != std::string::npos);
    CHECK(error_of("system = cvt\nh =\n").find("no value") != std::string::npos);
}

TEST_CASE("overrides and validation") {
    RunConfig cfg = parse_config_text("system = particle\n");
    apply_override(cfg, "h=0.05");
    apply_override(cfg, "stages = 4");
    CHECK(cfg.h == 0.05);
    CHECK(cfg.stages == 4);
    CHECK_THROWS_AS(apply_override(cfg, "h"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "nope=1"), ConfigError);

    RunConfig bad = cfg;
    bad.h = -1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.stages = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.params["bogus"] = 1;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = cfg;
    bad.integrator = IntegratorKind::vprk;
    CHECK_THROWS_AS(Runner{bad}, ConfigError);
    bad.integrator = IntegratorKind::holonomic;
    CHECK_THROWS_AS(Runner{bad}, ConfigError);
    bad = cfg;
    bad.initial_q = Vector::Zero(2);
    CHECK_THROWS_AS(Runner{bad}, ConfigError);
    bad = cfg;
    bad.integrator = IntegratorKind::vprkmk;
    CHECK_THROWS_AS(Runner{bad}, ConfigError);
}

TEST_CASE("simulate the nonholonomic particle") {
    RunConfig cfg = parse_config_text("system = particle\nh = 0.01\nsteps = 1000\n");
    const Trajectory t = simulate(cfg);
    CHECK(!t.failed);
    CHECK(t.rows.size() == 1001);
    CHECK(t.columns.front() == "t");
    const int res = column(t, "constraint_residual");
    const int en = column(t, "energy");
    for (const auto& r : t.rows) {
        CHECK(r.size() == t.columns.size());
        CHECK(r[res] <= 1e-10);
        CHECK(std::abs(r[en] - 1.5) < 1e-3);
    }
    CHECK(std::abs(t.rows.back()[0] - 10.0) < 1e-12);

    std::ostringstream a, b;
    write_csv(a, t);
    write_csv(b, simulate(cfg));
    CHECK(a.str() == b.str());
    CHECK(a.str().find('\r') == std::string::npos);
    CHECK(a.str().rfind("t,q0,q1,q2,p0,p1,p2,v0,v1,v2,lambda0,constraint_residual,newton_iterations,energy\n", 0) == 0);
}

TEST_CASE("lie runs report coordinates and integrals") {
    const RunConfig cfg = parse_config_text("system = ball\nintegrator = nh-lie\nstages = 3\nh = 0.01\nsteps = 200\n");
    const Trajectory t = simulate(cfg);
    REQUIRE(!t.failed);
    CHECK(column(t, "eta0") > 0);
    for (const char* name : {"I_zeta", "I_xi", "I_eta"}) {
        const int c = column(t, name);
        for (const auto& r : t.rows) CHECK(std::abs(r[c] - t.rows.front()[c]) < 1e-10);
    }
    for (const auto& r : t.rows) CHECK(r[column(t, "constraint_residual")] <= 1e-10);
}

TEST_CASE("step failures stop the run and keep the partial trajectory") {
    RunConfig cfg = parse_config_text("system = cvt\nintegrator = nh-lagrangian\nstages = 3\nh = 50\nsteps = 5\n"
                                      "solver.max_iters = 3\n");
    const Trajectory t = simulate(cfg);
    CHECK(t.failed);
    CHECK(t.failed_step >= 0);
    CHECK(t.rows.size() == static_cast<std::size_t>(t.failed_step + 1));
    CHECK(!t.failure.empty());
}

TEST_CASE("slope fitting") {
    const std::vector<double> h{0.2, 0.1, 0.05, 0.025};
    std::vector<double> err;
    for (double x : h) err.push_back(3.0 * std::pow(x, 4));
    CHECK(std::abs(fit_slope(h, err, 0.0) - 4.0) < 1e-12);
    err.back() = 1e-15;
    CHECK(std::abs(fit_slope(h, err, 1e-12) - 4.0) < 1e-12);
    CHECK(std::isnan(fit_slope({0.1}, {1.0}, 0.0)));
    CHECK(std::isnan(fit_slope(h, {1e-14, 1e-14, 1e-14, 1e-14}, 1e-12)));
}

TEST_CASE("convergence study on the particle") {
    RunConfig cfg = parse_config_text("system = particle\nconverge.h_list = 0.2, 0.1, 0.05\n"
                                      "converge.h_ref = 0.0025\nconverge.t_final = 1\n");
    const ConvergenceReport rep = converge(cfg);
    CHECK(std::abs(rep.slope_q - 2.0) < 0.3);
    CHECK(std::abs(rep.slope_p - 2.0) < 0.3);
    CHECK(std::abs(rep.slope_lambda - 2.0) < 0.3);
    cfg.t_final = 1.003;
    CHECK_THROWS_AS(converge(cfg), ConfigError);

    std::ostringstream os;
    write_csv(os, rep);
    CHECK(os.str().rfind("# slope_q=", 0) == 0);
    CHECK(os.str().find("\nh,err_q,err_p,err_lambda\n") != std::string::npos);
}

TEST_CASE("chaotic ensemble") {
    RunConfig cfg = parse_config_text("system = chaotic\nh = 0.1\nsteps = 20\nensemble.J = 4\nstages = 2\n");
    const EnsembleReport rep = ensemble(cfg);
    CHECK(rep.initial_energy.size() == 5);
    for (double e : rep.initial_energy) CHECK(std::abs(e - 3.06) < 1e-12);
    CHECK(rep.mu.front() == 0.0);
    CHECK(rep.mu.size() == 21);
    CHECK(rep.exponent == 4);
    CHECK(!rep.any_failed);
    CHECK(std::abs(rep.mu_normalized[10] - rep.mu[10] / std::pow(0.1, 4)) < 1e-9 * rep.mu_normalized[10]);
    CHECK(rep.members.back() == 5);

    cfg.system = "particle";
    CHECK_THROWS_AS(ensemble(cfg), ConfigError);
}

TEST_CASE("value formatting") {
    CHECK(format_value(0.5) == "5.0000000000000000e-01");
    CHECK(format_value(-0.0) == "0.0000000000000000e+00");
}
