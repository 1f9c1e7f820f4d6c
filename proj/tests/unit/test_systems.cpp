#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhrk/errors.hpp"
#include "nhrk/systems.hpp"

#include <cmath>
#include <random>
#include <type_traits>

using namespace nhrk;

namespace {

Vector v3(double a, double b, double c) { return Eigen::Vector3d(a, b, c); }

Vector random_vector(std::mt19937& rng, int n) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(n);
    for (int i = 0; i < n; ++i) x(i) = u(rng);
    return x;
}

constexpr double kFd = 1e-6;
constexpr double kFdTol = 1e-7;

/// Central difference of f along direction d at x.
template <class F>
auto central(F f, const Vector& x, const Vector& d) {
    using R = std::decay_t<decltype(f(x))>;
    if constexpr (std::is_arithmetic_v<R>) return (f(Vector(x + kFd * d)) - f(Vector(x - kFd * d))) / (2 * kFd);
    else return Vector((f(Vector(x + kFd * d)) - f(Vector(x - kFd * d))) / (2 * kFd));
}

void check_vector_derivatives(const VecNHSystem& s, std::mt19937& rng) {
    for (int trial = 0; trial < 10; ++trial) {
        const Vector q = random_vector(rng, s.n), v = random_vector(rng, s.n), d = random_vector(rng, s.n);
        CHECK(std::abs(central([&](const Vector& x) { return s.L(x, v); }, q, d) - s.D1L(q, v).dot(d)) < kFdTol);
        CHECK(std::abs(central([&](const Vector& x) { return s.L(q, x); }, v, d) - s.D2L(q, v).dot(d)) < kFdTol);
        CHECK((central([&](const Vector& x) { return s.D2L(q, x); }, v, d) - s.D22L(q, v) * d).norm() < kFdTol);
        if (s.m > 0) {
            CHECK((central([&](const Vector& x) { return s.Phi(x, v); }, q, d) - s.D1Phi(q, v) * d).norm() < kFdTol);
            CHECK((central([&](const Vector& x) { return s.Phi(q, x); }, v, d) - s.D2Phi(q, v) * d).norm() < kFdTol);
        }
        const Vector p = s.D2L(q, v);
        CHECK(std::abs(s.H(q, p) - (v.dot(p) - s.L(q, v))) < 1e-12);
        CHECK((s.D2H(q, p) - v).norm() < 1e-12);
        CHECK(std::abs(central([&](const Vector& x) { return s.H(x, p); }, q, d) - s.D1H(q, p).dot(d)) < kFdTol);
        CHECK((central([&](const Vector& x) { return s.D2H(q, x); }, p, d) - s.D22H(q, p) * d).norm() < kFdTol);
    }
}

void check_lie_derivatives(const SystemCatalogEntry& e, std::mt19937& rng) {
    const LieNHSystem& s = *e.lie;
    const GroupDescriptor& grp = *s.group;
    const int k = s.k();
    const Preset& p0 = e.preset();
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix g = e.element(Vector(p0.q + 0.5 * random_vector(rng, p0.q.size())));
        const Vector eta = random_vector(rng, k), zeta = random_vector(rng, k), mu = random_vector(rng, k);
        const auto moved = [&](double t) { return Matrix(g * grp.exp(t * zeta)); };
        const double d1 = (s.ell(moved(kFd), eta) - s.ell(moved(-kFd), eta)) / (2 * kFd);
        CHECK(std::abs(d1 - s.D1ell(g, eta).dot(zeta)) < kFdTol);
        CHECK(std::abs(central([&](const Vector& x) { return s.ell(g, x); }, eta, zeta) - s.D2ell(g, eta).dot(zeta)) < kFdTol);
        CHECK((central([&](const Vector& x) { return s.D2ell(g, x); }, eta, zeta) - s.D22ell(g, eta) * zeta).norm() < kFdTol);
        if (s.m > 0)
            CHECK((central([&](const Vector& x) { return s.phi(g, x); }, eta, zeta) - s.D2phi(g, eta) * zeta).norm() < kFdTol);
        const double h1 = (s.h(moved(kFd), mu) - s.h(moved(-kFd), mu)) / (2 * kFd);
        CHECK(std::abs(h1 - s.D1h(g, mu).dot(zeta)) < kFdTol);
        CHECK(std::abs(central([&](const Vector& x) { return s.h(g, x); }, mu, zeta) - s.D2h(g, mu).dot(zeta)) < kFdTol);
        const Vector m = s.D2ell(g, eta);
        CHECK(std::abs(s.h(g, m) - (eta.dot(m) - s.ell(g, eta))) < 1e-12);
        if (e.lie_constraint) {
            const auto& c = *e.lie_constraint;
            const Vector dc = (c.value(moved(kFd)) - c.value(moved(-kFd))) / (2 * kFd);
            CHECK((dc - c.jacobian(g) * zeta).norm() < kFdTol);
        }
    }
}

/// Left-trivialized Euler-Poincaré-Suslov vector field of a Lie system.
std::pair<Vector, Vector> lie_vector_field(const LieNHSystem& s, const Matrix& g, const Vector& eta) {
    const Vector lam = lie_consistent_multiplier(s, g, eta);
    const Vector mu = s.D2ell(g, eta);
    Vector mudot = s.group->ad(eta).transpose() * mu + s.D1ell(g, eta);
    if (s.m > 0) mudot += s.D2phi(g, eta).transpose() * lam;
    return {eta, s.D22ell(g, eta).ldlt().solve(mudot)};
}

} // namespace

TEST_CASE("every catalog entry builds and its derivatives match finite differences") {
    std::mt19937 rng(11);
    for (const auto& name : catalog_names()) {
        CAPTURE(name);
        const SystemCatalogEntry e = make_system(name);
        CHECK(e.name == name);
        CHECK_NOTHROW(e.preset());
        if (e.vec) check_vector_derivatives(*e.vec, rng);
        if (e.lie) check_lie_derivatives(e, rng);
    }
    check_lie_derivatives(rigid_body({{"gravity", 2.0}, {"chi_x", 0.3}}), rng);
}

TEST_CASE("nonholonomic particle") {
    const auto e = nonholonomic_particle();
    const Preset& p = e.preset();
    CHECK((p.q - v3(0, 1, 0)).norm() == 0.0);
    CHECK((p.v - v3(1, 0, 1)).norm() == 0.0);
    CHECK(e.vec->Phi(p.q, p.v)(0) == 0.0);
    CHECK(energy(*e.vec, p.q, p.v) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(compatibility_matrix(*e.vec, p.q, p.v)(0, 0) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("cvt energies of both regimes") {
    const auto e = cvt();
    const Preset& low = e.preset("low");
    const Vector dl = e.vec_diagnostics(low.q, low.v);
    CHECK(std::abs(dl(0) - 0.8) < 1e-14);
    CHECK(std::abs(dl(1) - 1.0) < 1e-14);
    CHECK(std::abs(dl(2) - 1.8) < 1e-14);
    CHECK(std::abs(energy(*e.vec, low.q, low.v) - 1.8) < 1e-14);
    CHECK(e.vec->Phi(low.q, low.v)(0) == 0.0);
    const Preset& high = e.preset("high");
    const Vector dh = e.vec_diagnostics(high.q, high.v);
    CHECK(std::abs(dh(0) - 3.0) < 1e-14);
    CHECK(std::abs(dh(2) - 4.0) < 1e-14);
    CHECK(&e.preset() == &e.preset("low"));
}

TEST_CASE("chaotic ensemble lies on one energy level") {
    const auto e = chaotic_system(3);
    const Preset p0 = chaotic_initial_state(3, 0, 20);
    CHECK((p0.q - (Vector(7) << 1, 0.6, 0.4, 0.2, 1, 1, 1).finished()).norm() < 1e-15);
    CHECK(p0.v.norm() == 0.0);
    for (int j = 0; j <= 20; ++j) {
        const Preset p = chaotic_initial_state(3, j, 20);
        CHECK(std::abs(energy(*e.vec, p.q, p.v) - 3.06) < 1e-12);
        CHECK(std::abs(e.vec->Phi(p.q, p.v)(0)) < 1e-15);
    }
    CHECK_THROWS_AS(chaotic_initial_state(3, 5, 4), InvalidArgument);
    CHECK(make_system("chaotic", {{"m", 4}}).vec->n == 9);
    CHECK_THROWS_AS(make_system("chaotic", {{"m", 2.5}}), InvalidArgument);
}

TEST_CASE("unicycle trivialization") {
    const auto e = unicycle();
    std::mt19937 rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const Vector c = random_vector(rng, 3) * 3.0, cdot = random_vector(rng, 3);
        const Matrix g = e.element(c);
        const Matrix gdot = (e.element(Vector(c + kFd * cdot)) - e.element(Vector(c - kFd * cdot))) / (2 * kFd);
        const Vector body = e.lie->group->vee(g.inverse() * gdot);
        const double th = c(2);
        CHECK(std::abs(body(2) - cdot(2)) < 1e-8);
        // Φ(spatial) = v_y cos θ − v_x sin θ equals φ(body) = v2
        CHECK(std::abs(e.lie->phi(g, body)(0) - (cdot(1) * std::cos(th) - cdot(0) * std::sin(th))) < 1e-8);
        CHECK((e.coordinates(g) - c).head(2).norm() < 1e-14);
    }
    const Matrix g = e.element(v3(0, 0, M_PI / 2));
    const Matrix gdot = (e.element(v3(0.3 * kFd, 0.7 * kFd, M_PI / 2)) - e.element(v3(-0.3 * kFd, -0.7 * kFd, M_PI / 2))) / (2 * kFd);
    const Vector body = e.lie->group->vee(g.inverse() * gdot);
    CHECK(std::abs(body(0) - 0.7) < 1e-8);
    CHECK(std::abs(body(1) + 0.3) < 1e-8);
    CHECK(e.lie->phi(g, v3(1, 0, 2))(0) == 0.0);
}

TEST_CASE("ball on turntable integrals") {
    const auto e = ball_on_turntable();
    const Preset& p = e.preset();
    CHECK(e.lie->phi(e.element(p.q), p.v).norm() < 1e-15);
    const Vector rest = e.lie_diagnostics(Matrix::Identity(6, 6), Vector::Zero(5));
    CHECK(rest(3) == 0.0);

    // all four integrals are stationary along the continuous flow
    std::mt19937 rng(13);
    for (int trial = 0; trial < 10; ++trial) {
        const Vector c = (Vector(5) << random_vector(rng, 3), random_vector(rng, 2)).finished();
        const Matrix g = e.element(c);
        const Vector w = random_vector(rng, 3);
        Vector eta(5);
        eta << w, -c(4) * 1.0 + w(1), c(3) * 1.0 - w(0);
        REQUIRE(e.lie->phi(g, eta).norm() < 1e-14);
        const auto [gdir, etadot] = lie_vector_field(*e.lie, g, eta);
        const double eps = 1e-5;
        const Vector plus = e.lie_diagnostics(g * e.lie->group->exp(eps * gdir), eta + eps * etadot);
        const Vector minus = e.lie_diagnostics(g * e.lie->group->exp(-eps * gdir), eta - eps * etadot);
        CHECK(((plus - minus) / (2 * eps)).lpNorm<Eigen::Infinity>() < 1e-8);
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(make_system("nope"), InvalidArgument);
    CHECK_THROWS_AS(make_system("cvt", {{"bogus", 1.0}}), InvalidArgument);
    CHECK_THROWS_AS(make_system("ball", {{"r", -1.0}}), InvalidArgument);
    CHECK_THROWS_AS(make_system("unicycle", {{"m", 0.0}}), InvalidArgument);
    CHECK(make_system("cvt", {{"epsilon", 0.25}}).params.at("epsilon") == 0.25);
    CHECK_THROWS_AS(nonholonomic_particle().preset("missing"), InvalidArgument);
}
