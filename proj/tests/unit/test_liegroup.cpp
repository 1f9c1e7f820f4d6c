#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhrk/errors.hpp"
#include "nhrk/liegroup.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace nhrk;

namespace {

constexpr int kSamples = 100;

std::vector<GroupPtr> groups() {
    return {so3_group(), se2_group(), translation_group(3), product_group(so3_group(), translation_group(2))};
}

Vector random_vector(std::mt19937& rng, int k, double radius) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector x(k);
    for (int i = 0; i < k; ++i) x(i) = u(rng);
    return radius * u(rng) * x / std::max(1.0, x.norm());
}

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

} // namespace

TEST_CASE("hat, vee and ad are consistent") {
    std::mt19937 rng(1);
    for (const auto& g : groups()) {
        CAPTURE(g->name);
        for (int n = 0; n < kSamples; ++n) {
            const Vector x = random_vector(rng, g->k, 2.0), y = random_vector(rng, g->k, 2.0);
            CHECK((g->vee(g->hat(x)) - x).norm() < 1e-15);
            const Matrix bracket = g->hat(x) * g->hat(y) - g->hat(y) * g->hat(x);
            CHECK(max_abs(g->hat(g->ad(x) * y) - bracket) < 1e-14);
        }
    }
}

TEST_CASE("closed-form exponential matches the matrix exponential") {
    std::mt19937 rng(2);
    for (const auto& g : groups()) {
        CAPTURE(g->name);
        for (int n = 0; n < kSamples; ++n) {
            const Vector x = random_vector(rng, g->k, 1.0);
            const Matrix ex = g->hat(x).exp();
            CHECK(max_abs(g->exp(x) - ex) < 1e-13);
            CHECK((g->log(g->exp(x)) - x).norm() < 1e-12);
            CHECK(max_abs(g->exp(x) * g->exp(-x) - g->identity()) < 1e-13);
        }
        CHECK(max_abs(g->exp(Vector::Zero(g->k)) - g->identity()) == 0.0);
    }
}

TEST_CASE("cayley and exponential closed forms on SO(3)") {
    const auto g = so3_group();
    const double th = 0.8;
    const Retraction cay(g, RetractionKind::cay);
    const Matrix r = cay.tau(Vector(Eigen::Vector3d(th, 0, 0)));
    const double angle = 2.0 * std::atan(th / 2.0);
    Eigen::Matrix3d rx;
    rx << 1, 0, 0, 0, std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle);
    CHECK(max_abs(r - Matrix(rx)) < 1e-15);

    const Matrix quarter = g->exp(Vector(Eigen::Vector3d(0, 0, M_PI / 2)));
    Eigen::Matrix3d rz;
    rz << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK(max_abs(quarter - Matrix(rz)) < 1e-15);

    // cay(ξ) − exp(ξ) = O(|ξ|³)
    const Vector dir = Eigen::Vector3d(0.3, -0.5, 0.2);
    const Retraction ex(g, RetractionKind::exp);
    const double e1 = max_abs(cay.tau(0.1 * dir) - ex.tau(0.1 * dir));
    const double e2 = max_abs(cay.tau(0.05 * dir) - ex.tau(0.05 * dir));
    CHECK(std::log2(e1 / e2) == doctest::Approx(3.0).epsilon(0.02));
}

TEST_CASE("retraction axioms and round trips") {
    std::mt19937 rng(3);
    for (const auto& g : groups())
        for (auto kind : {RetractionKind::cay, RetractionKind::exp}) {
            CAPTURE(g->name);
            CAPTURE(to_string(kind));
            const Retraction ret(g, kind);
            const Vector zero = Vector::Zero(g->k);
            CHECK(max_abs(ret.tau(zero) - g->identity()) == 0.0);
            CHECK(max_abs(ret.dtau(zero) - Matrix::Identity(g->k, g->k)) < 1e-15);
            for (int n = 0; n < kSamples; ++n) {
                const Vector x = random_vector(rng, g->k, 0.9);
                const Matrix t = ret.tau(x);
                CHECK(max_abs(t * ret.tau(-x) - g->identity()) < 1e-13);
                CHECK((ret.tau_inv(t) - x).norm() < 1e-12);
                CHECK(max_abs(ret.dtau_inv(x) * ret.dtau(x) - Matrix::Identity(g->k, g->k)) < 1e-12);
            }
        }
}

TEST_CASE("left-trivialized tangent against finite differences") {
    std::mt19937 rng(4);
    for (const auto& g : groups())
        for (auto kind : {RetractionKind::cay, RetractionKind::exp}) {
            CAPTURE(g->name);
            CAPTURE(to_string(kind));
            const Retraction ret(g, kind);
            for (int n = 0; n < kSamples; ++n) {
                const Vector x = random_vector(rng, g->k, 0.9), eta = random_vector(rng, g->k, 1.0);
                const double eps = 1e-5;
                const Matrix fd = (ret.tau(x + eps * eta) - ret.tau(x - eps * eta)) / (2 * eps);
                CHECK(max_abs(fd - ret.tau(x) * g->hat(ret.dtau(x) * eta)) < 1e-6);
            }
        }
}

TEST_CASE("inverse tangent at minus xi") {
    std::mt19937 rng(5);
    for (const auto& g : groups())
        for (auto kind : {RetractionKind::cay, RetractionKind::exp}) {
            const Retraction ret(g, kind);
            for (int n = 0; n < kSamples; ++n) {
                const Vector x = random_vector(rng, g->k, 0.9);
                const Matrix lhs = ret.dtau_inv(-x);
                const Matrix rhs = ret.dtau_inv(x) * g->Ad(ret.tau(x)).inverse();
                CHECK(max_abs(lhs - rhs) < 1e-12);
            }
        }
}

TEST_CASE("second-order tangent against finite differences") {
    std::mt19937 rng(6);
    for (const auto& g : groups())
        for (auto kind : {RetractionKind::cay, RetractionKind::exp}) {
            CAPTURE(g->name);
            CAPTURE(to_string(kind));
            const Retraction ret(g, kind);
            for (int n = 0; n < kSamples; ++n) {
                const Vector x = random_vector(rng, g->k, 0.9);
                const Vector eta = random_vector(rng, g->k, 1.0), delta = random_vector(rng, g->k, 1.0);
                const Vector pi = random_vector(rng, g->k, 1.0);
                const double eps = 1e-5;
                const Vector fd = (ret.dtau(x + eps * delta) * eta - ret.dtau(x - eps * delta) * eta) / (2 * eps);
                const Vector dd = ret.ddtau(x, eta, delta);
                CHECK((fd - ret.dtau(x) * dd).lpNorm<Eigen::Infinity>() < 1e-6);
                CHECK(std::abs(ret.ddtau_adjoint(x, eta, pi).dot(delta) - pi.dot(dd)) < 1e-12);
            }
        }
}

TEST_CASE("adjoint and coadjoint actions") {
    std::mt19937 rng(7);
    for (const auto& g : groups()) {
        const Vector mu = random_vector(rng, g->k, 1.0);
        CHECK((g->coadjoint(g->identity(), mu) - mu).norm() < 1e-15);
        for (int n = 0; n < kSamples; ++n) {
            const Matrix el = g->exp(random_vector(rng, g->k, 1.0));
            const Vector x = random_vector(rng, g->k, 1.0), m = random_vector(rng, g->k, 1.0);
            CHECK(max_abs(g->hat(g->Ad(el) * x) - el * g->hat(x) * el.inverse()) < 1e-14);
            CHECK(std::abs(g->coadjoint(el, m).dot(x) - m.dot(g->Ad(el) * x)) < 1e-12);
        }
    }
    const auto so3 = so3_group();
    for (int n = 0; n < kSamples; ++n) {
        const Matrix r = so3->exp(random_vector(rng, 3, 1.0));
        const Vector m = random_vector(rng, 3, 1.0);
        CHECK((so3->coadjoint(r, m) - r.transpose() * m).norm() < 1e-14);
        CHECK(std::abs(so3->coadjoint(r, m).norm() - m.norm()) < 1e-14);
    }
}

TEST_CASE("domain violations") {
    const auto g = so3_group();
    const Retraction cay(g, RetractionKind::cay);
    const Matrix half_turn = g->exp(Vector(Eigen::Vector3d(M_PI, 0, 0)));
    CHECK_THROWS_AS(cay.tau_inv(half_turn), RetractionDomain);
    CHECK_THROWS_AS(cay.check_domain(Vector(Eigen::Vector3d(5, 0, 0))), RetractionDomain);
    CHECK_THROWS_AS(retraction_from_string("bogus"), InvalidArgument);
    const Retraction flat(translation_group(2), RetractionKind::cay);
    CHECK_NOTHROW(flat.check_domain(Vector(Eigen::Vector2d(1e6, 0))));
}
