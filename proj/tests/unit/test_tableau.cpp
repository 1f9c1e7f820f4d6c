#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "nhrk/errors.hpp"
#include "nhrk/tableau.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

using namespace nhrk;

namespace {

/// Roots of P'_{s-1} mapped to [0, 1], from the companion matrix of the
/// monomial coefficients built with the Legendre three-term recurrence.
std::vector<double> legendre_derivative_roots(int s) {
    const int n = s - 1;
    std::vector<std::vector<double>> p{{1.0}, {0.0, 1.0}};
    for (int k = 1; k < n; ++k) {
        std::vector<double> next(k + 2, 0.0);
        for (int i = 0; i <= k; ++i) next[i + 1] += (2.0 * k + 1.0) / (k + 1.0) * p[k][i];
        for (int i = 0; i < k; ++i) next[i] -= k / (k + 1.0) * p[k - 1][i];
        p.push_back(next);
    }
    std::vector<double> d(n);
    for (int i = 1; i <= n; ++i) d[i - 1] = i * p[n][i];
    const int deg = n - 1;
    std::vector<double> roots;
    if (deg == 0) return roots;
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -d[i] / d[deg];
    Eigen::EigenSolver<Eigen::MatrixXd> es(comp);
    for (int i = 0; i < deg; ++i) roots.push_back(0.5 * (es.eigenvalues()(i).real() + 1.0));
    std::sort(roots.begin(), roots.end());
    return roots;
}

/// ∫_0^x ℓ_j with 5-point Gauss-Legendre, exact for the degrees used here.
double lagrange_integral(const Vector& c, int j, double x) {
    static const double gx[5] = {-0.9061798459386640, -0.5384693101056831, 0.0, 0.5384693101056831,
                                 0.9061798459386640};
    static const double gw[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    double acc = 0.0;
    for (int k = 0; k < 5; ++k) {
        const double t = 0.5 * x * (gx[k] + 1.0);
        double l = 1.0;
        for (int m = 0; m < c.size(); ++m)
            if (m != j) l *= (t - c(m)) / (c(j) - c(m));
        acc += gw[k] * l;
    }
    return 0.5 * x * acc;
}

} // namespace

TEST_CASE("lobatto nodes match closed forms") {
    CHECK_THROWS_AS(lobatto_nodes(1), InvalidStageCount);
    const Vector c2 = lobatto_nodes(2);
    CHECK(c2(0) == 0.0);
    CHECK(c2(1) == 1.0);
    const Vector c3 = lobatto_nodes(3);
    CHECK(c3(1) == doctest::Approx(0.5).epsilon(1e-15));
    const Vector c4 = lobatto_nodes(4);
    CHECK(std::abs(c4(1) - (5.0 - std::sqrt(5.0)) / 10.0) < 1e-15);
    CHECK(std::abs(c4(2) - (5.0 + std::sqrt(5.0)) / 10.0) < 1e-15);
}

TEST_CASE("lobatto interior nodes match an independent root finder") {
    for (int s = 3; s <= 8; ++s) {
        const Vector c = lobatto_nodes(s);
        const auto roots = legendre_derivative_roots(s);
        REQUIRE(roots.size() == static_cast<std::size_t>(s - 2));
        for (int i = 0; i < s - 2; ++i) CHECK(std::abs(c(i + 1) - roots[i]) < 1e-12);
        for (int i = 1; i < s; ++i) CHECK(c(i) > c(i - 1));
    }
}

TEST_CASE("collocation tableau from two and three nodes") {
    const ButcherTableau t2 = tableau_from_collocation(lobatto_nodes(2));
    CHECK(t2.a(0, 0) == 0.0);
    CHECK(t2.a(0, 1) == 0.0);
    CHECK(std::abs(t2.a(1, 0) - 0.5) < 1e-15);
    CHECK(std::abs(t2.a(1, 1) - 0.5) < 1e-15);
    CHECK(std::abs(t2.b(0) - 0.5) < 1e-15);
    CHECK(t2.consistency_residual() < 1e-15);

    const ButcherTableau t3 = tableau_from_collocation(lobatto_nodes(3));
    Eigen::Matrix3d a3;
    a3 << 0, 0, 0, 5.0 / 24, 1.0 / 3, -1.0 / 24, 1.0 / 6, 2.0 / 3, 1.0 / 6;
    CHECK((t3.a - Matrix(a3)).cwiseAbs().maxCoeff() < 1e-15);
    CHECK((t3.b - Vector(Eigen::Vector3d(1.0 / 6, 2.0 / 3, 1.0 / 6))).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("collocation coefficients agree with quadrature of the Lagrange basis") {
    for (int s = 2; s <= 6; ++s) {
        const Vector c = lobatto_nodes(s);
        const ButcherTableau t = tableau_from_collocation(c);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j) CHECK(std::abs(t.a(i, j) - lagrange_integral(c, j, c(i))) < 1e-13);
        for (int j = 0; j < s; ++j) CHECK(std::abs(t.b(j) - lagrange_integral(c, j, 1.0)) < 1e-13);
    }
}

TEST_CASE("degenerate and invalid inputs") {
    CHECK_THROWS_AS(tableau_from_collocation(Vector(Eigen::Vector2d(0.5, 0.5))), DegenerateBasis);
    ButcherTableau t = tableau_from_collocation(lobatto_nodes(2));
    t.b(0) = 0.0;
    CHECK_THROWS_AS(symplectic_conjugate(t), ConjugateUndefined);
    ButcherTableau explicit_euler;
    explicit_euler.a = Matrix::Zero(1, 1);
    explicit_euler.b = Vector::Ones(1);
    explicit_euler.c = Vector::Zero(1);
    CHECK_THROWS_AS(stability_at_infinity(explicit_euler), LimitUndefined);
}

TEST_CASE("symplectic conjugate of lobatto IIIA is lobatto IIIB") {
    const ButcherTableau d2 = symplectic_conjugate(tableau_from_collocation(lobatto_nodes(2)));
    Eigen::Matrix2d ah2;
    ah2 << 0.5, 0.0, 0.5, 0.0;
    CHECK((d2.a - Matrix(ah2)).cwiseAbs().maxCoeff() < 1e-15);

    const ButcherTableau d3 = symplectic_conjugate(tableau_from_collocation(lobatto_nodes(3)));
    Eigen::Matrix3d ah3;
    ah3 << 1.0 / 6, -1.0 / 6, 0, 1.0 / 6, 1.0 / 3, 0, 1.0 / 6, 5.0 / 6, 0;
    CHECK((d3.a - Matrix(ah3)).cwiseAbs().maxCoeff() < 1e-15);
    for (int i = 0; i < 3; ++i) {
        CHECK(std::abs(d3.a(i, 2)) < 1e-15);
        CHECK(std::abs(d3.a(i, 0) - d3.b(0)) < 1e-15);
    }
}

TEST_CASE("conjugation is an involution") {
    for (int s = 2; s <= 6; ++s) {
        const ButcherTableau t = tableau_from_collocation(lobatto_nodes(s));
        const ButcherTableau back = symplectic_conjugate(symplectic_conjugate(t));
        CHECK((back.a - t.a).cwiseAbs().maxCoeff() < 1e-13);
        CHECK((back.b - t.b).cwiseAbs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("certificates and structural hypotheses of lobatto pairs") {
    for (int s = 2; s <= 5; ++s) {
        CAPTURE(s);
        const PartitionedTableau t = lobatto_pair(s);
        CHECK(t.primal.consistency_residual() < 1e-12);
        CHECK(t.dual.consistency_residual() < 1e-12);
        CHECK(t.primal.order1_residual() < 1e-12);
        CHECK(t.symplecticity_residual() < 1e-12);
        const HypothesisReport h = t.hypotheses();
        CHECK(h.h1 < 1e-12);
        CHECK(h.h3 < 1e-12);
        CHECK(h.h1p < 1e-12);
        CHECK(h.h2p < 1e-12);
        CHECK(h.h2_sigma > 1e-3);
        CHECK(h.ok());
        CHECK_NOTHROW(t.require_lobatto_structure());
        CHECK(t.cert.p == 2 * s - 2);
        CHECK(t.cert.q == s);
        CHECK(t.cert.r == s - 2);
        CHECK(t.cert.p_hat == 2 * s - 2);
        CHECK(t.cert.c_chat >= s);
        CHECK(std::abs(t.cert.r_inf - (s % 2 == 0 ? -1.0 : 1.0)) < 1e-12);
    }
}

TEST_CASE("gauss collocation fails the lobatto hypotheses") {
    const double d = std::sqrt(3.0) / 6.0;
    const PartitionedTableau t = make_partitioned(tableau_from_collocation(Vector(Eigen::Vector2d(0.5 - d, 0.5 + d))));
    CHECK(t.cert.p == 4);
    CHECK(!t.hypotheses().primal_ok());
    CHECK_THROWS_AS(t.require_lobatto_structure(), HypothesisViolation);
    // R(∞) of the Gauss method is (−1)^s
    CHECK(std::abs(t.cert.r_inf - 1.0) < 1e-12);
}

TEST_CASE("predicted orders") {
    CHECK(predicted_orders(2) == std::pair<int, int>{2, 2});
    CHECK(predicted_orders(3) == std::pair<int, int>{4, 2});
    CHECK(predicted_orders(4) == std::pair<int, int>{6, 4});
}
