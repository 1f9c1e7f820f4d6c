#include "nhrk/tableau.hpp"

#include "nhrk/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <vector>

namespace nhrk {

namespace {

constexpr double kStructTol = 1e-12;
constexpr double kAssumptionTol = 1e-10;

double jacobi(int n, double alpha, double beta, double x) {
    if (n == 0) return 1.0;
    double p0 = 1.0;
    double p1 = (alpha + 1.0) + 0.5 * (alpha + beta + 2.0) * (x - 1.0);
    for (int k = 2; k <= n; ++k) {
        const double ab = alpha + beta;
        const double c1 = 2.0 * k * (k + ab) * (2.0 * k + ab - 2.0);
        const double c2 = (2.0 * k + ab - 1.0) *
                          ((2.0 * k + ab) * (2.0 * k + ab - 2.0) * x + alpha * alpha - beta * beta);
        const double c3 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * (2.0 * k + ab);
        const double p2 = (c2 * p1 - c3 * p0) / c1;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

double jacobi_derivative(int n, double alpha, double beta, double x) {
    if (n == 0) return 0.0;
    return 0.5 * (n + alpha + beta + 1.0) * jacobi(n - 1, alpha + 1.0, beta + 1.0, x);
}

/// Roots of J^{(1,1)}_n on (-1, 1), ascending.
std::vector<double> jacobi11_roots(int n) {
    std::vector<double> roots;
    if (n == 0) return roots;
    const auto f = [n](double x) { return jacobi(n, 1.0, 1.0, x); };
    const int samples = 400 * (n + 2);
    double xl = -1.0;
    double fl = f(xl);
    for (int k = 1; k <= samples; ++k) {
        const double xr = -1.0 + 2.0 * k / samples;
        const double fr = f(xr);
        if (fl == 0.0) {
            roots.push_back(xl);
        } else if (fl * fr < 0.0) {
            double lo = xl, hi = xr, flo = fl;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double fm = f(mid);
                if (flo * fm <= 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            double x = 0.5 * (lo + hi);
            for (int it = 0; it < 8; ++it) {
                const double dx = f(x) / jacobi_derivative(n, 1.0, 1.0, x);
                x -= dx;
                if (std::abs(dx) < 1e-16) break;
            }
            roots.push_back(x);
        }
        xl = xr;
        fl = fr;
    }
    if (static_cast<int>(roots.size()) != n)
        throw Error("lobatto_nodes: root bracketing failed");
    return roots;
}

/// Coefficients (ascending powers) of the Lagrange basis polynomial ℓ_j.
std::vector<double> lagrange_monomial(const Vector& c, int j) {
    std::vector<double> poly{1.0};
    double denom = 1.0;
    for (int m = 0; m < c.size(); ++m) {
        if (m == j) continue;
        std::vector<double> next(poly.size() + 1, 0.0);
        for (size_t k = 0; k < poly.size(); ++k) {
            next[k + 1] += poly[k];
            next[k] -= c(m) * poly[k];
        }
        poly = std::move(next);
        denom *= c(j) - c(m);
    }
    for (double& v : poly) v /= denom;
    return poly;
}

double integrate_from_zero(const std::vector<double>& poly, double x) {
    double acc = 0.0;
    double xp = x;
    for (size_t k = 0; k < poly.size(); ++k) {
        acc += poly[k] * xp / static_cast<double>(k + 1);
        xp *= x;
    }
    return acc;
}

/// Largest K ≤ kmax such that check(k) holds for all k in [first, K]; first − 1 if none.
int max_level(int first, int kmax, const std::function<double(int)>& residual) {
    int level = first - 1;
    for (int k = first; k <= kmax; ++k) {
        if (residual(k) > kAssumptionTol) break;
        level = k;
    }
    return level;
}

double res_B(const Vector& b, const Vector& c, int k) {
    return std::abs(b.dot(c.array().pow(k - 1).matrix()) - 1.0 / k);
}

double res_C(const Matrix& a, const Vector& c, int k) {
    const Vector lhs = a * c.array().pow(k - 1).matrix();
    const Vector rhs = c.array().pow(k) / k;
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double res_D(const Matrix& a, const Vector& b, const Vector& c, int k) {
    const Vector w = b.cwiseProduct(c.array().pow(k - 1).matrix());
    const Vector lhs = a.transpose() * w;
    const Vector rhs = b.array() * (1.0 - c.array().pow(k)) / k;
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double res_CC(const Matrix& a1, const Matrix& a2, const Vector& c, int k) {
    const Vector lhs = a1 * (a2 * c.array().pow(k - 2).matrix());
    const Vector rhs = c.array().pow(k) / (k * (k - 1.0));
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

double res_DD(const Matrix& a1, const Matrix& a2, const Vector& b, const Vector& c, int k) {
    const Vector w = b.cwiseProduct(c.array().pow(k - 2).matrix());
    const Vector lhs = a2.transpose() * (a1.transpose() * w);
    const Vector rhs = b.array() / (k * (k - 1.0)) *
                       ((k - 1.0) - (k * c.array() - c.array().pow(k)));
    return (lhs - rhs).cwiseAbs().maxCoeff();
}

/// Leading coefficient and degree of det(I − zM) as a polynomial in z.
std::pair<std::complex<double>, int> det_leading(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    std::complex<double> lead(1.0, 0.0);
    int degree = 0;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < m.rows(); ++i) {
        const std::complex<double> ev = es.eigenvalues()(i);
        if (std::abs(ev) > 1e-10 * scale) {
            lead *= -ev;
            ++degree;
        }
    }
    return {lead, degree};
}

} // namespace

double ButcherTableau::consistency_residual() const {
    return (a.rowwise().sum() - c).cwiseAbs().maxCoeff();
}

double ButcherTableau::order1_residual() const {
    return std::abs(b.sum() - 1.0);
}

bool HypothesisReport::primal_ok() const {
    return h1 <= kStructTol && h2_sigma > kStructTol && h3 <= kStructTol;
}

bool HypothesisReport::dual_ok() const {
    return h1p <= kStructTol && h2p <= kStructTol;
}

double PartitionedTableau::symplecticity_residual() const {
    const Matrix& a = primal.a;
    const Matrix& ah = dual.a;
    const Vector& b = primal.b;
    const Vector& bh = dual.b;
    double res = (b - bh).cwiseAbs().maxCoeff();
    for (int i = 0; i < stages(); ++i)
        for (int j = 0; j < stages(); ++j)
            res = std::max(res, std::abs(b(i) * ah(i, j) + bh(j) * a(j, i) - b(i) * bh(j)));
    return res;
}

HypothesisReport PartitionedTableau::hypotheses() const {
    const int s = stages();
    HypothesisReport r;
    r.h1 = primal.a.row(0).cwiseAbs().maxCoeff();
    if (s > 1) {
        Eigen::JacobiSVD<Matrix> svd(primal.a.bottomRightCorner(s - 1, s - 1));
        r.h2_sigma = svd.singularValues().minCoeff();
    }
    r.h3 = (primal.a.row(s - 1).transpose() - primal.b).cwiseAbs().maxCoeff();
    r.h1p = dual.a.col(s - 1).cwiseAbs().maxCoeff();
    r.h2p = (dual.a.col(0).array() - dual.b(0)).abs().maxCoeff();
    return r;
}

void PartitionedTableau::require_lobatto_structure() const {
    const HypothesisReport r = hypotheses();
    if (!r.primal_ok()) throw HypothesisViolation("tableau violates H1-H3");
    if (!r.dual_ok()) throw HypothesisViolation("conjugate tableau violates H1'-H2'");
}

Vector lobatto_nodes(int s) {
    if (s < 2) throw InvalidStageCount("lobatto_nodes: need s >= 2");
    Vector c(s);
    c(0) = 0.0;
    c(s - 1) = 1.0;
    const std::vector<double> roots = jacobi11_roots(s - 2);
    for (int i = 0; i < s - 2; ++i) c(i + 1) = 0.5 * (roots[i] + 1.0);
    return c;
}

ButcherTableau tableau_from_collocation(const Vector& c) {
    const int s = static_cast<int>(c.size());
    if (s < 1) throw InvalidArgument("tableau_from_collocation: empty node vector");
    for (int i = 0; i < s; ++i)
        for (int j = i + 1; j < s; ++j)
            if (std::abs(c(i) - c(j)) < 1e-14)
                throw DegenerateBasis("tableau_from_collocation: duplicate nodes");
    ButcherTableau t;
    t.a.resize(s, s);
    t.b.resize(s);
    t.c = c;
    for (int j = 0; j < s; ++j) {
        const std::vector<double> ell = lagrange_monomial(c, j);
        for (int i = 0; i < s; ++i) t.a(i, j) = integrate_from_zero(ell, c(i));
        t.b(j) = integrate_from_zero(ell, 1.0);
    }
    return t;
}

ButcherTableau symplectic_conjugate(const ButcherTableau& t) {
    const int s = t.stages();
    for (int i = 0; i < s; ++i)
        if (t.b(i) == 0.0) throw ConjugateUndefined("symplectic_conjugate: zero weight");
    ButcherTableau d;
    d.b = t.b;
    d.a.resize(s, s);
    for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) d.a(i, j) = t.b(j) * (1.0 - t.a(j, i) / t.b(i));
    d.c = d.a.rowwise().sum();
    return d;
}

OrderCertificate certify(const PartitionedTableau& t, int kmax) {
    if (kmax < 1) throw InvalidArgument("certify: kmax must be >= 1");
    const Matrix& a = t.primal.a;
    const Matrix& ah = t.dual.a;
    const Vector& b = t.primal.b;
    const Vector& bh = t.dual.b;
    const Vector& c = t.primal.c;

    OrderCertificate cert;
    cert.p = max_level(1, kmax, [&](int k) { return res_B(b, c, k); });
    cert.q = max_level(1, kmax, [&](int k) { return res_C(a, c, k); });
    cert.r = max_level(1, kmax, [&](int k) { return res_D(a, b, c, k); });
    cert.p_hat = max_level(1, kmax, [&](int k) { return res_B(bh, c, k); });
    cert.q_hat = max_level(1, kmax, [&](int k) { return res_C(ah, c, k); });
    cert.r_hat = max_level(1, kmax, [&](int k) { return res_D(ah, bh, c, k); });
    cert.c_chat = max_level(2, kmax, [&](int k) { return res_CC(a, ah, c, k); });
    cert.chat_c = max_level(2, kmax, [&](int k) { return res_CC(ah, a, c, k); });
    cert.d_dhat = max_level(2, kmax, [&](int k) { return res_DD(a, ah, b, c, k); });
    cert.dhat_d = max_level(2, kmax, [&](int k) { return res_DD(ah, a, bh, c, k); });
    try {
        cert.r_inf = stability_at_infinity(t.primal);
    } catch (const LimitUndefined&) {
        cert.r_inf = std::numeric_limits<double>::infinity();
    }
    return cert;
}

double stability_at_infinity(const ButcherTableau& t) {
    const int s = t.stages();
    // R(z) = det(I − z(A − 𝟙b)) / det(I − zA)
    const Matrix num = t.a - Vector::Ones(s) * t.b.transpose();
    const auto [ln, dn] = det_leading(num);
    const auto [ld, dd] = det_leading(t.a);
    if (dn > dd) throw LimitUndefined("stability_at_infinity: |R(z)| grows without bound");
    if (dn < dd) return 0.0;
    return (ln / ld).real();
}

PartitionedTableau make_partitioned(const ButcherTableau& primal, int kmax) {
    PartitionedTableau t;
    t.primal = primal;
    t.dual = symplectic_conjugate(primal);
    t.cert = certify(t, kmax > 0 ? kmax : 2 * primal.stages() + 2);
    return t;
}

PartitionedTableau lobatto_pair(int s) {
    PartitionedTableau t = make_partitioned(tableau_from_collocation(lobatto_nodes(s)));
    t.lobatto = true;
    return t;
}

std::pair<int, int> predicted_orders(int s) {
    return {2 * s - 2, s % 2 == 0 ? s : s - 1};
}

} // namespace nhrk
