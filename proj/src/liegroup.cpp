#include "nhrk/liegroup.hpp"

#include "nhrk/errors.hpp"
#include "nhrk/nlsolve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace nhrk {

namespace {

constexpr int kSeriesTerms = 40;

void fill_ad_basis(GroupDescriptor& g) {
    g.hat_entries.assign(g.k, {});
    g.vee_entries.assign(g.k, {});
    for (int a = 0; a < g.k; ++a) {
        const Matrix e = g.hat(Vector::Unit(g.k, a));
        for (int c = 0; c < g.d; ++c)
            for (int r = 0; r < g.d; ++r)
                if (e(r, c) != 0.0) g.hat_entries[a].push_back({r, c, e(r, c)});
    }
    for (int c = 0; c < g.d; ++c)
        for (int r = 0; r < g.d; ++r) {
            Matrix unit = Matrix::Zero(g.d, g.d);
            unit(r, c) = 1.0;
            const Vector v = g.vee(unit);
            for (int a = 0; a < g.k; ++a)
                if (v(a) != 0.0) g.vee_entries[a].push_back({r, c, v(a)});
        }
    g.ad_basis.clear();
    for (int a = 0; a < g.k; ++a) {
        const Matrix ea = g.hat(Vector::Unit(g.k, a));
        Matrix ad(g.k, g.k);
        for (int b = 0; b < g.k; ++b) {
            const Matrix eb = g.hat(Vector::Unit(g.k, b));
            ad.col(b) = g.vee(ea * eb - eb * ea);
        }
        g.ad_basis.push_back(ad);
    }
}

/// Bernoulli numbers with B_1 = −1/2.
const std::array<double, kSeriesTerms + 1>& bernoulli() {
    static const std::array<double, kSeriesTerms + 1> table = [] {
        std::array<double, kSeriesTerms + 1> b{};
        b[0] = 1.0;
        for (int m = 1; m <= kSeriesTerms; ++m) {
            double acc = 0.0;
            double binom = 1.0;  // C(m+1, k)
            for (int k = 0; k < m; ++k) {
                acc += binom * b[k];
                binom = binom * (m + 1 - k) / (k + 1);
            }
            b[m] = -acc / (m + 1);
        }
        return b;
    }();
    return table;
}

/// (sin ω / ω, (1 − cos ω) / ω) with series near zero.
std::pair<double, double> se2_coeffs(double w) {
    if (std::abs(w) < 1e-4) {
        const double w2 = w * w;
        return {1.0 - w2 / 6.0 + w2 * w2 / 120.0, w / 2.0 - w * w2 / 24.0 + w * w2 * w2 / 720.0};
    }
    return {std::sin(w) / w, (1.0 - std::cos(w)) / w};
}

} // namespace

Matrix GroupDescriptor::inverse(const Matrix& g) const {
    return g.inverse();
}

Matrix GroupDescriptor::ad(const Vector& xi) const {
    Matrix out = Matrix::Zero(k, k);
    for (int a = 0; a < k; ++a)
        if (xi(a) != 0.0) out += xi(a) * ad_basis[a];
    return out;
}

Matrix GroupDescriptor::Ad(const Matrix& g) const {
    return sandwich(g, inverse(g));
}

Matrix GroupDescriptor::sandwich(const Matrix& a, const Matrix& b) const {
    Matrix out = Matrix::Zero(k, k);
    for (int j = 0; j < k; ++j)
        for (int i = 0; i < k; ++i) {
            double acc = 0.0;
            for (const Entry& v : vee_entries[i])
                for (const Entry& e : hat_entries[j])
                    acc += v.value * e.value * a(v.row, e.row) * b(e.col, v.col);
            out(i, j) = acc;
        }
    return out;
}

Vector GroupDescriptor::coadjoint(const Matrix& g, const Vector& mu) const {
    return Ad(g).transpose() * mu;
}

Matrix so3_hat(const Vector& w) {
    Matrix m(3, 3);
    m << 0.0, -w(2), w(1), w(2), 0.0, -w(0), -w(1), w(0), 0.0;
    return m;
}

Vector so3_vee(const Matrix& m) {
    return Eigen::Vector3d(m(2, 1), m(0, 2), m(1, 0));
}

Matrix rodrigues(const Vector& w) {
    const double th = w.norm();
    const Matrix k = so3_hat(w);
    double a, b;
    if (th < 1e-4) {
        const double t2 = th * th;
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        a = std::sin(th) / th;
        b = (1.0 - std::cos(th)) / (th * th);
    }
    return Matrix::Identity(3, 3) + a * k + b * k * k;
}

GroupPtr so3_group() {
    auto g = std::make_shared<GroupDescriptor>();
    g->name = "SO(3)";
    g->d = 3;
    g->k = 3;
    g->hat = so3_hat;
    g->vee = so3_vee;
    g->exp = rodrigues;
    g->log = [](const Matrix& r) {
        const double cth = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
        const double th = std::acos(cth);
        const Vector axis = so3_vee(r - r.transpose());
        if (th < 1e-6) return Vector(0.5 * (1.0 + th * th / 6.0) * axis);
        return Vector(th / (2.0 * std::sin(th)) * axis);
    };
    fill_ad_basis(*g);
    return g;
}

GroupPtr se2_group() {
    auto g = std::make_shared<GroupDescriptor>();
    g->name = "SE(2)";
    g->d = 3;
    g->k = 3;
    g->hat = [](const Vector& x) {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 1) = -x(2);
        m(1, 0) = x(2);
        m(0, 2) = x(0);
        m(1, 2) = x(1);
        return m;
    };
    g->vee = [](const Matrix& m) { return Vector(Eigen::Vector3d(m(0, 2), m(1, 2), m(1, 0))); };
    g->exp = [](const Vector& x) {
        const double w = x(2);
        const auto [sa, cb] = se2_coeffs(w);
        Matrix m = Matrix::Identity(3, 3);
        m(0, 0) = std::cos(w);
        m(0, 1) = -std::sin(w);
        m(1, 0) = std::sin(w);
        m(1, 1) = std::cos(w);
        m(0, 2) = sa * x(0) - cb * x(1);
        m(1, 2) = cb * x(0) + sa * x(1);
        return m;
    };
    g->log = [](const Matrix& m) {
        const double w = std::atan2(m(1, 0), m(0, 0));
        const auto [sa, cb] = se2_coeffs(w);
        const double det = sa * sa + cb * cb;
        const double tx = m(0, 2), ty = m(1, 2);
        return Vector(Eigen::Vector3d((sa * tx + cb * ty) / det, (-cb * tx + sa * ty) / det, w));
    };
    fill_ad_basis(*g);
    return g;
}

GroupPtr translation_group(int k) {
    auto g = std::make_shared<GroupDescriptor>();
    g->name = "R^" + std::to_string(k);
    g->d = k + 1;
    g->k = k;
    g->hat = [k](const Vector& x) {
        Matrix m = Matrix::Zero(k + 1, k + 1);
        m.col(k).head(k) = x;
        return m;
    };
    g->vee = [k](const Matrix& m) { return Vector(m.col(k).head(k)); };
    g->exp = [k](const Vector& x) {
        Matrix m = Matrix::Identity(k + 1, k + 1);
        m.col(k).head(k) = x;
        return m;
    };
    g->log = [k](const Matrix& m) { return Vector(m.col(k).head(k)); };
    g->domain_radius = std::numeric_limits<double>::infinity();
    fill_ad_basis(*g);
    return g;
}

GroupPtr product_group(const GroupPtr& g1, const GroupPtr& g2) {
    auto g = std::make_shared<GroupDescriptor>();
    g->name = g1->name + "x" + g2->name;
    const int d1 = g1->d, d2 = g2->d, k1 = g1->k, k2 = g2->k;
    g->d = d1 + d2;
    g->k = k1 + k2;
    const auto block = [d1, d2](const Matrix& a, const Matrix& b) {
        Matrix m = Matrix::Zero(d1 + d2, d1 + d2);
        m.topLeftCorner(d1, d1) = a;
        m.bottomRightCorner(d2, d2) = b;
        return m;
    };
    const auto join = [k1, k2](const Vector& a, const Vector& b) {
        Vector v(k1 + k2);
        v << a, b;
        return v;
    };
    g->hat = [=](const Vector& x) { return block(g1->hat(x.head(k1)), g2->hat(x.tail(k2))); };
    g->vee = [=](const Matrix& m) {
        return join(g1->vee(m.topLeftCorner(d1, d1)), g2->vee(m.bottomRightCorner(d2, d2)));
    };
    g->exp = [=](const Vector& x) { return block(g1->exp(x.head(k1)), g2->exp(x.tail(k2))); };
    g->log = [=](const Matrix& m) {
        return join(g1->log(m.topLeftCorner(d1, d1)), g2->log(m.bottomRightCorner(d2, d2)));
    };
    g->domain_radius = std::min(g1->domain_radius, g2->domain_radius);
    fill_ad_basis(*g);
    return g;
}

std::string to_string(RetractionKind kind) {
    return kind == RetractionKind::exp ? "exp" : "cay";
}

RetractionKind retraction_from_string(const std::string& name) {
    if (name == "exp") return RetractionKind::exp;
    if (name == "cay") return RetractionKind::cay;
    throw InvalidArgument("unknown retraction '" + name + "'");
}

Matrix cay_matrix(const Matrix& xi_hat) {
    const Matrix id = Matrix::Identity(xi_hat.rows(), xi_hat.cols());
    try {
        return lu_solve(Matrix(id - 0.5 * xi_hat), Matrix(id + 0.5 * xi_hat));
    } catch (const SingularMatrix&) {
        throw RetractionDomain("cay: I - xi/2 is singular");
    }
}

Retraction::Retraction(GroupPtr group, RetractionKind kind)
    : group_(std::move(group)), kind_(kind) {}

Matrix Retraction::cay(const Vector& xi) const {
    return cay_matrix(group_->hat(xi));
}

Matrix Retraction::tau(const Vector& xi) const {
    return kind_ == RetractionKind::cay ? cay(xi) : group_->exp(xi);
}

void Retraction::check_domain(const Vector& xi) const {
    if (xi.norm() > group_->domain_radius)
        throw RetractionDomain("retraction argument outside the domain (|xi| > " +
                               std::to_string(group_->domain_radius) + ")");
}

Vector Retraction::tau_inv(const Matrix& g) const {
    Vector xi;
    if (kind_ == RetractionKind::cay) {
        const Matrix id = group_->identity();
        Matrix x;
        try {
            // cay^{-1}(g) = 2 (g − I)(g + I)^{-1}
            x = 2.0 * lu_solve(Matrix((g + id).transpose()), Matrix((g - id).transpose())).transpose();
        } catch (const SingularMatrix&) {
            throw RetractionDomain("cay inverse: g + I is singular");
        }
        xi = group_->vee(x);
    } else {
        xi = group_->log(g);
    }
    check_domain(xi);
    return xi;
}

Matrix Retraction::dtau(const Vector& xi) const {
    const int k = group_->k;
    Matrix out(k, k);
    if (kind_ == RetractionKind::cay) {
        const Matrix x = group_->hat(xi);
        const Matrix id = group_->identity();
        return group_->sandwich((id + 0.5 * x).inverse(), (id - 0.5 * x).inverse());
    }
    // Σ (−ad_ξ)^n / (n+1)!
    const Matrix ad = -group_->ad(xi);
    Matrix term = Matrix::Identity(k, k);
    out = term;
    for (int n = 1; n <= kSeriesTerms; ++n) {
        term = ad * term / (n + 1.0);
        out += term;
        if (term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return out;
}

Matrix Retraction::dtau_inv(const Vector& xi) const {
    const int k = group_->k;
    Matrix out(k, k);
    if (kind_ == RetractionKind::cay) {
        const Matrix x = group_->hat(xi);
        const Matrix id = group_->identity();
        return group_->sandwich(id + 0.5 * x, id - 0.5 * x);
    }
    // Σ B_n (−ad_ξ)^n / n!
    const auto& b = bernoulli();
    const Matrix ad = -group_->ad(xi);
    Matrix power = Matrix::Identity(k, k);
    out = power;
    for (int n = 1; n <= kSeriesTerms; ++n) {
        power = ad * power / static_cast<double>(n);
        if (b[n] == 0.0 || (n > 1 && n % 2 == 1)) continue;
        const Matrix term = b[n] * power;
        out += term;
        if (n > 2 && term.cwiseAbs().maxCoeff() < 1e-18) break;
    }
    return out;
}

Vector Retraction::ddexp(const Vector& xi, const Vector& eta, const Vector& delta) const {
    // ∂_ξ Σ c_n ad_ξ^n η along δ, with c_n = (−1)^n/(n+1)!
    const Matrix adx = group_->ad(xi);
    const Matrix add = group_->ad(delta);
    Vector p = eta;
    Vector dp = Vector::Zero(eta.size());
    Vector acc = Vector::Zero(eta.size());
    double c = 1.0;
    for (int n = 1; n <= kSeriesTerms; ++n) {
        dp = add * p + adx * dp;
        p = adx * p;
        c *= -1.0 / (n + 1.0);
        const Vector term = c * dp;
        acc += term;
        if (n > 2 && term.cwiseAbs().maxCoeff() < 1e-18 && (c * p).cwiseAbs().maxCoeff() < 1e-18)
            break;
    }
    return dtau_inv(xi) * acc;
}

Vector Retraction::ddtau(const Vector& xi, const Vector& eta, const Vector& delta) const {
    if (kind_ == RetractionKind::exp) return ddexp(xi, eta, delta);
    const Matrix x = group_->hat(xi);
    const Matrix id = group_->identity();
    const Matrix dx = group_->hat(dtau(xi) * eta);
    const Matrix d = group_->hat(delta);
    return group_->vee(0.5 * ((id + 0.5 * x) * dx * d - d * dx * (id - 0.5 * x)));
}

Vector Retraction::ddtau_adjoint(const Vector& xi, const Vector& eta, const Vector& pi) const {
    const int k = group_->k;
    Vector out(k);
    if (kind_ == RetractionKind::exp) {
        for (int j = 0; j < k; ++j) out(j) = pi.dot(ddexp(xi, eta, Vector::Unit(k, j)));
        return out;
    }
    const Matrix x = group_->hat(xi);
    const Matrix id = group_->identity();
    const Matrix dx = group_->hat(dtau(xi) * eta);
    const Matrix left = 0.5 * (id + 0.5 * x) * dx;
    const Matrix right = 0.5 * dx * (id - 0.5 * x);
    out = (group_->sandwich(left, id) - group_->sandwich(id, right)).transpose() * pi;
    return out;
}

} // namespace nhrk
