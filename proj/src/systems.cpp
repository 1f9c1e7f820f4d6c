#include "nhrk/systems.hpp"

#include "nhrk/errors.hpp"

#include <cmath>

namespace nhrk {

namespace {

using PotentialFn = std::function<double(const Vector&)>;
using GradientFn = std::function<Vector(const Vector&)>;

ParamMap merge_params(const std::string& system, ParamMap defaults, const ParamMap& overrides) {
    for (const auto& [key, value] : overrides) {
        auto it = defaults.find(key);
        if (it == defaults.end())
            throw InvalidArgument("system '" + system + "' has no parameter '" + key + "'");
        it->second = value;
    }
    return defaults;
}

/// L = ½|v|² − U(q) with H = ½|p|² + U(q).
VecNHSystem natural_system(const std::string& name, int n, int m, PotentialFn u, GradientFn grad) {
    VecNHSystem s;
    s.name = name;
    s.n = n;
    s.m = m;
    s.L = [u](const Vector& q, const Vector& v) { return 0.5 * v.squaredNorm() - u(q); };
    s.D1L = [grad](const Vector& q, const Vector&) { return Vector(-grad(q)); };
    s.D2L = [](const Vector&, const Vector& v) { return v; };
    s.D22L = [n](const Vector&, const Vector&) { return Matrix(Matrix::Identity(n, n)); };
    s.H = [u](const Vector& q, const Vector& p) { return 0.5 * p.squaredNorm() + u(q); };
    s.D1H = [grad](const Vector& q, const Vector&) { return grad(q); };
    s.D2H = [](const Vector&, const Vector& p) { return p; };
    s.D22H = [n](const Vector&, const Vector&) { return Matrix(Matrix::Identity(n, n)); };
    return s;
}

Vector vec(std::initializer_list<double> xs) {
    Vector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return v;
}

/// Rotation block and translation (x, y) of an SE(2) element.
double se2_theta(const Matrix& g) { return std::atan2(g(1, 0), g(0, 0)); }

Matrix se2_element(double x, double y, double th) {
    Matrix g = Matrix::Identity(3, 3);
    g(0, 0) = std::cos(th);
    g(0, 1) = -std::sin(th);
    g(1, 0) = std::sin(th);
    g(1, 1) = std::cos(th);
    g(0, 2) = x;
    g(1, 2) = y;
    return g;
}

std::vector<std::string> rotation_entry_names() {
    std::vector<std::string> names;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) names.push_back("R" + std::to_string(i) + std::to_string(j));
    return names;
}

Vector rotation_entries(const Matrix& r) {
    Vector out(9);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out(3 * i + j) = r(i, j);
    return out;
}

} // namespace

const Preset& SystemCatalogEntry::preset(const std::string& name) const {
    const std::string key = name.empty() ? default_preset : name;
    auto it = presets.find(key);
    if (it == presets.end())
        throw InvalidArgument("system '" + this->name + "' has no preset '" + key + "'");
    return it->second;
}

ExtendedState SystemCatalogEntry::vec_state(const Preset& p) const {
    if (!vec) throw InvalidArgument("system '" + name + "' is not a vector-space system");
    ExtendedState st = make_state(*vec, p.q, p.v);
    if (vec_constraint) st.lambda = Vector::Zero(vec_constraint->m);
    return st;
}

LieState SystemCatalogEntry::lie_state(const Preset& p) const {
    if (!lie) throw InvalidArgument("system '" + name + "' is not a Lie group system");
    LieState st;
    st.g = element(p.q);
    st.eta = p.v;
    st.mu = lie->D2ell(st.g, st.eta);
    st.lambda = lie_constraint ? Vector(Vector::Zero(lie_constraint->m))
                               : lie_consistent_multiplier(*lie, st.g, st.eta);
    return st;
}

SystemCatalogEntry nonholonomic_particle(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "particle";
    e.params = merge_params(e.name, {}, overrides);
    VecNHSystem s = natural_system(
        e.name, 3, 1, [](const Vector& q) { return 0.5 * (q(0) * q(0) + q(1) * q(1)); },
        [](const Vector& q) { return vec({q(0), q(1), 0.0}); });
    s.Phi = [](const Vector& q, const Vector& v) { return vec({v(2) - q(1) * v(0)}); };
    s.D1Phi = [](const Vector&, const Vector& v) { return Matrix(vec({0.0, -v(0), 0.0}).transpose()); };
    s.D2Phi = [](const Vector& q, const Vector&) { return Matrix(vec({-q(1), 0.0, 1.0}).transpose()); };
    e.vec = s;
    e.presets["default"] = {vec({0.0, 1.0, 0.0}), vec({1.0, 0.0, 1.0})};
    e.diagnostic_names = {"energy"};
    e.vec_diagnostics = [s](const Vector& q, const Vector& v) { return vec({energy(s, q, v)}); };
    return e;
}

SystemCatalogEntry cvt(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "cvt";
    e.params = merge_params(e.name, {{"epsilon", 0.5}}, overrides);
    const double eps = e.params.at("epsilon");
    VecNHSystem s = natural_system(
        e.name, 3, 1,
        [eps](const Vector& q) {
            return 0.5 * (q(0) * q(0) + q(2) * q(2) - 2.0 * std::cos(q(1)) + eps * std::sin(2.0 * q(1)));
        },
        [eps](const Vector& q) {
            return vec({q(0), std::sin(q(1)) + eps * std::cos(2.0 * q(1)), q(2)});
        });
    s.Phi = [](const Vector& q, const Vector& v) { return vec({v(2) + std::sin(q(1)) * v(0)}); };
    s.D1Phi = [](const Vector& q, const Vector& v) {
        return Matrix(vec({0.0, std::cos(q(1)) * v(0), 0.0}).transpose());
    };
    s.D2Phi = [](const Vector& q, const Vector&) {
        return Matrix(vec({std::sin(q(1)), 0.0, 1.0}).transpose());
    };
    e.vec = s;
    e.presets["low"] = {vec({1.0, 0.0, 1.0}), vec({0.0, 3.0 * std::sqrt(10.0) / 5.0, 0.0})};
    e.presets["high"] = {vec({1.0, 0.0, 1.0}), vec({0.0, std::sqrt(8.0), 0.0})};
    e.default_preset = "low";
    e.diagnostic_names = {"E_d", "E_p", "E_T"};
    e.vec_diagnostics = [eps](const Vector& q, const Vector& v) {
        const double ed = 0.5 * v(1) * v(1) - std::cos(q(1)) + 0.5 * eps * std::sin(2.0 * q(1));
        const double ep = 0.5 * (v(0) * v(0) + v(2) * v(2)) + 0.5 * (q(0) * q(0) + q(2) * q(2));
        return vec({ed, ep, ed + ep});
    };
    return e;
}

Preset chaotic_initial_state(int m, int j, int J) {
    if (m < 2) throw InvalidArgument("chaotic system needs m >= 2");
    if (J < 1 || j < 0 || j > J) throw InvalidArgument("chaotic ensemble index out of range");
    const int n = 2 * m + 1;
    const double pi = std::acos(-1.0);
    const double alpha = std::cos(j * pi / (2.0 * J));
    const double beta = std::sin(j * pi / (2.0 * J));
    Preset p{Vector::Zero(n), Vector::Zero(n)};
    // (α, 0.6, 0.4, 0.2, 1, 1, 1) for m = 3
    p.q(0) = alpha;
    for (int i = 1; i <= m; ++i) p.q(i) = 0.2 * (m + 1 - i);
    for (int i = m + 1; i < n; ++i) p.q(i) = 1.0;
    p.v(1) = beta;
    return p;
}

SystemCatalogEntry chaotic_system(int m, const ParamMap& overrides) {
    if (m < 2) throw InvalidArgument("chaotic system needs m >= 2");
    SystemCatalogEntry e;
    e.name = "chaotic";
    e.params = merge_params(e.name, {{"m", static_cast<double>(m)}}, overrides);
    const int n = 2 * m + 1;
    // quartic couplings q_a² q_b² (0-based indices)
    std::vector<std::pair<int, int>> pairs{{m + 1, m + 2}};
    for (int i = 1; i <= m; ++i) pairs.emplace_back(i, m + i);
    VecNHSystem s = natural_system(
        e.name, n, 1,
        [pairs](const Vector& q) {
            double acc = q.squaredNorm();
            for (const auto& [a, b] : pairs) acc += q(a) * q(a) * q(b) * q(b);
            return 0.5 * acc;
        },
        [pairs](const Vector& q) {
            Vector g = q;
            for (const auto& [a, b] : pairs) {
                g(a) += q(a) * q(b) * q(b);
                g(b) += q(b) * q(a) * q(a);
            }
            return g;
        });
    s.Phi = [m, n](const Vector& q, const Vector& v) {
        double acc = v(0);
        for (int i = m + 1; i < n; ++i) acc += q(i) * v(i);
        return vec({acc});
    };
    s.D1Phi = [m, n](const Vector&, const Vector& v) {
        Matrix d = Matrix::Zero(1, n);
        for (int i = m + 1; i < n; ++i) d(0, i) = v(i);
        return d;
    };
    s.D2Phi = [m, n](const Vector& q, const Vector&) {
        Matrix d = Matrix::Zero(1, n);
        d(0, 0) = 1.0;
        for (int i = m + 1; i < n; ++i) d(0, i) = q(i);
        return d;
    };
    e.vec = s;
    e.presets["default"] = chaotic_initial_state(m, 0, 1);
    e.diagnostic_names = {"energy"};
    e.vec_diagnostics = [s](const Vector& q, const Vector& v) { return vec({energy(s, q, v)}); };
    return e;
}

SystemCatalogEntry unicycle(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "unicycle";
    e.kind = SystemKind::lie;
    e.params = merge_params(e.name, {{"m", 1.0}, {"Iz", 1.0}}, overrides);
    const double mass = e.params.at("m");
    const double iz = e.params.at("Iz");
    if (!(mass > 0.0) || !(iz > 0.0)) throw InvalidArgument("unicycle: m and Iz must be positive");

    LieNHSystem s;
    s.name = e.name;
    s.group = se2_group();
    s.m = 1;
    const auto pot = [](const Matrix& g) { return 0.5 * (g(0, 2) * g(0, 2) + g(1, 2) * g(1, 2)); };
    // d/dε of the potential along g·exp(εζ) only sees ζ_v through R ζ_v
    const auto grad_triv = [](const Matrix& g) {
        const Eigen::Matrix2d r = g.topLeftCorner(2, 2);
        const Eigen::Vector2d xy(g(0, 2), g(1, 2));
        const Eigen::Vector2d body = r.transpose() * xy;
        return vec({body(0), body(1), 0.0});
    };
    s.ell = [=](const Matrix& g, const Vector& u) {
        return 0.5 * (mass * (u(0) * u(0) + u(1) * u(1)) + iz * u(2) * u(2)) - pot(g);
    };
    s.D1ell = [=](const Matrix& g, const Vector&) { return Vector(-grad_triv(g)); };
    s.D2ell = [=](const Matrix&, const Vector& u) { return vec({mass * u(0), mass * u(1), iz * u(2)}); };
    s.D22ell = [=](const Matrix&, const Vector&) {
        return Matrix(vec({mass, mass, iz}).asDiagonal());
    };
    s.phi = [](const Matrix&, const Vector& u) { return vec({u(1)}); };
    s.D2phi = [](const Matrix&, const Vector&) { return Matrix(vec({0.0, 1.0, 0.0}).transpose()); };
    s.h = [=](const Matrix& g, const Vector& mu) {
        return 0.5 * ((mu(0) * mu(0) + mu(1) * mu(1)) / mass + mu(2) * mu(2) / iz) + pot(g);
    };
    s.D1h = [=](const Matrix& g, const Vector&) { return grad_triv(g); };
    s.D2h = [=](const Matrix&, const Vector& mu) { return vec({mu(0) / mass, mu(1) / mass, mu(2) / iz}); };
    s.D22h = [=](const Matrix&, const Vector&) {
        return Matrix(vec({1.0 / mass, 1.0 / mass, 1.0 / iz}).asDiagonal());
    };
    e.lie = s;
    e.element = [](const Vector& c) { return se2_element(c(0), c(1), c(2)); };
    e.coordinate_names = {"x", "y", "theta"};
    e.coordinates = [](const Matrix& g) { return vec({g(0, 2), g(1, 2), se2_theta(g)}); };
    e.presets["default"] = {vec({1.0, 0.5, 0.3}), vec({1.0, 0.0, 0.5})};
    e.diagnostic_names = {"energy"};
    e.lie_diagnostics = [s](const Matrix& g, const Vector& u) { return vec({lie_energy(s, g, u)}); };
    return e;
}

SystemCatalogEntry ball_on_turntable(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "ball";
    e.kind = SystemKind::lie;
    e.params = merge_params(e.name,
                            {{"r", 1.0}, {"Omega", 1.0}, {"a", 0.4}, {"b", 0.4}, {"c", 0.4},
                             {"moving_energy_half", 0.0}},
                            overrides);
    const double r = e.params.at("r");
    const double om = e.params.at("Omega");
    const double a = e.params.at("a");
    const double b = e.params.at("b");
    const double c = e.params.at("c");
    const double me_factor = e.params.at("moving_energy_half") != 0.0 ? 0.5 : 1.0;
    if (!(r > 0.0) || !(a > 0.0) || !(b > 0.0) || !(c > 0.0))
        throw InvalidArgument("ball: r, a, b, c must be positive");

    // algebra coordinates (ω_ξ, ω_η, ω_ζ, v_x, v_y); g = diag(R, translation(x, y))
    const Vector inertia = vec({r * r * a, r * r * b, r * r * c, 1.0, 1.0});
    LieNHSystem s;
    s.name = e.name;
    s.group = product_group(so3_group(), translation_group(2));
    s.m = 2;
    s.ell = [=](const Matrix&, const Vector& u) { return 0.5 * u.dot(inertia.cwiseProduct(u)); };
    s.D1ell = [](const Matrix&, const Vector&) { return Vector(Vector::Zero(5)); };
    s.D2ell = [=](const Matrix&, const Vector& u) { return Vector(inertia.cwiseProduct(u)); };
    s.D22ell = [=](const Matrix&, const Vector&) { return Matrix(inertia.asDiagonal()); };
    s.phi = [=](const Matrix& g, const Vector& u) {
        const double x = g(3, 5), y = g(4, 5);
        return vec({u(3) + om * y - r * u(1), u(4) - om * x + r * u(0)});
    };
    s.D2phi = [=](const Matrix&, const Vector&) {
        Matrix d(2, 5);
        d << 0.0, -r, 0.0, 1.0, 0.0, r, 0.0, 0.0, 0.0, 1.0;
        return d;
    };
    s.h = [=](const Matrix&, const Vector& mu) {
        return 0.5 * mu.dot(mu.cwiseQuotient(inertia));
    };
    s.D1h = [](const Matrix&, const Vector&) { return Vector(Vector::Zero(5)); };
    s.D2h = [=](const Matrix&, const Vector& mu) { return Vector(mu.cwiseQuotient(inertia)); };
    s.D22h = [=](const Matrix&, const Vector&) {
        return Matrix(inertia.cwiseInverse().asDiagonal());
    };
    e.lie = s;
    e.element = [](const Vector& c6) {
        Matrix g = Matrix::Identity(6, 6);
        g.topLeftCorner(3, 3) = rodrigues(c6.head(3));
        g(3, 5) = c6(3);
        g(4, 5) = c6(4);
        return g;
    };
    e.coordinate_names = rotation_entry_names();
    e.coordinate_names.push_back("x");
    e.coordinate_names.push_back("y");
    e.coordinates = [](const Matrix& g) {
        Vector out(11);
        out << rotation_entries(g.topLeftCorner(3, 3)), g(3, 5), g(4, 5);
        return out;
    };
    {
        const double x0 = 0.5, y0 = 0.2;
        const Vector w0 = vec({0.1, 0.2, 0.3});
        const double vx = -om * y0 + r * w0(1);
        const double vy = om * x0 - r * w0(0);
        e.presets["default"] = {vec({0.0, 0.0, 0.0, x0, y0}), vec({w0(0), w0(1), w0(2), vx, vy})};
    }
    e.diagnostic_names = {"I_zeta", "I_xi", "I_eta", "moving_energy"};
    e.lie_diagnostics = [=](const Matrix& g, const Vector& u) {
        const double x = g(3, 5), y = g(4, 5);
        const double i1 = u(2);
        const double i2 = r * u(0) - om / (1.0 + a) * x;
        const double i3 = r * u(1) - om / (1.0 + a) * y;
        const double me = 0.5 * (u(3) * u(3) + u(4) * u(4)) +
                          0.5 * a * r * r * u.head(3).squaredNorm() +
                          r * om * (x * u(0) + y * u(1)) - me_factor * om * om * (x * x + y * y);
        return vec({i1, i2, i3, me});
    };
    return e;
}

SystemCatalogEntry harmonic_oscillator(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "oscillator";
    e.params = merge_params(e.name, {{"omega", 1.0}}, overrides);
    const double w2 = e.params.at("omega") * e.params.at("omega");
    VecNHSystem s = natural_system(
        e.name, 1, 0, [w2](const Vector& q) { return 0.5 * w2 * q.squaredNorm(); },
        [w2](const Vector& q) { return Vector(w2 * q); });
    e.vec = s;
    e.presets["default"] = {vec({1.0}), vec({0.0})};
    e.diagnostic_names = {"energy"};
    e.vec_diagnostics = [s](const Vector& q, const Vector& v) { return vec({energy(s, q, v)}); };
    return e;
}

SystemCatalogEntry planar_pendulum(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "pendulum";
    e.params = merge_params(e.name, {{"gravity", 1.0}}, overrides);
    const double grav = e.params.at("gravity");
    VecNHSystem s = natural_system(
        e.name, 2, 0, [grav](const Vector& q) { return grav * q(1); },
        [grav](const Vector&) { return vec({0.0, grav}); });
    e.vec = s;
    PositionConstraint con;
    con.m = 1;
    con.value = [](const Vector& q) { return vec({q.squaredNorm() - 1.0}); };
    con.jacobian = [](const Vector& q) { return Matrix(2.0 * q.transpose()); };
    e.vec_constraint = con;
    e.presets["default"] = {vec({0.6, -0.8}), vec({0.4, 0.3})};
    e.diagnostic_names = {"energy"};
    e.vec_diagnostics = [s](const Vector& q, const Vector& v) { return vec({energy(s, q, v)}); };
    return e;
}

namespace {

/// ℓ = ½ηᵀIη − g e3ᵀRχ on SO(3).
LieNHSystem so3_body(const std::string& name, const Vector& inertia, double grav, const Vector& chi) {
    LieNHSystem s;
    s.name = name;
    s.group = so3_group();
    s.m = 0;
    const Eigen::Vector3d e3(0.0, 0.0, 1.0);
    const Eigen::Vector3d chi3 = chi;
    const auto pot = [=](const Matrix& r) { return grav * e3.dot(r * chi3); };
    // ⟨D1ℓ, ζ⟩ = −g e3ᵀR(ζ × χ) = −g ζ·(χ × Rᵀe3)
    const auto dpot = [=](const Matrix& r) {
        const Eigen::Vector3d rt = r.transpose() * e3;
        return Vector(grav * chi3.cross(rt));
    };
    s.ell = [=](const Matrix& r, const Vector& u) { return 0.5 * u.dot(inertia.cwiseProduct(u)) - pot(r); };
    s.D1ell = [=](const Matrix& r, const Vector&) { return Vector(-dpot(r)); };
    s.D2ell = [=](const Matrix&, const Vector& u) { return Vector(inertia.cwiseProduct(u)); };
    s.D22ell = [=](const Matrix&, const Vector&) { return Matrix(inertia.asDiagonal()); };
    s.h = [=](const Matrix& r, const Vector& mu) { return 0.5 * mu.dot(mu.cwiseQuotient(inertia)) + pot(r); };
    s.D1h = [=](const Matrix& r, const Vector&) { return dpot(r); };
    s.D2h = [=](const Matrix&, const Vector& mu) { return Vector(mu.cwiseQuotient(inertia)); };
    s.D22h = [=](const Matrix&, const Vector&) { return Matrix(inertia.cwiseInverse().asDiagonal()); };
    return s;
}

} // namespace

SystemCatalogEntry rigid_body(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "rigid_body";
    e.kind = SystemKind::lie;
    e.params = merge_params(e.name, {{"I1", 1.0}, {"I2", 2.0}, {"I3", 3.0}, {"gravity", 0.0},
                                     {"chi_x", 0.0}, {"chi_y", 0.0}, {"chi_z", 0.5}},
                            overrides);
    const Vector inertia = vec({e.params.at("I1"), e.params.at("I2"), e.params.at("I3")});
    const Vector chi = vec({e.params.at("chi_x"), e.params.at("chi_y"), e.params.at("chi_z")});
    e.lie = so3_body(e.name, inertia, e.params.at("gravity"), chi);
    e.element = [](const Vector& c) { return rodrigues(c); };
    e.coordinate_names = rotation_entry_names();
    e.coordinates = [](const Matrix& g) { return rotation_entries(g); };
    e.presets["default"] = {vec({0.1, 0.2, 0.3}), vec({0.3, 1.0, 0.2})};
    e.diagnostic_names = {"energy", "momentum_norm"};
    const LieNHSystem s = *e.lie;
    e.lie_diagnostics = [s](const Matrix& g, const Vector& u) {
        return vec({lie_energy(s, g, u), s.D2ell(g, u).norm()});
    };
    return e;
}

SystemCatalogEntry so3_pendulum(const ParamMap& overrides) {
    SystemCatalogEntry e;
    e.name = "so3_pendulum";
    e.kind = SystemKind::lie;
    e.params = merge_params(e.name, {{"gravity", 1.0}, {"I2", 2.0}, {"I3", 3.0}}, overrides);
    const Vector inertia = vec({1.0, e.params.at("I2"), e.params.at("I3")});
    e.lie = so3_body(e.name, inertia, e.params.at("gravity"), vec({0.0, 0.0, -1.0}));
    // body axis e1 kept aligned with the spatial x-axis: rotation about x only
    LiePositionConstraint con;
    con.m = 2;
    con.value = [](const Matrix& r) { return vec({r(1, 0), r(2, 0)}); };
    con.jacobian = [](const Matrix& r) {
        const Eigen::Vector3d e1(1.0, 0.0, 0.0);
        const Eigen::Vector3d r2 = r.row(1).transpose();
        const Eigen::Vector3d r3 = r.row(2).transpose();
        Matrix j(2, 3);
        j.row(0) = e1.cross(r2).transpose();
        j.row(1) = e1.cross(r3).transpose();
        return j;
    };
    e.lie_constraint = con;
    e.element = [](const Vector& c) { return rodrigues(c); };
    e.coordinate_names = rotation_entry_names();
    e.coordinates = [](const Matrix& g) { return rotation_entries(g); };
    e.presets["default"] = {vec({std::asin(0.6), 0.0, 0.0}), vec({0.5, 0.0, 0.0})};
    e.diagnostic_names = {"energy"};
    const LieNHSystem s = *e.lie;
    e.lie_diagnostics = [s](const Matrix& g, const Vector& u) { return vec({lie_energy(s, g, u)}); };
    return e;
}

std::vector<std::string> catalog_names() {
    return {"particle", "cvt", "chaotic", "unicycle", "ball",
            "oscillator", "pendulum", "rigid_body", "so3_pendulum"};
}

SystemCatalogEntry make_system(const std::string& name, const ParamMap& overrides) {
    if (name == "particle") return nonholonomic_particle(overrides);
    if (name == "cvt") return cvt(overrides);
    if (name == "chaotic") {
        ParamMap rest = overrides;
        int m = 3;
        if (auto it = rest.find("m"); it != rest.end()) {
            if (it->second != std::floor(it->second))
                throw InvalidArgument("chaotic: parameter m must be an integer");
            m = static_cast<int>(it->second);
            rest.erase(it);
        }
        return chaotic_system(m, rest);
    }
    if (name == "unicycle") return unicycle(overrides);
    if (name == "ball") return ball_on_turntable(overrides);
    if (name == "oscillator") return harmonic_oscillator(overrides);
    if (name == "pendulum") return planar_pendulum(overrides);
    if (name == "rigid_body") return rigid_body(overrides);
    if (name == "so3_pendulum") return so3_pendulum(overrides);
    throw InvalidArgument("unknown system '" + name + "'");
}

} // namespace nhrk
