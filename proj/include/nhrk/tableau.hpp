#pragma once

#include <Eigen/Dense>

namespace nhrk {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Runge-Kutta coefficients (a, b, c) for an s-stage method.
struct ButcherTableau {
    Matrix a;
    Vector b;
    Vector c;

    int stages() const { return static_cast<int>(b.size()); }
    /// Max deviation of the row sums of a from c.
    double consistency_residual() const;
    /// |Σ b_j − 1|.
    double order1_residual() const;
};

struct OrderCertificate {
    int p = 0, q = 0, r = 0;
    int p_hat = 0, q_hat = 0, r_hat = 0;
    int c_chat = 0;  ///< CĈ
    int d_dhat = 0;  ///< DD̂
    int chat_c = 0;  ///< ĈC
    int dhat_d = 0;  ///< D̂D
    double r_inf = 0.0;
};

/// Residuals of the structural hypotheses; flags use tolerance 1e-12.
struct HypothesisReport {
    double h1 = 0.0;        ///< max |a_1j|
    double h2_sigma = 0.0;  ///< smallest singular value of the trailing (s-1)x(s-1) block
    double h3 = 0.0;        ///< max |a_sj − b_j|
    double h1p = 0.0;       ///< max |â_is|
    double h2p = 0.0;       ///< max |â_i1 − b̂_1|

    bool primal_ok() const;
    bool dual_ok() const;
    bool ok() const { return primal_ok() && dual_ok(); }
};

struct PartitionedTableau {
    ButcherTableau primal;
    ButcherTableau dual;
    OrderCertificate cert;
    bool lobatto = false;

    int stages() const { return primal.stages(); }
    /// max |b_i â_ij + b̂_j a_ji − b_i b̂_j| together with max |b̂ − b|.
    double symplecticity_residual() const;
    HypothesisReport hypotheses() const;
    /// Throws HypothesisViolation unless H1-H3 and H1'-H2' hold.
    void require_lobatto_structure() const;
};

Vector lobatto_nodes(int s);

ButcherTableau tableau_from_collocation(const Vector& c);

ButcherTableau symplectic_conjugate(const ButcherTableau& t);

/// Pairs a primal tableau with its symplectic conjugate and certifies it.
PartitionedTableau make_partitioned(const ButcherTableau& primal, int kmax = 0);

/// s-stage Lobatto IIIA/IIIB pair.
PartitionedTableau lobatto_pair(int s);

OrderCertificate certify(const PartitionedTableau& t, int kmax);

double stability_at_infinity(const ButcherTableau& t);

/// Predicted global orders of the nonholonomic Lobatto scheme: (q and p, λ).
std::pair<int, int> predicted_orders(int s);

} // namespace nhrk
