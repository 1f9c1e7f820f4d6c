#pragma once

#include "nhrk/tableau.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace nhrk {

/// Matrix Lie group with algebra coordinates in ℝ^k.
struct GroupDescriptor {
    std::string name;
    int d = 0;  ///< matrix dimension
    int k = 0;  ///< algebra dimension
    std::function<Matrix(const Vector&)> hat;
    std::function<Vector(const Matrix&)> vee;
    std::function<Matrix(const Vector&)> exp;  ///< closed form
    std::function<Vector(const Matrix&)> log;  ///< closed form, near the identity
    std::vector<Matrix> ad_basis;              ///< ad_{e_a} as k×k matrices
    struct Entry {
        int row, col;
        double value;
    };
    std::vector<std::vector<Entry>> hat_entries;  ///< nonzeros of hat(e_a)
    std::vector<std::vector<Entry>> vee_entries;  ///< vee(M)_a = Σ value·M(row, col)
    /// Bound on ‖ξ‖ for inverse retraction; infinite for translation groups.
    double domain_radius = 1.0;

    Matrix identity() const { return Matrix::Identity(d, d); }
    Matrix compose(const Matrix& g, const Matrix& h) const { return g * h; }
    Matrix inverse(const Matrix& g) const;

    /// ad_ξ as a k×k matrix.
    Matrix ad(const Vector& xi) const;
    /// Ad_g as a k×k matrix.
    Matrix Ad(const Matrix& g) const;
    /// Ad*_g μ, the transpose of Ad_g applied to μ.
    Vector coadjoint(const Matrix& g, const Vector& mu) const;
    /// k×k matrix with columns vee(a hat(e_j) b).
    Matrix sandwich(const Matrix& a, const Matrix& b) const;
};

using GroupPtr = std::shared_ptr<const GroupDescriptor>;

GroupPtr so3_group();
GroupPtr se2_group();
/// (ℝ^k, +) as (k+1)×(k+1) translation matrices.
GroupPtr translation_group(int k);
/// Block-diagonal product; algebra coordinates are concatenated.
GroupPtr product_group(const GroupPtr& g1, const GroupPtr& g2);

Matrix so3_hat(const Vector& w);
Vector so3_vee(const Matrix& m);
Matrix rodrigues(const Vector& w);

enum class RetractionKind { exp, cay };

std::string to_string(RetractionKind kind);
RetractionKind retraction_from_string(const std::string& name);

/// Retraction τ: 𝔤 → G with its left-trivialized tangents.
class Retraction {
public:
    Retraction(GroupPtr group, RetractionKind kind);

    const GroupDescriptor& group() const { return *group_; }
    const GroupPtr& group_ptr() const { return group_; }
    RetractionKind kind() const { return kind_; }

    Matrix tau(const Vector& xi) const;
    Vector tau_inv(const Matrix& g) const;

    /// d^Lτ_ξ as a k×k matrix.
    Matrix dtau(const Vector& xi) const;
    /// (d^Lτ_ξ)^{-1} as a k×k matrix.
    Matrix dtau_inv(const Vector& xi) const;
    /// dd^Lτ_ξ(η, δ), defined by ∂_ξ(d^Lτ_ξ η)δ = d^Lτ_ξ dd^Lτ_ξ(η, δ).
    Vector ddtau(const Vector& xi, const Vector& eta, const Vector& delta) const;
    /// (dd^Lτ_ξ)^*(η, Π): the covector δ ↦ ⟨Π, dd^Lτ_ξ(η, δ)⟩.
    Vector ddtau_adjoint(const Vector& xi, const Vector& eta, const Vector& pi) const;

    /// Throws RetractionDomain when ‖ξ‖ exceeds the group's domain radius.
    void check_domain(const Vector& xi) const;

private:
    Matrix cay(const Vector& xi) const;
    Vector ddexp(const Vector& xi, const Vector& eta, const Vector& delta) const;

    GroupPtr group_;
    RetractionKind kind_;
};

/// cay(ξ) = (I − ξ/2)^{-1}(I + ξ/2) for a raw algebra matrix.
Matrix cay_matrix(const Matrix& xi_hat);

} // namespace nhrk
