#pragma once

#include <Eigen/Dense>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "eqobs/errors.hpp"

namespace eqobs {

enum class GroupKind { SO3, SE3, SL3, Product };

/// A matrix Lie group given by its algebra basis B_1..B_n inside the space of
/// matrix_size x matrix_size real matrices. Basis matrices are linearly
/// independent and the algebra is closed under the commutator (validated at
/// construction, tolerance 1e-12).
struct LieGroupDescriptor {
    std::string name;
    GroupKind kind = GroupKind::SO3;
    int group_dim = 0;
    int matrix_size = 0;
    std::vector<Eigen::MatrixXd> algebra_basis;

    // Factor descriptors and their block offsets; empty unless kind == Product.
    std::vector<std::shared_ptr<const LieGroupDescriptor>> factors;
    std::vector<int> factor_offsets;        // matrix block offsets
    std::vector<int> factor_coord_offsets;  // coordinate offsets

    // vec(B_i) stacked as columns, and its left pseudo-inverse for vee().
    Eigen::MatrixXd basis_mat;
    Eigen::MatrixXd basis_pinv;
};

using DescriptorPtr = std::shared_ptr<const LieGroupDescriptor>;

DescriptorPtr so3();
DescriptorPtr se3();
DescriptorPtr sl3();
DescriptorPtr direct_product(const DescriptorPtr& a, const DescriptorPtr& b);

/// Validates basis independence and commutator closure; used by the factories
/// above and available for custom groups.
DescriptorPtr make_descriptor(std::string name, GroupKind kind, int matrix_size,
                              std::vector<Eigen::MatrixXd> basis);

struct GroupElement {
    DescriptorPtr desc;
    Eigen::MatrixXd matrix;
};

struct AlgebraElement {
    DescriptorPtr desc;
    Eigen::VectorXd coords;

    Eigen::MatrixXd matrix() const;  // sum coords_i * B_i
    double norm() const { return coords.norm(); }
};

GroupElement identity(const DescriptorPtr& desc);
GroupElement compose(const GroupElement& a, const GroupElement& b);
GroupElement inverse(const GroupElement& a);

AlgebraElement hat(const DescriptorPtr& desc, const Eigen::VectorXd& coords);
AlgebraElement zero_algebra(const DescriptorPtr& desc);

/// Coordinates of an ambient matrix in the algebra basis (least squares).
/// If residual_out is null and the projection residual exceeds 1e-9 a
/// ConsistencyError is thrown; otherwise the residual is reported.
Eigen::VectorXd vee(const DescriptorPtr& desc, const Eigen::MatrixXd& m,
                    double* residual_out = nullptr);

/// exp: Rodrigues for SO(3), rotation + left Jacobian for SE(3),
/// scaling-and-squaring Taylor (order 12) for SL(3), blockwise for products.
GroupElement exp(const AlgebraElement& u);

/// Principal-branch log; throws BranchCutError at/near the branch boundary
/// (SO(3)/SE(3): rotation angle >= pi - 1e-6).
AlgebraElement log(const GroupElement& a);

/// Ad_X u, computed as X * hat(u) * X^-1 projected back onto the basis.
AlgebraElement adjoint(const GroupElement& x, const AlgebraElement& u);

/// Left-induced bracket: matrix commutator re-expressed in basis coordinates.
AlgebraElement bracket(const AlgebraElement& u, const AlgebraElement& v);

enum class Side { Left, Right };

/// Differential of left/right translation on tangent matrices:
/// left: W -> A*W (at A*B), right: W -> W*A (at B*A).
Eigen::MatrixXd translate_tangent(Side side, const GroupElement& a, const Eigen::MatrixXd& w);

/// Distance from the group submanifold: SO(3) ||R^T R - I||_F (infinite when
/// det <= 0), SE(3) adds the affine bottom row, SL(3) |det - 1|, products
/// take the max over factors.
double membership_residual(const GroupElement& a);

/// Projects back onto the group: polar projection of rotation blocks,
/// determinant rescaling for SL(3). Used by the integrators' periodic
/// renormalization, never applied implicitly by the pure operations.
GroupElement renormalize(const GroupElement& a);

/// Deterministic given the rng state; scale 0 gives the zero element.
AlgebraElement random_algebra(const DescriptorPtr& desc, std::mt19937_64& rng, double scale);

/// exp of a random algebra element with a fixed internal scale; always
/// satisfies the membership invariant.
GroupElement random_element(const DescriptorPtr& desc, std::mt19937_64& rng);

namespace detail {
// Shared kernels, exposed for the SL(3) path and for error messages.
Eigen::Matrix3d skew3(const Eigen::Vector3d& w);
Eigen::Matrix3d exp_so3(const Eigen::Vector3d& w);
Eigen::Vector3d log_so3(const Eigen::Matrix3d& r);
Eigen::MatrixXd exp_taylor_ss(const Eigen::MatrixXd& a, int order);
Eigen::MatrixXd log_iss(const Eigen::MatrixXd& a);
void require_same_descriptor(const DescriptorPtr& a, const DescriptorPtr& b, const char* op);
}  // namespace detail

}  // namespace eqobs
