#include "eqobs/lie_group.hpp"

#include <cmath>

namespace eqobs {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace detail {

void require_same_descriptor(const DescriptorPtr& a, const DescriptorPtr& b, const char* op) {
    if (!a || !b || a->name != b->name) {
        throw UsageError(std::string(op) + ": descriptor mismatch (" + (a ? a->name : "null") +
                         " vs " + (b ? b->name : "null") + ")");
    }
}

Matrix3d skew3(const Vector3d& w) {
    Matrix3d m;
    m << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
    return m;
}

Matrix3d exp_so3(const Vector3d& w) {
    const double th = w.norm();
    double a, b;  // sin(th)/th, (1-cos(th))/th^2
    if (th < 1e-4) {
        const double t2 = th * th;
        a = 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
    } else {
        a = std::sin(th) / th;
        b = (1.0 - std::cos(th)) / (th * th);
    }
    const Matrix3d wx = skew3(w);
    return Matrix3d::Identity() + a * wx + b * wx * wx;
}

Vector3d log_so3(const Matrix3d& r) {
    const double c = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
    const double th = std::acos(c);
    if (th >= M_PI - 1e-6) {
        throw BranchCutError("SO(3) log near angle pi (angle = " + std::to_string(th) + ")");
    }
    const Vector3d u(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
    double factor;  // th / (2 sin th)
    if (th < 1e-4) {
        const double t2 = th * th;
        factor = 0.5 * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
    } else {
        factor = th / (2.0 * std::sin(th));
    }
    return factor * u;
}

// Left Jacobian of SO(3) and its inverse; used by the SE(3) closed forms.
static Matrix3d so3_left_jacobian(const Vector3d& w) {
    const double th = w.norm();
    double b, c;  // (1-cos)/th^2, (th-sin)/th^3
    if (th < 1e-4) {
        const double t2 = th * th;
        b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
    } else {
        b = (1.0 - std::cos(th)) / (th * th);
        c = (th - std::sin(th)) / (th * th * th);
    }
    const Matrix3d wx = skew3(w);
    return Matrix3d::Identity() + b * wx + c * wx * wx;
}

static Matrix3d so3_left_jacobian_inv(const Vector3d& w) {
    const double th = w.norm();
    double d;  // (1 - (th/2) cot(th/2)) / th^2
    if (th < 1e-4) {
        const double t2 = th * th;
        d = 1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0;
    } else {
        const double half = th / 2.0;
        d = (1.0 - half * std::cos(half) / std::sin(half)) / (th * th);
    }
    const Matrix3d wx = skew3(w);
    return Matrix3d::Identity() - 0.5 * wx + d * wx * wx;
}

MatrixXd exp_taylor_ss(const MatrixXd& a, int order) {
    const int n = static_cast<int>(a.rows());
    int squarings = 0;
    double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // infinity norm
    while (nrm > 0.25 && squarings < 60) {
        nrm /= 2.0;
        ++squarings;
    }
    const MatrixXd as = a / std::pow(2.0, squarings);
    MatrixXd term = MatrixXd::Identity(n, n);
    MatrixXd sum = term;
    for (int k = 1; k <= order; ++k) {
        term = term * as / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i) sum = sum * sum;
    return sum;
}

// Denman-Beavers square root; converges for matrices with no eigenvalues on
// the closed negative real axis.
static MatrixXd sqrtm_db(const MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    MatrixXd y = a;
    MatrixXd z = MatrixXd::Identity(n, n);
    for (int iter = 0; iter < 60; ++iter) {
        const MatrixXd yn = 0.5 * (y + z.inverse());
        const MatrixXd zn = 0.5 * (z + y.inverse());
        const double delta = (yn - y).norm();
        y = yn;
        z = zn;
        if (delta < 1e-15 * std::max(1.0, y.norm())) return y;
    }
    throw BranchCutError("matrix square root iteration did not converge");
}

MatrixXd log_iss(const MatrixXd& a) {
    const int n = static_cast<int>(a.rows());
    const MatrixXd id = MatrixXd::Identity(n, n);
    MatrixXd b = a;
    int roots = 0;
    while ((b - id).norm() > 0.25) {
        if (roots >= 40) throw BranchCutError("log outside the principal-branch domain");
        b = sqrtm_db(b);
        ++roots;
    }
    const MatrixXd x = b - id;
    MatrixXd term = x;
    MatrixXd sum = x;
    for (int k = 2; k <= 48; ++k) {
        term = term * x;
        sum += (k % 2 == 0 ? -1.0 : 1.0) / static_cast<double>(k) * term;
        if (term.norm() / k < 1e-18) break;
    }
    return std::pow(2.0, roots) * sum;
}

}  // namespace detail

using namespace detail;

// ---------------------------------------------------------------------------
// Descriptors

DescriptorPtr make_descriptor(std::string name, GroupKind kind, int matrix_size,
                              std::vector<MatrixXd> basis) {
    auto d = std::make_shared<LieGroupDescriptor>();
    d->name = std::move(name);
    d->kind = kind;
    d->matrix_size = matrix_size;
    d->group_dim = static_cast<int>(basis.size());
    d->algebra_basis = std::move(basis);

    const int s2 = matrix_size * matrix_size;
    d->basis_mat.resize(s2, d->group_dim);
    for (int i = 0; i < d->group_dim; ++i) {
        if (d->algebra_basis[i].rows() != matrix_size || d->algebra_basis[i].cols() != matrix_size) {
            throw UsageError("basis matrix " + std::to_string(i) + " has wrong size");
        }
        d->basis_mat.col(i) = Eigen::Map<const VectorXd>(d->algebra_basis[i].data(), s2);
    }

    // Linear independence, and cache the projector used by vee().
    Eigen::JacobiSVD<MatrixXd> svd(d->basis_mat, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.singularValues().minCoeff() < 1e-12 * svd.singularValues().maxCoeff()) {
        throw ConstructionError("algebra basis is not linearly independent");
    }
    d->basis_pinv = (d->basis_mat.transpose() * d->basis_mat).ldlt().solve(d->basis_mat.transpose());

    // Commutator closure to 1e-12.
    for (int i = 0; i < d->group_dim; ++i) {
        for (int j = i + 1; j < d->group_dim; ++j) {
            const MatrixXd c = d->algebra_basis[i] * d->algebra_basis[j] -
                               d->algebra_basis[j] * d->algebra_basis[i];
            const VectorXd cv = Eigen::Map<const VectorXd>(c.data(), s2);
            const double res = (d->basis_mat * (d->basis_pinv * cv) - cv).norm();
            if (res > 1e-12 * std::max(1.0, c.norm())) {
                throw ConstructionError("algebra not closed under commutator: [B" +
                                        std::to_string(i) + ",B" + std::to_string(j) +
                                        "] leaves the span (residual " + std::to_string(res) + ")");
            }
        }
    }
    return d;
}

DescriptorPtr so3() {
    static const DescriptorPtr d = [] {
        std::vector<MatrixXd> basis;
        for (int i = 0; i < 3; ++i) basis.push_back(skew3(Vector3d::Unit(i)));
        return make_descriptor("SO3", GroupKind::SO3, 3, std::move(basis));
    }();
    return d;
}

DescriptorPtr se3() {
    static const DescriptorPtr d = [] {
        std::vector<MatrixXd> basis;
        for (int i = 0; i < 3; ++i) {  // rotation generators first
            MatrixXd b = MatrixXd::Zero(4, 4);
            b.topLeftCorner<3, 3>() = skew3(Vector3d::Unit(i));
            basis.push_back(b);
        }
        for (int i = 0; i < 3; ++i) {  // then translations
            MatrixXd b = MatrixXd::Zero(4, 4);
            b(i, 3) = 1.0;
            basis.push_back(b);
        }
        return make_descriptor("SE3", GroupKind::SE3, 4, std::move(basis));
    }();
    return d;
}

DescriptorPtr sl3() {
    static const DescriptorPtr d = [] {
        std::vector<MatrixXd> basis;
        const auto unit = [](int r, int c) {
            MatrixXd m = MatrixXd::Zero(3, 3);
            m(r, c) = 1.0;
            return m;
        };
        basis.push_back(unit(0, 1));
        basis.push_back(unit(1, 0));
        basis.push_back(unit(0, 2));
        basis.push_back(unit(2, 0));
        basis.push_back(unit(1, 2));
        basis.push_back(unit(2, 1));
        MatrixXd h1 = MatrixXd::Zero(3, 3);
        h1(0, 0) = 1.0;
        h1(1, 1) = -1.0;
        basis.push_back(h1);
        MatrixXd h2 = MatrixXd::Zero(3, 3);
        h2(1, 1) = 1.0;
        h2(2, 2) = -1.0;
        basis.push_back(h2);
        return make_descriptor("SL3", GroupKind::SL3, 3, std::move(basis));
    }();
    return d;
}

DescriptorPtr direct_product(const DescriptorPtr& a, const DescriptorPtr& b) {
    const int s = a->matrix_size + b->matrix_size;
    std::vector<MatrixXd> basis;
    for (const auto& m : a->algebra_basis) {
        MatrixXd e = MatrixXd::Zero(s, s);
        e.topLeftCorner(a->matrix_size, a->matrix_size) = m;
        basis.push_back(e);
    }
    for (const auto& m : b->algebra_basis) {
        MatrixXd e = MatrixXd::Zero(s, s);
        e.bottomRightCorner(b->matrix_size, b->matrix_size) = m;
        basis.push_back(e);
    }
    auto d = std::const_pointer_cast<LieGroupDescriptor>(
        make_descriptor(a->name + "x" + b->name, GroupKind::Product, s, std::move(basis)));
    d->factors = {a, b};
    d->factor_offsets = {0, a->matrix_size};
    d->factor_coord_offsets = {0, a->group_dim};
    return d;
}

// ---------------------------------------------------------------------------
// Elements and pure operations

MatrixXd AlgebraElement::matrix() const {
    MatrixXd m = MatrixXd::Zero(desc->matrix_size, desc->matrix_size);
    for (int i = 0; i < desc->group_dim; ++i) m += coords[i] * desc->algebra_basis[i];
    return m;
}

GroupElement identity(const DescriptorPtr& desc) {
    return {desc, MatrixXd::Identity(desc->matrix_size, desc->matrix_size)};
}

GroupElement compose(const GroupElement& a, const GroupElement& b) {
    require_same_descriptor(a.desc, b.desc, "compose");
    return {a.desc, a.matrix * b.matrix};
}

GroupElement inverse(const GroupElement& a) {
    const double det = a.matrix.determinant();
    if (!std::isfinite(det) || std::abs(det) < 1e-12) {
        throw UsageError("inverse of a singular matrix; corrupted group element");
    }
    return {a.desc, a.matrix.inverse()};
}

AlgebraElement hat(const DescriptorPtr& desc, const VectorXd& coords) {
    if (coords.size() != desc->group_dim) {
        throw UsageError("hat: expected " + std::to_string(desc->group_dim) + " coordinates, got " +
                         std::to_string(coords.size()));
    }
    return {desc, coords};
}

AlgebraElement zero_algebra(const DescriptorPtr& desc) {
    return {desc, VectorXd::Zero(desc->group_dim)};
}

VectorXd vee(const DescriptorPtr& desc, const MatrixXd& m, double* residual_out) {
    const int s2 = desc->matrix_size * desc->matrix_size;
    const Eigen::Map<const VectorXd> mv(m.data(), s2);
    const VectorXd x = desc->basis_pinv * mv;
    const double residual = (desc->basis_mat * x - mv).norm();
    if (residual_out) {
        *residual_out = residual;
    } else if (residual > 1e-9 * std::max(1.0, m.norm())) {
        throw ConsistencyError("matrix leaves the algebra span of " + desc->name +
                               " (residual " + std::to_string(residual) + ")");
    }
    return x;
}

GroupElement exp(const AlgebraElement& u) {
    const auto& d = u.desc;
    switch (d->kind) {
        case GroupKind::SO3:
            return {d, exp_so3(u.coords.head<3>())};
        case GroupKind::SE3: {
            const Vector3d w = u.coords.head<3>();
            const Vector3d rho = u.coords.tail<3>();
            MatrixXd m = MatrixXd::Identity(4, 4);
            m.topLeftCorner<3, 3>() = exp_so3(w);
            m.topRightCorner<3, 1>() = so3_left_jacobian(w) * rho;
            return {d, m};
        }
        case GroupKind::SL3:
            return {d, exp_taylor_ss(u.matrix(), 12)};
        case GroupKind::Product: {
            MatrixXd m = MatrixXd::Identity(d->matrix_size, d->matrix_size);
            for (size_t f = 0; f < d->factors.size(); ++f) {
                const auto& fd = d->factors[f];
                const AlgebraElement uf{fd, u.coords.segment(d->factor_coord_offsets[f], fd->group_dim)};
                m.block(d->factor_offsets[f], d->factor_offsets[f], fd->matrix_size, fd->matrix_size) =
                    exp(uf).matrix;
            }
            return {d, m};
        }
    }
    throw UsageError("exp: unknown group kind");
}

AlgebraElement log(const GroupElement& a) {
    const auto& d = a.desc;
    switch (d->kind) {
        case GroupKind::SO3: {
            VectorXd c = log_so3(a.matrix.topLeftCorner<3, 3>());
            return {d, c};
        }
        case GroupKind::SE3: {
            const Vector3d w = log_so3(a.matrix.topLeftCorner<3, 3>());
            VectorXd c(6);
            c.head<3>() = w;
            c.tail<3>() = so3_left_jacobian_inv(w) * a.matrix.topRightCorner<3, 1>();
            return {d, c};
        }
        case GroupKind::SL3:
            return {d, vee(d, log_iss(a.matrix))};
        case GroupKind::Product: {
            VectorXd c(d->group_dim);
            for (size_t f = 0; f < d->factors.size(); ++f) {
                const auto& fd = d->factors[f];
                const GroupElement af{
                    fd, a.matrix.block(d->factor_offsets[f], d->factor_offsets[f], fd->matrix_size,
                                       fd->matrix_size)};
                c.segment(d->factor_coord_offsets[f], fd->group_dim) = log(af).coords;
            }
            return {d, c};
        }
    }
    throw UsageError("log: unknown group kind");
}

AlgebraElement adjoint(const GroupElement& x, const AlgebraElement& u) {
    require_same_descriptor(x.desc, u.desc, "adjoint");
    const MatrixXd conj = x.matrix * u.matrix() * inverse(x).matrix;
    return {x.desc, vee(x.desc, conj)};
}

AlgebraElement bracket(const AlgebraElement& u, const AlgebraElement& v) {
    require_same_descriptor(u.desc, v.desc, "bracket");
    const MatrixXd um = u.matrix();
    const MatrixXd vm = v.matrix();
    return {u.desc, vee(u.desc, um * vm - vm * um)};
}

MatrixXd translate_tangent(Side side, const GroupElement& a, const MatrixXd& w) {
    if (w.rows() != a.desc->matrix_size || w.cols() != a.desc->matrix_size) {
        throw UsageError("translate_tangent: tangent matrix size mismatch");
    }
    return side == Side::Left ? MatrixXd(a.matrix * w) : MatrixXd(w * a.matrix);
}

double membership_residual(const GroupElement& a) {
    const auto& d = a.desc;
    switch (d->kind) {
        case GroupKind::SO3: {
            const Matrix3d r = a.matrix.topLeftCorner<3, 3>();
            if (r.determinant() <= 0.0) return std::numeric_limits<double>::infinity();
            return (r.transpose() * r - Matrix3d::Identity()).norm();
        }
        case GroupKind::SE3: {
            const Matrix3d r = a.matrix.topLeftCorner<3, 3>();
            const double rot = (r.transpose() * r - Matrix3d::Identity()).norm();
            Eigen::RowVector4d bottom(0, 0, 0, 1);
            const double row = (a.matrix.row(3) - bottom).norm();
            if (r.determinant() <= 0.0) return std::numeric_limits<double>::infinity();
            return std::max(rot, row);
        }
        case GroupKind::SL3:
            return std::abs(a.matrix.determinant() - 1.0);
        case GroupKind::Product: {
            double res = 0.0;
            for (size_t f = 0; f < d->factors.size(); ++f) {
                const auto& fd = d->factors[f];
                const GroupElement af{
                    fd, a.matrix.block(d->factor_offsets[f], d->factor_offsets[f], fd->matrix_size,
                                       fd->matrix_size)};
                res = std::max(res, membership_residual(af));
            }
            return res;
        }
    }
    throw UsageError("membership_residual: unknown group kind");
}

static Matrix3d polar_rotation(const Matrix3d& r) {
    Eigen::JacobiSVD<Matrix3d> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Matrix3d p = svd.matrixU() * svd.matrixV().transpose();
    if (p.determinant() < 0.0) {
        Matrix3d u = svd.matrixU();
        u.col(2) *= -1.0;
        p = u * svd.matrixV().transpose();
    }
    return p;
}

GroupElement renormalize(const GroupElement& a) {
    const auto& d = a.desc;
    switch (d->kind) {
        case GroupKind::SO3:
            return {d, polar_rotation(a.matrix.topLeftCorner<3, 3>())};
        case GroupKind::SE3: {
            MatrixXd m = a.matrix;
            m.topLeftCorner<3, 3>() = polar_rotation(a.matrix.topLeftCorner<3, 3>());
            m.row(3) << 0, 0, 0, 1;
            return {d, m};
        }
        case GroupKind::SL3: {
            const double det = a.matrix.determinant();
            if (det <= 0.0) throw UsageError("renormalize: SL(3) element with nonpositive determinant");
            return {d, a.matrix / std::cbrt(det)};
        }
        case GroupKind::Product: {
            MatrixXd m = a.matrix;
            for (size_t f = 0; f < d->factors.size(); ++f) {
                const auto& fd = d->factors[f];
                const GroupElement af{
                    fd, a.matrix.block(d->factor_offsets[f], d->factor_offsets[f], fd->matrix_size,
                                       fd->matrix_size)};
                m.block(d->factor_offsets[f], d->factor_offsets[f], fd->matrix_size, fd->matrix_size) =
                    renormalize(af).matrix;
            }
            return {d, m};
        }
    }
    throw UsageError("renormalize: unknown group kind");
}

AlgebraElement random_algebra(const DescriptorPtr& desc, std::mt19937_64& rng, double scale) {
    if (scale < 0.0 || !std::isfinite(scale)) throw UsageError("random_algebra: invalid scale");
    VectorXd c(desc->group_dim);
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (int i = 0; i < desc->group_dim; ++i) c[i] = (scale == 0.0) ? 0.0 : dist(rng);
    return {desc, c};
}

GroupElement random_element(const DescriptorPtr& desc, std::mt19937_64& rng) {
    return exp(random_algebra(desc, rng, 0.8));
}

}  // namespace eqobs
