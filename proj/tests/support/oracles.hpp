#pragma once

// Independent numerical oracles used only by the test suites. Everything here
// deliberately avoids the code paths it is used to check: exp/log go through
// Eigen's Pade-based matrix functions or a long Taylor series, differentials
// go through central differences on manifold curves, and trajectory references
// go through a classical RK4 in the ambient embedding.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <functional>

#include "eqobs/lie_group.hpp"
#include "eqobs/manifold.hpp"

namespace oracle {

// Scaling-and-squaring Taylor series, order 30 at scale threshold 1/16.
inline Eigen::MatrixXd series_exp(const Eigen::MatrixXd& a) {
    int s = 0;
    double nrm = a.norm();
    while (nrm > 0.0625 && s < 80) {
        nrm /= 2.0;
        ++s;
    }
    const Eigen::MatrixXd as = a / std::pow(2.0, s);
    Eigen::MatrixXd term = Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::MatrixXd sum = term;
    for (int k = 1; k <= 30; ++k) {
        term = term * as / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

inline Eigen::MatrixXd pade_exp(const Eigen::MatrixXd& a) { return a.exp(); }
inline Eigen::MatrixXd pade_log(const Eigen::MatrixXd& a) { return a.log(); }

// Central difference of xi -> phi_X(xi) along the geodesic through (xi, eta).
inline eqobs::TangentVector fd_action_state(const eqobs::GroupAction& action,
                                            const eqobs::GroupElement& x,
                                            const eqobs::TangentVector& eta, double h = 1e-6) {
    const auto plus = act(action, x, eqobs::geodesic(eta.base, eta.vec, h));
    const auto minus = act(action, x, eqobs::geodesic(eta.base, eta.vec, -h));
    return {act(action, x, eta.base), (plus.coords - minus.coords) / (2.0 * h)};
}

// Central difference of t -> phi(exp(t u), xi) at t = 0.
inline eqobs::TangentVector fd_action_group(const eqobs::GroupAction& action,
                                            const eqobs::ManifoldPoint& xi,
                                            const eqobs::AlgebraElement& u, double h = 1e-6) {
    eqobs::AlgebraElement up = u, um = u;
    up.coords *= h;
    um.coords *= -h;
    const auto plus = act(action, eqobs::exp(up), xi);
    const auto minus = act(action, eqobs::exp(um), xi);
    return {xi, (plus.coords - minus.coords) / (2.0 * h)};
}

using Field = std::function<eqobs::TangentVector(const eqobs::ManifoldPoint&)>;

// Extrinsic directional derivative of a tangent field along a manifold curve;
// the antisymmetrised combination below is the Lie bracket of the fields.
inline Eigen::VectorXd fd_field_derivative(const Field& f, const eqobs::ManifoldPoint& xi,
                                           const Eigen::VectorXd& dir, double h = 1e-5) {
    const auto plus = f(eqobs::geodesic(xi, dir, h));
    const auto minus = f(eqobs::geodesic(xi, dir, -h));
    return (plus.vec - minus.vec) / (2.0 * h);
}

inline eqobs::TangentVector fd_field_bracket(const Field& f, const Field& g,
                                             const eqobs::ManifoldPoint& xi, double h = 1e-5) {
    const Eigen::VectorXd df_g = fd_field_derivative(f, xi, g(xi).vec, h);
    const Eigen::VectorXd dg_f = fd_field_derivative(g, xi, f(xi).vec, h);
    return {xi, df_g - dg_f};
}

// Classical RK4 on the ambient embedding; reference path for on-manifold
// integrators. The right-hand side need not preserve the constraint exactly,
// which is the point: it is a different integration route.
inline Eigen::VectorXd ambient_rk4(
    const std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>& rhs,
    Eigen::VectorXd y, double t0, double t1, double h) {
    double t = t0;
    while (t < t1 - 1e-12) {
        const double step = std::min(h, t1 - t);
        const Eigen::VectorXd k1 = rhs(t, y);
        const Eigen::VectorXd k2 = rhs(t + step / 2, y + step / 2 * k1);
        const Eigen::VectorXd k3 = rhs(t + step / 2, y + step / 2 * k2);
        const Eigen::VectorXd k4 = rhs(t + step, y + step * k3);
        y += step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
        t += step;
    }
    return y;
}

}  // namespace oracle
