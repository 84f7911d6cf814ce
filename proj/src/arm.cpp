#include "ecd/arm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ecd {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("ArmParameters: ") + what);
}

}  // namespace

void ArmParameters::validate() const {
    require(std::isfinite(m1) && m1 > 0.0, "m1 must be positive");
    require(std::isfinite(m2) && m2 > 0.0, "m2 must be positive");
    require(std::isfinite(I1) && I1 > 0.0, "I1 must be positive");
    require(std::isfinite(I2) && I2 > 0.0, "I2 must be positive");
    require(std::isfinite(l1) && l1 > 0.0, "l1 must be positive");
    require(std::isfinite(l2) && l2 > 0.0, "l2 must be positive");
    require(std::isfinite(lc1) && lc1 > 0.0 && lc1 <= l1, "lc1 must satisfy 0 < lc1 <= l1");
    require(std::isfinite(lc2) && lc2 > 0.0 && lc2 <= l2, "lc2 must satisfy 0 < lc2 <= l2");
    require(std::isfinite(H) && H >= l1 + l2, "H must satisfy H >= l1 + l2");
    require(std::isfinite(g), "g must be finite");
    require(F.allFinite(), "F must be finite");
}

Eigen::Matrix2d mass_matrix_link1(const ArmParameters& p) {
    Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
    d(0, 0) = p.m1 * p.lc1 * p.lc1 + p.I1;
    return d;
}

Eigen::Matrix2d mass_matrix_link2(double q2, const ArmParameters& p) {
    const double c2 = std::cos(q2);
    const double a = p.m2 * p.lc2 * p.lc2 + p.I2;
    const double b = p.m2 * p.l1 * p.lc2 * c2;
    Eigen::Matrix2d d;
    d(0, 0) = p.m2 * p.l1 * p.l1 + 2.0 * b + a;
    d(0, 1) = a + b;
    d(1, 0) = a + b;
    d(1, 1) = a;
    return d;
}

Eigen::Matrix2d mass_matrix_link2_dq2(double q2, const ArmParameters& p) {
    const double db = -p.m2 * p.l1 * p.lc2 * std::sin(q2);
    Eigen::Matrix2d d;
    d << 2.0 * db, db, db, 0.0;
    return d;
}

Eigen::Matrix2d mass_matrix_link2_dq2dq2(double q2, const ArmParameters& p) {
    const double ddb = -p.m2 * p.l1 * p.lc2 * std::cos(q2);
    Eigen::Matrix2d d;
    d << 2.0 * ddb, ddb, ddb, 0.0;
    return d;
}

Eigen::Matrix2d mass_matrix(const Eigen::Vector2d& q, const ArmParameters& p) {
    return mass_matrix_link1(p) + mass_matrix_link2(q(1), p);
}

double potential_link1(const Eigen::Vector2d& q, const ArmParameters& p) {
    return p.m1 * p.g * (p.H + p.lc1 * std::sin(q(0)));
}

double potential_link2(const Eigen::Vector2d& q, const ArmParameters& p) {
    return p.m2 * p.g * (p.l1 * std::sin(q(0)) + p.lc2 * std::sin(q(0) + q(1)) + p.H);
}

Eigen::Vector2d potential_link1_gradient(const Eigen::Vector2d& q, const ArmParameters& p) {
    return {p.m1 * p.g * p.lc1 * std::cos(q(0)), 0.0};
}

Eigen::Vector2d potential_link2_gradient(const Eigen::Vector2d& q, const ArmParameters& p) {
    const double c1 = std::cos(q(0));
    const double c12 = std::cos(q(0) + q(1));
    return {p.m2 * p.g * (p.l1 * c1 + p.lc2 * c12), p.m2 * p.g * p.lc2 * c12};
}

Eigen::Matrix2d potential_link1_hessian(const Eigen::Vector2d& q, const ArmParameters& p) {
    Eigen::Matrix2d h = Eigen::Matrix2d::Zero();
    h(0, 0) = -p.m1 * p.g * p.lc1 * std::sin(q(0));
    return h;
}

Eigen::Matrix2d potential_link2_hessian(const Eigen::Vector2d& q, const ArmParameters& p) {
    const double s1 = std::sin(q(0));
    const double s12 = std::sin(q(0) + q(1));
    const double a = -p.m2 * p.g * p.lc2 * s12;
    Eigen::Matrix2d h;
    h(0, 0) = -p.m2 * p.g * p.l1 * s1 + a;
    h(0, 1) = a;
    h(1, 0) = a;
    h(1, 1) = a;
    return h;
}

LinkEnergies link_energies(const JointState& s, const ArmParameters& p) {
    LinkEnergies e;
    e.K1 = 0.5 * s.qdot.dot(mass_matrix_link1(p) * s.qdot);
    e.K2 = 0.5 * s.qdot.dot(mass_matrix_link2(s.q(1), p) * s.qdot);
    e.V1 = potential_link1(s.q, p);
    e.V2 = potential_link2(s.q, p);
    e.E1 = e.K1 + e.V1;
    e.E2 = e.K2 + e.V2;
    return e;
}

Eigen::Matrix2d tip_jacobian(const Eigen::Vector2d& q, const ArmParameters& p) {
    const double s1 = std::sin(q(0)), c1 = std::cos(q(0));
    const double s12 = std::sin(q(0) + q(1)), c12 = std::cos(q(0) + q(1));
    Eigen::Matrix2d j;
    j << -p.l1 * s1 - p.l2 * s12, -p.l2 * s12,
          p.l1 * c1 + p.l2 * c12,  p.l2 * c12;
    return j;
}

TipState end_effector(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                      const ArmParameters& p) {
    TipState tip;
    tip.position = {p.l1 * std::cos(q(0)) + p.l2 * std::cos(q(0) + q(1)),
                    p.l1 * std::sin(q(0)) + p.l2 * std::sin(q(0) + q(1))};
    tip.velocity = tip_jacobian(q, p) * qdot;
    return tip;
}

Eigen::Matrix2d coriolis_matrix(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                const ArmParameters& p) {
    // Christoffel form for a two-link chain whose inertia depends on q2 only.
    const double h = -p.m2 * p.l1 * p.lc2 * std::sin(q(1));
    Eigen::Matrix2d c;
    c << h * qdot(1), h * (qdot(0) + qdot(1)),
        -h * qdot(0), 0.0;
    return c;
}

Eigen::Vector2d inverse_dynamics(const JointState& s, const ArmParameters& p) {
    const Eigen::Matrix2d d = mass_matrix(s.q, p);
    const Eigen::Matrix2d c = coriolis_matrix(s.q, s.qdot, p);
    const Eigen::Vector2d grad_v =
        potential_link1_gradient(s.q, p) + potential_link2_gradient(s.q, p);
    const Eigen::Matrix2d j = tip_jacobian(s.q, p);
    return d * s.qddot + c * s.qdot + grad_v - j.transpose() * p.F;
}

Eigen::Vector2d forward_acceleration(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                     const Eigen::Vector2d& tau, const ArmParameters& p) {
    const Eigen::Matrix2d d = mass_matrix(q, p);
    const Eigen::Matrix2d c = coriolis_matrix(q, qdot, p);
    const Eigen::Vector2d grad_v =
        potential_link1_gradient(q, p) + potential_link2_gradient(q, p);
    const Eigen::Vector2d rhs = tau + tip_jacobian(q, p).transpose() * p.F - c * qdot - grad_v;
    return d.ldlt().solve(rhs);
}

}  // namespace ecd
