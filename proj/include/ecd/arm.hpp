#pragma once

#include <Eigen/Dense>

namespace ecd {

/// Physical constants of the two-link planar arm.
///
/// Joint angles are measured from the horizontal x-axis, gravity acts along
/// -y, and the tip force F is constant in the world frame. The potential
/// reference height H must satisfy H >= l1 + l2 so that both link energies
/// stay strictly positive in every configuration; several downstream
/// quantities (energy ratios, their logarithmic derivatives) divide by them.
struct ArmParameters {
    double m1 = 1.0;    ///< link masses [kg]
    double m2 = 1.0;
    double I1 = 1.0;    ///< link moments of inertia about the COM [kg m^2]
    double I2 = 1.0;
    double l1 = 0.8;    ///< link lengths [m]
    double l2 = 1.0;
    double lc1 = 0.16;  ///< joint-to-COM distances [m]
    double lc2 = 0.25;
    double H = 1.8;     ///< potential reference height [m]
    double g = 9.81;    ///< gravitational acceleration [m/s^2]
    Eigen::Vector2d F = Eigen::Vector2d::Zero();  ///< world-frame tip force [N]

    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// One point of a joint-space trajectory jet.
struct JointState {
    Eigen::Vector2d q = Eigen::Vector2d::Zero();      ///< [rad]
    Eigen::Vector2d qdot = Eigen::Vector2d::Zero();   ///< [rad/s]
    Eigen::Vector2d qddot = Eigen::Vector2d::Zero();  ///< [rad/s^2]
};

/// Per-link energy split at one state.
struct LinkEnergies {
    double K1, K2;  ///< kinetic [J]
    double V1, V2;  ///< potential, measured from height -H [J]
    double E1, E2;  ///< totals K + V [J]
};

/// Cartesian tip position and velocity.
struct TipState {
    Eigen::Vector2d position;
    Eigen::Vector2d velocity;
};

/// Kinetic-energy matrix of link 1: only the (1,1) entry is nonzero and the
/// matrix is constant in q.
Eigen::Matrix2d mass_matrix_link1(const ArmParameters& p);

/// Kinetic-energy matrix of link 2 (point-mass plus rotational terms).
/// Symmetric, positive semidefinite, 2*pi-periodic and even in q2.
Eigen::Matrix2d mass_matrix_link2(double q2, const ArmParameters& p);

/// d/dq2 of mass_matrix_link2.
Eigen::Matrix2d mass_matrix_link2_dq2(double q2, const ArmParameters& p);

/// d^2/dq2^2 of mass_matrix_link2.
Eigen::Matrix2d mass_matrix_link2_dq2dq2(double q2, const ArmParameters& p);

/// Full arm inertia matrix D1 + D2(q2); symmetric positive definite.
Eigen::Matrix2d mass_matrix(const Eigen::Vector2d& q, const ArmParameters& p);

double potential_link1(const Eigen::Vector2d& q, const ArmParameters& p);
double potential_link2(const Eigen::Vector2d& q, const ArmParameters& p);
Eigen::Vector2d potential_link1_gradient(const Eigen::Vector2d& q, const ArmParameters& p);
Eigen::Vector2d potential_link2_gradient(const Eigen::Vector2d& q, const ArmParameters& p);
Eigen::Matrix2d potential_link1_hessian(const Eigen::Vector2d& q, const ArmParameters& p);
Eigen::Matrix2d potential_link2_hessian(const Eigen::Vector2d& q, const ArmParameters& p);

LinkEnergies link_energies(const JointState& s, const ArmParameters& p);

/// Analytic Jacobian of the tip position.
Eigen::Matrix2d tip_jacobian(const Eigen::Vector2d& q, const ArmParameters& p);

TipState end_effector(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                      const ArmParameters& p);

/// Coriolis/centrifugal matrix from the Christoffel symbols of the inertia
/// matrix; satisfies the usual skew symmetry of (Ddot - 2C).
Eigen::Matrix2d coriolis_matrix(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                const ArmParameters& p);

/// Joint torques solving D(q) qddot + C(q,qdot) qdot + grad V(q) = tau + J^T F.
/// Along any trajectory the returned torques satisfy the power balance
/// d/dt(E1 + E2) = tau . qdot + F . v_tip.
Eigen::Vector2d inverse_dynamics(const JointState& s, const ArmParameters& p);

/// Accelerations from torques; inverts the same equation of motion, so
/// composing with inverse_dynamics recovers the input qddot.
Eigen::Vector2d forward_acceleration(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                                     const Eigen::Vector2d& tau, const ArmParameters& p);

}  // namespace ecd
