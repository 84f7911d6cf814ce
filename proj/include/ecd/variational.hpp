#pragma once

#include "ecd/energyflow.hpp"

namespace ecd {

struct NotAnExtremum : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IndefiniteP : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoPositiveSamples : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Euler-Lagrange residual d/dt(dF/dqdot) - dF/dq of the energy-ratio
/// integrand F = E2/E1, evaluated on the jet (q, qdot, qddot). All partials
/// are closed-form; the total time derivative is expanded through the jet by
/// the chain rule. At a rest point the residual reduces to -grad(V2/V1).
Eigen::Vector2d euler_residual(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                               const Eigen::Vector2d& qddot, const ArmParameters& p);

/// Accessory-problem matrices of the second variation.
struct PQ {
    Eigen::Matrix2d P;
    Eigen::Matrix2d Q;
};

/// P = F_qdqd / 2 and Q = F_qq / 2 of F = E2/E1 at the rest extremum q_star
/// (the d/dt F_qqd part of Q vanishes there since qdot = qddot = 0). Analytic
/// second derivatives are cross-checked against central differences before
/// returning. Throws NotAnExtremum when the residual at (q_star, 0, 0)
/// exceeds 1e-8.
PQ pq_matrices(const Eigen::Vector2d& q_star, const ArmParameters& p);

/// Result of the conjugate-point search on the accessory system
/// P hddot = Q h, h(0) = 0, hdot(0) = I.
struct JacobiCheck {
    bool conjugate_point_found = false;
    double first_conjugate_t = 0.0;  ///< meaningful only when found
    double min_abs_det_h = 0.0;      ///< over the scan points, excluding t = 0
    double t_max = 0.0;
    int n_scan = 0;
    double crosscheck_rel_error = 0.0;  ///< closed form vs RK4 on [0, min(10, t_max)]
};

/// Solves the accessory system through the generalized eigenmodes of (Q, P):
/// det h(t) factors into one sinh/linear/sine mode per eigenvalue, so its
/// zeros lie exactly at multiples of pi/sqrt(-lambda) on the negative modes.
/// Detection combines that exact rule with a sign/threshold scan of det h
/// (an even-multiplicity zero never flips the sign, so the scan alone could
/// pass over it). A fixed-step RK4 integration of the same system is compared
/// against the closed form and the worst relative deviation is reported.
/// Accepts any square size; IndefiniteP unless P is positive definite.
JacobiCheck jacobi_conjugate_check(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                   double t_max, int n_scan);

/// Closed-form accessory solution h(t) with h(0) = 0, hdot(0) = I.
Eigen::MatrixXd jacobi_closed_form(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, double t);

/// Fixed-step RK4 reference for the same initial-value problem.
Eigen::MatrixXd jacobi_integrate(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                 double t_end, double dt);

/// Supremum estimate of E1bar/E2bar over sampled cycles with positive flow.
struct GammaEstimate {
    double gamma21_hat = 0.0;
    std::size_t n_samples = 0;
    FeatureVector argmax_features{};
    std::size_t count_positive = 0;
    std::size_t count_negative = 0;
    std::size_t count_degenerate = 0;
};

/// Samples n trajectories (deterministic per seed), keeps those with
/// phi12bar above the dead band and maximizes E1bar/E2bar over them.
/// Throws NoPositiveSamples when no sampled cycle qualifies; n must be >= 100.
GammaEstimate estimate_gamma(std::uint64_t seed, std::size_t n, const SamplerConfig& sampler,
                             const ArmParameters& p, const QuadratureConfig& quad);

/// E1bar/E2bar of the resting configuration q (pure potentials).
double static_energy_ratio(const Eigen::Vector2d& q, const ArmParameters& p);

/// Witness family for the unbounded direction of E2bar/E1bar: the first link
/// rests at -pi/2 while the second oscillates as (0.5 * scale) sin(t). The
/// second link's kinetic average grows with the square of the scale while
/// E1bar stays fixed, so the returned ratio E2bar/E1bar diverges with scale.
double unbounded_case_probe(const ArmParameters& p, double velocity_scale, int n_grid = 1024);

/// Everything the extremum verification produces in one pass.
struct ExtremumReport {
    Eigen::Vector2d q_star;
    Eigen::Vector2d residual;
    double residual_norm = 0.0;
    Eigen::Matrix2d P, Q;
    bool P_positive_definite = false;
    bool jacobi_ran = false;  ///< conjugate scan runs only when P is positive definite
    bool conjugate_point_found = false;
    double min_abs_det_h = 0.0;
    double t_scan_max = 0.0;
    int n_scan = 0;
    double jacobi_crosscheck_rel_error = 0.0;
    double ratio_at_extremum = 0.0;  ///< E1bar/E2bar at rest

    bool passed() const {
        return residual_norm < 1e-8 && P_positive_definite && jacobi_ran &&
               !conjugate_point_found;
    }
};

/// Runs the residual, accessory-matrix and conjugate-point checks at the
/// rest configuration (-pi/2, 0).
ExtremumReport verify_extremum(const ArmParameters& p, double t_max = 50.0, int n_scan = 1000);

}  // namespace ecd
