#include "ecd/variational.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ecd/detail/parallel.hpp"

namespace ecd {

namespace {

// Shared pieces of E1, E2 and their first partials at one (q, qdot) point.
struct EnergyJet {
    double E1, E2;
    Eigen::Matrix2d D1, D2, D2p;  // D2p = dD2/dq2
    Eigen::Vector2d E1_qd, E2_qd;
    Eigen::Vector2d E1_q, E2_q;   // E2_q carries the kinetic dD2/dq2 part
};

EnergyJet energy_jet(const Eigen::Vector2d& q, const Eigen::Vector2d& qd,
                     const ArmParameters& p) {
    EnergyJet jet;
    jet.D1 = mass_matrix_link1(p);
    jet.D2 = mass_matrix_link2(q(1), p);
    jet.D2p = mass_matrix_link2_dq2(q(1), p);
    jet.E1 = 0.5 * qd.dot(jet.D1 * qd) + potential_link1(q, p);
    jet.E2 = 0.5 * qd.dot(jet.D2 * qd) + potential_link2(q, p);
    jet.E1_qd = jet.D1 * qd;
    jet.E2_qd = jet.D2 * qd;
    jet.E1_q = potential_link1_gradient(q, p);
    jet.E2_q = potential_link2_gradient(q, p);
    jet.E2_q(1) += 0.5 * qd.dot(jet.D2p * qd);
    return jet;
}

double rel_scale(const Eigen::Matrix2d& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

Eigen::Vector2d euler_residual(const Eigen::Vector2d& q, const Eigen::Vector2d& qdot,
                               const Eigen::Vector2d& qddot, const ArmParameters& p) {
    const EnergyJet jet = energy_jet(q, qdot, p);
    if (!(jet.E1 > 0.0))
        throw std::invalid_argument("euler_residual: E1 must be positive at the evaluation point");

    const double e1sq = jet.E1 * jet.E1;
    const double e1cb = e1sq * jet.E1;

    // F = E2/E1;  G := dF/dqdot = N / E1^2 with N = E1 E2_qd - E2 E1_qd.
    const Eigen::Vector2d n_vec = jet.E1 * jet.E2_qd - jet.E2 * jet.E1_qd;

    // dG/dqdot.
    const Eigen::Matrix2d n_qd = jet.E2_qd * jet.E1_qd.transpose() + jet.E1 * jet.D2 -
                                 jet.E1_qd * jet.E2_qd.transpose() - jet.E2 * jet.D1;
    const Eigen::Matrix2d g_qd = n_qd / e1sq - (2.0 / e1cb) * n_vec * jet.E1_qd.transpose();

    // dG/dq, column per coordinate; D2 depends on q2 only.
    Eigen::Matrix2d g_q;
    for (int k = 0; k < 2; ++k) {
        Eigen::Vector2d n_qk = jet.E1_q(k) * jet.E2_qd - jet.E2_q(k) * jet.E1_qd;
        if (k == 1) n_qk += jet.E1 * (jet.D2p * qdot);
        g_q.col(k) = n_qk / e1sq - (2.0 * jet.E1_q(k) / e1cb) * n_vec;
    }

    const Eigen::Vector2d g_total_rate = g_q * qdot + g_qd * qddot;
    const Eigen::Vector2d f_q = (jet.E1 * jet.E2_q - jet.E2 * jet.E1_q) / e1sq;
    return g_total_rate - f_q;
}

namespace {

// Central-difference Hessian of a scalar function of two variables.
template <typename F>
Eigen::Matrix2d fd_hessian(const F& f, const Eigen::Vector2d& x, double h) {
    Eigen::Matrix2d out;
    const double f0 = f(x);
    for (int i = 0; i < 2; ++i) {
        Eigen::Vector2d ei = Eigen::Vector2d::Zero();
        ei(i) = h;
        out(i, i) = (f(x + ei) - 2.0 * f0 + f(x - ei)) / (h * h);
        for (int j = i + 1; j < 2; ++j) {
            Eigen::Vector2d ej = Eigen::Vector2d::Zero();
            ej(j) = h;
            out(i, j) = (f(x + ei + ej) - f(x + ei - ej) - f(x - ei + ej) + f(x - ei - ej)) /
                        (4.0 * h * h);
            out(j, i) = out(i, j);
        }
    }
    return out;
}

}  // namespace

PQ pq_matrices(const Eigen::Vector2d& q_star, const ArmParameters& p) {
    const Eigen::Vector2d zero = Eigen::Vector2d::Zero();
    const double resid = euler_residual(q_star, zero, zero, p).norm();
    if (resid > 1e-8) {
        std::ostringstream msg;
        msg << "pq_matrices: residual norm " << resid << " at the given point exceeds 1e-8";
        throw NotAnExtremum(msg.str());
    }

    const double v1 = potential_link1(q_star, p);
    const double v2 = potential_link2(q_star, p);
    const Eigen::Vector2d v1_q = potential_link1_gradient(q_star, p);
    const Eigen::Vector2d v2_q = potential_link2_gradient(q_star, p);
    const Eigen::Matrix2d v1_qq = potential_link1_hessian(q_star, p);
    const Eigen::Matrix2d v2_qq = potential_link2_hessian(q_star, p);

    PQ out;
    // Velocity Hessian of E2/E1 at rest: only the quadratic kinetic parts survive.
    out.P = 0.5 * (mass_matrix_link2(q_star(1), p) / v1 - (v2 / (v1 * v1)) * mass_matrix_link1(p));

    // Position Hessian of V2/V1 (quotient rule, all terms kept).
    const Eigen::Matrix2d w_qq = v2_qq / v1 -
                                 (v2_q * v1_q.transpose() + v1_q * v2_q.transpose()) / (v1 * v1) -
                                 (v2 / (v1 * v1)) * v1_qq +
                                 (2.0 * v2 / (v1 * v1 * v1)) * (v1_q * v1_q.transpose());
    out.Q = 0.5 * w_qq;

    // Mandatory cross-check of the analytic second derivatives.
    const double h = 1e-4;
    const Eigen::Matrix2d fd_p = fd_hessian(
        [&](const Eigen::Vector2d& qd) {
            const EnergyJet jet = energy_jet(q_star, qd, p);
            return jet.E2 / jet.E1;
        },
        zero, h);
    const Eigen::Matrix2d fd_q = fd_hessian(
        [&](const Eigen::Vector2d& q) {
            return potential_link2(q, p) / potential_link1(q, p);
        },
        q_star, h);
    const double tol_p = 1e-5 * std::max(1e-6, rel_scale(2.0 * out.P));
    const double tol_q = 1e-5 * std::max(1e-6, rel_scale(2.0 * out.Q));
    if ((fd_p - 2.0 * out.P).cwiseAbs().maxCoeff() > tol_p ||
        (fd_q - 2.0 * out.Q).cwiseAbs().maxCoeff() > tol_q)
        throw std::runtime_error("pq_matrices: analytic second derivatives disagree with finite differences");

    return out;
}

namespace {

// One accessory mode of det h: sinh-, linear- or sine-type by eigenvalue sign.
double mode_value(double lambda, double t, double tol) {
    if (lambda > tol) {
        const double s = std::sqrt(lambda);
        return std::sinh(s * t) / s;
    }
    if (lambda < -tol) {
        const double s = std::sqrt(-lambda);
        return std::sin(s * t) / s;
    }
    return t;
}

struct AccessoryModes {
    Eigen::VectorXd lambdas;
    Eigen::MatrixXd vecs;      // P-orthonormal eigenvectors
    Eigen::MatrixXd vecs_inv;  // equals vecs^T P
    double tol;
};

AccessoryModes accessory_modes(const Eigen::MatrixXd& p_mat, const Eigen::MatrixXd& q_mat) {
    if (p_mat.rows() != p_mat.cols() || q_mat.rows() != q_mat.cols() ||
        p_mat.rows() != q_mat.rows())
        throw std::invalid_argument("jacobi: P and Q must be square and of equal size");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> p_eig(p_mat);
    if (p_eig.info() != Eigen::Success || p_eig.eigenvalues().minCoeff() <= 0.0)
        throw IndefiniteP("jacobi: P must be positive definite");

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(q_mat, p_mat);
    if (ges.info() != Eigen::Success)
        throw std::runtime_error("jacobi: generalized eigensolve failed");

    AccessoryModes m;
    m.lambdas = ges.eigenvalues();
    m.vecs = ges.eigenvectors();
    m.vecs_inv = m.vecs.transpose() * p_mat;
    m.tol = 1e-12 * std::max(1.0, m.lambdas.cwiseAbs().maxCoeff());
    return m;
}

Eigen::MatrixXd modes_solution(const AccessoryModes& m, double t) {
    Eigen::VectorXd f(m.lambdas.size());
    for (Eigen::Index i = 0; i < m.lambdas.size(); ++i)
        f(i) = mode_value(m.lambdas(i), t, m.tol);
    return m.vecs * f.asDiagonal() * m.vecs_inv;
}

}  // namespace

Eigen::MatrixXd jacobi_closed_form(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q, double t) {
    return modes_solution(accessory_modes(P, Q), t);
}

Eigen::MatrixXd jacobi_integrate(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                 double t_end, double dt) {
    const Eigen::Index n = P.rows();
    const Eigen::MatrixXd a = P.ldlt().solve(Q);  // hddot = A h
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd hd = Eigen::MatrixXd::Identity(n, n);

    const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt)));
    const double step = t_end / steps;
    for (int i = 0; i < steps; ++i) {
        // Classic RK4 on the first-order pair (h, hd).
        const Eigen::MatrixXd k1h = hd, k1v = a * h;
        const Eigen::MatrixXd k2h = hd + 0.5 * step * k1v, k2v = a * (h + 0.5 * step * k1h);
        const Eigen::MatrixXd k3h = hd + 0.5 * step * k2v, k3v = a * (h + 0.5 * step * k2h);
        const Eigen::MatrixXd k4h = hd + step * k3v, k4v = a * (h + step * k3h);
        h += (step / 6.0) * (k1h + 2.0 * k2h + 2.0 * k3h + k4h);
        hd += (step / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return h;
}

JacobiCheck jacobi_conjugate_check(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q,
                                   double t_max, int n_scan) {
    if (!(t_max > 0.0)) throw std::invalid_argument("jacobi: t_max must be positive");
    if (n_scan < 2) throw std::invalid_argument("jacobi: n_scan must be >= 2");

    const AccessoryModes modes = accessory_modes(P, Q);

    JacobiCheck out;
    out.t_max = t_max;
    out.n_scan = n_scan;
    out.first_conjugate_t = std::numeric_limits<double>::infinity();

    // Exact zeros: only sine modes vanish for t > 0, at pi/sqrt(-lambda).
    for (Eigen::Index i = 0; i < modes.lambdas.size(); ++i) {
        if (modes.lambdas(i) < -modes.tol) {
            const double tc = std::numbers::pi / std::sqrt(-modes.lambdas(i));
            if (tc <= t_max) {
                out.conjugate_point_found = true;
                out.first_conjugate_t = std::min(out.first_conjugate_t, tc);
            }
        }
    }

    // Determinant scan; det h(t) > 0 as t -> 0+, so the reference sign is +.
    double min_abs = std::numeric_limits<double>::infinity();
    int prev_sign = +1;
    for (int k = 1; k <= n_scan; ++k) {
        const double t = t_max * k / n_scan;
        double det = 1.0;
        for (Eigen::Index i = 0; i < modes.lambdas.size(); ++i)
            det *= mode_value(modes.lambdas(i), t, modes.tol);
        min_abs = std::min(min_abs, std::abs(det));
        const int sign = det > 0.0 ? +1 : (det < 0.0 ? -1 : 0);
        if (sign == 0 || sign != prev_sign || std::abs(det) < 1e-12) {
            out.conjugate_point_found = true;
            out.first_conjugate_t = std::min(out.first_conjugate_t, t);
        }
        if (sign != 0) prev_sign = sign;
    }
    out.min_abs_det_h = min_abs;
    if (!out.conjugate_point_found) out.first_conjugate_t = 0.0;

    // Closed form vs RK4 on the leading stretch.
    const double t_check = std::min(10.0, t_max);
    const int samples = 20;
    double worst = 0.0;
    for (int k = 1; k <= samples; ++k) {
        const double t = t_check * k / samples;
        const Eigen::MatrixXd exact = modes_solution(modes, t);
        const Eigen::MatrixXd numeric = jacobi_integrate(P, Q, t, 1e-3);
        const double denom = std::max(exact.norm(), 1e-300);
        worst = std::max(worst, (exact - numeric).norm() / denom);
    }
    out.crosscheck_rel_error = worst;
    return out;
}

GammaEstimate estimate_gamma(std::uint64_t seed, std::size_t n, const SamplerConfig& sampler,
                             const ArmParameters& p, const QuadratureConfig& quad) {
    if (n < 100) throw std::invalid_argument("estimate_gamma: n must be >= 100");
    quad.validate();

    struct Outcome {
        int cls = 0;  // +1, -1, or 0 for dead-band
        double ratio = 0.0;
        FeatureVector features{};
    };
    std::vector<Outcome> outcomes(n);
    detail::parallel_for(n, [&](std::size_t i) {
        const Sample s = sample_random(seed, i, sampler);
        const CycleAverages avg = cycle_averages(s.traj, p, quad.n_grid);
        Outcome& o = outcomes[i];
        o.features = s.features;
        if (avg.phi12bar > quad.delta0) {
            o.cls = +1;
            o.ratio = avg.E1bar / avg.E2bar;
        } else if (avg.phi12bar < -quad.delta0) {
            o.cls = -1;
        }
    });

    GammaEstimate est;
    est.n_samples = n;
    est.gamma21_hat = -std::numeric_limits<double>::infinity();
    for (const Outcome& o : outcomes) {
        if (o.cls > 0) {
            ++est.count_positive;
            if (o.ratio > est.gamma21_hat) {
                est.gamma21_hat = o.ratio;
                est.argmax_features = o.features;
            }
        } else if (o.cls < 0) {
            ++est.count_negative;
        } else {
            ++est.count_degenerate;
        }
    }
    if (est.count_positive == 0)
        throw NoPositiveSamples("estimate_gamma: no sampled trajectory has positive flow");
    return est;
}

double static_energy_ratio(const Eigen::Vector2d& q, const ArmParameters& p) {
    JointState rest;
    rest.q = q;
    const LinkEnergies e = link_energies(rest, p);
    return e.E1 / e.E2;
}

double unbounded_case_probe(const ArmParameters& p, double velocity_scale, int n_grid) {
    if (!(velocity_scale >= 0.0))
        throw std::invalid_argument("unbounded_case_probe: velocity_scale must be >= 0");

    FourierTrajectory traj;
    traj.T = 2.0 * std::numbers::pi;
    traj.joint[0].a0 = -std::numbers::pi / 2.0;
    traj.joint[1].b[0] = 0.5 * velocity_scale;  // q2(t) = 0.5 * scale * sin(t)
    traj.task.qa = {-std::numbers::pi / 2.0, 0.0};
    traj.task.qb = traj.task.qa;
    traj.task.T = traj.T;
    traj.task.tb = traj.T / 2.0;

    const CycleAverages avg = cycle_averages(traj, p, n_grid);
    return avg.E2bar / avg.E1bar;
}

ExtremumReport verify_extremum(const ArmParameters& p, double t_max, int n_scan) {
    ExtremumReport report;
    report.q_star = {-std::numbers::pi / 2.0, 0.0};
    report.residual =
        euler_residual(report.q_star, Eigen::Vector2d::Zero(), Eigen::Vector2d::Zero(), p);
    report.residual_norm = report.residual.norm();
    report.t_scan_max = t_max;
    report.n_scan = n_scan;

    const PQ pq = pq_matrices(report.q_star, p);
    report.P = pq.P;
    report.Q = pq.Q;

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(report.P);
    report.P_positive_definite = eig.eigenvalues().minCoeff() > 0.0;

    if (report.P_positive_definite) {
        const JacobiCheck jc = jacobi_conjugate_check(report.P, report.Q, t_max, n_scan);
        report.jacobi_ran = true;
        report.conjugate_point_found = jc.conjugate_point_found;
        report.min_abs_det_h = jc.min_abs_det_h;
        report.jacobi_crosscheck_rel_error = jc.crosscheck_rel_error;
    }

    report.ratio_at_extremum = static_energy_ratio(report.q_star, p);
    return report;
}

}  // namespace ecd
