#include "ecd/energyflow.hpp"

#include <cmath>
#include <sstream>

namespace ecd {

void QuadratureConfig::validate() const {
    if (n_grid < 64 || (n_grid & (n_grid - 1)) != 0)
        throw std::invalid_argument("QuadratureConfig: n_grid must be a power of two >= 64");
    if (!(delta0 >= 0.0)) throw std::invalid_argument("QuadratureConfig: delta0 must be >= 0");
}

double e1_rate(const JointState& s, const ArmParameters& p) {
    const double k1_rate = s.qdot.dot(mass_matrix_link1(p) * s.qddot);
    const double v1_rate = p.m1 * p.g * p.lc1 * std::cos(s.q(0)) * s.qdot(0);
    return k1_rate + v1_rate;
}

double e2_rate(const JointState& s, const ArmParameters& p) {
    const Eigen::Matrix2d d2 = mass_matrix_link2(s.q(1), p);
    const Eigen::Matrix2d d2dot = mass_matrix_link2_dq2(s.q(1), p) * s.qdot(1);
    const double k2_rate = s.qdot.dot(d2 * s.qddot) + 0.5 * s.qdot.dot(d2dot * s.qdot);
    const double v2_rate = potential_link2_gradient(s.q, p).dot(s.qdot);
    return k2_rate + v2_rate;
}

double phi12_pointwise(const FourierTrajectory& traj, double t, const ArmParameters& p) {
    const JointState s = evaluate(traj, t);
    const Eigen::Vector2d tau = inverse_dynamics(s, p);
    return e1_rate(s, p) - tau(0) * s.qdot(0);
}

double phi21_pointwise(const FourierTrajectory& traj, double t, const ArmParameters& p) {
    const JointState s = evaluate(traj, t);
    const Eigen::Vector2d tau = inverse_dynamics(s, p);
    const double tip_power = p.F.dot(end_effector(s.q, s.qdot, p).velocity);
    return e2_rate(s, p) - tau(1) * s.qdot(1) - tip_power;
}

CycleAverages cycle_averages(const FourierTrajectory& traj, const ArmParameters& p, int n_grid) {
    QuadratureConfig{n_grid, 0.0}.validate();

    // On a periodic uniform grid the composite trapezoid rule collapses to the
    // plain mean over the n distinct nodes.
    double e1 = 0.0, e2 = 0.0, w1 = 0.0, w2 = 0.0, fw = 0.0;
    const double dt = traj.T / n_grid;
    for (int i = 0; i < n_grid; ++i) {
        const JointState s = evaluate(traj, i * dt);
        const LinkEnergies e = link_energies(s, p);
        const Eigen::Vector2d tau = inverse_dynamics(s, p);
        e1 += e.E1;
        e2 += e.E2;
        w1 += tau(0) * s.qdot(0);
        w2 += tau(1) * s.qdot(1);
        fw += p.F.dot(end_effector(s.q, s.qdot, p).velocity);
    }

    CycleAverages avg;
    avg.E1bar = e1 / n_grid;
    avg.E2bar = e2 / n_grid;
    avg.W1bar = w1 / n_grid;
    avg.W2bar = w2 / n_grid;
    avg.Fbar = fw / n_grid;
    avg.phi12bar = -avg.W1bar;
    avg.n_grid = n_grid;
    return avg;
}

Rule2Check check_rule2(const CycleAverages& avg, double gamma12, double gamma21, double delta0) {
    if (!(gamma12 > 0.0) || !(gamma21 > 0.0))
        throw std::invalid_argument("check_rule2: gamma weights must be positive");

    Rule2Check out;
    if (std::abs(avg.phi12bar) <= delta0) {
        out.satisfied = true;
        return out;
    }
    if (avg.phi12bar < 0.0) {
        out.sign_phi = -1;
        out.gamma = gamma12;
        out.margin = avg.phi12bar * (gamma12 * avg.E1bar - avg.E2bar);
    } else {
        out.sign_phi = +1;
        out.gamma = gamma21;
        out.margin = avg.phi12bar * (avg.E1bar - gamma21 * avg.E2bar);
    }
    out.satisfied = out.margin <= 0.0;
    return out;
}

SignLabel label_sample(const FourierTrajectory& traj, const ArmParameters& p, int n_grid,
                       double delta0) {
    const CycleAverages avg = cycle_averages(traj, p, n_grid);
    if (std::abs(avg.phi12bar) < delta0) {
        std::ostringstream msg;
        msg << "label_sample: |phi12bar| = " << std::abs(avg.phi12bar)
            << " W is below the dead band " << delta0 << " W";
        throw DegenerateLabel(msg.str(), avg.phi12bar);
    }
    return {avg.phi12bar > 0.0 ? +1 : -1, avg.phi12bar};
}

}  // namespace ecd
