#include "ecd/trajectory.hpp"

#include <cmath>
#include <sstream>

#include "ecd/detail/random.hpp"

namespace ecd {

void BoundaryTask::validate() const {
    if (!(std::isfinite(T) && T > 0.0)) throw std::invalid_argument("BoundaryTask: T must be positive");
    if (!(std::isfinite(tb) && tb > 0.0 && tb < T))
        throw std::invalid_argument("BoundaryTask: need 0 < tb < T");
    if (!qa.allFinite() || !qb.allFinite())
        throw std::invalid_argument("BoundaryTask: endpoints must be finite");
}

void SamplerConfig::validate() const {
    if (!(coeff_min <= coeff_max)) throw std::invalid_argument("SamplerConfig: coeff range inverted");
    if (!(T_min > 0.0 && T_min <= T_max)) throw std::invalid_argument("SamplerConfig: bad period range");
    if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("SamplerConfig: rho must lie in (0, 1)");
    if (max_retries < 1) throw std::invalid_argument("SamplerConfig: max_retries must be >= 1");
    if (!qa.allFinite() || !qb.allFinite()) throw std::invalid_argument("SamplerConfig: endpoints must be finite");
}

namespace {

// Constraint rows (q(0), qdot(0)/w, q(tb), qdot(tb)/w) over the dependent
// coefficients (a0, a1, b1, b2); u = omega * tb.
Eigen::Matrix4d constraint_matrix(double u) {
    Eigen::Matrix4d m;
    m << 1.0, 1.0, 0.0, 0.0,
         0.0, 0.0, 1.0, 2.0,
         1.0, std::cos(u), std::sin(u), std::sin(2.0 * u),
         0.0, -std::sin(u), std::cos(u), 2.0 * std::cos(2.0 * u);
    return m;
}

}  // namespace

FourierTrajectory resolve_coefficients(const std::array<double, kFreeCoefficients>& free_coeffs,
                                       const BoundaryTask& task) {
    task.validate();
    const double omega = 2.0 * std::numbers::pi / task.T;
    const double u = omega * task.tb;

    const Eigen::Matrix4d m = constraint_matrix(u);
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double smin = svd.singularValues()(3);
    const double smax = svd.singularValues()(0);
    if (!(smin > 0.0) || smax / smin > 1e12) {
        std::ostringstream msg;
        msg << "resolve_coefficients: endpoint constraint system is singular at omega*tb = " << u
            << " (condition " << (smin > 0.0 ? smax / smin : std::numeric_limits<double>::infinity())
            << "); resample tb or T";
        throw SingularConstraintSystem(msg.str());
    }

    FourierTrajectory traj;
    traj.T = task.T;
    traj.task = task;

    for (int j = 0; j < 2; ++j) {
        const double a2 = free_coeffs[5 * j + 0];
        const double a3 = free_coeffs[5 * j + 1];
        const double a4 = free_coeffs[5 * j + 2];
        const double b3 = free_coeffs[5 * j + 3];
        const double b4 = free_coeffs[5 * j + 4];

        Eigen::Vector4d rhs;
        rhs(0) = task.qa(j) - (a2 + a3 + a4);
        rhs(1) = -(3.0 * b3 + 4.0 * b4);
        rhs(2) = task.qb(j) - (a2 * std::cos(2.0 * u) + a3 * std::cos(3.0 * u) +
                               a4 * std::cos(4.0 * u) + b3 * std::sin(3.0 * u) +
                               b4 * std::sin(4.0 * u));
        rhs(3) = 2.0 * a2 * std::sin(2.0 * u) + 3.0 * a3 * std::sin(3.0 * u) +
                 4.0 * a4 * std::sin(4.0 * u) - 3.0 * b3 * std::cos(3.0 * u) -
                 4.0 * b4 * std::cos(4.0 * u);

        const Eigen::Vector4d x = svd.solve(rhs);

        JointSeries& s = traj.joint[j];
        s.a0 = x(0);
        s.a = {x(1), a2, a3, a4};
        s.b = {x(2), x(3), b3, b4};
    }
    return traj;
}

JointState evaluate(const FourierTrajectory& traj, double t) {
    const double omega = traj.omega();
    JointState out;
    for (int j = 0; j < 2; ++j) {
        const JointSeries& s = traj.joint[j];
        double q = s.a0, qd = 0.0, qdd = 0.0;
        for (int k = 1; k <= kHarmonics; ++k) {
            const double kw = k * omega;
            const double ck = std::cos(kw * t);
            const double sk = std::sin(kw * t);
            const double a = s.a[k - 1];
            const double b = s.b[k - 1];
            q += a * ck + b * sk;
            qd += kw * (-a * sk + b * ck);
            qdd += kw * kw * (-a * ck - b * sk);
        }
        out.q(j) = q;
        out.qdot(j) = qd;
        out.qddot(j) = qdd;
    }
    return out;
}

FeatureVector feature_vector(const FourierTrajectory& traj) {
    FeatureVector x;
    for (int j = 0; j < 2; ++j) {
        const JointSeries& s = traj.joint[j];
        x[5 * j + 0] = s.a[1];
        x[5 * j + 1] = s.a[2];
        x[5 * j + 2] = s.a[3];
        x[5 * j + 3] = s.b[2];
        x[5 * j + 4] = s.b[3];
    }
    x[10] = traj.T;
    return x;
}

Sample sample_random(std::uint64_t seed, std::uint64_t index, const SamplerConfig& config) {
    config.validate();
    for (int attempt = 0; attempt < config.max_retries; ++attempt) {
        detail::SplitMix rng(detail::stream_key(seed, index, static_cast<std::uint64_t>(attempt)));

        std::array<double, kFreeCoefficients> free_coeffs;
        for (double& c : free_coeffs) c = rng.next_uniform(config.coeff_min, config.coeff_max);
        const double T = rng.next_uniform(config.T_min, config.T_max);

        BoundaryTask task;
        task.qa = config.qa;
        task.qb = config.qb;
        task.T = T;
        task.tb = config.rho * T;

        try {
            Sample s{resolve_coefficients(free_coeffs, task), {}, attempt + 1};
            for (int i = 0; i < kFreeCoefficients; ++i) s.features[i] = free_coeffs[i];
            s.features[10] = T;
            return s;
        } catch (const SingularConstraintSystem&) {
            continue;
        }
    }
    std::ostringstream msg;
    msg << "sample_random: no valid trajectory for index " << index << " after "
        << config.max_retries << " attempts (seed " << seed << ")";
    throw SamplingExhausted(msg.str());
}

}  // namespace ecd
