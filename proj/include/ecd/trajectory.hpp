#pragma once

#include <array>
#include <cstdint>
#include <numbers>
#include <stdexcept>

#include "ecd/arm.hpp"

namespace ecd {

inline constexpr int kHarmonics = 4;          ///< cosine/sine pairs per joint
inline constexpr int kFreeCoefficients = 10;  ///< 5 free coefficients per joint
inline constexpr int kFeatureCount = 11;      ///< free coefficients plus the period

/// Rest-to-rest endpoint task: the arm is at qa with zero velocity at t = 0,
/// at qb with zero velocity at t = tb, and back at qa at t = T by periodicity.
struct BoundaryTask {
    Eigen::Vector2d qa = Eigen::Vector2d::Zero();
    Eigen::Vector2d qb = Eigen::Vector2d::Zero();
    double tb = 2.0;
    double T = 4.0;

    void validate() const;  // 0 < tb < T, finite angles
};

/// Truncated Fourier series for one joint:
///   q(t) = a0 + sum_k a[k-1] cos(k w t) + b[k-1] sin(k w t),  k = 1..4.
struct JointSeries {
    double a0 = 0.0;
    std::array<double, kHarmonics> a{};
    std::array<double, kHarmonics> b{};
};

/// Periodic joint trajectory of the two-link arm.
struct FourierTrajectory {
    std::array<JointSeries, 2> joint;
    double T = 4.0;
    BoundaryTask task;

    double omega() const { return 2.0 * std::numbers::pi / T; }
};

/// The ten free Fourier coefficients followed by the period T. Order:
/// [a2 a3 a4 b3 b4] of joint 1, the same of joint 2, then T.
using FeatureVector = std::array<double, kFeatureCount>;

struct SingularConstraintSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SamplingExhausted : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solves the dependent coefficients {a0, a1, b1, b2} of each joint from the
/// four endpoint constraints, given the free coefficients. The 4x4 system
/// depends on the product omega*tb only; a condition number above 1e12
/// (e.g. tb = T/4, where its determinant vanishes) raises
/// SingularConstraintSystem and the caller should resample tb or T.
FourierTrajectory resolve_coefficients(const std::array<double, kFreeCoefficients>& free_coeffs,
                                       const BoundaryTask& task);

/// Closed-form series evaluation of (q, qdot, qddot); periodic in T, so any
/// finite t is valid.
JointState evaluate(const FourierTrajectory& traj, double t);

/// Extracts the free coefficients and period; inverse of resolve_coefficients
/// on its free inputs.
FeatureVector feature_vector(const FourierTrajectory& traj);

/// Sampling ranges for the free trajectory space.
struct SamplerConfig {
    double coeff_min = -1.0;  ///< free Fourier coefficients, uniform [rad]
    double coeff_max = 1.0;
    double T_min = 1.0;       ///< period, uniform [s]
    double T_max = 10.0;
    double rho = 0.5;         ///< tb = rho * T
    Eigen::Vector2d qa{0.0, 0.0};
    Eigen::Vector2d qb{std::numbers::pi / 4.0, std::numbers::pi / 6.0};
    int max_retries = 100;

    void validate() const;
};

struct Sample {
    FourierTrajectory traj;
    FeatureVector features;
    int attempts = 1;  ///< draws consumed, including rejected singular ones
};

/// Deterministic function of (seed, index): every index owns an independent
/// counter-based stream, so parallel generation over index ranges is
/// order-independent. Rejected singular draws are retried on a fresh
/// per-attempt stream; SamplingExhausted after max_retries rejections.
Sample sample_random(std::uint64_t seed, std::uint64_t index, const SamplerConfig& config);

}  // namespace ecd
