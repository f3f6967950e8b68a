#pragma once

#include <Eigen/Core>

#include "camtrack/geometry.hpp"

namespace camtrack {

/// Constant-velocity state over the box center: [x, y, vx, vy], one frame per
/// step.
struct KalmanState {
    Eigen::Vector4d mean = Eigen::Vector4d::Zero();
    Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();

    [[nodiscard]] Point2d position() const noexcept { return {mean[0], mean[1]}; }
    [[nodiscard]] Point2d velocity() const noexcept { return {mean[2], mean[3]}; }
};

struct KalmanParams {
    double q = 0.01;   // white-acceleration spectral density
    double r = 1.0;    // measurement variance per axis, px^2
    double p0 = 10.0;  // initial variance on every state component

    /// q >= 0, r > 0, p0 > 0.
    void validate() const;
};

/// Position at the box center, zero velocity, covariance p0 * I.
[[nodiscard]] KalmanState init_state(const Rect& box, const KalmanParams& params);

/// x' = F x, P' = F P F^T + Q with the continuous white-acceleration Q.
[[nodiscard]] KalmanState predict(const KalmanState& s, const KalmanParams& params);

/// Position-only measurement update. The covariance uses the Joseph form and
/// is re-symmetrized so it stays symmetric positive semidefinite.
[[nodiscard]] KalmanState correct(const KalmanState& s, Point2d measured_center,
                                  const KalmanParams& params);

/// Symmetric within `tol` and smallest eigenvalue >= -tol.
[[nodiscard]] bool is_symmetric_psd(const Eigen::Matrix4d& m, double tol = 1e-9);

}  // namespace camtrack
