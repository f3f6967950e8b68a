#include "camtrack/kalman.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <cmath>
#include <string>

#include "camtrack/error.hpp"

namespace camtrack {

void KalmanParams::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorKind::invalid_parameter, what); };
    if (!(q >= 0.0) || !std::isfinite(q)) fail("kalman.q must be a finite value >= 0");
    if (!(r > 0.0) || !std::isfinite(r)) fail("kalman.r must be a finite value > 0");
    if (!(p0 > 0.0) || !std::isfinite(p0)) fail("kalman.p0 must be a finite value > 0");
}

namespace {

Eigen::Matrix4d transition() {
    Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
    f(0, 2) = 1.0;
    f(1, 3) = 1.0;
    return f;
}

// Per axis q * [[dt^3/3, dt^2/2], [dt^2/2, dt]] with dt = 1.
Eigen::Matrix4d process_noise(double q) {
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    for (int axis = 0; axis < 2; ++axis) {
        const int p = axis;
        const int v = axis + 2;
        m(p, p) = q / 3.0;
        m(p, v) = q / 2.0;
        m(v, p) = q / 2.0;
        m(v, v) = q;
    }
    return m;
}

void symmetrize(Eigen::Matrix4d& m) { m = 0.5 * (m + m.transpose()).eval(); }

}  // namespace

KalmanState init_state(const Rect& box, const KalmanParams& params) {
    params.validate();
    if (!box.valid()) throw Error(ErrorKind::invalid_parameter, "kalman init: box has no area");
    KalmanState s;
    const Point2d c = box.center();
    s.mean << c.x, c.y, 0.0, 0.0;
    s.covariance = params.p0 * Eigen::Matrix4d::Identity();
    return s;
}

KalmanState predict(const KalmanState& s, const KalmanParams& params) {
    static const Eigen::Matrix4d f = transition();
    KalmanState out;
    out.mean = f * s.mean;
    out.covariance = f * s.covariance * f.transpose() + process_noise(params.q);
    symmetrize(out.covariance);
    return out;
}

KalmanState correct(const KalmanState& s, Point2d measured_center, const KalmanParams& params) {
    Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
    h(0, 0) = 1.0;
    h(1, 1) = 1.0;
    const Eigen::Matrix2d r = params.r * Eigen::Matrix2d::Identity();

    const Eigen::Vector2d z(measured_center.x, measured_center.y);
    const Eigen::Vector2d innovation = z - h * s.mean;
    const Eigen::Matrix2d innovation_cov = h * s.covariance * h.transpose() + r;
    const Eigen::Matrix<double, 4, 2> gain =
        s.covariance * h.transpose() * innovation_cov.inverse();

    KalmanState out;
    out.mean = s.mean + gain * innovation;
    const Eigen::Matrix4d i_kh = Eigen::Matrix4d::Identity() - gain * h;
    out.covariance = i_kh * s.covariance * i_kh.transpose() + gain * r * gain.transpose();
    symmetrize(out.covariance);
    return out;
}

bool is_symmetric_psd(const Eigen::Matrix4d& m, double tol) {
    if (!m.allFinite()) return false;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tol) return false;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -tol;
}

}  // namespace camtrack
