#include <doctest.h>

#include <random>

#include "camtrack/error.hpp"
#include "camtrack/kalman.hpp"

using namespace camtrack;

TEST_SUITE("kalman") {

TEST_CASE("initial state") {
    const KalmanParams p;
    const KalmanState s = init_state(Rect{10, 10, 20, 20}, p);
    CHECK(s.position().x == 20.0);
    CHECK(s.position().y == 20.0);
    CHECK(s.velocity().x == 0.0);
    CHECK(s.covariance == Eigen::Matrix4d::Identity() * p.p0);
    KalmanParams bad;
    bad.p0 = 0.0;
    CHECK_THROWS_AS((void)init_state(Rect{0, 0, 2, 2}, bad), Error);
    bad = {};
    bad.r = -1.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("prediction moves with velocity and grows uncertainty") {
    KalmanParams p;
    KalmanState s;
    s.mean << 0.0, 0.0, 2.0, -1.0;
    s.covariance = Eigen::Matrix4d::Identity();
    const KalmanState n = predict(s, p);
    CHECK(n.position().x == 2.0);
    CHECK(n.position().y == -1.0);
    CHECK(n.covariance.trace() > s.covariance.trace());

    s.mean << 5.0, 6.0, 0.0, 0.0;
    CHECK(predict(s, p).position().x == 5.0);
}

TEST_CASE("zero innovation leaves position unchanged") {
    const KalmanParams p;
    KalmanState s = predict(init_state(Rect{0, 0, 10, 10}, p), p);
    const KalmanState c = correct(s, s.position(), p);
    CHECK(c.position().x == doctest::Approx(s.position().x));
    CHECK(c.position().y == doctest::Approx(s.position().y));
    CHECK(c.covariance.trace() < s.covariance.trace());
}

TEST_CASE("constant velocity track converges") {
    KalmanParams p;
    p.q = 0.0;
    p.p0 = 1e6;
    auto truth = [](int k) { return Point2d{3.0 + 2.5 * k, 50.0 - 1.25 * k}; };
    KalmanState s = init_state(Rect{1, 49, 4, 2}, p);
    s.mean.head<2>() << truth(0).x, truth(0).y;
    for (int k = 1; k <= 10; ++k) s = correct(predict(s, p), truth(k), p);
    const Point2d next = predict(s, p).position();
    CHECK(std::hypot(next.x - truth(11).x, next.y - truth(11).y) < 1e-6);
}

TEST_CASE("huge measurement noise leaves the prediction alone") {
    KalmanParams p;
    p.r = 1e9;
    KalmanState s = predict(init_state(Rect{0, 0, 10, 10}, p), p);
    const KalmanState c = correct(s, Point2d{100.0, -40.0}, p);
    CHECK(std::abs(c.position().x - s.position().x) < 1e-3);
    CHECK(std::abs(c.position().y - s.position().y) < 1e-3);
}

TEST_CASE("covariance stays symmetric positive semidefinite") {
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> pos(-200.0, 200.0);
    KalmanParams p;
    p.q = 0.5;
    p.r = 0.01;
    KalmanState s = init_state(Rect{0, 0, 4, 4}, p);
    for (int i = 0; i < 2000; ++i) {
        s = (rng() & 1) ? predict(s, p) : correct(s, Point2d{pos(rng), pos(rng)}, p);
        REQUIRE(is_symmetric_psd(s.covariance));
    }
}

TEST_CASE("psd check") {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    CHECK(is_symmetric_psd(m));
    m(0, 1) = 0.5;
    CHECK_FALSE(is_symmetric_psd(m));
    m = -Eigen::Matrix4d::Identity();
    CHECK_FALSE(is_symmetric_psd(m));
}

}
