#include "mgsim/frames.hpp"

#include <cmath>

namespace mgsim {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kTwoThirdsPi = 2.0943951023931954923084289221863;
}  // namespace

const Eigen::Matrix2d& skew_j() {
    static const Eigen::Matrix2d j = (Eigen::Matrix2d() << 0.0, 1.0, -1.0, 0.0).finished();
    return j;
}

Eigen::Matrix2d rotation(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    return r;
}

Dq abc_to_dq(const ThreePhase& x, double theta) {
    const double ta = theta;
    const double tb = theta - kTwoThirdsPi;
    const double tc = theta + kTwoThirdsPi;
    Dq out;
    out.d = (2.0 / 3.0) * (x.a * std::cos(ta) + x.b * std::cos(tb) + x.c * std::cos(tc));
    out.q = (2.0 / 3.0) * (x.a * std::sin(ta) + x.b * std::sin(tb) + x.c * std::sin(tc));
    return out;
}

ThreePhase dq_to_abc(const Dq& x, double theta) {
    const double ta = theta;
    const double tb = theta - kTwoThirdsPi;
    const double tc = theta + kTwoThirdsPi;
    ThreePhase out;
    out.a = x.d * std::cos(ta) + x.q * std::sin(ta);
    out.b = x.d * std::cos(tb) + x.q * std::sin(tb);
    out.c = x.d * std::cos(tc) + x.q * std::sin(tc);
    return out;
}

Dq rotate(const Dq& x, double delta) {
    return Dq::from(rotation(delta) * x.vec());
}

double wrap_angle(double theta) {
    double w = std::fmod(theta + M_PI, kTwoPi);
    if (w <= 0.0) w += kTwoPi;
    return w - M_PI;
}

}  // namespace mgsim
