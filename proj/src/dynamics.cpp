#include "lorenz/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lorenz/errors.hpp"

namespace lorenz {

Derivative rhs(const State& s, const SystemParams& p) {
    return {p.sigma * (s.y - s.x), s.x * (p.rho - s.z) - s.y,
            s.x * s.y - p.beta * s.z};
}

namespace {

bool finite(const State& s) {
    return std::isfinite(s.x) && std::isfinite(s.y) && std::isfinite(s.z);
}

State axpy(const State& s, double h, const Derivative& d) {
    return {s.x + h * d.dx, s.y + h * d.dy, s.z + h * d.dz};
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// 5th order solution weights (b7 = 0).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// Difference between 5th and embedded 4th order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

constexpr double kAbsTol = 1e-9;
constexpr double kRelTol = 1e-9;
constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 5.0;
// PI controller exponents for a 5th order error estimate.
constexpr double kAlpha = 0.7 / 5.0;
constexpr double kBeta = 0.4 / 5.0;

struct StepResult {
    State y_new;
    Derivative k7;  // rhs at y_new, reused as k1 of the next step (FSAL)
    double error;   // scaled error norm
};

StepResult dopri_step(const State& y, const Derivative& k1,
                      const SystemParams& p, double h) {
    const Derivative k2 = rhs(axpy(y, h * a21, k1), p);
    const State s3 = {y.x + h * (a31 * k1.dx + a32 * k2.dx),
                      y.y + h * (a31 * k1.dy + a32 * k2.dy),
                      y.z + h * (a31 * k1.dz + a32 * k2.dz)};
    const Derivative k3 = rhs(s3, p);
    const State s4 = {y.x + h * (a41 * k1.dx + a42 * k2.dx + a43 * k3.dx),
                      y.y + h * (a41 * k1.dy + a42 * k2.dy + a43 * k3.dy),
                      y.z + h * (a41 * k1.dz + a42 * k2.dz + a43 * k3.dz)};
    const Derivative k4 = rhs(s4, p);
    const State s5 = {
        y.x + h * (a51 * k1.dx + a52 * k2.dx + a53 * k3.dx + a54 * k4.dx),
        y.y + h * (a51 * k1.dy + a52 * k2.dy + a53 * k3.dy + a54 * k4.dy),
        y.z + h * (a51 * k1.dz + a52 * k2.dz + a53 * k3.dz + a54 * k4.dz)};
    const Derivative k5 = rhs(s5, p);
    const State s6 = {y.x + h * (a61 * k1.dx + a62 * k2.dx + a63 * k3.dx +
                                 a64 * k4.dx + a65 * k5.dx),
                      y.y + h * (a61 * k1.dy + a62 * k2.dy + a63 * k3.dy +
                                 a64 * k4.dy + a65 * k5.dy),
                      y.z + h * (a61 * k1.dz + a62 * k2.dz + a63 * k3.dz +
                                 a64 * k4.dz + a65 * k5.dz)};
    const Derivative k6 = rhs(s6, p);

    const State y_new = {
        y.x + h * (b1 * k1.dx + b3 * k3.dx + b4 * k4.dx + b5 * k5.dx + b6 * k6.dx),
        y.y + h * (b1 * k1.dy + b3 * k3.dy + b4 * k4.dy + b5 * k5.dy + b6 * k6.dy),
        y.z + h * (b1 * k1.dz + b3 * k3.dz + b4 * k4.dz + b5 * k5.dz + b6 * k6.dz)};
    const Derivative k7 = rhs(y_new, p);

    const double ex = h * (e1 * k1.dx + e3 * k3.dx + e4 * k4.dx + e5 * k5.dx +
                           e6 * k6.dx + e7 * k7.dx);
    const double ey = h * (e1 * k1.dy + e3 * k3.dy + e4 * k4.dy + e5 * k5.dy +
                           e6 * k6.dy + e7 * k7.dy);
    const double ez = h * (e1 * k1.dz + e3 * k3.dz + e4 * k4.dz + e5 * k5.dz +
                           e6 * k6.dz + e7 * k7.dz);

    auto scale = [](double a, double b) {
        return kAbsTol + kRelTol * std::max(std::abs(a), std::abs(b));
    };
    const double sx = ex / scale(y.x, y_new.x);
    const double sy = ey / scale(y.y, y_new.y);
    const double sz = ez / scale(y.z, y_new.z);
    const double err = std::sqrt((sx * sx + sy * sy + sz * sz) / 3.0);

    return {y_new, k7, err};
}

}  // namespace

Trajectory integrate(const State& initial, const SystemParams& p, double dt,
                     std::size_t n_points) {
    if (dt <= 0.0) throw std::invalid_argument("integrate: dt must be > 0");
    if (n_points < 1) throw std::invalid_argument("integrate: n_points must be >= 1");
    if (!finite(initial)) throw NonFiniteState("integrate: non-finite initial state");

    Trajectory traj;
    traj.params = p;
    traj.dt = dt;
    traj.initial = initial;
    traj.states.reserve(n_points);
    traj.derivatives.reserve(n_points);
    traj.states.push_back(initial);
    traj.derivatives.push_back(rhs(initial, p));

    State y = initial;
    Derivative k1 = traj.derivatives.front();
    double t = 0.0;
    double h = dt;  // comfortably inside the stability region for Lorenz63
    double prev_err = 1.0;

    for (std::size_t i = 1; i < n_points; ++i) {
        const double t_target = static_cast<double>(i) * dt;
        while (t < t_target) {
            bool clipped = false;
            double h_try = h;
            if (t + h_try >= t_target) {
                h_try = t_target - t;
                clipped = true;
            }

            StepResult step = dopri_step(y, k1, p, h_try);
            if (!finite(step.y_new) || !std::isfinite(step.error)) {
                throw NonFiniteState("integrate: state became non-finite");
            }

            if (step.error <= 1.0) {
                t = clipped ? t_target : t + h_try;
                y = step.y_new;
                k1 = step.k7;
                double factor = kSafety * std::pow(step.error, -kAlpha) *
                                std::pow(prev_err, kBeta);
                factor = std::clamp(factor, kMinFactor, kMaxFactor);
                if (!clipped) h = h_try * factor;
                prev_err = std::max(step.error, 1e-10);
            } else {
                const double factor = std::clamp(
                    kSafety * std::pow(step.error, -kAlpha), kMinFactor, 1.0);
                h = h_try * factor;
                if (clipped) {
                    // retry the clipped interval with the reduced step
                }
                if (h < 1e-14) {
                    throw NonFiniteState("integrate: step size underflow");
                }
            }
        }
        traj.states.push_back(y);
        traj.derivatives.push_back(rhs(y, p));
    }
    return traj;
}

std::vector<State> fixed_points(const SystemParams& p) {
    std::vector<State> pts = {State{0.0, 0.0, 0.0}};
    const double c = p.beta * (p.rho - 1.0);
    if (c > 0.0) {
        const double r = std::sqrt(c);
        pts.push_back({r, r, p.rho - 1.0});
        pts.push_back({-r, -r, p.rho - 1.0});
    }
    return pts;
}

}  // namespace lorenz
