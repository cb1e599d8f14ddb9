// ode.hpp — adaptive Dormand-Prince 5(4) integrator for Eigen-valued states

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrhsr/errors.hpp"

namespace lrhsr {

struct OdeOptions {
    double rtol{1e-10};
    double atol{1e-14};
    double h_initial{0.0}; // 0 selects a step from the initial derivative
    double h_max{0.0};     // 0 means unbounded
    long max_steps{50'000'000};
};

struct OdeStats {
    long accepted{0};
    long rejected{0};
    long rhs_calls{0};
};

// Integrates y' = f(t, y) from t0 and returns the state at every requested output time
// (non-decreasing, >= t0). Output times are hit exactly. The callback `on_output` is
// invoked for each output and may throw to abort.
template <class State>
std::vector<State> dopri5(const std::function<void(double, const State&, State&)>& f, double t0, State y,
                          const std::vector<double>& t_out, const OdeOptions& opt = {},
                          OdeStats* stats = nullptr,
                          const std::function<void(double, const State&)>& on_output = {}) {
    using std::abs;
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeStats st;
    std::vector<State> out;
    out.reserve(t_out.size());
    double t = t0;
    State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    f(t, y, k1);
    ++st.rhs_calls;

    auto err_norm = [&](const State& e, const State& ya, const State& yb) {
        const auto sc = (opt.atol + opt.rtol * ya.cwiseAbs().cwiseMax(yb.cwiseAbs()).array());
        return std::sqrt((e.cwiseAbs().array() / sc).square().mean());
    };

    double h = opt.h_initial;
    if (h <= 0.0) {
        const double d0 = std::sqrt(y.cwiseAbs2().mean());
        const double d1 = std::sqrt(k1.cwiseAbs2().mean());
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    }

    for (double target : t_out) {
        if (target < t) throw DomainError("dopri5: output times must be non-decreasing and >= t0");
        while (t < target) {
            if (st.accepted + st.rejected >= opt.max_steps)
                throw StateIntegrationError<State>("dopri5: step budget exhausted", t, y);
            double hs = std::min(h, target - t);
            if (opt.h_max > 0.0) hs = std::min(hs, opt.h_max);
            const bool last = hs >= target - t;
            if (hs <= 1e-14 * std::max(1.0, abs(t)))
                throw StateIntegrationError<State>("dopri5: step size underflow", t, y);

            ytmp = y + hs * a21 * k1;
            f(t + c2 * hs, ytmp, k2);
            ytmp = y + hs * (a31 * k1 + a32 * k2);
            f(t + c3 * hs, ytmp, k3);
            ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
            f(t + c4 * hs, ytmp, k4);
            ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
            f(t + c5 * hs, ytmp, k5);
            ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
            f(t + hs, ytmp, k6);
            ynew = y + hs * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            f(t + hs, ynew, k7);
            st.rhs_calls += 6;
            err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double en = err_norm(err, y, ynew);
            if (!std::isfinite(en)) {
                ++st.rejected;
                h = 0.2 * hs;
                continue;
            }
            if (en <= 1.0) {
                ++st.accepted;
                t = last ? target : t + hs;
                y.swap(ynew);
                k1.swap(k7);
                const double fac = en == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(en, -0.2), 0.2, 5.0);
                if (!last || hs >= h) h = hs * fac; // a shortened final step keeps h
            } else {
                ++st.rejected;
                h = hs * std::max(0.2, 0.9 * std::pow(en, -0.2));
            }
        }
        if (on_output) on_output(t, y);
        out.push_back(y);
    }
    if (stats) *stats = st;
    return out;
}

} // namespace lrhsr
