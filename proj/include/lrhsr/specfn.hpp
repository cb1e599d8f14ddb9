// specfn.hpp — zeta, polylogarithm on the unit circle, gamma, Lambert W_{-1}, Faddeeva and Dawson functions

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "lrhsr/errors.hpp"

namespace lrhsr {

using ComplexValue = std::complex<double>;

namespace detail {

struct ZetaResult {
    double value;
    double tail_bound; // magnitude of the first omitted Euler-Maclaurin term
};

// Euler-Maclaurin with n = 20 explicit terms and Bernoulli corrections up to B_24.
// Valid for real s != 1 with s > -20; used directly for s >= 0.
inline ZetaResult zeta_euler_maclaurin(double s) {
    constexpr int n = 20;
    constexpr std::array<double, 13> b2j = {
        1.0 / 6.0,         -1.0 / 30.0,        1.0 / 42.0,          -1.0 / 30.0,
        5.0 / 66.0,        -691.0 / 2730.0,    7.0 / 6.0,           -3617.0 / 510.0,
        43867.0 / 798.0,   -174611.0 / 330.0,  854513.0 / 138.0,    -236364091.0 / 2730.0,
        8553103.0 / 6.0}; // last entry (B_26) only feeds the bound
    double sum = 0.0;
    for (int k = n - 1; k >= 1; --k) sum += std::pow(static_cast<double>(k), -s);
    const double ns = std::pow(static_cast<double>(n), -s);
    sum += n * ns / (s - 1.0) + 0.5 * ns;
    // term_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * n^{-s-2j+1}
    double rising = s;     // s(s+1)...(s+2j-2)
    double fact = 2.0;     // (2j)!
    double npow = ns / n;  // n^{-s-2j+1}
    double bound = 0.0;
    for (int j = 1; j <= 13; ++j) {
        double term = b2j[j - 1] / fact * rising * npow;
        if (j == 13) {
            bound = std::abs(term);
            break;
        }
        sum += term;
        rising *= (s + 2 * j - 1) * (s + 2 * j);
        fact *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
        npow /= static_cast<double>(n) * n;
    }
    return {sum, bound};
}

// zeta(s) for real s != 1: Euler-Maclaurin for s >= 0, functional equation for s < 0.
inline double zeta_continued(double s) {
    if (s == 1.0) throw DivergenceError("zeta has a pole at s = 1");
    if (s >= 0.0) return zeta_euler_maclaurin(s).value;
    if (s == std::floor(s) && std::fmod(-s, 2.0) == 0.0) return 0.0; // trivial zeros
    const double pi = std::numbers::pi;
    return std::pow(2.0, s) * std::pow(pi, s - 1.0) * std::sin(0.5 * pi * s) * std::tgamma(1.0 - s) *
           zeta_euler_maclaurin(1.0 - s).value;
}

inline double harmonic(int m) {
    double h = 0.0;
    for (int k = 1; k <= m; ++k) h += 1.0 / k;
    return h;
}

} // namespace detail

inline double riemann_zeta(double s) {
    if (!(s > 1.0)) throw DomainError("riemann_zeta requires s > 1");
    return detail::zeta_euler_maclaurin(s).value;
}

inline double gamma_fn(double x) {
    if (!std::isfinite(x)) throw DomainError("gamma_fn requires a finite argument");
    if (x <= 0.0 && x == std::floor(x)) throw DomainError("gamma_fn: pole at non-positive integer");
    return std::tgamma(x);
}

// Li_beta(e^{iq}) by the expansion in mu = iq, convergent for |q| < 2 pi:
//   generic beta:  Gamma(1-beta)(-mu)^{beta-1} + sum_k zeta(beta-k) mu^k/k!
//   integer beta = m:  mu^{m-1}/(m-1)! [H_{m-1} - log(-mu)] + sum_{k != m-1} zeta(m-k) mu^k/k!
inline ComplexValue polylog_circle(double beta, double q) {
    const double pi = std::numbers::pi;
    if (!std::isfinite(beta) || !std::isfinite(q)) throw DomainError("polylog_circle: non-finite input");
    if (q <= -pi || q > pi) throw DomainError("polylog_circle requires q in (-pi, pi]");
    if (q == 0.0) {
        if (beta <= 1.0) throw DivergenceError("Li_beta(1) diverges for beta <= 1");
        return {riemann_zeta(beta), 0.0};
    }
    if (!(beta > 0.0)) throw DomainError("polylog_circle requires beta > 0");

    const ComplexValue mu(0.0, q);
    const ComplexValue log_minus_mu(std::log(std::abs(q)), q > 0 ? -0.5 * pi : 0.5 * pi);
    const double m_round = std::round(beta);
    const bool integer = std::abs(beta - m_round) < 1e-12;
    const int m = static_cast<int>(m_round);

    ComplexValue sum = 0.0;
    if (!integer) sum += std::tgamma(1.0 - beta) * std::exp((beta - 1.0) * log_minus_mu);

    ComplexValue mu_pow = 1.0; // mu^k / k!
    constexpr int k_max = 90;
    int small = 0; // consecutive negligible terms; trivial zeros of zeta give isolated zeros
    for (int k = 0; k <= k_max; ++k) {
        if (k > 0) mu_pow *= mu / static_cast<double>(k);
        ComplexValue term;
        if (integer && k == m - 1) term = mu_pow * (detail::harmonic(m - 1) - log_minus_mu);
        else term = detail::zeta_continued((integer ? m : beta) - k) * mu_pow;
        sum += term;
        small = std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum)) ? small + 1 : 0;
        if (k > std::max(8, m + 2) && small >= 2) break;
    }
    return sum;
}

// Lower branch of Lambert W on [-1/e, 0): w <= -1 with w e^w = y.
inline double lambert_w_m1(double y) {
    const double e = std::numbers::e;
    const double branch = -1.0 / e;
    if (!(y < 0.0) || y < branch - 4.0 * std::numeric_limits<double>::epsilon())
        throw DomainError("lambert_w_m1 requires -1/e <= y < 0");
    const double p2 = 2.0 * (1.0 + e * y);
    if (p2 <= 0.0) return -1.0;

    double w;
    if (y < -0.25) {
        const double p = -std::sqrt(p2);
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else {
        const double l1 = std::log(-y);
        const double l2 = std::log(-l1);
        w = l1 - l2 + l2 / l1;
    }

    if (y > -1e-3) {
        // Newton on w + log(-w) = log(-y), well scaled for tiny |y|
        const double target = std::log(-y);
        for (int it = 0; it < 100; ++it) {
            const double g = w + std::log(-w) - target;
            const double dw = g / (1.0 + 1.0 / w);
            w -= dw;
            if (std::abs(dw) <= 1e-16 * std::abs(w)) break;
        }
        return w;
    }
    // Halley on w e^w - y
    for (int it = 0; it < 100; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - y;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double dw = f / denom;
        double wn = w - dw;
        if (wn > -1.0) wn = 0.5 * (w - 1.0); // stay on the lower branch
        const double change = std::abs(wn - w);
        w = wn;
        if (change <= 4e-16 * std::abs(w)) break;
    }
    return w;
}

// Faddeeva function w(z) = e^{-z^2} erfc(-iz): Poppe-Wijers algorithm (power series,
// truncated Taylor with Laplace continued fraction), about 14 significant digits.
inline ComplexValue faddeeva_w(ComplexValue z) {
    constexpr double factor = 1.12837916709551257388; // 2/sqrt(pi)
    constexpr double rmaxreal = 0.5e154;
    constexpr double rmaxexp = 708.503061461606;
    const double xi = z.real();
    const double yi = z.imag();
    const double xabs = std::abs(xi);
    const double yabs = std::abs(yi);
    if (xabs > rmaxreal || yabs > rmaxreal) throw AccuracyError("faddeeva_w: argument overflow");
    const double x = xabs / 6.3;
    const double y = yabs / 4.4;
    double qrho = x * x + y * y;
    const double xabsq = xabs * xabs;
    double xquad = xabsq - yabs * yabs;
    const double yquad = 2.0 * xabs * yabs;
    const bool a = qrho < 0.085264;

    double u = 0.0, v = 0.0, u2 = 0.0, v2 = 0.0;
    if (a) {
        qrho = (1.0 - 0.85 * y) * std::sqrt(qrho);
        const int n = static_cast<int>(std::lround(6.0 + 72.0 * qrho));
        int j = 2 * n + 1;
        double xsum = 1.0 / j;
        double ysum = 0.0;
        for (int i = n; i >= 1; --i) {
            j -= 2;
            const double xaux = (xsum * xquad - ysum * yquad) / i;
            ysum = (xsum * yquad + ysum * xquad) / i;
            xsum = xaux + 1.0 / j;
        }
        const double u1 = -factor * (xsum * yabs + ysum * xabs) + 1.0;
        const double v1 = factor * (xsum * xabs - ysum * yabs);
        const double daux = std::exp(-xquad);
        u2 = daux * std::cos(yquad);
        v2 = -daux * std::sin(yquad);
        u = u1 * u2 - v1 * v2;
        v = u1 * v2 + v1 * u2;
    } else {
        double h = 0.0, h2 = 0.0;
        int kapn = 0, nu = 0;
        if (qrho > 1.0) {
            qrho = std::sqrt(qrho);
            nu = static_cast<int>(3.0 + 1442.0 / (26.0 * qrho + 77.0));
        } else {
            qrho = (1.0 - y) * std::sqrt(1.0 - qrho);
            h = 1.88 * qrho;
            h2 = 2.0 * h;
            kapn = static_cast<int>(std::lround(7.0 + 34.0 * qrho));
            nu = static_cast<int>(std::lround(16.0 + 26.0 * qrho));
        }
        const bool b = h > 0.0;
        double qlambda = b ? std::pow(h2, kapn) : 0.0;
        double rx = 0.0, ry = 0.0, sx = 0.0, sy = 0.0;
        for (int n = nu; n >= 0; --n) {
            const double np1 = n + 1.0;
            double tx = yabs + h + np1 * rx;
            double ty = xabs - np1 * ry;
            const double c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if (b && n <= kapn) {
                tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        if (h == 0.0) {
            u = factor * rx;
            v = factor * ry;
        } else {
            u = factor * sx;
            v = factor * sy;
        }
        if (yabs == 0.0) u = std::exp(-xabs * xabs);
    }

    if (yi < 0.0) {
        if (a) {
            u2 *= 2.0;
            v2 *= 2.0;
        } else {
            xquad = -xquad;
            if (xquad > rmaxexp) throw AccuracyError("faddeeva_w: result overflow");
            const double w1 = 2.0 * std::exp(xquad);
            u2 = w1 * std::cos(yquad);
            v2 = -w1 * std::sin(yquad);
        }
        u = u2 - u;
        v = v2 - v;
        if (xi > 0.0) v = -v;
    } else if (xi < 0.0) {
        v = -v;
    }
    return {u, v};
}

inline constexpr double dawson_stability_radius = 25.0;

// Dawson integral D_F(z) = e^{-z^2} int_0^z e^{u^2} du for |z| <= 25.
inline ComplexValue dawson(ComplexValue z) {
    const double r = std::abs(z);
    if (!(r <= dawson_stability_radius)) throw AccuracyError("dawson: |z| exceeds the stability radius 25");
    if (r <= 1.0) {
        // sum_n (-1)^n 2^n z^{2n+1} / (2n+1)!!
        const ComplexValue z2 = z * z;
        ComplexValue term = z;
        ComplexValue sum = z;
        for (int n = 1; n < 60; ++n) {
            term *= -2.0 * z2 / (2.0 * n + 1.0);
            sum += term;
            if (std::abs(term) < 1e-18 * std::abs(sum)) break;
        }
        return sum;
    }
    if (z.imag() < 0.0) return -dawson(-z);
    const double sqrt_pi = std::sqrt(std::numbers::pi);
    return ComplexValue(0.0, 0.5 * sqrt_pi) * (std::exp(-z * z) - faddeeva_w(z));
}

} // namespace lrhsr
