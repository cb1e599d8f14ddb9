// analytic.hpp — lattice sums, structure function, asymptotic coefficients, profiles and crossover scales

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "lrhsr/errors.hpp"
#include "lrhsr/model.hpp"
#include "lrhsr/specfn.hpp"

namespace lrhsr {

using Momentum = std::array<double, 3>; // unused axes are 0

namespace detail {

// Upper incomplete gamma Gamma(a, x) for real a and x > 0.
inline double upper_gamma(double a, double x) {
    if (a > 0.0) return boost::math::tgamma(a, x);
    if (a == 0.0) return boost::math::expint(1, x);
    const int n = static_cast<int>(std::ceil(-a));
    const double a0 = a + n; // in [0, 1)
    double g = a0 > 0.0 ? boost::math::tgamma(a0, x) : boost::math::expint(1, x);
    const double ex = std::exp(-x);
    for (int i = 1; i <= n; ++i) {
        const double b = a0 - i;
        g = (g - std::pow(x, b) * ex) / b;
    }
    return g;
}

// sum_{r != 0} e^{-i q.r} |r|^{-s} over Z^d by the theta-function (Ewald) splitting,
// valid for every s > 0 by analytic continuation; q = 0 requires s != d.
inline double epstein_zeta(double s, int d, const Momentum& q) {
    const double pi = std::numbers::pi;
    constexpr long box = 5;
    const long lo[3] = {-box, d >= 2 ? -box : 0, d >= 3 ? -box : 0};
    const long hi[3] = {box, d >= 2 ? box : 0, d >= 3 ? box : 0};
    const double a_dir = 0.5 * s;
    const double a_rec = 0.5 * (d - s);

    double direct = 0.0;
    double recip = 0.0;
    for (long x = lo[0]; x <= hi[0]; ++x)
        for (long y = lo[1]; y <= hi[1]; ++y)
            for (long z = lo[2]; z <= hi[2]; ++z) {
                const long r2 = x * x + y * y + z * z;
                if (r2 != 0) {
                    const double u = pi * r2;
                    if (u < 700.0)
                        direct += std::cos(q[0] * x + q[1] * y + q[2] * z) * upper_gamma(a_dir, u) *
                                  std::pow(u, -a_dir);
                }
                const double kx = x + q[0] / (2 * pi);
                const double ky = y + q[1] / (2 * pi);
                const double kz = z + q[2] / (2 * pi);
                const double u = pi * (kx * kx + ky * ky + kz * kz);
                if (u == 0.0) {
                    if (s == d) throw DivergenceError("lattice sum diverges at s = d");
                    recip += 2.0 / (s - d);
                } else if (u < 700.0) {
                    recip += upper_gamma(a_rec, u) * std::pow(u, -a_rec);
                }
            }
    return std::pow(pi, a_dir) / std::tgamma(a_dir) * (direct + recip - 2.0 / s);
}

inline double sphere_area(int d) {
    const double pi = std::numbers::pi;
    return 2.0 * std::pow(pi, 0.5 * d) / std::tgamma(0.5 * d);
}

} // namespace detail

// Infinite-lattice sum_{r != 0} |r|^{-s}: 2 zeta(s) in d = 1, theta-function splitting in d >= 2.
inline double lattice_sum(double s, int d) {
    if (d < 1 || d > 3) throw DomainError("lattice_sum requires 1 <= d <= 3");
    if (!(s > d)) throw DivergenceError("infinite lattice sum diverges for s <= d");
    if (d == 1) return 2.0 * riemann_zeta(s);
    return detail::epstein_zeta(s, d, {0.0, 0.0, 0.0});
}

// Finite lattice: periodic sums over minimum-image displacements of the N^d torus,
// open sums over displacements from the central site c = N/2 (per axis) to every other site.
inline double lattice_sum_finite(double s, int d, long N, Boundary bc) {
    if (d < 1 || d > 3 || N < 2) throw DomainError("lattice_sum_finite: invalid lattice");
    const long c = N / 2;
    const long n1 = N, n2 = d >= 2 ? N : 1, n3 = d >= 3 ? N : 1;
    double sum = 0.0;
    for (long x = 0; x < n1; ++x)
        for (long y = 0; y < n2; ++y)
            for (long z = 0; z < n3; ++z) {
                long r[3];
                const long xs[3] = {x, y, z};
                for (int a = 0; a < 3; ++a) {
                    if (a >= d) r[a] = 0;
                    else r[a] = bc == Boundary::periodic ? min_image(xs[a], N) : xs[a] - c;
                }
                const long r2 = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
                if (r2 != 0) sum += inverse_power(r2, s);
            }
    return sum;
}

// Direct summation over |r| <= R with an integral tail beyond the volume-equivalent radius.
inline double lattice_sum_direct(double s, int d, long R) {
    if (!(s > d)) throw DivergenceError("infinite lattice sum diverges for s <= d");
    const long R2 = R * R;
    const long ly = d >= 2 ? R : 0, lz = d >= 3 ? R : 0;
    double sum = 0.0;
    long count = 0;
    for (long x = -R; x <= R; ++x)
        for (long y = -ly; y <= ly; ++y) {
            const long xy = x * x + y * y;
            if (xy > R2) continue;
            for (long z = -lz; z <= lz; ++z) {
                const long r2 = xy + z * z;
                if (r2 > R2) continue;
                ++count;
                if (r2 != 0) sum += inverse_power(r2, s);
            }
        }
    const double ball = detail::sphere_area(d) / d; // volume of the unit ball
    const double rho = std::pow(count / ball, 1.0 / d);
    return sum + detail::sphere_area(d) * std::pow(rho, d - s) / (s - d);
}

// 𝒜_{2α,d}(q)/κ = sum_{r != 0} |r|^{-2α} cos(q.r) on the infinite lattice.
class StructureFunction {
public:
    explicit StructureFunction(const ModelParams& p) : params_(p) {
        if (!(2.0 * p.alpha > p.d)) throw DivergenceError("structure function requires 2 alpha > d");
        a0_ = lattice_sum(2.0 * p.alpha, p.d);
    }

    const ModelParams& params() const { return params_; }
    double A0() const { return a0_; }

    double operator()(const Momentum& q) const {
        const double pi = std::numbers::pi;
        Momentum w{0.0, 0.0, 0.0};
        bool zero = true;
        for (int i = 0; i < params_.d; ++i) {
            if (!std::isfinite(q[i])) throw DomainError("structure function: non-finite momentum");
            w[i] = std::remainder(q[i], 2 * pi);
            if (w[i] == -pi) w[i] = pi;
            zero = zero && w[i] == 0.0;
        }
        if (zero) return a0_;
        if (params_.d == 1) return 2.0 * polylog_circle(2.0 * params_.alpha, w[0]).real();
        return detail::epstein_zeta(2.0 * params_.alpha, params_.d, w);
    }

private:
    ModelParams params_;
    double a0_{0.0};
};

// ---- Lévy coefficient C_α in its three forms ----

// d = 1, 2α not an integer.
inline double c_alpha_polylog(double alpha, double kappa) {
    if (std::abs(2 * alpha - std::round(2 * alpha)) < 1e-12)
        throw DomainError("c_alpha_polylog requires non-integer 2 alpha");
    return -2.0 * kappa * std::tgamma(1.0 - 2.0 * alpha) * std::sin(alpha * std::numbers::pi);
}

// d = 1, α ∈ ℕ: from the exact polynomial form of the structure function.
inline double c_alpha_integer(int alpha, double kappa) {
    if (alpha < 1) throw DomainError("c_alpha_integer requires alpha >= 1");
    const double sign = (alpha % 2 == 1) ? 1.0 : -1.0; // (-1)^{α+1}
    return sign * std::numbers::pi / std::tgamma(2.0 * alpha) * kappa;
}

// Continuum form for any d; undefined at poles of Γ(d/2 − α).
inline double c_alpha_continuum(double alpha, int d, double kappa) {
    const double a = 0.5 * d - alpha;
    if (a <= 0.0 && std::abs(a - std::round(a)) < 1e-12)
        throw DomainError("c_alpha_continuum: pole of Gamma(d/2 - alpha)");
    const double pi = std::numbers::pi;
    return -kappa * std::pow(pi, 0.5 * d) * std::pow(2.0, d - 2.0 * alpha) * std::tgamma(a) / std::tgamma(alpha);
}

enum class Regime { levy, mixed };

struct AsymptoticCoefficients {
    double alpha_cr{0.0};
    Regime regime{Regime::levy};
    std::optional<double> D_alpha; // sites^2 / time; only in the mixed regime
    std::optional<double> C_alpha; // sites^{2α-d} / time; absent where the singular term is logarithmic
};

inline AsymptoticCoefficients coefficients(const ModelParams& p) {
    p.validate();
    if (!(2.0 * p.alpha > p.d)) throw DivergenceError("coefficients require alpha > d/2");
    const double kappa = p.kappa();
    AsymptoticCoefficients c;
    c.alpha_cr = alpha_critical(p.d);
    c.regime = p.alpha > c.alpha_cr ? Regime::mixed : Regime::levy;
    if (c.regime == Regime::mixed) c.D_alpha = 0.5 * kappa * lattice_sum(2.0 * p.alpha - 2.0, p.d);

    const double two_alpha = 2.0 * p.alpha;
    const bool two_alpha_int = std::abs(two_alpha - std::round(two_alpha)) < 1e-12;
    if (p.d == 1) {
        if (!two_alpha_int) c.C_alpha = c_alpha_polylog(p.alpha, kappa);
        else if (std::lround(two_alpha) % 2 == 0) c.C_alpha = c_alpha_integer(static_cast<int>(std::lround(p.alpha)), kappa);
    } else {
        const double a = 0.5 * p.d - p.alpha;
        const bool pole = a <= 0.0 && std::abs(a - std::round(a)) < 1e-12;
        if (!pole) c.C_alpha = c_alpha_continuum(p.alpha, p.d, kappa);
    }
    return c;
}

// ---- small-q expansion of 𝒜(q)/κ ----

enum class ExpansionBranch { generic, integer_alpha, half_integer_alpha, higher_d };

struct Expansion {
    double value{0.0};      // 𝒜(q)/κ
    ExpansionBranch branch{ExpansionBranch::generic};
    bool exact{false};      // no truncation (integer α in d = 1)
    int residual_order{0};  // the neglected terms are O(|q|^residual_order), up to logarithms
};

inline Expansion small_q_expansion(const ModelParams& p, const Momentum& q) {
    if (!(2.0 * p.alpha > p.d)) throw DivergenceError("small_q_expansion requires alpha > d/2");
    const double pi = std::numbers::pi;
    double q2 = 0.0;
    for (int i = 0; i < p.d; ++i) q2 += q[i] * q[i];
    const double qa = std::sqrt(q2);
    const double two_alpha = 2.0 * p.alpha;
    const bool two_alpha_int = std::abs(two_alpha - std::round(two_alpha)) < 1e-12;
    Expansion e;

    if (p.d == 1) {
        if (!two_alpha_int) {
            // -C|q|^{2α-1} + 2 sum_{j<=1} (-1)^j ζ(2α-2j) q^{2j}/(2j)!
            e.branch = ExpansionBranch::generic;
            const double c = c_alpha_polylog(p.alpha, 1.0);
            e.value = (qa > 0.0 ? -c * std::pow(qa, two_alpha - 1.0) : 0.0) + 2.0 * riemann_zeta(two_alpha) -
                      detail::zeta_continued(two_alpha - 2.0) * q2;
            e.residual_order = 4;
            return e;
        }
        const long m = std::lround(two_alpha);
        if (m % 2 == 0) {
            // (-1)^α π/(2α-1)! |q|^{2α-1} + 2 sum_{j=0}^{α} (-1)^j ζ_{2α-2j} q^{2j}/(2j)!, ζ_0 = -1/2
            e.branch = ExpansionBranch::integer_alpha;
            const long a = m / 2;
            const double sign = a % 2 == 0 ? 1.0 : -1.0;
            double v = sign * pi / std::tgamma(2.0 * a) * std::pow(qa, 2.0 * a - 1.0);
            double qpow = 1.0, fact = 1.0;
            for (long j = 0; j <= a; ++j) {
                if (j > 0) {
                    qpow *= q2;
                    fact *= (2.0 * j - 1.0) * (2.0 * j);
                }
                const double z = (j == a) ? -0.5 : riemann_zeta(2.0 * (a - j));
                v += 2.0 * ((j % 2 == 0) ? 1.0 : -1.0) * z * qpow / fact;
            }
            e.value = v;
            e.exact = true;
            return e;
        }
        // 2α = 2s+1 odd, s >= 1
        e.branch = ExpansionBranch::half_integer_alpha;
        const long s = (m - 1) / 2;
        const double logq2 = qa > 0.0 ? std::log(q2) : 0.0;
        if (s == 1) {
            e.value = 0.5 * q2 * logq2 + 2.0 * riemann_zeta(3.0) - 1.5 * q2;
        } else {
            const double sign = (s % 2 == 1) ? 1.0 : -1.0; // (-1)^{s+1}
            e.value = sign * std::pow(q2, static_cast<double>(s)) / std::tgamma(2.0 * s + 1.0) * logq2 +
                      2.0 * riemann_zeta(2.0 * s + 1.0) - riemann_zeta(2.0 * s - 1.0) * q2;
        }
        e.residual_order = 4;
        return e;
    }

    // d >= 2
    e.branch = ExpansionBranch::higher_d;
    const double alpha_cr = alpha_critical(p.d);
    double v = lattice_sum(two_alpha, p.d);
    // cubic symmetry: sum r^{-2α}(q.r)^2 = (q^2/d) sum r^{2-2α}
    if (p.alpha > alpha_cr) v -= 0.5 / p.d * lattice_sum(two_alpha - 2.0, p.d) * q2;
    const double a = 0.5 * p.d - p.alpha;
    const bool pole = a <= 0.0 && std::abs(a - std::round(a)) < 1e-12;
    if (qa > 0.0) {
        if (!pole) {
            v -= c_alpha_continuum(p.alpha, p.d, 1.0) * std::pow(qa, two_alpha - p.d);
        } else {
            // logarithmic singular term at the poles of Γ(d/2 − α): |q|^{2n} log q^2 with n = α − d/2
            const long n = std::lround(-a);
            const double sign = n % 2 == 0 ? 1.0 : -1.0;
            v -= sign * std::pow(pi, p.alpha) / std::tgamma(p.alpha) / std::tgamma(n + 1.0) *
                 std::pow(q2 / (4.0 * pi), static_cast<double>(n)) * std::log(q2);
        }
    }
    e.value = v;
    e.residual_order = p.alpha > alpha_cr ? (pole ? 2 * static_cast<int>(std::lround(-a)) : 4) : 2;
    return e;
}

// ---- profiles ----

// Branch values at real distance rho; the asymptotic profile is their maximum.
struct ProfileBranches {
    double gaussian{0.0}; // 0 in the Lévy regime
    double tail{0.0};
};

// D_α fixes the total variance 2D_α t, so each axis diffuses with D_α/d.
inline double axis_diffusion(const ModelParams& p, const AsymptoticCoefficients& c) {
    if (!c.D_alpha) throw DomainError("axis_diffusion requires alpha > alpha_cr");
    return *c.D_alpha / p.d;
}

inline ProfileBranches profile_branches(double rho, double t, const ModelParams& p) {
    if (!(t > 0.0)) throw DomainError("asymptotic profile requires t > 0");
    const auto c = coefficients(p);
    ProfileBranches b;
    const double kt = p.kappa() * t;
    b.tail = rho > 0.0 ? kt * std::pow(rho, -2.0 * p.alpha) : std::numeric_limits<double>::infinity();
    if (c.regime == Regime::mixed) {
        const double fourDt = 4.0 * axis_diffusion(p, c) * t;
        b.gaussian = std::exp(-rho * rho / fourDt) / std::pow(std::numbers::pi * fourDt, 0.5 * p.d);
    }
    return b;
}

inline double asymptotic_profile_radial(double rho, double t, const ModelParams& p) {
    const auto b = profile_branches(rho, t, p);
    if (rho == 0.0) {
        if (b.gaussian == 0.0)
            throw DomainError("asymptotic profile: power-law branch undefined at the origin; use the spectral solver");
        return b.gaussian;
    }
    return std::max(b.gaussian, b.tail);
}

inline double asymptotic_profile(const Coord& j, double t, const ModelParams& p) {
    return asymptotic_profile_radial(std::sqrt(static_cast<double>(norm2(j, p.d))), t, p);
}

struct ExactProfileValue {
    double value{0.0};
    bool fallback{false}; // Dawson argument outside the stability radius; value is κt/j^2
};

// α = 1, d = 1: n_j = [D_F((ij+πκt)/√(2κt)) − D_F((ij−πκt)/√(2κt))]/√(2κtπ²),
// evaluated as Im w(z)/√(2πκt) with z = (πκt + ij)/√(2κt).
inline ExactProfileValue exact_profile_alpha1(long j, double t, const ModelParams& p) {
    if (p.d != 1 || p.alpha != 1.0) throw DomainError("exact_profile_alpha1 requires alpha = 1, d = 1");
    if (!(t > 0.0)) throw DomainError("exact_profile_alpha1 requires t > 0");
    const double kt = p.kappa() * t;
    const double s = std::sqrt(2.0 * kt);
    j = std::abs(j); // even profile; keeps z in the upper half plane
    const ComplexValue z(std::numbers::pi * kt / s, static_cast<double>(j) / s);
    if (std::abs(z) > dawson_stability_radius) {
        if (j == 0) throw AccuracyError("exact_profile_alpha1: origin outside the stability radius");
        return {kt / (static_cast<double>(j) * j), true};
    }
    return {faddeeva_w(z).imag() / std::sqrt(std::numbers::pi * 2.0 * kt), false};
}

// ---- crossover scales ----

struct CrossoverScales {
    std::optional<double> xi_exact;  // absent for t < t_cr
    std::optional<double> xi_approx; // absent where its logarithm is not positive
    double t_cr{0.0};
};

inline CrossoverScales crossover(const ModelParams& p, double t) {
    const auto c = coefficients(p);
    if (c.regime != Regime::mixed) throw DomainError("crossover requires alpha > alpha_cr");
    if (!(t > 0.0)) throw DomainError("crossover requires t > 0");
    const double pi = std::numbers::pi;
    const double D = axis_diffusion(p, c);
    const double kappa = p.kappa();
    const double a = p.alpha;
    const double pd = std::pow(pi, 0.5 * p.d);
    CrossoverScales out;
    out.t_cr = 1.0 / (4.0 * D) * std::pow(pd * kappa * std::exp(a) / (4.0 * D * std::pow(a, a)), 1.0 / (a - c.alpha_cr));

    const double fourDt = 4.0 * D * t;
    const double b = std::pow(fourDt, c.alpha_cr - a) * pd * kappa / (4.0 * D);
    double y = -std::pow(b, 1.0 / a) / a;
    const double branch = -1.0 / std::numbers::e;
    if (y >= branch * (1.0 + 1e-12)) {
        y = std::max(y, branch);
        out.xi_exact = std::sqrt(-4.0 * a * D * t * lambert_w_m1(y));
    }
    const double arg = 4.0 * std::pow(a, a) * D / (pd * kappa) * std::pow(fourDt, a - c.alpha_cr);
    if (arg > 1.0) out.xi_approx = std::sqrt(fourDt * std::log(arg));
    return out;
}

// L²(long range) / L²(nearest neighbour) for dipolar (r^{-6} rate) transfer.
inline double forster_ratio(int d) {
    if (d < 1 || d > 3) throw DomainError("forster_ratio requires 1 <= d <= 3");
    return lattice_sum(4.0, d) / (2.0 * d);
}

} // namespace lrhsr
