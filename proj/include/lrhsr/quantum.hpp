// quantum.hpp — single-exciton correlation-matrix dynamics, exact variance, circulant spectra and slow modes

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrhsr/csv.hpp"
#include "lrhsr/errors.hpp"
#include "lrhsr/model.hpp"
#include "lrhsr/ode.hpp"

namespace lrhsr {

using cplx = std::complex<double>;

struct CorrelationMatrix {
    double t{0.0};
    Eigen::MatrixXcd G;
};

inline void require_1d(const ModelParams& p, const char* what) {
    p.validate();
    if (p.d != 1) throw DomainError(std::string(what) + " is one-dimensional only");
}

inline Eigen::MatrixXd hamiltonian(const ModelParams& p) {
    require_1d(p, "hamiltonian");
    const long N = p.N;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(N, N);
    for (long i = 0; i < N; ++i)
        for (long j = 0; j < N; ++j)
            if (i != j) h(i, j) = hopping_amplitude(p, {j - i, 0, 0});
    return h;
}

inline long center_site(const ModelParams& p) { return p.N / 2; }

inline Eigen::MatrixXcd localized_G0(const ModelParams& p, long site) {
    require_1d(p, "localized_G0");
    if (site < 0 || site >= p.N) throw DomainError("localized_G0: site out of range");
    Eigen::MatrixXcd G = Eigen::MatrixXcd::Zero(p.N, p.N);
    G(site, site) = 1.0;
    return G;
}

struct GTolerances {
    double hermitian{1e-10};
    double trace{1e-9};
    double negativity{-1e-12};
};

inline void check_G_invariants(const Eigen::MatrixXcd& G, double t, cplx trace0, const GTolerances& tol = {}) {
    const double herm = (G - G.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tol.hermitian) throw InvariantError("G not Hermitian at t = " + fmt(t) + ": " + fmt(herm));
    const cplx tr = G.trace();
    if (std::abs(tr - trace0) > tol.trace * std::max(1.0, std::abs(trace0)))
        throw InvariantError("trace of G not conserved at t = " + fmt(t));
    const double lo = G.diagonal().real().minCoeff();
    if (lo < tol.negativity) throw InvariantError("negative population " + fmt(lo) + " at t = " + fmt(t));
    if (G.diagonal().imag().cwiseAbs().maxCoeff() > tol.hermitian)
        throw InvariantError("complex population at t = " + fmt(t));
}

// G' = i[h, G] − γ(G − diag G), integrated adaptively; invariants asserted at each output.
inline std::vector<CorrelationMatrix> propagate_G(const Eigen::MatrixXcd& G0, const ModelParams& p,
                                                  const std::vector<double>& times, OdeOptions opt = {},
                                                  double t0 = 0.0) {
    require_1d(p, "propagate_G");
    if (G0.rows() != p.N || G0.cols() != p.N) throw DomainError("propagate_G: G0 has the wrong size");
    if ((G0 - G0.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("propagate_G: G0 is not Hermitian");
    const Eigen::MatrixXcd h = hamiltonian(p).cast<cplx>();
    const double gamma = p.gamma;
    std::function<void(double, const Eigen::MatrixXcd&, Eigen::MatrixXcd&)> rhs =
        [&h, gamma](double, const Eigen::MatrixXcd& G, Eigen::MatrixXcd& dG) {
            dG.noalias() = h * G;
            dG.noalias() -= G * h;
            dG *= cplx(0.0, 1.0);
            dG -= gamma * G;
            dG.diagonal() += gamma * G.diagonal();
        };
    const cplx trace0 = G0.trace();
    std::vector<CorrelationMatrix> out;
    out.reserve(times.size());
    auto on_output = [&](double t, const Eigen::MatrixXcd& G) {
        check_G_invariants(G, t, trace0);
        out.push_back({t, G});
    };
    if (opt.h_initial <= 0.0) {
        const double scale = h.cwiseAbs().rowwise().sum().maxCoeff() + gamma;
        opt.h_initial = 0.05 / std::max(scale, 1e-300);
    }
    dopri5<Eigen::MatrixXcd>(rhs, t0, G0, times, opt, nullptr, on_output);
    return out;
}

// Variance of the population distribution diag(G) about its mean, positions measured from `origin`
// (minimum image on the ring).
inline double population_variance(const Eigen::MatrixXcd& G, const ModelParams& p, long origin) {
    const long N = p.N;
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (long i = 0; i < N; ++i) {
        const double x = static_cast<double>(p.bc == Boundary::periodic ? min_image(i - origin, N) : i - origin);
        const double n = G(i, i).real();
        m0 += n;
        m1 += n * x;
        m2 += n * x * x;
    }
    const double mean = m1 / m0;
    return m2 / m0 - mean * mean;
}

// sum_r r^2 H_r^2 over the finite lattice, seen from the central site.
inline double hopping_second_moment(const ModelParams& p) {
    require_1d(p, "hopping_second_moment");
    const long c = center_site(p);
    double s = 0.0;
    for (long i = 0; i < p.N; ++i) {
        if (i == c) continue;
        const long r = p.bc == Boundary::periodic ? min_image(i - c, p.N) : i - c;
        const double h = hopping_amplitude(p, {i - c, 0, 0});
        s += static_cast<double>(r) * r * h * h;
    }
    return s;
}

// 2 S/γ² (γt + e^{−γt} − 1) with S = sum_r r² H_r².
inline double variance_closed_form(const ModelParams& p, double t) {
    if (!(p.gamma > 0.0)) throw DomainError("variance_closed_form requires gamma > 0");
    const double S = hopping_second_moment(p);
    const double gt = p.gamma * t;
    return 2.0 * S / (p.gamma * p.gamma) * (gt + std::expm1(-gt));
}

// ---- weak-dephasing spectral machinery (periodic ring, odd N) ----

inline double momentum(long q_index, long N) { return 2.0 * std::numbers::pi * static_cast<double>(q_index) / N; }

inline void require_spectral(const ModelParams& p, const char* what) {
    require_1d(p, what);
    if (p.bc != Boundary::periodic) throw DomainError(std::string(what) + " requires periodic boundaries");
}

inline void require_odd(const ModelParams& p, const char* what) {
    if (p.N % 2 == 0)
        throw DomainError(std::string(what) + " requires odd N: even N gives exact degeneracies in the unperturbed spectrum");
}

// (C_q)_{m,j} = i [1 − e^{iq(m−j)}] h_{m,j}
inline Eigen::MatrixXcd build_circulant(double q, const ModelParams& p) {
    require_spectral(p, "build_circulant");
    const long N = p.N;
    std::vector<cplx> row(static_cast<std::size_t>(N), 0.0); // entry for m − j ≡ u (mod N)
    for (long u = 1; u < N; ++u)
        row[static_cast<std::size_t>(u)] = cplx(0.0, 1.0) * (1.0 - std::exp(cplx(0.0, q * u))) * hopping_amplitude(p, {u, 0, 0});
    Eigen::MatrixXcd C(N, N);
    for (long m = 0; m < N; ++m)
        for (long j = 0; j < N; ++j) C(m, j) = row[static_cast<std::size_t>(((m - j) % N + N) % N)];
    return C;
}

inline Eigen::MatrixXcd dephasing_matrix(long N) {
    Eigen::MatrixXcd X = Eigen::MatrixXcd::Identity(N, N);
    X(0, 0) = 0.0;
    return X;
}

// E^{(0)}_{q,k} = sum_m (C_q)_{0,m} e^{imk}, k = 2π k_index / N.
inline std::vector<cplx> unperturbed_spectrum(long q_index, const ModelParams& p) {
    require_spectral(p, "unperturbed_spectrum");
    require_odd(p, "unperturbed_spectrum");
    const long N = p.N;
    const double q = momentum(q_index, N);
    std::vector<cplx> first(static_cast<std::size_t>(N), 0.0);
    for (long m = 1; m < N; ++m) {
        const long u = (N - m) % N; // (C_q)_{0,m} has m − j = −m
        first[static_cast<std::size_t>(m)] =
            cplx(0.0, 1.0) * (1.0 - std::exp(cplx(0.0, -q * m))) * hopping_amplitude(p, {u, 0, 0});
    }
    std::vector<cplx> E(static_cast<std::size_t>(N));
    for (long k = 0; k < N; ++k) {
        cplx s = 0.0;
        for (long m = 0; m < N; ++m) s += first[static_cast<std::size_t>(m)] * std::exp(cplx(0.0, momentum(m * k % N, N)));
        E[static_cast<std::size_t>(k)] = s;
    }
    return E;
}

// Rayleigh-Schrodinger series for C_q + γX in the plane-wave basis, truncated at `order`:
// E = E0 + γ(N−1)/N + (γ²/N²) sum_p 1/(E_k − E_p) − (γ³/N³) sum_{p≠s} 1/((E_k − E_p)(E_k − E_s)).
inline std::vector<cplx> perturbative_spectrum(long q_index, const ModelParams& p, int order = 3) {
    if (order < 0 || order > 3) throw DomainError("perturbative_spectrum: order must be 0..3");
    const auto E0 = unperturbed_spectrum(q_index, p);
    const long N = p.N;
    const double g = p.gamma;
    const double Nd = static_cast<double>(N);
    std::vector<cplx> E(E0.size());
    for (long k = 0; k < N; ++k) {
        const cplx ek = E0[static_cast<std::size_t>(k)];
        cplx s1 = 0.0, s2 = 0.0; // sum 1/(E_k − E_p), sum 1/(E_k − E_p)^2
        double gap = std::numeric_limits<double>::infinity();
        for (long pp = 0; pp < N; ++pp) {
            if (pp == k) continue;
            const cplx diff = ek - E0[static_cast<std::size_t>(pp)];
            gap = std::min(gap, std::abs(diff));
            if (order >= 2) {
                s1 += 1.0 / diff;
                s2 += 1.0 / (diff * diff);
            }
        }
        if (order >= 2 && gap < 1e-8)
            throw DegeneracyError("perturbative_spectrum: near-degenerate unperturbed level (gap " + fmt(gap) +
                                  ") at q index " + std::to_string(q_index) + ", k index " + std::to_string(k));
        cplx e = ek;
        if (order >= 1) e += g * (Nd - 1.0) / Nd;
        if (order >= 2) e += g * g / (Nd * Nd) * s1;
        if (order >= 3) e -= g * g * g / (Nd * Nd * Nd) * (s1 * s1 - s2);
        E[static_cast<std::size_t>(k)] = e;
    }
    return E;
}

enum class Branch { real, complex };

inline constexpr double real_branch_threshold = 1e-9;

struct SpectralSet {
    long q_index{0};
    double q{0.0};
    Eigen::VectorXcd E;          // eigenvalues of C_q + γX (decay as e^{−Et})
    Eigen::MatrixXcd V;          // right eigenvectors (columns); empty when not requested
    std::vector<Branch> branch;
    double condition{0.0};       // 2-norm condition number of V (0 when not computed)
};

inline SpectralSet solve_momentum(long q_index, const ModelParams& p, bool vectors = true) {
    require_spectral(p, "solve_momentum");
    require_odd(p, "solve_momentum");
    SpectralSet s;
    s.q_index = q_index;
    s.q = momentum(q_index, p.N);
    const Eigen::MatrixXcd M = build_circulant(s.q, p) + p.gamma * dephasing_matrix(p.N);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, vectors);
    if (es.info() != Eigen::Success)
        throw SpectralError("eigensolver did not converge at q index " + std::to_string(q_index));
    s.E = es.eigenvalues();
    if (vectors) {
        s.V = es.eigenvectors();
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s.V);
        const auto& sv = svd.singularValues();
        s.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    }
    s.branch.resize(static_cast<std::size_t>(s.E.size()));
    for (long k = 0; k < s.E.size(); ++k)
        s.branch[static_cast<std::size_t>(k)] = std::abs(s.E[k].imag()) <= real_branch_threshold ? Branch::real : Branch::complex;
    return s;
}

struct SlowModeSummary {
    long N{0};
    std::optional<double> real_min;    // smallest Re E over real eigenvalues, stationary mode excluded
    std::optional<double> complex_min; // smallest Re E over the complex branch
    std::vector<double> slow_real;     // real eigenvalues below γ, ascending
};

// Summary over already solved momenta (all q of one ring).
inline SlowModeSummary slow_modes(const std::vector<SpectralSet>& sets, const ModelParams& p) {
    SlowModeSummary s;
    s.N = p.N;
    for (const auto& set : sets) {
        for (long k = 0; k < set.E.size(); ++k) {
            const cplx e = set.E[k];
            if (set.branch[static_cast<std::size_t>(k)] == Branch::real) {
                if (std::abs(e) <= 1e-12) continue; // stationary state
                if (!s.real_min || e.real() < *s.real_min) s.real_min = e.real();
                if (e.real() < p.gamma * (1.0 - 1e-12)) s.slow_real.push_back(e.real());
            } else {
                if (!s.complex_min || e.real() < *s.complex_min) s.complex_min = e.real();
            }
        }
    }
    std::sort(s.slow_real.begin(), s.slow_real.end());
    return s;
}

inline SlowModeSummary slow_modes(const ModelParams& p) {
    require_spectral(p, "slow_modes");
    require_odd(p, "slow_modes");
    std::vector<SpectralSet> sets;
    for (long qi = 0; qi < p.N; ++qi) sets.push_back(solve_momentum(qi, p, false));
    return slow_modes(sets, p);
}

struct PowerFit {
    double exponent{0.0};
    double prefactor{0.0};
    double residual{0.0};
};

// Least squares of log y against log x.
inline PowerFit power_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw FitError("power_fit needs at least two points");
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw FitError("power_fit: non-positive data");
        mx += std::log(x[i]);
        my += std::log(y[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log(x[i]) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y[i]) - my);
    }
    if (sxx == 0.0) throw FitError("power_fit: degenerate abscissae");
    PowerFit f;
    f.exponent = sxy / sxx;
    const double c = my - f.exponent * mx;
    f.prefactor = std::exp(c);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = std::log(y[i]) - c - f.exponent * std::log(x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    return f;
}

// Fit of the real-branch gap against N over the largest three sizes.
inline PowerFit slow_gap_fit(const std::vector<SlowModeSummary>& runs) {
    std::vector<const SlowModeSummary*> sorted;
    for (const auto& r : runs) sorted.push_back(&r);
    std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->N < b->N; });
    if (sorted.size() < 2) throw FitError("slow_gap_fit needs at least two sizes");
    const std::size_t first = sorted.size() > 3 ? sorted.size() - 3 : 0;
    std::vector<double> x, y;
    for (std::size_t i = first; i < sorted.size(); ++i) {
        if (!sorted[i]->real_min) throw FitError("slow_gap_fit: no real eigenvalue at N = " + std::to_string(sorted[i]->N));
        x.push_back(static_cast<double>(sorted[i]->N));
        y.push_back(*sorted[i]->real_min);
    }
    return power_fit(x, y);
}

struct SpectralPropagation {
    CorrelationMatrix state;
    double max_condition{0.0};
};

// G_{j,m}(t) = sum_q e^{iqj} g^q_{m−j}(t), g^q(t) = V e^{−Λt} V^{−1} g^q(0),
// g^q_n(0) = (1/N) sum_j e^{−iqj} G_{j,j+n}(0). V^{−1} rows are the left eigenvectors.
inline SpectralPropagation spectral_propagate_G(const Eigen::MatrixXcd& G0, const ModelParams& p, double t,
                                                double max_condition = 1e12) {
    require_spectral(p, "spectral_propagate_G");
    require_odd(p, "spectral_propagate_G");
    const long N = p.N;
    if (G0.rows() != N || G0.cols() != N) throw DomainError("spectral_propagate_G: G0 has the wrong size");
    SpectralPropagation out;
    out.state.t = t;
    out.state.G = Eigen::MatrixXcd::Zero(N, N);
    for (long qi = 0; qi < N; ++qi) {
        const SpectralSet s = solve_momentum(qi, p, true);
        out.max_condition = std::max(out.max_condition, s.condition);
        if (!(s.condition <= max_condition))
            throw ConditioningError("spectral_propagate_G: eigenbasis condition " + fmt(s.condition) + " at q index " +
                                        std::to_string(qi) + "; use propagate_G instead",
                                    s.condition);
        Eigen::VectorXcd g0 = Eigen::VectorXcd::Zero(N);
        for (long n = 0; n < N; ++n) {
            cplx acc = 0.0;
            for (long j = 0; j < N; ++j) acc += std::exp(cplx(0.0, -s.q * j)) * G0(j, (j + n) % N);
            g0[n] = acc / static_cast<double>(N);
        }
        const Eigen::VectorXcd c = s.V.partialPivLu().solve(g0);
        Eigen::VectorXcd decay(N);
        for (long k = 0; k < N; ++k) decay[k] = std::exp(-s.E[k] * t) * c[k];
        const Eigen::VectorXcd gt = s.V * decay;
        for (long j = 0; j < N; ++j) {
            const cplx phase = std::exp(cplx(0.0, s.q * j));
            for (long m = 0; m < N; ++m) out.state.G(j, m) += phase * gt[((m - j) % N + N) % N];
        }
    }
    return out;
}

inline void write_spectrum_csv(std::ostream& os, const std::vector<SpectralSet>& sets) {
    os << "q_index,k_index,re_E,im_E,branch\n";
    for (const auto& s : sets)
        for (long k = 0; k < s.E.size(); ++k)
            os << s.q_index << ',' << k << ',' << fmt(s.E[k].real()) << ',' << fmt(s.E[k].imag()) << ','
               << (s.branch[static_cast<std::size_t>(k)] == Branch::real ? "real" : "complex") << '\n';
}

} // namespace lrhsr
