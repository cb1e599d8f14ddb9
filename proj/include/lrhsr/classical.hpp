// classical.hpp — classical master equation: generators, ODE and spectral solvers, moments, tail fits

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lrhsr/csv.hpp"
#include "lrhsr/errors.hpp"
#include "lrhsr/fft.hpp"
#include "lrhsr/model.hpp"
#include "lrhsr/ode.hpp"

namespace lrhsr {

struct DensityProfile {
    double t{0.0};
    int d{1};
    long N{0};
    Boundary bc{Boundary::open};
    Coord origin{0, 0, 0};      // site of the initial excitation; offsets are reported relative to it
    std::vector<double> values; // row-major over N^d sites

    long size() const { return static_cast<long>(values.size()); }

    // Signed position of site `idx` relative to the origin (minimum image under periodic bc).
    Coord offset(long idx) const {
        const Coord c = unflatten(idx, N, d);
        Coord r{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            r[a] = c[a] - origin[a];
            if (bc == Boundary::periodic) r[a] = min_image(r[a], N);
        }
        return r;
    }

    double at(const Coord& offset_from_origin) const {
        Coord c{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            c[a] = origin[a] + offset_from_origin[a];
            if (bc == Boundary::periodic) c[a] = ((c[a] % N) + N) % N;
        }
        return values[static_cast<std::size_t>(flatten(c, N, d))];
    }

    double total() const {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
};

inline Coord lattice_center(const ModelParams& p) {
    Coord c{0, 0, 0};
    for (int a = 0; a < p.d; ++a) c[a] = p.N / 2;
    return c;
}

// Centre of the face x_0 = 0: the "edge" excitation site for d >= 2 (site 0 in d = 1).
inline Coord edge_site(const ModelParams& p) {
    Coord c = lattice_center(p);
    c[0] = 0;
    return c;
}

inline DensityProfile delta_profile(const ModelParams& p, const Coord& site) {
    p.validate();
    DensityProfile n;
    n.d = p.d;
    n.N = p.N;
    n.bc = p.bc;
    n.origin = site;
    n.values.assign(static_cast<std::size_t>(p.sites()), 0.0);
    n.values[static_cast<std::size_t>(flatten(site, p.N, p.d))] = 1.0;
    return n;
}

// Linear generator (L n)_i = sum_{j != i} w_ij (n_j - n_i) with w_ij = classical_rate(i - j).
class Generator {
public:
    enum class Method { automatic, direct, fft };

    explicit Generator(const ModelParams& p, Method m = Method::automatic) : p_(p) {
        p.validate();
        sites_ = p.sites();
        if (m == Method::automatic) m = (p.d == 1 || sites_ <= 4096) ? Method::direct : Method::fft;
        method_ = m;
        if (method_ == Method::direct) build_direct();
        else build_fft();
    }

    Method method() const { return method_; }
    long sites() const { return sites_; }
    const ModelParams& params() const { return p_; }

    // Total escape rate sum_j w_ij of site i.
    double escape_rate(long i) const { return escape_[static_cast<std::size_t>(i)]; }
    double max_escape_rate() const { return *std::max_element(escape_.begin(), escape_.end()); }

    void apply(const Eigen::VectorXd& n, Eigen::VectorXd& out) const {
        out.resize(sites_);
        if (method_ == Method::direct) apply_direct(n, out);
        else apply_fft(n, out);
    }

    // Dense generator matrix (for small lattices and exact-eigendecomposition paths).
    Eigen::MatrixXd dense() const {
        Eigen::MatrixXd L(sites_, sites_);
        Eigen::VectorXd e = Eigen::VectorXd::Zero(sites_), col(sites_);
        for (long j = 0; j < sites_; ++j) {
            e.setZero();
            e[j] = 1.0;
            apply(e, col);
            L.col(j) = col;
        }
        return L;
    }

private:
    // periodic: kernel indexed by flattened displacement; open: kernel indexed by squared distance
    void build_direct() {
        escape_.assign(static_cast<std::size_t>(sites_), 0.0);
        if (p_.bc == Boundary::periodic) {
            kernel_.assign(static_cast<std::size_t>(sites_), 0.0);
            double total = 0.0;
            for (long r = 1; r < sites_; ++r) {
                kernel_[static_cast<std::size_t>(r)] = classical_rate(p_, unflatten(r, p_.N, p_.d));
                total += kernel_[static_cast<std::size_t>(r)];
            }
            std::fill(escape_.begin(), escape_.end(), total);
        } else {
            const long r2max = p_.d * (p_.N - 1) * (p_.N - 1);
            kernel_.assign(static_cast<std::size_t>(r2max + 1), 0.0);
            const double kappa = p_.kappa();
            for (long r2 = 1; r2 <= r2max; ++r2) kernel_[static_cast<std::size_t>(r2)] = kappa * inverse_power(r2, 2.0 * p_.alpha);
            for (long i = 0; i < sites_; ++i) {
                const Coord ci = unflatten(i, p_.N, p_.d);
                double s = 0.0;
                for (long j = 0; j < sites_; ++j) {
                    if (j == i) continue;
                    s += kernel_[static_cast<std::size_t>(norm2(diff(ci, unflatten(j, p_.N, p_.d)), p_.d))];
                }
                escape_[static_cast<std::size_t>(i)] = s;
            }
        }
    }

    static Coord diff(const Coord& a, const Coord& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

    void apply_direct(const Eigen::VectorXd& n, Eigen::VectorXd& out) const {
        const long N = p_.N;
        if (p_.d == 1) {
            if (p_.bc == Boundary::periodic) {
                for (long i = 0; i < N; ++i) {
                    double s = 0.0;
                    const double ni = n[i];
                    for (long m = 1; m < N; ++m) {
                        long j = i + m;
                        if (j >= N) j -= N;
                        s += kernel_[static_cast<std::size_t>(m)] * (n[j] - ni);
                    }
                    out[i] = s;
                }
            } else {
                for (long i = 0; i < N; ++i) {
                    double s = 0.0;
                    const double ni = n[i];
                    for (long j = 0; j < N; ++j) {
                        if (j == i) continue;
                        const long r = j - i;
                        s += kernel_[static_cast<std::size_t>(r * r)] * (n[j] - ni);
                    }
                    out[i] = s;
                }
            }
            return;
        }
        for (long i = 0; i < sites_; ++i) {
            const Coord ci = unflatten(i, N, p_.d);
            double s = 0.0;
            const double ni = n[i];
            for (long j = 0; j < sites_; ++j) {
                if (j == i) continue;
                const Coord cj = unflatten(j, N, p_.d);
                double w;
                if (p_.bc == Boundary::periodic) {
                    Coord r{0, 0, 0};
                    for (int a = 0; a < p_.d; ++a) r[a] = ((cj[a] - ci[a]) % N + N) % N;
                    w = kernel_[static_cast<std::size_t>(flatten(r, N, p_.d))];
                } else {
                    w = kernel_[static_cast<std::size_t>(norm2(diff(ci, cj), p_.d))];
                }
                s += w * (n[j] - ni);
            }
            out[i] = s;
        }
    }

    // Periodic: circular convolution on the torus. Open: linear convolution on a grid padded to 2N per axis.
    void build_fft() {
        const long N = p_.N;
        const long M = p_.bc == Boundary::periodic ? N : 2 * N;
        grid_ = M;
        std::vector<int> dims(static_cast<std::size_t>(p_.d), static_cast<int>(M));
        plan_ = std::make_shared<FftPlan>(dims);
        long gsize = 1;
        for (int a = 0; a < p_.d; ++a) gsize *= M;
        kernel_hat_.assign(static_cast<std::size_t>(gsize), 0.0);
        auto* buf = plan_->data();
        double total = 0.0;
        for (long g = 0; g < gsize; ++g) {
            const Coord c = unflatten(g, M, p_.d);
            Coord r{0, 0, 0};
            bool inside = true;
            for (int a = 0; a < p_.d; ++a) {
                r[a] = min_image(c[a], M);
                if (p_.bc == Boundary::open && std::abs(r[a]) > N - 1) inside = false;
            }
            double w = 0.0;
            if (inside && norm2(r, p_.d) != 0) w = p_.kappa() * inverse_power(norm2(r, p_.d), 2.0 * p_.alpha);
            buf[g] = w;
            total += w;
        }
        if (p_.bc == Boundary::periodic) buf[0] = -total;
        plan_->forward();
        for (long g = 0; g < gsize; ++g) kernel_hat_[static_cast<std::size_t>(g)] = buf[g].real();

        escape_.assign(static_cast<std::size_t>(sites_), total);
        if (p_.bc == Boundary::open) {
            Eigen::VectorXd ones = Eigen::VectorXd::Ones(sites_);
            std::vector<double> conv = convolve_open(ones);
            for (long i = 0; i < sites_; ++i) escape_[static_cast<std::size_t>(i)] = conv[static_cast<std::size_t>(i)];
        }
    }

    std::vector<double> convolve_open(const Eigen::VectorXd& n) const {
        const long N = p_.N, M = grid_;
        auto* buf = plan_->data();
        std::fill(buf, buf + plan_->size(), std::complex<double>(0.0, 0.0));
        for (long i = 0; i < sites_; ++i) buf[flatten(unflatten(i, N, p_.d), M, p_.d)] = n[i];
        plan_->forward();
        for (std::size_t g = 0; g < plan_->size(); ++g) buf[g] *= kernel_hat_[g];
        plan_->backward();
        const double scale = 1.0 / static_cast<double>(plan_->size());
        std::vector<double> out(static_cast<std::size_t>(sites_));
        for (long i = 0; i < sites_; ++i)
            out[static_cast<std::size_t>(i)] = buf[flatten(unflatten(i, N, p_.d), M, p_.d)].real() * scale;
        return out;
    }

    void apply_fft(const Eigen::VectorXd& n, Eigen::VectorXd& out) const {
        if (p_.bc == Boundary::open) {
            const std::vector<double> conv = convolve_open(n);
            for (long i = 0; i < sites_; ++i)
                out[i] = conv[static_cast<std::size_t>(i)] - escape_[static_cast<std::size_t>(i)] * n[i];
            return;
        }
        auto* buf = plan_->data();
        for (long i = 0; i < sites_; ++i) buf[i] = n[i];
        plan_->forward();
        for (std::size_t g = 0; g < plan_->size(); ++g) buf[g] *= kernel_hat_[g];
        plan_->backward();
        const double scale = 1.0 / static_cast<double>(sites_);
        for (long i = 0; i < sites_; ++i) out[i] = buf[i].real() * scale;
    }

    ModelParams p_;
    long sites_{0};
    Method method_{Method::direct};
    std::vector<double> kernel_;
    std::vector<double> escape_;
    long grid_{0};
    std::vector<double> kernel_hat_;
    std::shared_ptr<FftPlan> plan_; // scratch buffer: apply() is not reentrant on one Generator
};

struct InvariantTolerances {
    double mass_rel{1e-9};
    double negativity{-1e-12};
};

inline void check_profile_invariants(const DensityProfile& n, double mass0, const InvariantTolerances& tol = {}) {
    const double m = n.total();
    if (std::abs(m - mass0) > tol.mass_rel * std::abs(mass0))
        throw InvariantError("mass not conserved at t = " + fmt(n.t) + ": " + fmt(m) + " vs " + fmt(mass0));
    const double lo = *std::min_element(n.values.begin(), n.values.end());
    if (lo < tol.negativity) throw InvariantError("negative density " + fmt(lo) + " at t = " + fmt(n.t));
}

// Explicit adaptive integration of n' = L n from n0 (at time n0.t) to each requested time.
inline std::vector<DensityProfile> cme_integrate(const DensityProfile& n0, const ModelParams& p,
                                                 const std::vector<double>& times, OdeOptions opt = {},
                                                 Generator::Method method = Generator::Method::automatic) {
    if (n0.d != p.d || n0.N != p.N || n0.bc != p.bc || n0.size() != p.sites())
        throw DomainError("cme_integrate: profile does not match the model lattice");
    const Generator L(p, method);
    const double mass0 = n0.total();
    Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(n0.values.data(), n0.size());
    std::function<void(double, const Eigen::VectorXd&, Eigen::VectorXd&)> rhs =
        [&L](double, const Eigen::VectorXd& x, Eigen::VectorXd& dx) { L.apply(x, dx); };
    if (opt.h_initial <= 0.0) opt.h_initial = 0.1 / std::max(L.max_escape_rate(), 1e-300);

    std::vector<DensityProfile> out;
    out.reserve(times.size());
    auto on_output = [&](double t, const Eigen::VectorXd& x) {
        DensityProfile n = n0;
        n.t = t;
        n.values.assign(x.data(), x.data() + x.size());
        check_profile_invariants(n, mass0);
        out.push_back(std::move(n));
    };
    try {
        dopri5<Eigen::VectorXd>(rhs, n0.t, y, times, opt, nullptr, on_output);
    } catch (const StateIntegrationError<Eigen::VectorXd>& e) {
        DensityProfile last = n0;
        last.t = e.last_time;
        last.values.assign(e.last_state.data(), e.last_state.data() + e.last_state.size());
        throw StateIntegrationError<DensityProfile>(e.what(), e.last_time, std::move(last));
    }
    return out;
}

// Eigenvalues λ(q) = 𝒜_ring(q) − 𝒜_ring(0) of the finite periodic generator, in FFTW order.
inline std::vector<double> ring_decay_rates(const ModelParams& p) {
    if (p.bc != Boundary::periodic) throw DomainError("spectral solve requires periodic boundaries");
    p.validate();
    const long S = p.sites();
    FftPlan plan(std::vector<int>(static_cast<std::size_t>(p.d), static_cast<int>(p.N)));
    auto* buf = plan.data();
    double total = 0.0;
    for (long r = 0; r < S; ++r) {
        const double w = r == 0 ? 0.0 : classical_rate(p, unflatten(r, p.N, p.d));
        buf[r] = w;
        total += w;
    }
    buf[0] = -total;
    plan.forward();
    std::vector<double> lambda(static_cast<std::size_t>(S));
    for (long g = 0; g < S; ++g) lambda[static_cast<std::size_t>(g)] = buf[g].real();
    lambda[0] = 0.0;
    return lambda;
}

struct CharacteristicGrid {
    int d{1};
    long N{0};
    double t{0.0};
    std::vector<std::complex<double>> K; // K(q, t) at q = 2π k / N, FFTW order
};

inline CharacteristicGrid characteristic_function(const ModelParams& p, double t) {
    const auto lambda = ring_decay_rates(p);
    CharacteristicGrid g{p.d, p.N, t, {}};
    g.K.resize(lambda.size());
    for (std::size_t i = 0; i < lambda.size(); ++i) g.K[i] = std::exp(lambda[i] * t);
    return g;
}

// n_j(t) = N^{-d} sum_q e^{-iq.j} exp[λ(q) t] from a delta at site 0 of the ring.
inline DensityProfile cme_spectral_solve(const ModelParams& p, double t) {
    if (t < 0.0) throw DomainError("cme_spectral_solve requires t >= 0");
    const auto K = characteristic_function(p, t);
    const long S = p.sites();
    FftPlan plan(std::vector<int>(static_cast<std::size_t>(p.d), static_cast<int>(p.N)));
    auto* buf = plan.data();
    for (long g = 0; g < S; ++g) buf[g] = K.K[static_cast<std::size_t>(g)];
    plan.backward();
    DensityProfile n;
    n.t = t;
    n.d = p.d;
    n.N = p.N;
    n.bc = Boundary::periodic;
    n.values.resize(static_cast<std::size_t>(S));
    for (long g = 0; g < S; ++g) n.values[static_cast<std::size_t>(g)] = buf[g].real() / static_cast<double>(S);
    return n;
}

struct Moments {
    std::array<double, 3> mean{0.0, 0.0, 0.0};
    double variance{0.0};
};

inline Moments moments(const DensityProfile& n) {
    Moments m;
    double mass = 0.0;
    for (long i = 0; i < n.size(); ++i) {
        const Coord r = n.offset(i);
        const double v = n.values[static_cast<std::size_t>(i)];
        mass += v;
        for (int a = 0; a < n.d; ++a) m.mean[a] += r[a] * v;
    }
    for (int a = 0; a < n.d; ++a) m.mean[a] /= mass;
    for (long i = 0; i < n.size(); ++i) {
        const Coord r = n.offset(i);
        double dr2 = 0.0;
        for (int a = 0; a < n.d; ++a) dr2 += (r[a] - m.mean[a]) * (r[a] - m.mean[a]);
        m.variance += dr2 * n.values[static_cast<std::size_t>(i)];
    }
    m.variance /= mass;
    return m;
}

struct TailFit {
    double exponent{0.0};  // slope of log n vs log |j|
    double amplitude{0.0}; // exp(intercept)
    double residual{0.0};  // rms residual in log space
    long points{0};
};

inline TailFit tail_fit(const std::vector<double>& dist, const std::vector<double>& dens) {
    if (dist.size() != dens.size() || dist.size() < 2) throw FitError("tail_fit needs at least two points");
    const std::size_t n = dist.size();
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(dens[i] > 0.0) || !(dist[i] > 0.0)) throw FitError("tail_fit: non-positive density or distance in window");
        x[i] = std::log(dist[i]);
        y[i] = std::log(dens[i]);
    }
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw FitError("tail_fit: degenerate window");
    TailFit f;
    f.exponent = sxy / sxx;
    const double intercept = my - f.exponent * mx;
    f.amplitude = std::exp(intercept);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - (intercept + f.exponent * x[i]);
        ss += r * r;
    }
    f.residual = std::sqrt(ss / n);
    f.points = static_cast<long>(n);
    return f;
}

// Fit along the ray origin + k e_axis, k in [k_min, k_max].
inline TailFit tail_fit(const DensityProfile& n, long k_min, long k_max, int axis = 0) {
    if (k_min < 1 || k_max < k_min) throw FitError("tail_fit: invalid window");
    std::vector<double> dist, dens;
    for (long k = k_min; k <= k_max; ++k) {
        Coord r{0, 0, 0};
        r[axis] = k;
        if (n.bc == Boundary::open && (n.origin[axis] + k >= n.N)) throw FitError("tail_fit: window leaves the lattice");
        dist.push_back(static_cast<double>(k));
        dens.push_back(n.at(r));
    }
    return tail_fit(dist, dens);
}

inline void write_profiles_csv(std::ostream& os, const std::vector<DensityProfile>& traj) {
    if (traj.empty()) return;
    const int d = traj.front().d;
    os << "t";
    for (int a = 1; a <= d; ++a) os << ",j" << a;
    os << ",n\n";
    for (const auto& n : traj) {
        const std::string ts = fmt(n.t);
        for (long i = 0; i < n.size(); ++i) {
            const Coord r = n.offset(i);
            os << ts;
            for (int a = 0; a < d; ++a) os << ',' << r[a];
            os << ',' << fmt(n.values[static_cast<std::size_t>(i)]) << '\n';
        }
    }
}

} // namespace lrhsr
