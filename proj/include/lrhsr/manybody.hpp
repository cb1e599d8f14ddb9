// manybody.hpp — long-jump exclusion process: KMC sampling, linear occupation dynamics, χ² relaxation and τ(N) fits

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/quadrature/gauss.hpp>

#include "lrhsr/classical.hpp"
#include "lrhsr/csv.hpp"
#include "lrhsr/errors.hpp"
#include "lrhsr/model.hpp"
#include "lrhsr/ode.hpp"

namespace lrhsr {

inline void require_chain(const ModelParams& p, const char* what) {
    p.validate();
    if (p.d != 1) throw DomainError(std::string(what) + " is one-dimensional only");
    if (p.bc != Boundary::open) throw DomainError(std::string(what) + " requires open boundaries");
}

class SpinConfiguration {
public:
    explicit SpinConfiguration(long N = 0) : occ_(static_cast<std::size_t>(N), 0) {}

    // Leftmost N/2 sites occupied.
    static SpinConfiguration domain_wall(long N) {
        if (N <= 0 || N % 2 != 0) throw DomainError("domain wall requires even N > 0");
        SpinConfiguration c(N);
        for (long i = 0; i < N / 2; ++i) c.set(i, true);
        return c;
    }

    long size() const { return static_cast<long>(occ_.size()); }
    long particles() const { return count_; }
    bool occupied(long i) const { return occ_[static_cast<std::size_t>(i)] != 0; }

    void set(long i, bool v) {
        auto& s = occ_[static_cast<std::size_t>(i)];
        count_ += static_cast<long>(v) - static_cast<long>(s);
        s = v ? 1 : 0;
    }

    void move(long from, long to) {
        if (!occupied(from) || occupied(to)) throw InvariantError("exclusion move on an invalid pair");
        occ_[static_cast<std::size_t>(from)] = 0;
        occ_[static_cast<std::size_t>(to)] = 1;
    }

    const std::vector<std::uint8_t>& bits() const { return occ_; }

private:
    std::vector<std::uint8_t> occ_;
    long count_{0};
};

// Binary indexed tree over non-negative weights with prefix search.
class Fenwick {
public:
    explicit Fenwick(long n) : n_(n), tree_(static_cast<std::size_t>(n) + 1, 0.0) {}

    void add(long i, double v) {
        for (long k = i + 1; k <= n_; k += k & -k) tree_[static_cast<std::size_t>(k)] += v;
    }

    double total() const {
        double s = 0.0;
        for (long k = n_; k > 0; k -= k & -k) s += tree_[static_cast<std::size_t>(k)];
        return s;
    }

    // Smallest index whose inclusive prefix sum exceeds `target`.
    long find(double target) const {
        long pos = 0;
        long step = 1;
        while (step * 2 <= n_) step *= 2;
        for (; step > 0; step /= 2) {
            const long nxt = pos + step;
            if (nxt <= n_ && tree_[static_cast<std::size_t>(nxt)] <= target) {
                pos = nxt;
                target -= tree_[static_cast<std::size_t>(nxt)];
            }
        }
        return std::min(pos, n_ - 1);
    }

private:
    long n_;
    std::vector<double> tree_;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Independent stream per (master seed, trajectory index).
inline std::mt19937_64 trajectory_rng(std::uint64_t seed, std::uint64_t index) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632BE59BD9B4E019ULL)));
}

inline double uniform01(std::mt19937_64& g) { return static_cast<double>(g() >> 11) * 0x1.0p-53; }

// Static jump tables: per-site escape rates and cumulative target distributions.
class JumpTables {
public:
    explicit JumpTables(const ModelParams& p) : N_(p.N) {
        require_chain(p, "kmc");
        std::vector<double> w(static_cast<std::size_t>(N_), 0.0);
        for (long r = 1; r < N_; ++r) w[static_cast<std::size_t>(r)] = classical_rate(p, {r, 0, 0});
        cum_.assign(static_cast<std::size_t>(N_ * N_), 0.0);
        escape_.assign(static_cast<std::size_t>(N_), 0.0);
        for (long i = 0; i < N_; ++i) {
            double s = 0.0;
            for (long j = 0; j < N_; ++j) {
                if (j != i) s += w[static_cast<std::size_t>(std::abs(j - i))];
                cum_[static_cast<std::size_t>(i * N_ + j)] = s;
            }
            escape_[static_cast<std::size_t>(i)] = s;
        }
    }

    long N() const { return N_; }
    double escape(long i) const { return escape_[static_cast<std::size_t>(i)]; }

    long target(long i, double u) const {
        const double x = u * escape(i);
        const auto first = cum_.begin() + i * N_;
        const auto it = std::upper_bound(first, first + N_, x);
        long j = static_cast<long>(it - first);
        if (j >= N_) j = N_ - 1;
        if (j == i) j = i == 0 ? 1 : i - 1; // zero-width bin only reachable through rounding
        return j;
    }

private:
    long N_;
    std::vector<double> cum_;
    std::vector<double> escape_;
};

struct KmcStats {
    long events{0};
    long rejected{0};
};

// One Gillespie trajectory; configurations recorded at each output time.
inline std::vector<SpinConfiguration> kmc_trajectory(const SpinConfiguration& config0, const JumpTables& tab,
                                                     const std::vector<double>& times, std::uint64_t seed,
                                                     std::uint64_t index, KmcStats* stats = nullptr) {
    if (config0.size() != tab.N()) throw DomainError("kmc: configuration size does not match the lattice");
    auto rng = trajectory_rng(seed, index);
    SpinConfiguration c = config0;
    Fenwick tree(tab.N());
    for (long i = 0; i < tab.N(); ++i)
        if (c.occupied(i)) tree.add(i, tab.escape(i));
    const long n0 = c.particles();
    std::vector<SpinConfiguration> out;
    out.reserve(times.size());
    KmcStats st;
    double t = 0.0;
    std::size_t next = 0;
    while (next < times.size()) {
        const double total = tree.total();
        const double dt = total > 0.0 ? -std::log1p(-uniform01(rng)) / total : std::numeric_limits<double>::infinity();
        while (next < times.size() && times[next] < t + dt) {
            if (times[next] < t) throw DomainError("kmc: output times must be non-decreasing and >= 0");
            out.push_back(c);
            ++next;
        }
        if (next == times.size()) break;
        t += dt;
        const long i = tree.find(uniform01(rng) * total);
        const long j = tab.target(i, uniform01(rng));
        ++st.events;
        if (!c.occupied(i) || c.occupied(j)) {
            ++st.rejected;
            continue;
        }
        c.move(i, j);
        tree.add(i, -tab.escape(i));
        tree.add(j, tab.escape(j));
        if (c.particles() != n0) throw InvariantError("kmc: particle number changed");
    }
    if (stats) {
        stats->events += st.events;
        stats->rejected += st.rejected;
    }
    return out;
}

// Ensemble occupation counts: counts[ti][j] trajectories with site j occupied at times[ti].
struct Ensemble {
    long N{0};
    long trajectories{0};
    std::vector<double> times;
    std::vector<std::vector<long>> counts;

    double mean(std::size_t ti, long j) const {
        return static_cast<double>(counts[ti][static_cast<std::size_t>(j)]) / static_cast<double>(trajectories);
    }

    // Sample standard error of a 0/1 variable.
    double stderr_of_mean(std::size_t ti, long j) const {
        if (trajectories < 2) return 0.0;
        const double m = mean(ti, j);
        return std::sqrt(m * (1.0 - m) / static_cast<double>(trajectories - 1));
    }
};

inline Ensemble kmc_simulate(const SpinConfiguration& config0, const ModelParams& p, const std::vector<double>& times,
                             long n_traj, std::uint64_t seed, unsigned threads = 0, KmcStats* stats = nullptr) {
    if (n_traj < 1) throw DomainError("kmc_simulate requires at least one trajectory");
    const JumpTables tab(p);
    Ensemble e;
    e.N = p.N;
    e.trajectories = n_traj;
    e.times = times;
    e.counts.assign(times.size(), std::vector<long>(static_cast<std::size_t>(p.N), 0));
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<long>(threads, n_traj));
    std::vector<Ensemble> partial(threads, e);
    std::vector<KmcStats> part_stats(threads);
    std::atomic<long> cursor{0};
    std::vector<std::exception_ptr> errors(threads);
    auto worker = [&](unsigned w) {
        try {
            for (long k = cursor++; k < n_traj; k = cursor++) {
                const auto traj = kmc_trajectory(config0, tab, times, seed, static_cast<std::uint64_t>(k), &part_stats[w]);
                for (std::size_t ti = 0; ti < traj.size(); ++ti)
                    for (long j = 0; j < p.N; ++j) partial[w].counts[ti][static_cast<std::size_t>(j)] += traj[ti].occupied(j);
            }
        } catch (...) {
            errors[w] = std::current_exception();
        }
    };
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker, w);
    }
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
    // integer counts: the reduction is exact and independent of scheduling
    for (unsigned w = 0; w < threads; ++w) {
        for (std::size_t ti = 0; ti < times.size(); ++ti)
            for (long j = 0; j < p.N; ++j) e.counts[ti][static_cast<std::size_t>(j)] += partial[w].counts[ti][static_cast<std::size_t>(j)];
        if (stats) {
            stats->events += part_stats[w].events;
            stats->rejected += part_stats[w].rejected;
        }
    }
    return e;
}

inline void write_ensemble_csv(std::ostream& os, const Ensemble& e) {
    os << "t,j,n_mean,n_stderr\n";
    for (std::size_t ti = 0; ti < e.times.size(); ++ti)
        for (long i = 0; i < e.N; ++i)
            os << fmt(e.times[ti]) << ',' << i - e.N / 2 << ',' << fmt(e.mean(ti, i)) << ',' << fmt(e.stderr_of_mean(ti, i))
               << '\n';
}

// ---- linear occupation dynamics ----

struct OccupationProfile {
    double t{0.0};
    std::vector<double> n; // site index i = j + N/2
};

inline DensityProfile domain_wall_profile(const ModelParams& p) {
    require_chain(p, "occupation_evolution");
    if (p.N % 2 != 0) throw DomainError("occupation_evolution requires even N");
    DensityProfile n;
    n.d = 1;
    n.N = p.N;
    n.bc = p.bc;
    n.origin = {p.N / 2, 0, 0};
    n.values.assign(static_cast<std::size_t>(p.N), 0.0);
    for (long i = 0; i < p.N / 2; ++i) n.values[static_cast<std::size_t>(i)] = 1.0;
    return n;
}

enum class OccupationMethod { ode, eigen };

inline std::string to_string(OccupationMethod m) { return m == OccupationMethod::ode ? "ode" : "eigen"; }

// Exact solution through the symmetric generator's eigendecomposition.
class OccupationPropagator {
public:
    explicit OccupationPropagator(const ModelParams& p) : n0_(domain_wall_profile(p)) {
        const Eigen::MatrixXd L = Generator(p, Generator::Method::direct).dense();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (L + L.transpose()));
        if (es.info() != Eigen::Success) throw SpectralError("occupation generator eigensolver failed");
        lambda_ = es.eigenvalues();
        V_ = es.eigenvectors();
        c0_ = V_.transpose() * Eigen::Map<const Eigen::VectorXd>(n0_.values.data(), p.N);
    }

    OccupationProfile at(double t) const {
        if (t < 0.0) throw DomainError("occupation time must be >= 0");
        const Eigen::VectorXd c = c0_.array() * (lambda_.array() * t).exp();
        const Eigen::VectorXd n = V_ * c;
        return {t, std::vector<double>(n.data(), n.data() + n.size())};
    }

    // Smallest nonzero relaxation rate of the density.
    double gap() const {
        const double tol = 1e-10 * std::max(1.0, lambda_.cwiseAbs().maxCoeff());
        double g = std::numeric_limits<double>::infinity();
        for (long k = 0; k < lambda_.size(); ++k)
            if (-lambda_[k] > tol) g = std::min(g, -lambda_[k]);
        return g;
    }

private:
    DensityProfile n0_;
    Eigen::VectorXd lambda_;
    Eigen::MatrixXd V_;
    Eigen::VectorXd c0_;
};

inline std::vector<OccupationProfile> occupation_evolution(const ModelParams& p, const std::vector<double>& times,
                                                           OccupationMethod method = OccupationMethod::ode,
                                                           OdeOptions opt = {}) {
    const DensityProfile n0 = domain_wall_profile(p);
    std::vector<OccupationProfile> out;
    out.reserve(times.size());
    if (method == OccupationMethod::eigen) {
        const OccupationPropagator prop(p);
        const double mass0 = n0.total();
        for (double t : times) {
            out.push_back(prop.at(t));
            DensityProfile chk = n0;
            chk.t = t;
            chk.values = out.back().n;
            check_profile_invariants(chk, mass0, {1e-9, -1e-10});
        }
        return out;
    }
    for (auto& prof : cme_integrate(n0, p, times, opt, Generator::Method::direct)) out.push_back({prof.t, std::move(prof.values)});
    return out;
}

// n_j(t) ≈ κt sum_{r=j+1}^{N/2+j} r^{−2α}, j ≥ 0.
inline double occupation_short_time(const ModelParams& p, long j, double t) {
    if (j < 0) throw DomainError("occupation_short_time is for j >= 0");
    double s = 0.0;
    for (long r = j + 1; r <= p.N / 2 + j; ++r) s += classical_rate(p, {r, 0, 0});
    return s * t;
}

struct SymmetryReport {
    bool ok{true};
    double worst{0.0};
    long worst_j{0};
    double worst_t{0.0};
};

// n_j + n_{−1−j} = 1 with j = i − N/2, i.e. n_i + n_{N−1−i} = 1.
inline SymmetryReport particle_hole_symmetry_check(const std::vector<OccupationProfile>& traj, double tol = 1e-8) {
    SymmetryReport r;
    for (const auto& prof : traj) {
        const long N = static_cast<long>(prof.n.size());
        for (long i = 0; i < N; ++i) {
            const double v = std::abs(prof.n[static_cast<std::size_t>(i)] + prof.n[static_cast<std::size_t>(N - 1 - i)] - 1.0);
            if (v > r.worst) {
                r.worst = v;
                r.worst_j = i - N / 2;
                r.worst_t = prof.t;
            }
        }
    }
    r.ok = r.worst <= tol;
    return r;
}

// χ²/N = sum_j (n_j − 1/2)² / (N/2)
inline double chi_squared(const std::vector<double>& n) {
    double s = 0.0;
    for (double v : n) s += (v - 0.5) * (v - 0.5);
    return s / (0.5 * static_cast<double>(n.size()));
}

struct ChiSeries {
    long N{0};
    std::vector<double> t;
    std::vector<double> chi;
};

inline ChiSeries chi_squared_series(const std::vector<OccupationProfile>& traj) {
    ChiSeries s;
    if (!traj.empty()) s.N = static_cast<long>(traj.front().n.size());
    for (const auto& prof : traj) {
        s.t.push_back(prof.t);
        s.chi.push_back(chi_squared(prof.n));
    }
    return s;
}

// Series on a uniform grid reaching χ²/N ≈ chi_end, sized from the slowest mode.
inline ChiSeries relaxation_series(const ModelParams& p, double chi_end = 1e-7, long points = 400) {
    const OccupationPropagator prop(p);
    const double t_end = 1.2 * std::log(0.5 / chi_end) / (2.0 * prop.gap());
    std::vector<OccupationProfile> traj;
    for (long k = 0; k <= points; ++k) traj.push_back(prop.at(t_end * static_cast<double>(k) / points));
    return chi_squared_series(traj);
}

struct LineFit {
    double slope{0.0};
    double intercept{0.0};
    double r2{0.0};
    double residual{0.0};
    long points{0};
};

inline LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw FitError("line fit needs at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw FitError("line fit: degenerate abscissae");
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y[i] - f.intercept - f.slope * x[i];
        ss += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss / syy : 1.0;
    f.residual = std::sqrt(ss / n);
    f.points = static_cast<long>(n);
    return f;
}

struct ChiWindow {
    double lo{1e-6};
    double hi{1e-2};
};

// Exponential fit of χ² inside the window: χ² ∝ exp(−t/τ).
inline LineFit chi_tail_fit(const ChiSeries& s, const ChiWindow& w = {}) {
    std::vector<double> x, y;
    double cmin = std::numeric_limits<double>::infinity(), cmax = 0.0;
    for (std::size_t i = 0; i < s.t.size(); ++i)
        if (s.chi[i] >= w.lo && s.chi[i] <= w.hi) {
            x.push_back(s.t[i]);
            y.push_back(std::log(s.chi[i]));
            cmin = std::min(cmin, s.chi[i]);
            cmax = std::max(cmax, s.chi[i]);
        }
    if (x.size() < 3 || cmax / cmin < 100.0)
        throw FitError("chi-squared series for N = " + std::to_string(s.N) + " covers less than two decades of the fit window");
    const LineFit f = line_fit(x, y);
    if (!(f.slope < 0.0)) throw FitError("chi-squared series for N = " + std::to_string(s.N) + " is not decaying");
    return f;
}

struct RelaxationFit {
    double alpha{0.0};
    std::vector<long> Ns;
    std::vector<double> tau;
    std::vector<double> tail_r2;
    double beta{0.0};
    double b_alpha{0.0};
    double residual{0.0};
    bool log_corrected{false};
};

// τ = N^β / (2π^β b); at α = 3/2, τ = N² log N / (2π² b).
inline RelaxationFit relaxation_fit(const std::vector<ChiSeries>& series, double alpha, const ChiWindow& w = {}) {
    if (series.size() < 4) throw FitError("relaxation_fit needs at least four system sizes");
    RelaxationFit r;
    r.alpha = alpha;
    r.log_corrected = std::abs(alpha - 1.5) < 1e-12;
    for (const auto& s : series) {
        const LineFit f = chi_tail_fit(s, w);
        r.Ns.push_back(s.N);
        r.tau.push_back(-1.0 / f.slope);
        r.tail_r2.push_back(f.r2);
    }
    std::vector<double> x, y;
    for (std::size_t i = 0; i < r.Ns.size(); ++i) {
        const double N = static_cast<double>(r.Ns[i]);
        x.push_back(std::log(N));
        y.push_back(std::log(r.log_corrected ? r.tau[i] / std::log(N) : r.tau[i]));
    }
    if (r.log_corrected) {
        r.beta = 2.0;
        double c = 0.0, ss = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) c += y[i] - 2.0 * x[i];
        c /= static_cast<double>(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) ss += std::pow(y[i] - 2.0 * x[i] - c, 2);
        r.residual = std::sqrt(ss / x.size());
        r.b_alpha = std::exp(-c) / (2.0 * std::pow(std::numbers::pi, 2.0));
    } else {
        const LineFit f = line_fit(x, y);
        r.beta = f.slope;
        r.residual = f.residual;
        r.b_alpha = std::exp(-f.intercept) / (2.0 * std::pow(std::numbers::pi, r.beta));
    }
    if (!(r.beta > 0.0)) throw FitError("relaxation_fit: non-positive exponent");
    return r;
}

inline void write_fit_summary(std::ostream& os, const RelaxationFit& f) {
    auto list = [&os](const auto& v) {
        for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
    };
    os << "alpha = " << fmt(f.alpha) << '\n' << "N_list = ";
    list(f.Ns);
    os << '\n' << "tau_list = ";
    std::vector<std::string> taus;
    for (double t : f.tau) taus.push_back(fmt(t));
    list(taus);
    os << '\n'
       << "beta = " << fmt(f.beta) << '\n'
       << "b_alpha = " << fmt(f.b_alpha) << '\n'
       << "residual = " << fmt(f.residual) << '\n'
       << "log_corrected = " << (f.log_corrected ? "true" : "false") << '\n';
}

// ---- fractional diffusion reference on [0, N] ----

// Cosine coefficients c_m = (2/N) ∫_0^N (step(x) − 1/2) cos(πmx/N) dx of the domain wall, m = 1..M.
inline std::vector<double> fractional_coefficients(double N, long M) {
    if (!(N > 0.0) || M < 1) throw DomainError("fractional_coefficients requires N > 0 and M >= 1");
    using boost::math::quadrature::gauss;
    std::vector<double> c(static_cast<std::size_t>(M) + 1, 0.0);
    for (long m = 1; m <= M; ++m) {
        const double k = std::numbers::pi * m / N;
        const long pieces = std::max<long>(1, m);
        double s = 0.0;
        for (int half = 0; half < 2; ++half) {
            const double a0 = half == 0 ? 0.0 : 0.5 * N;
            const double sign = half == 0 ? 0.5 : -0.5;
            const double h = 0.5 * N / pieces;
            for (long piece = 0; piece < pieces; ++piece) {
                const double a = a0 + piece * h;
                s += sign * gauss<double, 20>::integrate([k](double x) { return std::cos(k * x); }, a, a + h);
            }
        }
        c[static_cast<std::size_t>(m)] = 2.0 / N * s;
    }
    return c;
}

// n(x,t) = 1/2 + sum_m c_m e^{−b(mπ/N)^β t} cos(πmx/N)
inline double fractional_reference(double x, double t, double N, double beta, double b, const std::vector<double>& coeffs) {
    if (x < 0.0 || x > N) throw DomainError("fractional_reference: x outside [0, N]");
    double n = 0.5;
    for (std::size_t m = 1; m < coeffs.size(); ++m) {
        const double k = std::numbers::pi * static_cast<double>(m) / N;
        n += coeffs[m] * std::exp(-b * std::pow(k, beta) * t) * std::cos(k * x);
    }
    return n;
}

// Lattice site i sits at x = i + 1/2.
inline std::vector<double> fractional_profile(const ModelParams& p, double t, double beta, double b, long M) {
    const auto c = fractional_coefficients(static_cast<double>(p.N), M);
    std::vector<double> n(static_cast<std::size_t>(p.N));
    for (long i = 0; i < p.N; ++i)
        n[static_cast<std::size_t>(i)] = fractional_reference(i + 0.5, t, static_cast<double>(p.N), beta, b, c);
    return n;
}

} // namespace lrhsr
