// acceptance.cpp — one pass/fail line per acceptance criterion; argument selects a criterion or "all"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "lrhsr/analytic.hpp"
#include "lrhsr/classical.hpp"
#include "lrhsr/manybody.hpp"
#include "lrhsr/quantum.hpp"
#include "lrhsr/specfn.hpp"

using namespace lrhsr;

namespace {

struct Outcome {
    bool pass{true};
    std::ostringstream detail;

    void check(bool ok, const std::string& what, double value, double bound) {
        pass = pass && ok;
        detail << (detail.str().empty() ? "" : "; ") << what << " = " << value << (ok ? " ok" : " FAILS") << " (bound " << bound << ")";
    }
};

const double pi = std::numbers::pi;

ModelParams chain(double alpha, long N, Boundary bc, double gamma = 10.0, double J = 1.0) {
    ModelParams p;
    p.d = 1;
    p.alpha = alpha;
    p.N = N;
    p.bc = bc;
    p.gamma = gamma;
    p.J = J;
    return p;
}

void criterion_1(Outcome& o) {
    for (auto [alpha, zeta, quoted] : {std::tuple{2.0, pi * pi / 6.0, 1.64}, std::tuple{3.0, std::pow(pi, 4) / 90.0, 1.08}}) {
        const ModelParams p = chain(alpha, 101, Boundary::open);
        const double D = *coefficients(p).D_alpha / p.kappa();
        o.check(std::abs(D - zeta) <= 1e-6, "|D_" + std::to_string(int(alpha)) + "/kappa - zeta| ", std::abs(D - zeta), 1e-6);
        o.check(std::abs(D - quoted) <= 0.005, "|D/kappa - quoted|", std::abs(D - quoted), 0.005);
    }
}

void criterion_2(Outcome& o) {
    const double expected[] = {1.5, 2.0, 2.5};
    for (int d = 1; d <= 3; ++d) o.check(alpha_critical(d) == expected[d - 1], "alpha_cr(" + std::to_string(d) + ")", alpha_critical(d), expected[d - 1]);
}

void criterion_3(Outcome& o) {
    const ModelParams p = chain(3.0, 41, Boundary::open);
    std::vector<double> times;
    for (int k = 1; k <= 400; ++k) times.push_back(100.0 / p.gamma * k / 400.0);
    const long c = center_site(p);
    const auto traj = propagate_G(localized_G0(p, c), p, times);
    const double D = *coefficients(p).D_alpha;
    double sup = 0.0, dev = 0.0;
    for (const auto& g : traj) {
        const double v = population_variance(g.G, p, c);
        sup = std::max(sup, std::abs(v - variance_closed_form(p, g.t)));
        if (p.gamma * g.t >= 10.0) dev = std::max(dev, std::abs(v - 2.0 * D * g.t) / (2.0 * D * g.t));
    }
    o.check(sup <= 1e-6, "sup |QME - closed form|", sup, 1e-6);
    o.check(dev < 0.02, "max rel. deviation from 2Dt for gamma t >= 10", dev, 0.02);
}

void criterion_4(Outcome& o) {
    const ModelParams p = chain(1.0, 1000, Boundary::periodic);
    const double kt = 1.0;
    const DensityProfile n = cme_spectral_solve(p, kt / p.kappa());
    const TailFit f = tail_fit(n, 20, 250);
    o.check(std::abs(f.exponent + 2.0) <= 0.05, "tail exponent", f.exponent, 0.05);
    o.check(std::abs(f.amplitude / kt - 1.0) <= 0.10, "amplitude / kappa t", f.amplitude / kt, 0.10);
}

void criterion_5(Outcome& o) {
    const ModelParams p = chain(2.0, 1000, Boundary::periodic);
    const double t = 3.0 / p.kappa();
    const double D = *coefficients(p).D_alpha;
    const double xi = *crossover(p, t).xi_exact;
    const DensityProfile n = cme_spectral_solve(p, t);
    auto gauss = [&](double j) { return std::exp(-j * j / (4.0 * D * t)) / std::sqrt(4.0 * pi * D * t); };
    double head = 0.0;
    for (long j = 0; j <= static_cast<long>(std::floor(xi / 2.0)); ++j)
        head = std::max(head, std::abs(n.at({j, 0, 0}) / gauss(j) - 1.0));
    o.check(head <= 0.05, "max head rel. error (|j| <= xi/2)", head, 0.05);
    const TailFit f = tail_fit(n, static_cast<long>(std::ceil(3.0 * xi)), 250);
    o.check(std::abs(f.exponent + 4.0) <= 0.2, "tail exponent (j >= 3 xi)", f.exponent, 0.2);
    // measured crossing: first j where the profile reaches twice the Gaussian, i.e. tail weight equals Gaussian weight
    double crossing = -1.0;
    for (long j = 1; j < 400; ++j) {
        const double r0 = n.at({j - 1, 0, 0}) / gauss(j - 1), r1 = n.at({j, 0, 0}) / gauss(j);
        if (r0 < 2.0 && r1 >= 2.0) {
            crossing = (j - 1) + (2.0 - r0) / (r1 - r0);
            break;
        }
    }
    o.check(crossing > 0.0 && std::abs(crossing / xi - 1.0) <= 0.10, "measured crossing / xi_exact - 1", crossing / xi - 1.0, 0.10);
}

void criterion_6(Outcome& o) {
    struct Case {
        int d;
        long N;
        double alpha;
    };
    // early snapshot (kappa t = 0.1) so the head stays well inside the box; window k in [N/5, 2N/3] on the inward ray
    for (const Case& c : {Case{2, 100, 1.5}, Case{2, 100, 3.0}, Case{3, 30, 2.0}, Case{3, 30, 3.0}}) {
        ModelParams p;
        p.d = c.d;
        p.N = c.N;
        p.alpha = c.alpha;
        p.bc = Boundary::open;
        const auto traj = cme_integrate(delta_profile(p, edge_site(p)), p, {0.1 / p.kappa()});
        const TailFit f = tail_fit(traj.back(), c.N / 5, 2 * c.N / 3, 0);
        std::ostringstream what;
        what << "d=" << c.d << " alpha=" << c.alpha << " tail exponent + 2 alpha";
        o.check(std::abs(f.exponent + 2.0 * c.alpha) <= 0.3, what.str(), f.exponent + 2.0 * c.alpha, 0.3);
    }
}

void criterion_7(Outcome& o) {
    double sup = 0.0;
    for (double alpha : {1.0, 1.5, 2.0, 3.0})
        for (long N : {64L, 256L}) {
            const ModelParams p = chain(alpha, N, Boundary::periodic);
            const std::vector<double> times = {0.5 / p.kappa(), 2.0 / p.kappa(), 10.0 / p.kappa()};
            const auto ode = cme_integrate(delta_profile(p, {0, 0, 0}), p, times);
            for (std::size_t k = 0; k < times.size(); ++k) {
                const DensityProfile s = cme_spectral_solve(p, times[k]);
                for (long i = 0; i < s.size(); ++i)
                    sup = std::max(sup, std::abs(s.values[static_cast<std::size_t>(i)] - ode[k].values[static_cast<std::size_t>(i)]));
            }
        }
    o.check(sup <= 1e-7, "spectral vs ODE sup-norm", sup, 1e-7);
    const ModelParams p = chain(1.0, 4096, Boundary::periodic);
    const double t = 0.5 / p.kappa();
    const DensityProfile s = cme_spectral_solve(p, t);
    double dmax = 0.0;
    for (long j = -200; j <= 200; ++j) dmax = std::max(dmax, std::abs(exact_profile_alpha1(j, t, p).value - s.at({j, 0, 0})));
    o.check(dmax <= 1e-4, "Dawson closed form vs spectral (|j| <= 200, N = 4096)", dmax, 1e-4);
}

void criterion_8(Outcome& o) {
    const ModelParams p = chain(2.0, 64, Boundary::open, 2.0);
    const std::vector<double> times = {0.5 / p.kappa()};
    const long T = 10000;
    const Ensemble e = kmc_simulate(SpinConfiguration::domain_wall(p.N), p, times, T, 20240611ULL);
    const auto ref = occupation_evolution(p, times);
    double worst = 0.0;
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        for (long j = 0; j < p.N; ++j) {
            const double r = ref[ti].n[static_cast<std::size_t>(j)];
            const double se = std::sqrt(std::max(r * (1.0 - r), 0.0) / T);
            const double diff = std::abs(e.mean(ti, j) - r);
            worst = std::max(worst, se > 0.0 ? diff / se : (diff > 0.0 ? INFINITY : 0.0));
        }
    o.check(worst <= 3.0, "max |KMC - linear| / standard error", worst, 3.0);
}

void criterion_9(Outcome& o) {
    for (double alpha : {1.0, 2.0, 3.0}) {
        std::vector<ChiSeries> series;
        for (long N : {100L, 200L, 400L, 800L}) series.push_back(relaxation_series(chain(alpha, N, Boundary::open, 2.0)));
        const RelaxationFit f = relaxation_fit(series, alpha);
        const std::string a = "alpha=" + std::to_string(int(alpha));
        if (alpha == 1.0) {
            o.check(std::abs(f.beta - 1.0) <= 0.15, a + " beta", f.beta, 0.15);
            const double ratio = f.b_alpha / pi;
            o.check(ratio > 0.1 && ratio < 10.0, a + " b/(C_1/kappa) order of magnitude", ratio, 10.0);
        } else {
            o.check(std::abs(f.beta - 2.0) <= 0.2, a + " beta", f.beta, 0.2);
            const double zeta = riemann_zeta(2.0 * alpha - 2.0);
            o.check(std::abs(f.b_alpha / zeta - 1.0) <= 0.10, a + " b/zeta(2 alpha - 2) - 1", f.b_alpha / zeta - 1.0, 0.10);
        }
    }
}

void criterion_10(Outcome& o) {
    for (auto [d, quoted] : {std::pair{3, 2.8}, std::pair{2, 1.5}}) {
        const double r = forster_ratio(d);
        const double direct = lattice_sum_direct(4.0, d, 200) / (2.0 * d);
        o.check(std::abs(r / direct - 1.0) <= 1e-6, "forster_ratio vs direct lattice sum, d=" + std::to_string(d), r / direct - 1.0, 1e-6);
        o.check(std::abs(r / quoted - 1.0) <= 0.02, "forster_ratio vs quoted, d=" + std::to_string(d), r, quoted);
    }
}

void criterion_11(Outcome& o) {
    for (double alpha : {1.0, 2.0, 3.0}) {
        std::vector<SlowModeSummary> runs;
        const std::string a = "alpha=" + std::to_string(int(alpha));
        for (long N : {51L, 101L, 201L}) {
            const ModelParams p = chain(alpha, N, Boundary::periodic, 0.1);
            double mn = INFINITY;
            bool degenerate = false;
            try {
                for (long qi = 1; qi < N; ++qi)
                    for (const auto& e : perturbative_spectrum(qi, p)) mn = std::min(mn, e.real());
            } catch (const DegeneracyError&) {
                degenerate = true;
            }
            const double target = p.gamma * (N - 1.0) / N;
            o.check(!degenerate && std::abs(mn / target - 1.0) <= 0.05, a + " N=" + std::to_string(N) + " perturbative min Re E / (gamma(N-1)/N) - 1",
                    degenerate ? NAN : mn / target - 1.0, 0.05);
            runs.push_back(slow_modes(p));
        }
        const PowerFit f = slow_gap_fit(runs);
        if (alpha == 1.0) o.check(std::abs(f.exponent + 1.0) <= 0.15, a + " slow gap exponent", f.exponent, 0.15);
        else o.check(std::abs(f.exponent + 2.0) <= 0.2, a + " slow gap exponent", f.exponent, 0.2);
    }
}

void criterion_12(Outcome& o) {
    {
        ModelParams p = chain(1.5, 128, Boundary::open);
        const auto traj = cme_integrate(delta_profile(p, {10, 0, 0}), p, {1.0, 5.0, 20.0});
        double worst = 0.0;
        for (const auto& n : traj) worst = std::max(worst, std::abs(n.total() - 1.0));
        o.check(worst <= 1e-9, "classical mass drift", worst, 1e-9);
    }
    {
        const ModelParams p = chain(2.0, 31, Boundary::periodic, 1.0);
        const auto traj = propagate_G(localized_G0(p, 15), p, {0.5, 2.0, 8.0});
        double herm = 0.0, tr = 0.0;
        for (const auto& g : traj) {
            herm = std::max(herm, (g.G - g.G.adjoint()).cwiseAbs().maxCoeff());
            tr = std::max(tr, std::abs(g.G.trace() - 1.0));
        }
        o.check(herm <= 1e-9, "Hermiticity of G", herm, 1e-9);
        o.check(tr <= 1e-9, "trace drift of G", tr, 1e-9);
    }
    {
        const auto traj = occupation_evolution(chain(1.0, 100, Boundary::open, 2.0), {0.1, 0.5, 2.0});
        const double v = particle_hole_symmetry_check(traj).worst;
        o.check(v <= 1e-8, "particle-hole violation", v, 1e-8);
    }
    {
        const double basel = std::abs(riemann_zeta(2.0) - pi * pi / 6.0);
        o.check(basel <= 1e-14, "Basel |zeta(2) - pi^2/6|", basel, 1e-14);
        double rt = 0.0;
        for (double y : {-0.367879, -0.3, -0.1, -1e-3, -1e-8, -1e-100}) {
            const double w = lambert_w_m1(y);
            rt = std::max(rt, std::abs(w * std::exp(w) - y) / std::abs(y));
        }
        o.check(rt <= 1e-12, "Lambert W_-1 round trip rel. error", rt, 1e-12);
        double odd = 0.0;
        for (double x : {0.1, 0.7, 1.3, 4.0, 12.0, 24.0})
            odd = std::max(odd, std::abs(dawson(ComplexValue(-x, 0.0)) + dawson(ComplexValue(x, 0.0))));
        o.check(odd <= 1e-15, "Dawson oddness", odd, 1e-15);
    }
}

const std::map<int, std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
    {1, {"diffusion coefficients", criterion_1}},
    {2, {"critical exponent", criterion_2}},
    {3, {"quantum-to-classical crossover", criterion_3}},
    {4, {"Levy regime profile", criterion_4}},
    {5, {"mixed regime profile", criterion_5}},
    {6, {"higher-d profiles", criterion_6}},
    {7, {"solver cross-validation", criterion_7}},
    {8, {"exclusion-process duality", criterion_8}},
    {9, {"relaxation scaling", criterion_9}},
    {10, {"Forster enhancement", criterion_10}},
    {11, {"weak-dephasing spectra", criterion_11}},
    {12, {"property suites", criterion_12}},
};

bool run_one(int id) {
    const auto& [name, fn] = criteria.at(id);
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        fn(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << (o.detail.str().empty() ? "" : "; ") << "exception: " << e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << name << ", " << secs << " s): " << o.detail.str() << std::endl;
    return o.pass;
}

} // namespace

int main(int argc, char** argv) {
    std::vector<int> ids;
    if (argc < 2 || std::string(argv[1]) == "all")
        for (const auto& [id, _] : criteria) ids.push_back(id);
    else
        for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
    bool ok = true;
    for (int id : ids) {
        if (!criteria.count(id)) {
            std::cerr << "unknown criterion " << id << '\n';
            return 2;
        }
        ok = run_one(id) && ok;
    }
    return ok ? 0 : 1;
}
