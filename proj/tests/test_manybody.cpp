// test_manybody.cpp — exclusion-process sampler, occupation dynamics, chi-squared relaxation and fractional reference

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "lrhsr/manybody.hpp"

using namespace lrhsr;

namespace {

const double pi = std::numbers::pi;

ModelParams chain(long N, double alpha) {
    ModelParams p;
    p.N = N;
    p.alpha = alpha;
    p.gamma = 10.0;
    p.bc = Boundary::open;
    return p;
}

ChiSeries synthetic_series(long N, double tau) {
    ChiSeries s;
    s.N = N;
    for (int k = 0; k <= 300; ++k) {
        const double t = tau * 20.0 * k / 300.0;
        s.t.push_back(t);
        s.chi.push_back(0.5 * std::exp(-t / tau));
    }
    return s;
}

} // namespace

TEST(Fenwick, FindMatchesLinearScan) {
    std::mt19937_64 g(7);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    const long n = 37;
    Fenwick f(n);
    std::vector<double> v(n);
    for (long i = 0; i < n; ++i) {
        v[i] = i % 5 == 0 ? 0.0 : w(g);
        f.add(i, v[i]);
    }
    f.add(3, -v[3]);
    v[3] = 0.0;
    double total = 0.0;
    for (double x : v) total += x;
    EXPECT_NEAR(f.total(), total, 1e-12);
    for (int k = 0; k < 2000; ++k) {
        const double target = total * (k + 0.5) / 2000.0;
        long ref = 0;
        double s = 0.0;
        for (; ref < n; ++ref) {
            s += v[ref];
            if (s > target) break;
        }
        EXPECT_EQ(f.find(target), ref) << target;
        EXPECT_GT(v[f.find(target)], 0.0);
    }
}

TEST(Rng, SplitmixReferenceValue) {
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
    auto a = trajectory_rng(5, 0), b = trajectory_rng(5, 1), c = trajectory_rng(5, 0);
    EXPECT_NE(a(), b());
    EXPECT_EQ(trajectory_rng(5, 0)(), c());
    for (int k = 0; k < 1000; ++k) {
        const double u = uniform01(a);
        EXPECT_GE(u, 0.0);
        EXPECT_LT(u, 1.0);
    }
}

TEST(JumpTables, TargetDistributionFollowsTheRates) {
    const auto p = chain(12, 1.5);
    const JumpTables tab(p);
    const long M = 200000;
    for (long i : {0L, 5L, 11L}) {
        std::vector<long> hits(12, 0);
        for (long k = 0; k < M; ++k) ++hits[tab.target(i, (k + 0.5) / M)];
        EXPECT_EQ(hits[i], 0);
        for (long j = 0; j < 12; ++j)
            if (j != i) { EXPECT_NEAR(static_cast<double>(hits[j]) / M, classical_rate(p, {j - i, 0, 0}) / tab.escape(i), 2.0 / M); }
    }
}

TEST(Kmc, ConservesParticlesAndIsReproducible) {
    const auto p = chain(16, 1.5);
    const JumpTables tab(p);
    const auto c0 = SpinConfiguration::domain_wall(16);
    const std::vector<double> times{0.0, 1.0, 5.0, 20.0};
    KmcStats st;
    const auto a = kmc_trajectory(c0, tab, times, 99, 4, &st);
    const auto b = kmc_trajectory(c0, tab, times, 99, 4);
    ASSERT_EQ(a.size(), times.size());
    EXPECT_EQ(a[0].bits(), c0.bits());
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(a[k].bits(), b[k].bits());
        long n = 0;
        for (auto bit : a[k].bits()) n += bit;
        EXPECT_EQ(n, 8);
    }
    EXPECT_GT(st.events, 0);
    EXPECT_GT(st.rejected, 0);
    EXPECT_THROW(kmc_trajectory(SpinConfiguration::domain_wall(14), tab, times, 1, 0), DomainError);
    EXPECT_THROW(SpinConfiguration::domain_wall(15), DomainError);
}

TEST(Kmc, EnsembleIndependentOfThreadCount) {
    const auto p = chain(20, 2.0);
    const auto c0 = SpinConfiguration::domain_wall(20);
    const std::vector<double> times{0.5, 2.0};
    const auto a = kmc_simulate(c0, p, times, 300, 11, 1);
    const auto b = kmc_simulate(c0, p, times, 300, 11, 4);
    EXPECT_EQ(a.counts, b.counts);
    EXPECT_NE(a.counts, kmc_simulate(c0, p, times, 300, 12, 4).counts);
}

TEST(Kmc, EnsembleMeanMatchesLinearDynamics) {
    // the mean occupation of the exclusion process obeys the single-particle master equation
    const auto p = chain(20, 1.5);
    const double t = 1.0 / p.kappa();
    const auto e = kmc_simulate(SpinConfiguration::domain_wall(20), p, {t}, 40000, 2024);
    const auto ref = occupation_evolution(p, {t}, OccupationMethod::eigen)[0].n;
    double chi2 = 0.0;
    for (long i = 0; i < 20; ++i) {
        const double m = ref[static_cast<std::size_t>(i)];
        const double se = std::sqrt(m * (1.0 - m) / e.trajectories);
        const double z = (e.mean(0, i) - m) / se;
        EXPECT_LT(std::abs(z), 4.5) << "site " << i;
        chi2 += z * z;
    }
    EXPECT_LT(chi2, 45.3); // 99.9% quantile of chi^2 with 20 degrees of freedom
}

TEST(Kmc, EnsembleCsvColumns) {
    Ensemble e;
    e.N = 4;
    e.trajectories = 10;
    e.times = {1.0};
    e.counts = {{10, 7, 3, 0}};
    std::stringstream ss;
    write_ensemble_csv(ss, e);
    const auto t = read_csv(ss);
    EXPECT_EQ(t.header, (std::vector<std::string>{"t", "j", "n_mean", "n_stderr"}));
    EXPECT_EQ(t.rows[0][1], "-2");
    EXPECT_EQ(std::stod(t.rows[1][2]), 0.7);
    EXPECT_NEAR(std::stod(t.rows[1][3]), std::sqrt(0.21 / 9.0), 1e-15);
    EXPECT_EQ(std::stod(t.rows[3][3]), 0.0);
}

TEST(Occupation, EigenAndOdeRoutesAgreeAndConserveMass) {
    const auto p = chain(40, 1.5);
    const std::vector<double> times{0.5, 3.0, 30.0};
    const auto a = occupation_evolution(p, times, OccupationMethod::ode);
    const auto b = occupation_evolution(p, times, OccupationMethod::eigen);
    for (std::size_t k = 0; k < times.size(); ++k) {
        double mass = 0.0;
        for (long i = 0; i < 40; ++i) {
            EXPECT_NEAR(a[k].n[i], b[k].n[i], 1e-9);
            mass += b[k].n[i];
        }
        EXPECT_NEAR(mass, 20.0, 1e-9);
    }
    EXPECT_THROW(occupation_evolution(chain(41, 1.5), times), DomainError);
}

TEST(Occupation, ShortTimeFormula) {
    const auto p = chain(60, 2.0);
    const double t = 1e-3 / p.kappa();
    const auto n = occupation_evolution(p, {t}, OccupationMethod::eigen)[0].n;
    for (long j : {0L, 3L, 10L}) EXPECT_NEAR(n[j + 30] / occupation_short_time(p, j, t), 1.0, 5e-3) << j;
}

TEST(Occupation, TailDecaysWithExponentOneMinusTwoAlpha) {
    const auto p = chain(100, 2.0);
    const auto n = occupation_evolution(p, {0.5 / p.kappa()}, OccupationMethod::eigen)[0].n;
    std::vector<double> x, y;
    for (long j = 8; j <= 30; ++j) {
        x.push_back(std::log(static_cast<double>(j)));
        y.push_back(std::log(n[j + 50]));
    }
    EXPECT_NEAR(line_fit(x, y).slope, -3.0, 0.2);
}

TEST(Occupation, ParticleHoleSymmetry) {
    const auto traj = occupation_evolution(chain(30, 1.0), {0.1, 1.0, 10.0}, OccupationMethod::eigen);
    const auto r = particle_hole_symmetry_check(traj);
    EXPECT_TRUE(r.ok);
    EXPECT_LT(r.worst, 1e-12);
    auto broken = traj;
    broken[1].n[2] += 1e-6;
    const auto rb = particle_hole_symmetry_check(broken);
    EXPECT_FALSE(rb.ok);
    EXPECT_EQ(rb.worst_j, -13);
    EXPECT_EQ(rb.worst_t, traj[1].t);
}

TEST(Chi, StartsAtOneHalfAndDecaysExponentially) {
    const auto p = chain(64, 2.0);
    const auto s = relaxation_series(p);
    EXPECT_NEAR(s.chi.front(), 0.5, 1e-14);
    for (std::size_t k = 1; k < s.chi.size(); ++k) EXPECT_LE(s.chi[k], s.chi[k - 1] * (1.0 + 1e-12));
    EXPECT_LT(s.chi.back(), 1e-6);
    const auto f = chi_tail_fit(s);
    EXPECT_GE(f.r2, 0.999);
    // the late decay rate of chi^2 is twice the slowest density mode
    EXPECT_NEAR(-f.slope / (2.0 * OccupationPropagator(p).gap()), 1.0, 0.05);
}

TEST(Chi, WindowMustSpanTwoDecades) {
    ChiSeries s;
    s.N = 8;
    s.t = {0.0, 1.0, 2.0};
    s.chi = {1e-3, 5e-4, 2e-4};
    EXPECT_THROW(chi_tail_fit(s), FitError);
}

TEST(RelaxationFit, RecoversSyntheticPowerLaw) {
    const double beta = 1.7, b = 0.8;
    std::vector<ChiSeries> series;
    for (long N : {32L, 64L, 128L, 256L}) series.push_back(synthetic_series(N, std::pow(N, beta) / (2.0 * std::pow(pi, beta) * b)));
    const auto f = relaxation_fit(series, 2.5);
    EXPECT_FALSE(f.log_corrected);
    EXPECT_NEAR(f.beta, beta, 1e-6);
    EXPECT_NEAR(f.b_alpha, b, 1e-6);
    for (double r2 : f.tail_r2) EXPECT_GT(r2, 0.999999);
    series.pop_back();
    EXPECT_THROW(relaxation_fit(series, 2.5), FitError);
}

TEST(RelaxationFit, LogarithmicVariantAtThreeHalves) {
    const double b = 1.3;
    std::vector<ChiSeries> series;
    for (long N : {32L, 64L, 128L, 256L})
        series.push_back(synthetic_series(N, N * N * std::log(static_cast<double>(N)) / (2.0 * pi * pi * b)));
    const auto f = relaxation_fit(series, 1.5);
    EXPECT_TRUE(f.log_corrected);
    EXPECT_EQ(f.beta, 2.0);
    EXPECT_NEAR(f.b_alpha, b, 1e-6);
    EXPECT_LT(f.residual, 1e-6);
    std::stringstream ss;
    write_fit_summary(ss, f);
    EXPECT_NE(ss.str().find("N_list = 32 64 128 256\n"), std::string::npos);
    EXPECT_NE(ss.str().find("log_corrected = true\n"), std::string::npos);
}

TEST(Fractional, CoefficientsOfTheStep) {
    const auto c = fractional_coefficients(50.0, 12);
    for (long m = 1; m <= 12; ++m) {
        const double ref = m % 2 == 0 ? 0.0 : 2.0 * std::sin(0.5 * pi * m) / (pi * m);
        EXPECT_NEAR(c[m], ref, 1e-13) << m;
    }
    EXPECT_THROW(fractional_coefficients(50.0, 0), DomainError);
}

TEST(Fractional, GibbsOvershootAndModeDecay) {
    const double N = 100.0;
    const auto c = fractional_coefficients(N, 400);
    double peak = 0.0;
    for (int k = 0; k <= 2000; ++k) peak = std::max(peak, fractional_reference(N / 2 - 1.0 + k / 2000.0, 0.0, N, 2.0, 1.0, c));
    EXPECT_NEAR(peak - 1.0, 0.0895, 0.003);
    // late times: only the m = 1 mode survives
    const double beta = 1.4, b = 0.9, t = 5.0 / (b * std::pow(pi / N, beta));
    const double x = 20.0;
    const double lead = c[1] * std::exp(-b * std::pow(pi / N, beta) * t) * std::cos(pi * x / N);
    EXPECT_NEAR((fractional_reference(x, t, N, beta, b, c) - 0.5) / lead, 1.0, 1e-7);
    EXPECT_THROW(fractional_reference(-1.0, t, N, beta, b, c), DomainError);
}

TEST(Fractional, ProfileSamplesSiteCentres) {
    const auto p = chain(20, 2.0);
    const auto n = fractional_profile(p, 5.0, 2.0, 1.0, 30);
    ASSERT_EQ(n.size(), 20u);
    const auto c = fractional_coefficients(20.0, 30);
    EXPECT_DOUBLE_EQ(n[3], fractional_reference(3.5, 5.0, 20.0, 2.0, 1.0, c));
    // antisymmetric about the centre
    for (long i = 0; i < 10; ++i) EXPECT_NEAR(n[i] + n[19 - i], 1.0, 1e-12);
}
