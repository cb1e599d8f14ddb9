// test_quantum.cpp — correlation-matrix dynamics, variance formula and the per-momentum spectral problem

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "lrhsr/csv.hpp"
#include "lrhsr/quantum.hpp"

using namespace lrhsr;

namespace {

ModelParams chain(long N, double alpha, double gamma, Boundary bc) {
    ModelParams p;
    p.N = N;
    p.alpha = alpha;
    p.gamma = gamma;
    p.bc = bc;
    return p;
}

// largest distance from each value in `a` to its nearest partner in `b`
double set_distance(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double worst = 0.0;
    for (const auto& x : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& y : b) best = std::min(best, std::abs(x - y));
        worst = std::max(worst, best);
    }
    return worst;
}

std::vector<cplx> to_vec(const Eigen::VectorXcd& v) { return {v.data(), v.data() + v.size()}; }

double perturbative_error(const ModelParams& p, long qi, int order) {
    return set_distance(perturbative_spectrum(qi, p, order), to_vec(solve_momentum(qi, p, false).E));
}

} // namespace

TEST(Hamiltonian, SymmetricPowerLaw) {
    const auto h = hamiltonian(chain(9, 1.5, 1.0, Boundary::open));
    EXPECT_EQ(h, h.transpose());
    EXPECT_DOUBLE_EQ(h(1, 5), std::pow(4.0, -1.5));
    EXPECT_EQ(h(3, 3), 0.0);
    // ring: both ways around
    const auto hr = hamiltonian(chain(9, 1.5, 1.0, Boundary::periodic));
    EXPECT_DOUBLE_EQ(hr(0, 2), std::pow(2.0, -1.5) + std::pow(7.0, -1.5));
}

TEST(PropagateG, CoherentLimitMatchesUnitaryOracle) {
    const auto p = chain(7, 1.0, 0.0, Boundary::open);
    const auto G0 = localized_G0(p, 2);
    const double t = 1.7;
    const auto out = propagate_G(G0, p, {t});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hamiltonian(p));
    const Eigen::MatrixXcd V = es.eigenvectors().cast<cplx>();
    const Eigen::VectorXcd ph = (es.eigenvalues().cast<cplx>() * cplx(0.0, t)).array().exp();
    const Eigen::MatrixXcd U = V * ph.asDiagonal() * V.adjoint(); // e^{iht}
    const Eigen::MatrixXcd ref = U * G0 * U.adjoint();
    EXPECT_LT((out[0].G - ref).cwiseAbs().maxCoeff(), 1e-9);
    // a pure state stays pure
    EXPECT_NEAR((out[0].G * out[0].G).trace().real(), 1.0, 1e-9);
}

TEST(PropagateG, PureDephasingKillsCoherences) {
    auto p = chain(5, 1.0, 2.0, Boundary::open);
    p.J = 0.0;
    Eigen::MatrixXcd G0 = Eigen::MatrixXcd::Constant(5, 5, 0.2);
    const auto out = propagate_G(G0, p, {0.5});
    EXPECT_NEAR(out[0].G(0, 3).real(), 0.2 * std::exp(-1.0), 1e-11);
    EXPECT_NEAR(out[0].G(2, 2).real(), 0.2, 1e-14);
}

TEST(PropagateG, InvariantsAndPurityDecay) {
    const auto p = chain(15, 1.5, 1.0, Boundary::periodic);
    const auto out = propagate_G(localized_G0(p, 7), p, {0.5, 1.0, 2.0, 4.0});
    double purity = 1.0;
    for (const auto& s : out) {
        EXPECT_NEAR(s.G.trace().real(), 1.0, 1e-10);
        EXPECT_LT((s.G - s.G.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GE(s.G.diagonal().real().minCoeff(), -1e-12);
        const double pu = (s.G * s.G).trace().real();
        EXPECT_LT(pu, purity);
        purity = pu;
    }
    EXPECT_THROW(propagate_G(Eigen::MatrixXcd::Identity(14, 14), p, {1.0}), DomainError);
}

TEST(Variance, ClosedFormLimits) {
    const auto p = chain(41, 2.0, 4.0, Boundary::open);
    const double S = hopping_second_moment(p);
    EXPECT_NEAR(variance_closed_form(p, 1e-4) / (S * 1e-8), 1.0, 1e-3);            // ballistic
    EXPECT_NEAR(variance_closed_form(p, 100.0) / (2.0 * S / p.gamma * (100.0 - 0.25)), 1.0, 1e-12); // diffusive
}

TEST(Variance, QmeMatchesClosedFormOnLargeLattice) {
    const auto p = chain(121, 3.0, 10.0, Boundary::open);
    const long c = center_site(p);
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k);
    const auto out = propagate_G(localized_G0(p, c), p, times);
    for (const auto& s : out) EXPECT_NEAR(population_variance(s.G, p, c), variance_closed_form(p, s.t), 1e-6) << s.t;
}

TEST(Variance, SecondMomentFromCentre) {
    const auto p = chain(7, 1.0, 1.0, Boundary::open);
    // displacements -3..3 with H_r = 1/|r|: sum r^2/r^2 = 6
    EXPECT_NEAR(hopping_second_moment(p), 6.0, 1e-15);
}

TEST(Circulant, ZeroMomentumVanishesAndSpectrumMatchesDenseSolve) {
    const auto p = chain(13, 1.5, 0.1, Boundary::periodic);
    EXPECT_EQ(build_circulant(0.0, p).cwiseAbs().maxCoeff(), 0.0);
    for (long qi : {1L, 4L, 9L}) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(build_circulant(momentum(qi, p.N), p), false);
        const auto E0 = unperturbed_spectrum(qi, p);
        EXPECT_LT(set_distance(E0, to_vec(es.eigenvalues())), 1e-12);
        EXPECT_LT(set_distance(to_vec(es.eigenvalues()), E0), 1e-12);
    }
    EXPECT_THROW(unperturbed_spectrum(1, chain(12, 1.5, 0.1, Boundary::periodic)), DomainError);
    EXPECT_THROW(build_circulant(0.1, chain(13, 1.5, 0.1, Boundary::open)), DomainError);
}

TEST(Perturbative, FirstOrderShiftIsUniform) {
    const auto p = chain(11, 1.5, 1e-4, Boundary::periodic);
    const auto E0 = unperturbed_spectrum(3, p);
    const auto E1 = perturbative_spectrum(3, p, 1);
    for (std::size_t k = 0; k < E0.size(); ++k) EXPECT_NEAR(std::abs(E1[k] - E0[k] - 1e-4 * 10.0 / 11.0), 0.0, 1e-18);
    EXPECT_LT(perturbative_error(p, 3, 1), 1e-7);
}

TEST(Perturbative, ThirdOrderErrorScalesAsGammaToTheFourth) {
    const auto a = chain(11, 1.5, 0.02, Boundary::periodic), b = chain(11, 1.5, 0.01, Boundary::periodic);
    for (int order = 1; order <= 3; ++order) {
        const double ea = perturbative_error(a, 3, order), eb = perturbative_error(b, 3, order);
        EXPECT_NEAR(std::log2(ea / eb), order + 1.0, 0.35) << "order " << order;
    }
    EXPECT_LT(perturbative_error(a, 3, 3), perturbative_error(a, 3, 2));
    EXPECT_THROW(perturbative_spectrum(0, a), DegeneracyError);
}

TEST(Spectral, EigenpairResidualsAndBranches) {
    const auto p = chain(21, 2.0, 0.3, Boundary::periodic);
    for (long qi : {0L, 5L}) {
        const auto s = solve_momentum(qi, p);
        const Eigen::MatrixXcd M = build_circulant(s.q, p) + p.gamma * dephasing_matrix(p.N);
        EXPECT_LT((M * s.V - s.V * s.E.asDiagonal()).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_GE(s.condition, 1.0);
        for (long k = 0; k < s.E.size(); ++k) EXPECT_GE(s.E[k].real(), -1e-12);
    }
    // the stationary state sits at q = 0, E = 0, on the real branch
    const auto s0 = solve_momentum(0, p, false);
    long zero = 0;
    for (long k = 0; k < s0.E.size(); ++k)
        if (std::abs(s0.E[k]) < 1e-12) {
            ++zero;
            EXPECT_EQ(s0.branch[static_cast<std::size_t>(k)], Branch::real);
        }
    EXPECT_EQ(zero, 1);
}

TEST(Spectral, SlowModesAreSortedAndPositive) {
    const auto s = slow_modes(chain(15, 1.0, 0.1, Boundary::periodic));
    ASSERT_TRUE(s.real_min.has_value());
    EXPECT_GT(*s.real_min, 0.0);
    EXPECT_TRUE(std::is_sorted(s.slow_real.begin(), s.slow_real.end()));
    for (double e : s.slow_real) EXPECT_LT(e, 0.1);
}

TEST(Spectral, PropagationMatchesOde) {
    const auto p = chain(31, 1.0, 0.1, Boundary::periodic);
    const auto G0 = localized_G0(p, center_site(p));
    const auto at0 = spectral_propagate_G(G0, p, 0.0);
    EXPECT_LT((at0.state.G - G0).cwiseAbs().maxCoeff(), 1e-11);
    const auto sp = spectral_propagate_G(G0, p, 12.0);
    const auto ode = propagate_G(G0, p, {12.0});
    EXPECT_LT((sp.state.G - ode[0].G).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_THROW(spectral_propagate_G(G0, p, 1.0, 0.5), ConditioningError);
}

TEST(Fits, PowerFitAndLargestSizes) {
    const auto f = power_fit({2.0, 4.0, 8.0}, {3.0, 0.75, 0.1875});
    EXPECT_NEAR(f.exponent, -2.0, 1e-13);
    EXPECT_NEAR(f.prefactor, 12.0, 1e-11);
    std::vector<SlowModeSummary> runs;
    for (long N : {10L, 40L, 20L, 80L}) {
        SlowModeSummary s;
        s.N = N;
        s.real_min = N == 10 ? 1.0 : 5.0 / N; // first size is an outlier the fit must skip
        runs.push_back(s);
    }
    EXPECT_NEAR(slow_gap_fit(runs).exponent, -1.0, 1e-13);
    runs[3].real_min.reset();
    EXPECT_THROW(slow_gap_fit(runs), FitError);
}

TEST(Spectral, CsvHasOneRowPerEigenvalue) {
    const auto p = chain(7, 2.0, 0.1, Boundary::periodic);
    std::stringstream ss;
    write_spectrum_csv(ss, {solve_momentum(0, p, false), solve_momentum(2, p, false)});
    const auto t = read_csv(ss);
    EXPECT_EQ(t.header, (std::vector<std::string>{"q_index", "k_index", "re_E", "im_E", "branch"}));
    EXPECT_EQ(t.rows.size(), 14u);
    EXPECT_EQ(t.rows[8][0], "2");
}
