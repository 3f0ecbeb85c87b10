#include <gtest/gtest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>
#include <sstream>

#include "frontlab/model.hpp"
#include "frontlab/spectral.hpp"

using namespace frontlab;

namespace {

ModelParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> eps(0.0, 0.99), kap(0.2, 3.0), spd(0.2, 3.0), frac(0.01, 0.99);
    ModelParams p;
    p.epsilon = eps(rng);
    p.kappa = kap(rng);
    p.c = spd(rng);
    p.alpha = frac(rng) * p.c / 2.0;
    return p;
}

// Weighted combustion symbol written entry by entry.
Eigen::Matrix2cd reference_symbol(const ModelParams& p, double a, double xi1, double eta_sq) {
    const std::complex<double> i(0.0, 1.0);
    const double q = xi1 * xi1 + eta_sq;
    const double e = std::exp(-p.kappa);
    Eigen::Matrix2cd m;
    m(0, 0) = -q + (p.c - 2.0 * a) * i * xi1 + a * a - a * p.c;
    m(0, 1) = e;
    m(1, 0) = 0.0;
    m(1, 1) = -p.epsilon * q + (p.c - 2.0 * a * p.epsilon) * i * xi1 + a * a * p.epsilon - p.c * a - p.kappa * e;
    return m;
}

}  // namespace

TEST(Symbol, MatchesEntrywiseFormula) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> xi(-5.0, 5.0);
    for (int t = 0; t < 200; ++t) {
        const ModelParams p = random_params(rng);
        const SymbolMatrix s = combustion_symbol(p, 2, p.alpha);
        const double x1 = xi(rng), x2 = xi(rng);
        const std::vector<double> v{x1, x2};
        EXPECT_LT((s(v) - reference_symbol(p, p.alpha, x1, x2 * x2)).norm(), 1e-12);
    }
}

TEST(Symbol, RejectsFrequencyOfWrongDimension) {
    const SymbolMatrix s = combustion_symbol(ModelParams{}, 2, 0.2);
    const std::vector<double> v{1.0};
    EXPECT_THROW(s(v), std::invalid_argument);
}

TEST(Symbol, NonTriangularEigenvaluesAgreeWithGeneralSolver) {
    const BlockSystem sys = recentered(make_exo_endo_system(0.5, 0.4, 0.5, 1.0, {1.0, 1.0}, {1.0, 1.0}),
                                       Eigen::Vector3d(1.0, 0.0, 0.0));
    const SymbolMatrix s = block_symbol(sys, 1, 0.3);
    for (double x : {-2.0, -0.3, 0.0, 0.7, 3.0}) {
        const std::vector<double> v{x};
        auto ev = symbol_eigenvalues(s, v);
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(s(v));
        std::vector<cplx> ref(es.eigenvalues().data(), es.eigenvalues().data() + 3);
        sort_spectrum(ref);
        ASSERT_EQ(ev.size(), 3u);
        for (int j = 0; j < 3; ++j) {
            EXPECT_LT(std::abs(ev[j] - ref[j]), 1e-12);
        }
    }
}

TEST(Abscissa, ClosedFormsForRandomParameters) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const ModelParams p = random_params(rng);
        EXPECT_EQ(abscissa_unweighted(p), 0.0);
        EXPECT_EQ(abscissa_weighted(p), p.alpha * p.alpha - p.c * p.alpha);
        EXPECT_EQ(*closed_form_abscissa(combustion_symbol(p, 1, 0.0)), 0.0);
        EXPECT_EQ(*closed_form_abscissa(combustion_symbol(p, 1, p.alpha)), p.alpha * p.alpha - p.c * p.alpha);
    }
}

TEST(Abscissa, DenseSweepRealizesClosedForm) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        const ModelParams p = random_params(rng);
        const SpectrumSweep u = sweep_spectrum(combustion_symbol(p, 1, 0.0), {0.0, 401});
        const SpectrumSweep w = sweep_spectrum(combustion_symbol(p, 1, p.alpha), {0.0, 401});
        EXPECT_EQ(u.realized_abscissa, 0.0);
        EXPECT_NEAR(w.realized_abscissa, p.alpha * p.alpha - p.c * p.alpha, 1e-6);
        EXPECT_TRUE(w.extent_certified);
        EXPECT_LE(w.realized_abscissa, *w.closed_form + 1e-15);
    }
}

TEST(Abscissa, BlockAbscissasAndOptimalWeight) {
    ModelParams p;
    p.kappa = 2.0;
    const auto b = block_abscissas(p);
    EXPECT_EQ(b.driven, 0.0);
    EXPECT_DOUBLE_EQ(b.decaying, -2.0 * std::exp(-2.0));
    const auto o = optimal_weight(1.0);
    EXPECT_EQ(o.alpha, 0.5);
    EXPECT_EQ(o.abscissa, -0.25);
    EXPECT_THROW(optimal_weight(0.0), std::invalid_argument);
}

TEST(Abscissa, OptimalWeightBeatsGridSearch) {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> spd(0.2, 4.0);
    for (int t = 0; t < 20; ++t) {
        const double c = spd(rng);
        const auto o = optimal_weight(c);
        double best_a = 0.0, best = 1e300;
        const int m = 1000;
        for (int i = 0; i <= m; ++i) {
            const double a = c * i / m;  // covers [0, c]
            const double val = a * a - c * a;
            if (val < best) {
                best = val;
                best_a = a;
            }
        }
        EXPECT_NEAR(o.alpha, best_a, c / m);
        EXPECT_NEAR(o.abscissa, best, 1e-12);
        EXPECT_LE(o.abscissa, best);
    }
}

TEST(TensorSum, TwoDimensionalAbscissaEqualsLongitudinal) {
    std::mt19937_64 rng(9);
    for (int t = 0; t < 5; ++t) {
        const ModelParams p = random_params(rng);
        const auto r = tensor_sum_check(p, 4.0, 41);
        EXPECT_LE(r.difference, 1e-10);
        EXPECT_LE(r.transverse_shift_error, 1e-10);
        EXPECT_TRUE(r.passed);
    }
}

TEST(Expm, TriangularClosedFormAgreesWithPade) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> re(-3.0, 0.5), im(-4.0, 4.0), tt(0.0, 5.0);
    for (int k = 0; k < 300; ++k) {
        const cplx a(re(rng), im(rng)), b(re(rng), im(rng));
        cplx d(re(rng), im(rng));
        if (k % 3 == 1) {
            d = a + cplx(1e-9, -1e-9);  // near confluent
        } else if (k % 3 == 2) {
            d = a;
        }
        const double t = tt(rng);
        Eigen::Matrix2cd m;
        m << a, b, 0.0, d;
        const Eigen::Matrix2cd ref = (m * t).exp();
        const Eigen::Matrix2cd got = expm_triangular_2x2(a, b, d, t);
        EXPECT_LT((got - ref).norm(), 1e-12 * std::max(1.0, ref.norm())) << "k=" << k;
    }
}

TEST(Expm, SemigroupProperty) {
    const cplx a(-0.3, 1.2), b(0.4, 0.0), d(-0.7, -0.5);
    for (double s : {0.1, 1.0, 3.0}) {
        for (double t : {0.05, 2.0}) {
            const Eigen::Matrix2cd lhs = expm_triangular_2x2(a, b, d, s + t);
            const Eigen::Matrix2cd rhs = expm_triangular_2x2(a, b, d, s) * expm_triangular_2x2(a, b, d, t);
            EXPECT_LT((lhs - rhs).norm(), 1e-14);
        }
    }
    EXPECT_LT((expm_triangular_2x2(a, b, d, 0.0) - Eigen::Matrix2cd::Identity()).norm(), 1e-16);
    EXPECT_THROW(expm_triangular_2x2(a, b, d, -1.0), std::invalid_argument);
}

TEST(Expm, SpectralNormMatchesSvd) {
    std::mt19937_64 rng(13);
    std::normal_distribution<double> n(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        Eigen::Matrix2cd m;
        for (int i = 0; i < 4; ++i) {
            m.data()[i] = cplx(n(rng), n(rng));
        }
        Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
        EXPECT_NEAR(spectral_norm_2x2(m), svd.singularValues()(0), 1e-13 * svd.singularValues()(0));
    }
}

TEST(Envelope, MatchesBruteForceAndDominatesOne) {
    ModelParams p;
    std::vector<double> tg, xg;
    for (int i = 0; i <= 40; ++i) tg.push_back(0.5 * i);
    for (int i = 0; i <= 40; ++i) xg.push_back(-4.0 + 0.2 * i);
    const auto env = semigroup_envelope(p, tg, xg);
    EXPECT_DOUBLE_EQ(env.nu, p.c * p.alpha - p.alpha * p.alpha);
    double ref = 0.0;
    for (double x : xg) {
        const Eigen::Matrix2cd m = reference_symbol(p, p.alpha, x, 0.0);
        for (double t : tg) {
            Eigen::JacobiSVD<Eigen::Matrix2cd> svd((m * t).exp());
            ref = std::max(ref, std::exp(env.nu * t) * svd.singularValues()(0));
        }
    }
    EXPECT_NEAR(env.constant, ref, 1e-10 * ref);
    EXPECT_GE(env.constant, 1.0);
}

TEST(Envelope, UnweightedSymbolIsBoundedButCapCanTrip) {
    ModelParams p;
    std::vector<double> tg{0.0, 10.0, 100.0};
    std::vector<double> xg{0.0};
    // alpha = 0: nu = 0, the driven block is neutral; the off-diagonal term
    // saturates at e^{-kappa} / (kappa e^{-kappa}) = 1/kappa.
    p.alpha = 0.0;
    const auto env = semigroup_envelope(p, tg, xg);
    EXPECT_NEAR(env.constant, std::sqrt(1.0 + 1.0 / (p.kappa * p.kappa)), 1e-3);
    EXPECT_THROW(semigroup_envelope(p, tg, xg, 1.1), EnvelopeError);
}

TEST(Sweep, CsvHasHeaderAndFullPrecision) {
    const SpectrumSweep sw = sweep_spectrum(combustion_symbol(ModelParams{}, 1, 0.4), {2.0, 5});
    std::ostringstream os;
    write_spectrum_csv(os, sw);
    std::istringstream in(os.str());
    std::string header, first;
    std::getline(in, header);
    std::getline(in, first);
    EXPECT_EQ(header.rfind("xi_1,re_lambda_1", 0), 0u);
    EXPECT_NE(first.find("-2,"), std::string::npos);
    EXPECT_EQ(sw.samples(), 5u);
    EXPECT_EQ(os.str().find('\r'), std::string::npos);
}

TEST(Sweep, DegenerateDiffusionStillHasClosedForm) {
    const SymbolMatrix s = block_symbol(recentered(make_gasless_system(1.0), Eigen::Vector2d(1.0, 0.0)), 1, 0.2);
    const auto cf = closed_form_abscissa(s);
    ASSERT_TRUE(cf.has_value());
    const SpectrumSweep sw = sweep_spectrum(s, {5.0, 201});
    EXPECT_NEAR(sw.realized_abscissa, *cf, 1e-12);
}
