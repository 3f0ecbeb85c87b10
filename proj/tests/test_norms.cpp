#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "frontlab/fft.hpp"
#include "frontlab/field.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/norms.hpp"

using namespace frontlab;

namespace {

FieldState gaussian_field(const Grid& g, double amp, double z0, double w, int comp = 0, int n = 2) {
    FieldState f(g, n, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double z = g.z_of(i);
        f.components[comp][i] = amp * std::exp(-(z - z0) * (z - z0) / (w * w));
    }
    return f;
}

const double kRootHalfPi = std::sqrt(std::numbers::pi / 2.0);

}  // namespace

TEST(Grid, ValidatesShape) {
    EXPECT_THROW(Grid::line(10.0, 100), std::invalid_argument);
    EXPECT_THROW(Grid::line(10.0, 8), std::invalid_argument);
    EXPECT_THROW(Grid::line(-1.0, 64), std::invalid_argument);
    EXPECT_THROW(Grid(3, {1.0, 1.0}, {16, 16}), std::invalid_argument);
    const Grid g(2, {10.0, 5.0}, {64, 32});
    EXPECT_EQ(g.size(), 64u * 32u);
    EXPECT_DOUBLE_EQ(g.spacing(0), 20.0 / 64);
    EXPECT_DOUBLE_EQ(g.coordinate(1, 0), -5.0);
    EXPECT_DOUBLE_EQ(g.cell_volume(), (20.0 / 64) * (10.0 / 32));
}

TEST(Grid, WavenumbersAndNyquistHandling) {
    const Grid g = Grid::line(std::numbers::pi, 16);  // unit wavenumber spacing
    EXPECT_DOUBLE_EQ(g.wavenumber(0, 1), 1.0);
    EXPECT_DOUBLE_EQ(g.wavenumber(0, 15), -1.0);
    EXPECT_DOUBLE_EQ(g.wavenumber(0, 8), -8.0);
    const auto m = g.modes();
    EXPECT_EQ(m.xi1[8], 0.0);
    EXPECT_DOUBLE_EQ(m.xi_sq[8], 64.0);
}

TEST(Fft, RoundTripAndSingleMode) {
    const Grid g = Grid::line(std::numbers::pi, 32);
    FftPlan plan(g);
    std::vector<double> v(g.size()), back(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
        v[i] = std::cos(3.0 * g.z_of(i)) + 0.25;
    }
    plan.forward(v);
    const auto d = plan.data();
    EXPECT_NEAR(std::abs(d[0]), 0.25 * 32, 1e-12);
    EXPECT_NEAR(std::abs(d[3]), 16.0, 1e-12);
    EXPECT_NEAR(std::abs(d[5]), 0.0, 1e-12);
    plan.backward(back);
    for (std::size_t i = 0; i < g.size(); ++i) {
        EXPECT_NEAR(back[i], v[i], 1e-14);
    }
}

TEST(Norms, GaussianL2AndH1AgainstClosedForm) {
    const Grid g = Grid::line(40.0, 1024);
    const double a = 0.7, w = 2.5;
    const FieldState f = gaussian_field(g, a, 3.0, w);
    NormMeter m(g, 0.0);
    EXPECT_NEAR(m.unweighted(f, 0), std::sqrt(a * a * w * kRootHalfPi), 1e-12);
    EXPECT_NEAR(m.unweighted(f, 1), std::sqrt(a * a * kRootHalfPi * (w + 1.0 / w)), 1e-12);
}

TEST(Norms, SpectralH1AgreesWithDirectSumForK0) {
    const Grid g(2, {20.0, 10.0}, {128, 64});
    FieldState f(g, 1, 1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        f.components[0][i] = std::sin(0.3 * static_cast<double>(i));  // rough on purpose
    }
    NormMeter m(g, 0.0);
    // with k = 0 the Parseval path and the direct sum must agree
    double direct = 0.0;
    for (double x : f.components[0]) direct += x * x;
    EXPECT_NEAR(m.squared(f[0], 0), direct * g.cell_volume(), 1e-9);
    EXPECT_GE(m.squared(f[0], 1), m.squared(f[0], 0));
}

TEST(Norms, WeightedGaussianClosedForm) {
    const Grid g = Grid::line(50.0, 2048);
    const double a = 1e-3, w = 2.0, z0 = -5.0, alpha = 0.4;
    const FieldState f = gaussian_field(g, a, z0, w, 1);
    NormMeter m(g, alpha);
    const double expected = a * std::sqrt(w * kRootHalfPi * std::exp(2 * alpha * z0 + alpha * alpha * w * w / 2));
    EXPECT_NEAR(m.weighted(f, 0) / expected, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(norm_E(g, f, alpha, 0), std::max(norm_unweighted(g, f, 0), norm_weighted(g, f, alpha, 0)));
}

TEST(Norms, TranslationMultipliesWeightedNormByExponential) {
    const Grid g = Grid::line(50.0, 1024);
    const double alpha = 0.3;
    const double shift = 64 * g.spacing(0);
    const FieldState f = gaussian_field(g, 1.0, -10.0, 2.0);
    const FieldState s = gaussian_field(g, 1.0, -10.0 + shift, 2.0);
    NormMeter m(g, alpha);
    for (int k : {0, 1}) {
        EXPECT_NEAR(m.weighted(s, k) / m.weighted(f, k), std::exp(alpha * shift), 1e-10 * std::exp(alpha * shift));
    }
}

TEST(Norms, ContaminationGuardAndBoundaryFraction) {
    const Grid g = Grid::line(50.0, 256);
    NormMeter hot(g, 20.0);
    FieldState f(g, 2, 1);
    f.components[0][250] = 1.0;  // z close to +50: alpha z > 700
    EXPECT_THROW(hot.weighted(f, 0), ContaminationError);
    NormMeter m(g, 0.1);
    EXPECT_DOUBLE_EQ(m.boundary_fraction(f), 1.0);
    FieldState inner = gaussian_field(g, 1.0, 0.0, 1.0);
    EXPECT_LT(m.boundary_fraction(inner), 1e-300);
    FieldState zero(g, 2, 1);
    EXPECT_EQ(m.boundary_fraction(zero), 0.0);
    EXPECT_THROW(NormMeter(g, -0.1), std::invalid_argument);
}

TEST(Norms, MeasureSplitsBlocks) {
    const Grid g = Grid::line(20.0, 256);
    FieldState f = gaussian_field(g, 1.0, 0.0, 1.0, 0);
    for (std::size_t i = 0; i < g.size(); ++i) f.components[1][i] = 2.0 * f.components[0][i];
    NormMeter m(g, 0.2);
    const NormSample s = measure(m, f, 0);
    EXPECT_NEAR(s.v2, 2.0 * s.v1, 1e-14);
    EXPECT_NEAR(s.v, std::sqrt(5.0) * s.v1, 1e-14);
    EXPECT_DOUBLE_EQ(s.e, std::max(s.v, s.weighted));
}

TEST(Fit, SyntheticEnvelopeWithKnownRate) {
    std::vector<double> t, y;
    for (int i = 0; i <= 300; ++i) {
        t.push_back(0.1 * i);
        y.push_back(std::exp(-t.back()) * (2.0 + std::cos(t.back())));
    }
    const DecayFit f = fit_decay(t, y);
    EXPECT_NEAR(f.nu, 1.0, 0.1);
    EXPECT_GT(f.r_squared, 0.99);
    EXPECT_NEAR(f.t_start, 3.0, 1e-12);
}

TEST(Fit, ExactExponentialAndEdgeCases) {
    std::vector<double> t, y, flat, dead;
    for (int i = 0; i < 50; ++i) {
        t.push_back(i);
        y.push_back(3.0 * std::exp(-0.25 * i));
        flat.push_back(1.0);
        dead.push_back(i < 20 ? 1.0 : 0.0);
    }
    const DecayFit f = fit_decay(t, y, {0.0});
    EXPECT_NEAR(f.nu, 0.25, 1e-13);
    EXPECT_NEAR(f.amplitude, 3.0, 1e-12);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    const DecayFit fl = fit_decay(t, flat);
    EXPECT_EQ(fl.nu, 0.0);
    EXPECT_EQ(fl.r_squared, 1.0);
    const DecayFit d = fit_decay(t, dead);
    EXPECT_TRUE(d.decayed_to_zero());
    EXPECT_FALSE(d.diagnostic.empty());
    EXPECT_THROW(fit_decay(std::vector<double>(9, 1.0), std::vector<double>(9, 1.0), {0.0}), std::invalid_argument);
    FitWindow w;
    w.t_start = 41.0;  // leaves nine samples
    EXPECT_THROW(fit_decay(t, y, w), std::invalid_argument);
}

namespace {

NormSeries synthetic_series(double nu_w, double nu_r, double v1_level) {
    NormSeries s;
    for (int i = 0; i <= 100; ++i) {
        NormSample r;
        r.t = 0.4 * i;
        r.k = 0;
        r.v1 = v1_level;
        r.v2 = 1e-3 * std::exp(-nu_r * r.t);
        r.v = std::hypot(r.v1, r.v2);
        r.weighted = 1e-3 * std::exp(-nu_w * r.t);
        r.e = std::max(r.v, r.weighted);
        s.rows.push_back(r);
        r.k = 1;
        s.rows.push_back(r);
    }
    return s;
}

}  // namespace

TEST(Verdict, PassesOnDecayingSeries) {
    VerifyConfig cfg;
    cfg.delta = 1e-2;
    const auto rep = verify_decay(synthetic_series(0.24, 0.37, 5e-4), 0.24, 0.36787944117144233, cfg);
    EXPECT_TRUE(rep.passed());
    EXPECT_EQ(rep.items.size(), 5u);
    EXPECT_NEAR(rep.weighted_fit.nu, 0.24, 1e-12);
    std::ostringstream os;
    write_verdict(os, rep);
    EXPECT_NE(os.str().find("verdict: pass"), std::string::npos);
}

TEST(Verdict, EachItemCanFailIndependently) {
    VerifyConfig cfg;
    cfg.delta = 1e-2;
    // slow weighted decay: item 3
    EXPECT_FALSE(verify_decay(synthetic_series(0.1, 0.37, 5e-4), 0.24, 0.37, cfg).item(3).passed);
    // slow reactant decay: item 5
    EXPECT_FALSE(verify_decay(synthetic_series(0.24, 0.1, 5e-4), 0.24, 0.37, cfg).item(5).passed);
    // large v1: items 2 and 4
    const auto big = verify_decay(synthetic_series(0.24, 0.37, 1.0), 0.24, 0.37, cfg);
    EXPECT_FALSE(big.item(2).passed);
    EXPECT_FALSE(big.passed());
    // non-finite: item 1
    auto s = synthetic_series(0.24, 0.37, 5e-4);
    s.rows[10].v1 = std::nan("");
    EXPECT_FALSE(verify_decay(s, 0.24, 0.37, cfg).item(1).passed);
}

TEST(Verdict, RequiresK0Rows) {
    EXPECT_THROW(verify_decay(NormSeries{}, 0.2, 0.3, VerifyConfig{}), std::invalid_argument);
}

TEST(NormCsv, HeaderAndPrecision) {
    NormSeries s;
    s.rows.push_back({0.1, 0, 1.0 / 3.0, 0.0, 0.0, 0.0, 0.0});
    std::ostringstream os;
    write_norm_csv(os, s);
    EXPECT_EQ(os.str(), "t,norm0_v1,norm0_v2,norm0_v,normalpha_v,normE_v,k\n"
                        "0.10000000000000001,0.33333333333333331,0,0,0,0,0\n");
}
