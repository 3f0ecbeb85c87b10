#pragma once

// Fourier symbols of the constant-coefficient linearizations, their
// eigenvalue curves, spectral abscissas, and exact 2x2 propagators.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "frontlab/model.hpp"
#include "frontlab/parallel.hpp"

namespace frontlab {

using cplx = std::complex<double>;

/// Symbol of D Δ + c ∂z + B conjugated by the weight e^{alpha z}:
///   -|ξ|² D + (i c ξ1 - alpha c) I + (alpha² - 2 i ξ1 alpha) D + B.
/// alpha = 0 gives the unweighted symbol M(ξ).
struct SymbolMatrix {
    int dim = 1;
    Eigen::VectorXd diffusion;  ///< diagonal of D
    double c = 1.0;
    Eigen::MatrixXd zero_order;  ///< B = ∂u f at the end state
    double alpha = 0.0;

    int size() const { return static_cast<int>(zero_order.rows()); }

    /// Symbol at |ξ|² = xi_sq with longitudinal frequency xi1.
    Eigen::MatrixXcd at(double xi_sq, double xi1) const {
        const int n = size();
        Eigen::MatrixXcd m = zero_order.cast<cplx>();
        const cplx shift(-alpha * c, c * xi1);
        for (int j = 0; j < n; ++j) {
            const cplx dj(diffusion(j), 0.0);
            m(j, j) += -xi_sq * dj + shift + cplx(alpha * alpha, -2.0 * xi1 * alpha) * dj;
        }
        return m;
    }

    Eigen::MatrixXcd operator()(std::span<const double> xi) const {
        if (static_cast<int>(xi.size()) != dim) {
            throw std::invalid_argument(fmt::format("symbol: expected a frequency of dimension {}, got {}", dim,
                                                    xi.size()));
        }
        double sq = 0.0;
        for (double x : xi) {
            sq += x * x;
        }
        return at(sq, xi[0]);
    }

    /// True when B (hence every symbol value) is upper triangular.
    bool upper_triangular() const {
        for (int i = 1; i < size(); ++i) {
            for (int j = 0; j < i; ++j) {
                if (zero_order(i, j) != 0.0) {
                    return false;
                }
            }
        }
        return true;
    }

    SymbolMatrix with_alpha(double a) const {
        SymbolMatrix s = *this;
        s.alpha = a;
        return s;
    }
};

inline SymbolMatrix combustion_symbol(const ModelParams& p, int dim, double alpha) {
    SymbolMatrix s;
    s.dim = dim;
    s.diffusion = Eigen::Vector2d(1.0, p.epsilon);
    s.c = p.c;
    s.zero_order = jacobian_at_minus(p);
    s.alpha = alpha;
    return s;
}

/// Symbol of a block system already expressed about its end state u- = 0.
inline SymbolMatrix block_symbol(const BlockSystem& sys, int dim, double alpha) {
    SymbolMatrix s;
    s.dim = dim;
    s.diffusion = sys.diffusion();
    s.c = sys.c;
    s.zero_order = sys.jacobian(Eigen::VectorXd::Zero(sys.size()));
    s.alpha = alpha;
    return s;
}

inline void sort_spectrum(std::vector<cplx>& ev) {
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
        if (a.real() != b.real()) {
            return a.real() > b.real();
        }
        return a.imag() > b.imag();
    });
}

inline std::vector<cplx> eigenvalues_of(const SymbolMatrix& sym, const Eigen::MatrixXcd& m) {
    std::vector<cplx> ev(static_cast<std::size_t>(m.rows()));
    if (sym.upper_triangular()) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            ev[i] = m(i, i);
        }
    } else {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
        if (solver.info() != Eigen::Success) {
            throw std::runtime_error("eigenvalue solve did not converge");
        }
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            ev[i] = solver.eigenvalues()(i);
        }
    }
    sort_spectrum(ev);
    return ev;
}

/// Eigenvalues of the symbol at ξ, ordered by descending real part.
inline std::vector<cplx> symbol_eigenvalues(const SymbolMatrix& sym, std::span<const double> xi) {
    return eigenvalues_of(sym, sym(xi));
}

/// Closed-form abscissa sup_ξ max Re λ(ξ) for triangular symbols: each
/// diagonal family is a downward parabola in |ξ| with vertex at ξ = 0.
inline std::optional<double> closed_form_abscissa(const SymbolMatrix& sym) {
    if (!sym.upper_triangular() || sym.diffusion.minCoeff() < 0.0) {
        return std::nullopt;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < sym.size(); ++j) {
        best = std::max(best, sym.diffusion(j) * sym.alpha * sym.alpha - sym.alpha * sym.c + sym.zero_order(j, j));
    }
    return best;
}

/// Always 0: the temperature family -|ξ|² + icξ1 touches the imaginary axis at ξ = 0.
inline double abscissa_unweighted(const ModelParams&) { return 0.0; }

/// max(alpha² - c alpha, eps alpha² - c alpha - kappa e^{-kappa}) at the
/// params' alpha. Evaluated for any alpha >= 0.
inline double abscissa_weighted(const ModelParams& p) {
    const double a = p.alpha;
    return std::max(a * a - p.c * a, p.epsilon * a * a - p.c * a - p.kappa * std::exp(-p.kappa));
}

struct OptimalWeight {
    double alpha;
    double abscissa;
};

/// Vertex of alpha -> alpha² - c alpha: alpha* = c/2, abscissa -c²/4.
inline OptimalWeight optimal_weight(double c) {
    if (!(c > 0.0)) {
        throw std::invalid_argument("optimal_weight: c must be positive");
    }
    return {0.5 * c, -0.25 * c * c};
}

struct BlockAbscissas {
    double driven;    ///< L(1) = Δ + c∂z
    double decaying;  ///< L(2) = eps Δ + c∂z - kappa e^{-kappa}
};

inline BlockAbscissas block_abscissas(const ModelParams& p) { return {0.0, -p.kappa * std::exp(-p.kappa)}; }

struct SweepConfig {
    double extent = 0.0;  ///< per-axis half width R; <= 0 selects it automatically
    int count = 401;      ///< samples per axis
};

/// Sampled eigenvalue curves over the box [-R, R]^d.
struct SpectrumSweep {
    int dim = 1;
    int n = 0;
    double extent = 0.0;
    int count = 0;
    std::vector<double> xi;           ///< samples x dim, row major
    std::vector<cplx> eigenvalues;    ///< samples x n, row major, descending real part
    double realized_abscissa = -std::numeric_limits<double>::infinity();
    std::optional<double> closed_form;
    double resolution = 0.0;          ///< grid spacing 2R/(m-1)
    bool extent_certified = false;    ///< the tail |ξ| > R provably cannot raise the abscissa

    std::size_t samples() const { return eigenvalues.size() / static_cast<std::size_t>(std::max(n, 1)); }
};

struct ExtentChoice {
    double extent;
    bool certified;
};

/// Chooses R so that Re λ(ξ) for |ξ| > R stays at least 1e-9 below a value
/// the sweep already realizes. Triangular symbols use the exact per-family
/// parabolas; general symbols use the Hermitian-part bound
///   Re λ <= λmax(-|ξ|² D + alpha² D - alpha c I + sym(B)).
inline ExtentChoice auto_extent(const SymbolMatrix& sym) {
    constexpr double slack = 1e-9;
    constexpr double fallback = 20.0;
    const std::vector<double> zero(static_cast<std::size_t>(sym.dim), 0.0);
    const double at_zero = symbol_eigenvalues(sym, zero).front().real();
    if (sym.upper_triangular()) {
        double r = 1.0;
        for (int j = 0; j < sym.size(); ++j) {
            const double dj = sym.diffusion(j);
            if (dj > 0.0) {
                const double vertex = dj * sym.alpha * sym.alpha - sym.alpha * sym.c + sym.zero_order(j, j);
                r = std::max(r, std::sqrt(std::max(0.0, vertex - at_zero + slack) / dj));
            }
        }
        return {r, true};
    }
    const double dmin = sym.diffusion.minCoeff();
    if (dmin <= 0.0) {
        return {fallback, false};
    }
    const Eigen::MatrixXd herm = 0.5 * (sym.zero_order + sym.zero_order.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(herm, Eigen::EigenvaluesOnly);
    const double bound = sym.alpha * sym.alpha * sym.diffusion.maxCoeff() - sym.alpha * sym.c +
                         es.eigenvalues().maxCoeff();
    return {std::max(1.0, std::sqrt(std::max(0.0, bound - at_zero + slack) / dmin)), true};
}

/// Dense sweep of the symbol over a uniform grid, data-parallel over rows
/// of the longitudinal axis.
inline SpectrumSweep sweep_spectrum(const SymbolMatrix& sym, SweepConfig cfg = {}) {
    if (cfg.count < 2) {
        throw std::invalid_argument("sweep_spectrum: need at least two samples per axis");
    }
    if (sym.dim < 1) {
        throw std::invalid_argument("sweep_spectrum: dimension must be positive");
    }
    SpectrumSweep out;
    out.dim = sym.dim;
    out.n = sym.size();
    out.count = cfg.count;
    if (cfg.extent > 0.0) {
        out.extent = cfg.extent;
        const ExtentChoice ch = auto_extent(sym);
        out.extent_certified = ch.certified && cfg.extent >= ch.extent;
    } else {
        const ExtentChoice ch = auto_extent(sym);
        out.extent = ch.extent;
        out.extent_certified = ch.certified;
    }
    out.resolution = 2.0 * out.extent / (cfg.count - 1);
    out.closed_form = closed_form_abscissa(sym);

    std::size_t total = 1;
    for (int a = 0; a < sym.dim; ++a) {
        total *= static_cast<std::size_t>(cfg.count);
    }
    out.xi.resize(total * sym.dim);
    out.eigenvalues.resize(total * out.n);
    const std::size_t rows = static_cast<std::size_t>(cfg.count);
    const std::size_t per_row = total / rows;
    auto coord = [&](int i) {
        // symmetric grid; the midpoint is exactly zero for odd counts
        return out.extent * (2.0 * i - (cfg.count - 1)) / (cfg.count - 1);
    };
    parallel_for(rows, [&](std::size_t row) {
        std::vector<double> xi(static_cast<std::size_t>(sym.dim));
        for (std::size_t k = 0; k < per_row; ++k) {
            const std::size_t s = row * per_row + k;
            std::size_t rem = s;
            for (int a = sym.dim - 1; a >= 0; --a) {
                xi[a] = coord(static_cast<int>(rem % rows));
                rem /= rows;
            }
            const std::vector<cplx> ev = symbol_eigenvalues(sym, xi);
            std::copy(xi.begin(), xi.end(), out.xi.begin() + static_cast<std::ptrdiff_t>(s * sym.dim));
            std::copy(ev.begin(), ev.end(), out.eigenvalues.begin() + static_cast<std::ptrdiff_t>(s * out.n));
        }
    });
    for (const cplx& l : out.eigenvalues) {
        out.realized_abscissa = std::max(out.realized_abscissa, l.real());
    }
    return out;
}

/// Spectrum CSV: xi_1..xi_d, then (re, im) per eigenvalue, 17 significant digits.
inline void write_spectrum_csv(std::ostream& os, const SpectrumSweep& sw) {
    for (int a = 0; a < sw.dim; ++a) {
        os << (a ? "," : "") << "xi_" << (a + 1);
    }
    for (int j = 0; j < sw.n; ++j) {
        os << ",re_lambda_" << (j + 1) << ",im_lambda_" << (j + 1);
    }
    os << '\n';
    std::string line;
    for (std::size_t s = 0; s < sw.samples(); ++s) {
        line.clear();
        for (int a = 0; a < sw.dim; ++a) {
            if (a) {
                line += ',';
            }
            line += fmt::format("{:.17g}", sw.xi[s * sw.dim + a]);
        }
        for (int j = 0; j < sw.n; ++j) {
            const cplx l = sw.eigenvalues[s * sw.n + j];
            line += fmt::format(",{:.17g},{:.17g}", l.real(), l.imag());
        }
        os << line << '\n';
    }
}

/// Comparison of the d-dimensional weighted sweep with the longitudinal
/// (transverse frequency zero) sweep.
struct TensorSumReport {
    int dim = 2;
    double abscissa_full = 0.0;
    double abscissa_longitudinal = 0.0;
    double difference = 0.0;
    /// max |λ_j(ξ1, η) - (λ_j(ξ1) - D_j |η|²)| over the full grid
    double transverse_shift_error = 0.0;
    /// max |λ(ξ1, 0) - λ(ξ1)| on the η = 0 slice
    double slice_error = 0.0;
    bool passed = false;
};

inline TensorSumReport tensor_sum_check(const ModelParams& p, double extent, int count, int dim = 2,
                                        double tolerance = 1e-10) {
    if (dim < 2) {
        throw std::invalid_argument("tensor_sum_check: needs dimension >= 2");
    }
    if (!(extent > 0.0) || count < 3) {
        throw std::invalid_argument("tensor_sum_check: need extent > 0 and at least 3 samples");
    }
    const SymbolMatrix full = combustion_symbol(p, dim, p.alpha);
    const SymbolMatrix line = combustion_symbol(p, 1, p.alpha);
    const SpectrumSweep sf = sweep_spectrum(full, {extent, count});
    const SpectrumSweep sl = sweep_spectrum(line, {extent, count});

    TensorSumReport r;
    r.dim = dim;
    r.abscissa_full = sf.realized_abscissa;
    r.abscissa_longitudinal = sl.realized_abscissa;
    r.difference = std::abs(sf.realized_abscissa - sl.realized_abscissa);
    // combustion symbols are triangular, so eigenvalue j is diagonal entry j
    const Eigen::Vector2d dvec(1.0, p.epsilon);
    for (std::size_t s = 0; s < sf.samples(); ++s) {
        const double xi1 = sf.xi[s * dim];
        double eta_sq = 0.0;
        for (int a = 1; a < dim; ++a) {
            eta_sq += sf.xi[s * dim + a] * sf.xi[s * dim + a];
        }
        const std::vector<double> x1{xi1};
        const Eigen::MatrixXcd m1 = line(x1);
        const Eigen::MatrixXcd mf = full(std::span<const double>(sf.xi.data() + s * dim, dim));
        for (int j = 0; j < 2; ++j) {
            const double err = std::abs(mf(j, j) - (m1(j, j) - dvec(j) * eta_sq));
            r.transverse_shift_error = std::max(r.transverse_shift_error, err);
            if (eta_sq == 0.0) {
                r.slice_error = std::max(r.slice_error, std::abs(mf(j, j) - m1(j, j)));
            }
        }
    }
    r.passed = r.difference <= tolerance && r.transverse_shift_error <= tolerance && r.slice_error == 0.0;
    return r;
}

namespace detail {

/// e^z - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
    const double x = z.real();
    const double y = z.imag();
    const double s = std::sin(0.5 * y);
    return {std::expm1(x) * std::cos(y) - 2.0 * s * s, std::exp(x) * std::sin(y)};
}

}  // namespace detail

/// exp(t [[a, b], [0, d]]) in closed form. The off-diagonal entry
/// b (e^{at} - e^{dt}) / (a - d) is evaluated as b e^{at} expm1((d-a)t)/(d-a)
/// when the gap is moderate, and by its first-order expansion
/// b t e^{at} (1 + (d-a)t/2) once |a - d| < 1e-12.
inline Eigen::Matrix2cd expm_triangular_2x2(cplx a, cplx b, cplx d, double t) {
    if (t < 0.0) {
        throw std::invalid_argument("expm_triangular_2x2: t must be nonnegative");
    }
    const cplx ea = std::exp(a * t);
    const cplx ed = std::exp(d * t);
    const cplx gap = d - a;
    cplx off;
    if (std::abs(gap) < 1e-12) {
        off = b * t * ea * (1.0 + 0.5 * gap * t);
    } else if (std::abs(gap * t) < 1.0) {
        off = b * ea * detail::expm1(gap * t) / gap;
    } else {
        off = b * (ea - ed) / (a - d);
    }
    Eigen::Matrix2cd m;
    m << ea, off, cplx(0.0, 0.0), ed;
    return m;
}

/// Largest singular value of a 2x2 complex matrix.
inline double spectral_norm_2x2(const Eigen::Matrix2cd& m) {
    const double fro2 = m.squaredNorm();
    const double det2 = std::norm(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    const double disc = std::max(0.0, fro2 * fro2 - 4.0 * det2);
    return std::sqrt(0.5 * (fro2 + std::sqrt(disc)));
}

struct EnvelopeEstimate {
    double constant = 1.0;  ///< K_est
    double nu = 0.0;        ///< decay rate the envelope is measured against
};

class EnvelopeError : public std::runtime_error {
public:
    EnvelopeError(const std::string& what, double k) : std::runtime_error(what), partial(k) {}
    double partial;
};

/// K_est = max over (t, ξ) of e^{nu t} ||exp(t N(ξ))||₂ with nu = -abscissa,
/// for 2x2 upper triangular symbols. ξ samples are full frequency vectors of
/// the symbol's dimension.
inline EnvelopeEstimate semigroup_envelope(const SymbolMatrix& sym, std::span<const double> t_grid,
                                           const std::vector<std::vector<double>>& xi_grid, double cap = 1e6) {
    if (sym.size() != 2 || !sym.upper_triangular()) {
        throw std::invalid_argument("semigroup_envelope: needs a 2x2 upper triangular symbol");
    }
    const auto abscissa = closed_form_abscissa(sym);
    EnvelopeEstimate est;
    est.nu = -*abscissa;
    if (!(est.nu >= 0.0)) {
        throw std::invalid_argument("semigroup_envelope: abscissa must be nonpositive");
    }
    est.constant = 0.0;
    for (const auto& xi : xi_grid) {
        const Eigen::MatrixXcd m = sym(xi);
        for (double t : t_grid) {
            const Eigen::Matrix2cd e = expm_triangular_2x2(m(0, 0), m(0, 1), m(1, 1), t);
            est.constant = std::max(est.constant, std::exp(est.nu * t) * spectral_norm_2x2(e));
            if (!std::isfinite(est.constant) || est.constant > cap) {
                throw EnvelopeError(fmt::format("semigroup envelope exceeded cap {} at t = {}", cap, t),
                                    est.constant);
            }
        }
    }
    return est;
}

/// Envelope of the weighted combustion semigroup in one dimension.
inline EnvelopeEstimate semigroup_envelope(const ModelParams& p, std::span<const double> t_grid,
                                           std::span<const double> xi1_grid, double cap = 1e6) {
    std::vector<std::vector<double>> xi;
    xi.reserve(xi1_grid.size());
    for (double x : xi1_grid) {
        xi.push_back({x});
    }
    return semigroup_envelope(combustion_symbol(p, 1, p.alpha), t_grid, xi, cap);
}

}  // namespace frontlab
