#pragma once

// Pseudo-spectral evolution of the perturbation equation
//   v_t = D Δv + c ∂z v + B v + R(v)
// on a periodic grid: exact per-mode linear flow, pointwise RK4 for R,
// Strang composition.

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "frontlab/fft.hpp"
#include "frontlab/field.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/model.hpp"
#include "frontlab/norms.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab {

/// Pointwise remainder R(v) = f(u- + v) - f(u-) - B v, in: n values, out: n values.
using PointwiseMap = std::function<void(const double*, double*)>;
/// ||∂f(u- + v) - ∂f(u-)||_inf at one point.
using PointwiseGap = std::function<double(const double*)>;

/// Everything the stepper needs to know about a system linearized at u-.
struct Dynamics {
    std::string name;
    int n = 2;
    int n1 = 1;
    Eigen::VectorXd diffusion;
    double c = 1.0;
    Eigen::MatrixXd b;
    PointwiseMap remainder;  ///< empty for linear-only runs
    PointwiseGap jacobian_gap;

    bool nonlinear() const { return static_cast<bool>(remainder); }

    bool triangular_2x2() const { return n == 2 && b(1, 0) == 0.0; }

    Dynamics linear_only() const {
        Dynamics d = *this;
        d.remainder = nullptr;
        d.jacobian_gap = nullptr;
        return d;
    }
};

inline Dynamics combustion_dynamics(const ModelParams& p, bool nonlinear = true) {
    p.validate_model();
    Dynamics d;
    d.name = "combustion";
    d.n = 2;
    d.n1 = 1;
    d.diffusion = Eigen::Vector2d(1.0, p.epsilon);
    d.c = p.c;
    d.b = jacobian_at_minus(p);
    if (nonlinear) {
        const double base = 1.0 / p.kappa;
        const double g0 = ignition(base);
        const double kappa = p.kappa;
        d.remainder = [base, g0, kappa](const double* v, double* out) {
            const double r = (ignition(base + v[0]) - g0) * v[1];
            out[0] = r;
            out[1] = -kappa * r;
        };
        const Eigen::Matrix2d j0 = d.b;
        d.jacobian_gap = [p, base, j0](const double* v) {
            const Eigen::Matrix2d j = combustion_jacobian(p, Eigen::Vector2d(base + v[0], v[1])) - j0;
            return j.cwiseAbs().rowwise().sum().maxCoeff();
        };
    }
    return d;
}

/// Dynamics of a block system already written about its end state (u- = 0).
/// The remainder uses the identity N(v) v = f(v) - f(0) - ∂f(0) v.
inline Dynamics block_dynamics(const BlockSystem& sys, bool nonlinear = true) {
    sys.validate();
    Dynamics d;
    d.name = sys.name;
    d.n = sys.size();
    d.n1 = sys.n1;
    d.diffusion = sys.diffusion();
    d.c = sys.c;
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(d.n);
    d.b = sys.jacobian(zero);
    if (nonlinear) {
        const Eigen::VectorXd f0 = sys.rhs(zero);
        const Eigen::MatrixXd j0 = d.b;
        const VectorField f = sys.rhs;
        const JacobianField jac = sys.jacobian;
        const int n = d.n;
        d.remainder = [f, f0, j0, n](const double* v, double* out) {
            const Eigen::Map<const Eigen::VectorXd> vv(v, n);
            Eigen::Map<Eigen::VectorXd>(out, n) = f(vv) - f0 - j0 * vv;
        };
        d.jacobian_gap = [jac, j0, n](const double* v) {
            const Eigen::Map<const Eigen::VectorXd> vv(v, n);
            return (jac(vv) - j0).cwiseAbs().rowwise().sum().maxCoeff();
        };
    }
    return d;
}

class StepError : public std::runtime_error {
public:
    StepError(const std::string& what, double time) : std::runtime_error(what), t(time) {}
    double t;
};

/// Owns the transforms and propagator cache for one evolution. Not shareable
/// across threads; independent runs each build their own.
class Simulator {
public:
    Simulator(const Grid& grid, Dynamics dyn) : grid_(grid), dyn_(std::move(dyn)), plan_(grid), modes_(grid.modes()) {
        if (dyn_.diffusion.size() != dyn_.n || dyn_.b.rows() != dyn_.n || dyn_.b.cols() != dyn_.n) {
            throw std::invalid_argument("simulator: dynamics dimensions are inconsistent");
        }
        spectra_.assign(static_cast<std::size_t>(dyn_.n), std::vector<cplx>(grid.size()));
        symbol_.dim = grid.dim();
        symbol_.diffusion = dyn_.diffusion;
        symbol_.c = dyn_.c;
        symbol_.zero_order = dyn_.b;
        symbol_.alpha = 0.0;
    }

    const Grid& grid() const { return grid_; }
    const Dynamics& dynamics() const { return dyn_; }

    /// Per-mode propagator exp(dt M(ξ)), flat n x n row major per mode.
    const std::vector<cplx>& propagator(double dt) {
        for (auto& [key, table] : cache_) {
            if (key == dt) {
                return table;
            }
        }
        const int n = dyn_.n;
        std::vector<cplx> table(grid_.size() * static_cast<std::size_t>(n * n));
        const bool tri = dyn_.triangular_2x2();
        parallel_for(grid_.size(), [&](std::size_t m) {
            const Eigen::MatrixXcd sym = symbol_.at(modes_.xi_sq[m], modes_.xi1[m]);
            cplx* out = table.data() + m * static_cast<std::size_t>(n * n);
            if (tri) {
                const Eigen::Matrix2cd e = expm_triangular_2x2(sym(0, 0), sym(0, 1), sym(1, 1), dt);
                out[0] = e(0, 0);
                out[1] = e(0, 1);
                out[2] = e(1, 0);
                out[3] = e(1, 1);
            } else {
                const Eigen::MatrixXcd e = (sym * dt).exp();
                for (int i = 0; i < n; ++i) {
                    for (int j = 0; j < n; ++j) {
                        out[i * n + j] = e(i, j);
                    }
                }
            }
        });
        if (cache_.size() >= 4) {
            cache_.erase(cache_.begin());
        }
        cache_.emplace_back(dt, std::move(table));
        return cache_.back().second;
    }

    /// Exact linear flow over dt, mode by mode.
    void apply_linear(FieldState& f, double dt) {
        if (!(dt > 0.0)) {
            throw std::invalid_argument("apply_linear: dt must be positive");
        }
        const int n = dyn_.n;
        const auto& prop = propagator(dt);
        for (int c = 0; c < n; ++c) {
            plan_.forward(f[c]);
            const auto d = plan_.data();
            std::copy(d.begin(), d.end(), spectra_[c].begin());
        }
        std::vector<cplx> tmp(static_cast<std::size_t>(n));
        for (std::size_t m = 0; m < grid_.size(); ++m) {
            const cplx* e = prop.data() + m * static_cast<std::size_t>(n * n);
            for (int i = 0; i < n; ++i) {
                cplx s = 0.0;
                for (int j = 0; j < n; ++j) {
                    s += e[i * n + j] * spectra_[j][m];
                }
                tmp[i] = s;
            }
            for (int i = 0; i < n; ++i) {
                spectra_[i][m] = tmp[i];
            }
        }
        for (int c = 0; c < n; ++c) {
            auto d = plan_.data();
            std::copy(spectra_[c].begin(), spectra_[c].end(), d.begin());
            plan_.backward(f[c]);
        }
        f.t += dt;
    }

    /// Pointwise classical RK4 for v' = R(v) over dt.
    void apply_nonlinear(FieldState& f, double dt) {
        if (!dyn_.nonlinear()) {
            return;
        }
        const int n = dyn_.n;
        constexpr std::size_t chunk = 4096;
        const std::size_t count = (grid_.size() + chunk - 1) / chunk;
        parallel_for(count, [&](std::size_t blk) {
            std::vector<double> scratch(static_cast<std::size_t>(6 * n));
            double* w = scratch.data();
            double* y = w;
            double* k1 = w + n;
            double* k2 = w + 2 * n;
            double* k3 = w + 3 * n;
            double* k4 = w + 4 * n;
            double* s = w + 5 * n;
            const std::size_t lo = blk * chunk;
            const std::size_t hi = std::min(grid_.size(), lo + chunk);
            for (std::size_t p = lo; p < hi; ++p) {
                for (int c = 0; c < n; ++c) {
                    y[c] = f.components[c][p];
                }
                dyn_.remainder(y, k1);
                for (int c = 0; c < n; ++c) s[c] = y[c] + 0.5 * dt * k1[c];
                dyn_.remainder(s, k2);
                for (int c = 0; c < n; ++c) s[c] = y[c] + 0.5 * dt * k2[c];
                dyn_.remainder(s, k3);
                for (int c = 0; c < n; ++c) s[c] = y[c] + dt * k3[c];
                dyn_.remainder(s, k4);
                for (int c = 0; c < n; ++c) {
                    f.components[c][p] = y[c] + dt / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]);
                }
            }
        });
    }

    /// 0.5 / max ||∂f(u- + v) - ∂f(u-)||_inf over the grid; +inf when the
    /// nonlinearity is off or the state sits at u-.
    double dt_max(const FieldState& f) const {
        if (!dyn_.nonlinear() || !dyn_.jacobian_gap) {
            return std::numeric_limits<double>::infinity();
        }
        const int n = dyn_.n;
        std::vector<double> y(static_cast<std::size_t>(n));
        double gap = 0.0;
        for (std::size_t p = 0; p < grid_.size(); ++p) {
            for (int c = 0; c < n; ++c) {
                y[c] = f.components[c][p];
            }
            gap = std::max(gap, dyn_.jacobian_gap(y.data()));
        }
        return gap > 0.0 ? 0.5 / gap : std::numeric_limits<double>::infinity();
    }

    /// Strang step: half linear, full nonlinear, half linear.
    void step(FieldState& f, double dt) {
        if (!(dt > 0.0)) {
            throw std::invalid_argument("step: dt must be positive");
        }
        const double limit = dt_max(f);
        if (dt > limit) {
            throw StepError(fmt::format("step: dt = {} exceeds the stability limit {} at t = {}", dt, limit, f.t), f.t);
        }
        const double t0 = f.t;
        if (dyn_.nonlinear()) {
            apply_linear(f, 0.5 * dt);
            apply_nonlinear(f, dt);
            apply_linear(f, 0.5 * dt);
        } else {
            apply_linear(f, dt);
        }
        f.t = t0 + dt;
        if (!f.finite()) {
            throw StepError(fmt::format("step: non-finite value at t = {}", f.t), f.t);
        }
    }

private:
    Grid grid_;
    Dynamics dyn_;
    FftPlan plan_;
    Grid::ModeTable modes_;
    SymbolMatrix symbol_;
    std::vector<std::vector<cplx>> spectra_;
    std::vector<std::pair<double, std::vector<cplx>>> cache_;
};

struct Perturbation {
    enum class Shape { gaussian, bump };
    Shape shape = Shape::gaussian;
    double amplitude = 1.0;
    std::array<double, 2> center{0.0, 0.0};
    std::array<double, 2> width{5.0, 5.0};
    std::vector<int> mask{0, 1};  ///< components that receive the profile
    std::optional<double> target_e;  ///< rescale so that ||v0||_E (k = 0) equals this

    void validate(const Grid& grid, int n_components) const {
        if (!(amplitude >= 0.0)) {
            throw std::invalid_argument("perturbation: amplitude must be nonnegative");
        }
        for (int a = 0; a < grid.dim(); ++a) {
            if (!(width[a] > 0.0)) {
                throw std::invalid_argument("perturbation: widths must be positive");
            }
        }
        for (int c : mask) {
            if (c < 0 || c >= n_components) {
                throw std::invalid_argument(fmt::format("perturbation: mask entry {} out of range", c));
            }
        }
        if (target_e && !(*target_e >= 0.0)) {
            throw std::invalid_argument("perturbation: target norm must be nonnegative");
        }
        // a Gaussian counts as supported where it exceeds 1e-12 of its peak
        const double reach = shape == Shape::bump ? 1.0 : std::sqrt(std::log(1e12));
        for (int a = 0; a < grid.dim(); ++a) {
            const double lo = center[a] - reach * width[a];
            const double hi = center[a] + reach * width[a];
            if (lo < -grid.half_length(a) || hi > grid.half_length(a)) {
                throw std::invalid_argument(fmt::format(
                    "perturbation: support [{}, {}] on axis {} exceeds the grid [-{}, {}]", lo, hi, a,
                    grid.half_length(a), grid.half_length(a)));
            }
        }
    }

    double profile(double x0, double x1, int dim) const {
        double r2 = (x0 - center[0]) * (x0 - center[0]) / (width[0] * width[0]);
        if (dim == 2) {
            r2 += (x1 - center[1]) * (x1 - center[1]) / (width[1] * width[1]);
        }
        if (shape == Shape::gaussian) {
            return amplitude * std::exp(-r2);
        }
        return r2 < 1.0 ? amplitude * std::exp(1.0 - 1.0 / (1.0 - r2)) : 0.0;
    }
};

inline FieldState build_perturbation(const Grid& grid, const Perturbation& spec, double alpha, int n_components,
                                     int n1) {
    spec.validate(grid, n_components);
    FieldState f(grid, n_components, n1);
    std::vector<double> shape(grid.size());
    for (int i = 0; i < grid.points(0); ++i) {
        for (int j = 0; j < grid.points(1); ++j) {
            const double x1 = grid.dim() == 2 ? grid.coordinate(1, j) : 0.0;
            shape[static_cast<std::size_t>(i) * grid.points(1) + j] = spec.profile(grid.coordinate(0, i), x1, grid.dim());
        }
    }
    for (int c : spec.mask) {
        std::copy(shape.begin(), shape.end(), f.components[c].begin());
    }
    if (spec.target_e) {
        NormMeter meter(grid, alpha);
        const double e = meter.intersection(f, 0);
        if (e == 0.0 && *spec.target_e > 0.0) {
            throw std::invalid_argument("perturbation: cannot rescale a zero profile to a positive norm");
        }
        const double s = e > 0.0 ? *spec.target_e / e : 0.0;
        for (auto& comp : f.components) {
            for (double& x : comp) {
                x *= s;
            }
        }
    }
    return f;
}

struct RunConfig {
    double t_final = 10.0;
    double dt = 0.05;
    int record_every = 1;
    double alpha = 0.0;  ///< weight used only when measuring
    std::vector<int> sobolev{0, 1};
    int snapshot_every = 0;  ///< in steps; 0 keeps only the final state
    double contamination_threshold = 1e-8;
};

struct RunResult {
    NormSeries series;
    std::vector<FieldState> snapshots;
    FieldState final_state;
    std::vector<std::string> warnings;
    double max_boundary_fraction = 0.0;
    double dt = 0.0;  ///< step actually used (T divided evenly)
    int steps = 0;
};

/// Integrates to T, recording norms every record_every steps and at T.
inline RunResult run(const Grid& grid, const Dynamics& dyn, FieldState v0, const RunConfig& cfg) {
    if (!(cfg.t_final > 0.0) || !(cfg.dt > 0.0) || cfg.record_every < 1) {
        throw std::invalid_argument("run: need T > 0, dt > 0 and record_every >= 1");
    }
    v0.check_shape(grid);
    if (v0.size() != dyn.n) {
        throw std::invalid_argument("run: initial field has the wrong number of components");
    }
    RunResult out;
    out.steps = static_cast<int>(std::ceil(cfg.t_final / cfg.dt - 1e-9));
    out.dt = cfg.t_final / out.steps;

    Simulator sim(grid, dyn);
    NormMeter meter(grid, cfg.alpha);
    bool warned = false;
    auto record = [&](const FieldState& f) {
        for (int k : cfg.sobolev) {
            out.series.rows.push_back(measure(meter, f, k));
        }
        const double frac = meter.boundary_fraction(f);
        out.max_boundary_fraction = std::max(out.max_boundary_fraction, frac);
        if (frac > cfg.contamination_threshold && !warned) {
            warned = true;
            out.warnings.push_back(fmt::format(
                "boundary contamination: weighted mass within 5% of the z ends is {:.3g} of the total at t = {:.6g}",
                frac, f.t));
        }
    };

    FieldState f = std::move(v0);
    f.t = 0.0;
    record(f);
    if (cfg.snapshot_every > 0) {
        out.snapshots.push_back(f);
    }
    for (int s = 1; s <= out.steps; ++s) {
        sim.step(f, out.dt);
        f.t = s * out.dt;
        if (s % cfg.record_every == 0 || s == out.steps) {
            record(f);
        }
        if (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0) {
            out.snapshots.push_back(f);
        }
    }
    out.final_state = std::move(f);
    return out;
}

}  // namespace frontlab
