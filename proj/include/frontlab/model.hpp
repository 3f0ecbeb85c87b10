#pragma once

// Combustion model, the general triangular block system, and the
// perturbation nonlinearities H(v) and N(v)v built on top of them.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>

#include "frontlab/quadrature.hpp"

namespace frontlab {

/// Ignition rate: e^{-1/u} for u > 0 and exactly zero otherwise.
inline double ignition(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

/// d/du of the ignition rate, g(u)/u^2 (zero at and below the cutoff).
inline double ignition_derivative(double u) {
    return u > 0.0 ? std::exp(-1.0 / u) / (u * u) : 0.0;
}

/// Dimensionless constants of the two-species combustion model.
struct ModelParams {
    double epsilon = 0.5;  ///< diffusion ratio of the reactant, 0 <= epsilon < 1
    double kappa = 1.0;    ///< stoichiometry, > 0
    double c = 1.0;        ///< wave speed, > 0
    double alpha = 0.4;    ///< weight exponent, 0 < alpha < c/2

    /// Throws std::invalid_argument when any invariant is violated.
    void validate() const {
        if (!(epsilon >= 0.0 && epsilon < 1.0)) {
            throw std::invalid_argument("epsilon must satisfy 0 <= epsilon < 1");
        }
        if (!(kappa > 0.0)) {
            throw std::invalid_argument("kappa must be positive");
        }
        if (!(c > 0.0)) {
            throw std::invalid_argument("c must be positive");
        }
        if (!(alpha > 0.0 && alpha < 0.5 * c)) {
            throw std::invalid_argument("alpha must lie in the open band (0, c/2)");
        }
    }

    /// Validation without the weight band, for unweighted computations.
    void validate_model() const {
        ModelParams p = *this;
        p.alpha = 0.25 * c;
        p.validate();
    }
};

/// Reaction term f(u) = (u2 g(u1), -kappa u2 g(u1)).
inline Eigen::Vector2d combustion_rhs(const ModelParams& p, const Eigen::Vector2d& u) {
    const double r = u(1) * ignition(u(0));
    return {r, -p.kappa * r};
}

inline Eigen::Matrix2d combustion_jacobian(const ModelParams& p, const Eigen::Vector2d& u) {
    const double dg = ignition_derivative(u(0));
    const double g = ignition(u(0));
    Eigen::Matrix2d j;
    j << u(1) * dg, g, -p.kappa * u(1) * dg, -p.kappa * g;
    return j;
}

/// Linearization at the burned state (1/kappa, 0); the first column vanishes.
inline Eigen::Matrix2d jacobian_at_minus(const ModelParams& p) {
    const double e = std::exp(-p.kappa);
    Eigen::Matrix2d j;
    j << 0.0, e, 0.0, -p.kappa * e;
    return j;
}

/// Perturbation nonlinearity about u- = (1/kappa, 0):
/// H(v) = (1, -kappa) (g(1/kappa + v1) - g(1/kappa)) v2.
inline Eigen::Vector2d perturbation_nonlinearity(const ModelParams& p, const Eigen::Vector2d& v) {
    const double base = 1.0 / p.kappa;
    const double r = (ignition(base + v(0)) - ignition(base)) * v(1);
    return {r, -p.kappa * r};
}

/// A pair of constant steady states of a reaction term.
struct EndStatePair {
    Eigen::VectorXd u_minus;
    Eigen::VectorXd u_plus;
};

inline EndStatePair combustion_end_states(const ModelParams& p) {
    EndStatePair s;
    s.u_minus = Eigen::Vector2d(1.0 / p.kappa, 0.0);
    s.u_plus = Eigen::Vector2d(0.0, 1.0);
    return s;
}

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianField = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Reaction-diffusion system u_t = D Δu + c ∂z u + f(u) split into a
/// driven block u1 (size n1) and a decaying block u2 (size n2) such that
/// f(u1, 0) = (A1 u1, 0).
struct BlockSystem {
    std::string name;
    int n1 = 1;
    int n2 = 1;
    Eigen::VectorXd diffusion1;  ///< diagonal of D1
    Eigen::VectorXd diffusion2;  ///< diagonal of D2
    Eigen::MatrixXd a1;
    VectorField rhs;
    JacobianField jacobian;
    double c = 1.0;
    double alpha = 0.0;

    int size() const { return n1 + n2; }

    Eigen::VectorXd diffusion() const {
        Eigen::VectorXd d(size());
        d << diffusion1, diffusion2;
        return d;
    }

    /// True when some diagonal entry of D2 is zero (gasless-type systems).
    bool degenerate_diffusion() const { return diffusion2.size() > 0 && diffusion2.minCoeff() == 0.0; }

    void validate() const {
        if (n1 < 1 || n2 < 1) {
            throw std::invalid_argument("BlockSystem: block sizes must be positive");
        }
        if (diffusion1.size() != n1 || diffusion2.size() != n2) {
            throw std::invalid_argument("BlockSystem: diffusion diagonals do not match block sizes");
        }
        if (diffusion1.minCoeff() < 0.0 || diffusion2.minCoeff() < 0.0) {
            throw std::invalid_argument("BlockSystem: diffusion entries must be nonnegative");
        }
        if (a1.rows() != n1 || a1.cols() != n1) {
            throw std::invalid_argument("BlockSystem: A1 must be n1 x n1");
        }
        if (!rhs || !jacobian) {
            throw std::invalid_argument("BlockSystem: reaction term and Jacobian are required");
        }
        if (!(c > 0.0)) {
            throw std::invalid_argument("BlockSystem: c must be positive");
        }
        if (alpha < 0.0) {
            throw std::invalid_argument("BlockSystem: alpha must be nonnegative");
        }
    }
};

/// Central differences with step 1e-6 (1 + |u|). Test use only; verification
/// paths always consume the analytic Jacobian of the system.
inline Eigen::MatrixXd finite_difference_jacobian(const VectorField& f, const Eigen::VectorXd& u) {
    const double h = 1e-6 * (1.0 + u.norm());
    const Eigen::Index n = u.size();
    Eigen::MatrixXd j(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::VectorXd up = u;
        Eigen::VectorXd um = u;
        up(k) += h;
        um(k) -= h;
        j.col(k) = (f(up) - f(um)) / (2.0 * h);
    }
    return j;
}

/// The same system written in perturbation coordinates about a steady state:
/// f~(v) = f(u_minus + v). A1 becomes ∂u1 f1(u_minus).
inline BlockSystem recentered(const BlockSystem& sys, const Eigen::VectorXd& u_minus) {
    BlockSystem out = sys;
    out.name = sys.name + "@end-state";
    const VectorField f = sys.rhs;
    const JacobianField j = sys.jacobian;
    out.rhs = [f, u_minus](const Eigen::VectorXd& v) { return f(u_minus + v); };
    out.jacobian = [j, u_minus](const Eigen::VectorXd& v) { return j(u_minus + v); };
    out.a1 = sys.jacobian(u_minus).topLeftCorner(sys.n1, sys.n1);
    return out;
}

/// Combustion model as a block system in perturbation coordinates about
/// u- = (1/kappa, 0). A1 = 0.
inline BlockSystem combustion_block_system(const ModelParams& p) {
    BlockSystem sys;
    sys.name = "combustion";
    sys.n1 = 1;
    sys.n2 = 1;
    sys.diffusion1 = Eigen::VectorXd::Constant(1, 1.0);
    sys.diffusion2 = Eigen::VectorXd::Constant(1, p.epsilon);
    sys.a1 = Eigen::MatrixXd::Zero(1, 1);
    const double base = 1.0 / p.kappa;
    sys.rhs = [p, base](const Eigen::VectorXd& v) -> Eigen::VectorXd {
        return combustion_rhs(p, Eigen::Vector2d(base + v(0), v(1)));
    };
    sys.jacobian = [p, base](const Eigen::VectorXd& v) -> Eigen::MatrixXd {
        return combustion_jacobian(p, Eigen::Vector2d(base + v(0), v(1)));
    };
    sys.c = p.c;
    sys.alpha = p.alpha;
    return sys;
}

/// Cutoff Arrhenius rate a e^{-b/u}, zero for u <= 0.
inline double arrhenius(double a, double b, double u) { return u > 0.0 ? a * std::exp(-b / u) : 0.0; }

inline double arrhenius_derivative(double a, double b, double u) {
    return u > 0.0 ? a * b * std::exp(-b / u) / (u * u) : 0.0;
}

/// Exothermic-endothermic system in (temperature y1; reactants y2, y3):
///   y1' = y1_xx + y2 f2(y1) - sigma y3 f3(y1)
///   y2' = d2 y2_xx - y2 f2(y1)
///   y3' = d3 y3_xx - tau y3 f3(y1)
inline BlockSystem make_exo_endo_system(double d2, double d3, double sigma, double tau,
                                        std::pair<double, double> a, std::pair<double, double> b,
                                        double c = 1.0) {
    if (!(d2 > 0.0 && d3 > 0.0 && sigma > 0.0 && tau > 0.0 && a.first > 0.0 && a.second > 0.0 &&
          b.first > 0.0 && b.second > 0.0)) {
        throw std::invalid_argument("make_exo_endo_system: all parameters must be positive");
    }
    BlockSystem sys;
    sys.name = "exo_endo";
    sys.n1 = 1;
    sys.n2 = 2;
    sys.diffusion1 = Eigen::VectorXd::Constant(1, 1.0);
    sys.diffusion2 = Eigen::Vector2d(d2, d3);
    sys.a1 = Eigen::MatrixXd::Zero(1, 1);
    const auto [a2, a3] = a;
    const auto [b2, b3] = b;
    sys.rhs = [=](const Eigen::VectorXd& y) -> Eigen::VectorXd {
        const double r2 = y(1) * arrhenius(a2, b2, y(0));
        const double r3 = y(2) * arrhenius(a3, b3, y(0));
        return Eigen::Vector3d(r2 - sigma * r3, -r2, -tau * r3);
    };
    sys.jacobian = [=](const Eigen::VectorXd& y) -> Eigen::MatrixXd {
        const double f2 = arrhenius(a2, b2, y(0));
        const double f3 = arrhenius(a3, b3, y(0));
        const double df2 = arrhenius_derivative(a2, b2, y(0));
        const double df3 = arrhenius_derivative(a3, b3, y(0));
        Eigen::Matrix3d j;
        j << y(1) * df2 - sigma * y(2) * df3, f2, -sigma * f3,
             -y(1) * df2, -f2, 0.0,
             -tau * y(2) * df3, 0.0, -tau * f3;
        return j;
    };
    sys.c = c;
    return sys;
}

/// Gasless combustion u' = u_xx + v g(u), v' = -beta v g(u). The fuel block
/// has no diffusion; such systems are accepted and reported as degenerate.
inline BlockSystem make_gasless_system(double beta, double c = 1.0) {
    if (!(beta > 0.0)) {
        throw std::invalid_argument("make_gasless_system: beta must be positive");
    }
    BlockSystem sys;
    sys.name = "gasless";
    sys.n1 = 1;
    sys.n2 = 1;
    sys.diffusion1 = Eigen::VectorXd::Constant(1, 1.0);
    sys.diffusion2 = Eigen::VectorXd::Zero(1);
    sys.a1 = Eigen::MatrixXd::Zero(1, 1);
    sys.rhs = [beta](const Eigen::VectorXd& u) -> Eigen::VectorXd {
        const double r = u(1) * ignition(u(0));
        return Eigen::Vector2d(r, -beta * r);
    };
    sys.jacobian = [beta](const Eigen::VectorXd& u) -> Eigen::MatrixXd {
        const double dg = ignition_derivative(u(0));
        const double g = ignition(u(0));
        Eigen::Matrix2d j;
        j << u(1) * dg, g, -beta * u(1) * dg, -beta * g;
        return j;
    };
    sys.c = c;
    return sys;
}

/// N(v) v = ∫_0^1 (∂f(t v) - ∂f(0)) dt v by composite Gauss-Legendre
/// quadrature. Panels are doubled until two levels agree, which keeps the
/// result accurate when t v runs into a steep region of the Jacobian.
inline Eigen::VectorXd nonlinear_remainder(const BlockSystem& sys, const Eigen::VectorXd& v,
                                           int quad_nodes = 16) {
    if (quad_nodes < 2) {
        throw std::invalid_argument("nonlinear_remainder: at least two quadrature nodes required");
    }
    constexpr int max_panels = 1024;
    constexpr double rel_tol = 1e-13;
    const QuadratureRule rule = gauss_legendre_unit(quad_nodes);
    const Eigen::Index n = v.size();
    const Eigen::MatrixXd j0 = sys.jacobian(Eigen::VectorXd::Zero(n));
    auto composite = [&](int panels) {
        Eigen::MatrixXd avg = Eigen::MatrixXd::Zero(n, n);
        const double width = 1.0 / panels;
        for (int k = 0; k < panels; ++k) {
            for (int i = 0; i < quad_nodes; ++i) {
                const double t = (k + rule.nodes[i]) * width;
                avg += width * rule.weights[i] * (sys.jacobian(t * v) - j0);
            }
        }
        return Eigen::VectorXd(avg * v);
    };
    Eigen::VectorXd prev = composite(1);
    for (int panels = 2; panels <= max_panels; panels *= 2) {
        Eigen::VectorXd next = composite(panels);
        const double change = (next - prev).norm();
        prev = std::move(next);
        if (change <= rel_tol * prev.norm() || change == 0.0) {
            break;
        }
    }
    return prev;
}

/// Maximum of |f(u1, 0) - (A1 u1, 0)| over random u1 with |u1_i| <= radius.
inline double zero_reactant_residual(const BlockSystem& sys, int trials, std::uint64_t seed,
                                     double radius = 10.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(-radius, radius);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Eigen::VectorXd u = Eigen::VectorXd::Zero(sys.size());
        for (int i = 0; i < sys.n1; ++i) {
            u(i) = unif(rng);
        }
        Eigen::VectorXd expected = Eigen::VectorXd::Zero(sys.size());
        expected.head(sys.n1) = sys.a1 * u.head(sys.n1);
        worst = std::max(worst, (sys.rhs(u) - expected).norm());
    }
    return worst;
}

/// Uniform sample from the Euclidean ball: normalized Gaussian direction,
/// radius scaled by U^{1/n}.
template <class Rng>
Eigen::VectorXd sample_ball(Rng& rng, Eigen::Index n, double radius) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd dir(n);
    do {
        for (Eigen::Index i = 0; i < n; ++i) {
            dir(i) = normal(rng);
        }
    } while (dir.norm() == 0.0);
    dir.normalize();
    return radius * std::pow(unif(rng), 1.0 / static_cast<double>(n)) * dir;
}

/// Secant estimate of the Lipschitz constant of v -> N(v)v on the ball of
/// the given radius; deterministic for a fixed seed.
inline double lipschitz_probe(const BlockSystem& sys, double ball_radius, int trials, std::uint64_t seed,
                              int quad_nodes = 16) {
    if (!(ball_radius > 0.0)) {
        throw std::invalid_argument("lipschitz_probe: ball_radius must be positive");
    }
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int t = 0; t < trials; ++t) {
        const Eigen::VectorXd v = sample_ball(rng, sys.size(), ball_radius);
        const Eigen::VectorXd w = sample_ball(rng, sys.size(), ball_radius);
        const double dist = (v - w).norm();
        if (dist == 0.0) {
            continue;
        }
        const Eigen::VectorXd diff = nonlinear_remainder(sys, v, quad_nodes) - nonlinear_remainder(sys, w, quad_nodes);
        best = std::max(best, diff.norm() / dist);
    }
    return best;
}

/// Constant C_K with |H(v)| <= C_K |v|^2 on the closed ball of radius K,
/// estimated on a dense polar grid. The grid maximum is inflated by
/// `margin` to cover the spacing between grid points.
inline double quadratic_bound_constant(const ModelParams& p, double radius, int resolution = 1000,
                                       double margin = 1.01) {
    double best = 0.0;
    for (int i = 1; i <= resolution; ++i) {
        const double r = radius * static_cast<double>(i) / resolution;
        for (int j = 0; j < 4 * resolution; ++j) {
            const double th = 2.0 * std::numbers::pi * j / (4.0 * resolution);
            const Eigen::Vector2d v(r * std::cos(th), r * std::sin(th));
            best = std::max(best, perturbation_nonlinearity(p, v).norm() / (r * r));
        }
    }
    return margin * best;
}

}  // namespace frontlab
