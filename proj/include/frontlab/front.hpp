#pragma once

// Traveling-front ODE in the wave variable z: first-order system, its
// first integral, adaptive orbit integration and shooting for the speed.

#include <Eigen/Dense>
#include <boost/numeric/odeint.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "frontlab/model.hpp"

namespace frontlab {

/// (phi1, phi2, phi3, phi4). For epsilon = 0 the last entry is unused and stays 0.
using FrontState = std::array<double, 4>;

class FrontError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Full field for epsilon > 0:
///   (phi3, phi4, -(c phi3 + phi2 g), -(c phi4 - kappa phi2 g) / epsilon).
inline FrontState vector_field(const ModelParams& p, const FrontState& s) {
    if (!(p.epsilon > 0.0)) {
        throw std::invalid_argument("vector_field: the four-dimensional form needs epsilon > 0");
    }
    const double r = s[1] * ignition(s[0]);
    return {s[2], s[3], -(p.c * s[2] + r), -(p.c * s[3] - p.kappa * r) / p.epsilon};
}

/// epsilon = 0: c phi2' = kappa phi2 g(phi1) replaces the second-order equation.
inline FrontState reduced_field(const ModelParams& p, const FrontState& s) {
    const double r = s[1] * ignition(s[0]);
    return {s[2], p.kappa / p.c * r, -(p.c * s[2] + r), 0.0};
}

inline FrontState front_field(const ModelParams& p, const FrontState& s) {
    return p.epsilon > 0.0 ? vector_field(p, s) : reduced_field(p, s);
}

/// k = phi3 + c phi1 + (epsilon/kappa) phi4 + (c/kappa) phi2.
inline double conserved_k(const ModelParams& p, const FrontState& s) {
    return s[2] + p.c * s[0] + p.epsilon / p.kappa * s[3] + p.c / p.kappa * s[1];
}

/// Jacobian of the reduced (epsilon = 0) field in (phi1, phi2, phi3).
inline Eigen::Matrix3d reduced_jacobian(const ModelParams& p, const FrontState& s) {
    const double g = ignition(s[0]);
    const double dg = ignition_derivative(s[0]);
    Eigen::Matrix3d j;
    j << 0.0, 0.0, 1.0,
         p.kappa / p.c * s[1] * dg, p.kappa / p.c * g, 0.0,
         -s[1] * dg, -g, -p.c;
    return j;
}

/// Roots of the characteristic polynomial at the unburned end (0, 1, 0):
/// -lambda^2 (lambda + c), g and all its derivatives vanishing at 0.
inline std::array<double, 3> unburned_eigenvalues(const ModelParams& p) { return {0.0, 0.0, -p.c}; }

/// At the burned end (1/kappa, 0, 0): -lambda (lambda - kappa e^{-kappa}/c)(lambda + c).
inline std::array<double, 3> burned_eigenvalues(const ModelParams& p) {
    return {0.0, p.kappa * std::exp(-p.kappa) / p.c, -p.c};
}

struct OrbitOptions {
    double tol = 1e-10;
    double h_init = 1e-3;
    double h_max = 0.25;
    long max_steps = 2'000'000;
    /// Called after every accepted step with (z, state); true ends the integration.
    std::function<bool(double, const FrontState&)> stop;
};

struct Trajectory {
    std::vector<double> z;
    std::vector<FrontState> states;
    double k0 = 0.0;
    double max_drift = 0.0;
    bool stopped = false;  ///< the stop predicate fired before z_end
};

/// Adaptive Dormand-Prince 5(4) with absolute and relative tolerance tol,
/// from z_begin toward z_end in either direction.
inline Trajectory integrate_orbit(const ModelParams& p, const FrontState& s0, double z_begin, double z_end,
                                  const OrbitOptions& opt = {}) {
    namespace ode = boost::numeric::odeint;
    if (!(opt.tol > 0.0)) {
        throw std::invalid_argument("integrate_orbit: tol must be positive");
    }
    const double dir = z_end >= z_begin ? 1.0 : -1.0;
    const double span = std::abs(z_end - z_begin);
    // integrate in s = dir (z - z_begin) >= 0
    auto rhs = [&p, dir](const FrontState& x, FrontState& dxds, double) {
        const FrontState f = front_field(p, x);
        for (int i = 0; i < 4; ++i) {
            dxds[i] = dir * f[i];
        }
    };
    auto stepper = ode::make_controlled(opt.tol, opt.tol, ode::runge_kutta_dopri5<FrontState>());

    Trajectory tr;
    tr.k0 = conserved_k(p, s0);
    FrontState x = s0;
    double s = 0.0;
    double h = std::min({opt.h_init, opt.h_max, span > 0.0 ? span : opt.h_init});
    tr.z.push_back(z_begin);
    tr.states.push_back(x);
    long steps = 0;
    while (s < span) {
        if (++steps > opt.max_steps) {
            throw FrontError(fmt::format("integrate_orbit: step budget exhausted at z = {}", z_begin + dir * s));
        }
        h = std::min({h, opt.h_max, span - s});
        const double floor = 1e-14 * std::max(1.0, std::abs(z_begin + dir * s));
        if (h < floor) {
            throw FrontError(fmt::format("integrate_orbit: step size underflow ({:.3g}) at z = {:.17g}", h,
                                         z_begin + dir * s));
        }
        if (stepper.try_step(rhs, x, s, h) != ode::success) {
            continue;
        }
        // land exactly on the end when the last step was clipped
        if (span - s < 1e-12 * std::max(1.0, span)) {
            s = span;
        }
        const double z = z_begin + dir * s;
        tr.z.push_back(z);
        tr.states.push_back(x);
        tr.max_drift = std::max(tr.max_drift, std::abs(conserved_k(p, x) - tr.k0));
        for (double v : x) {
            if (!std::isfinite(v)) {
                throw FrontError(fmt::format("integrate_orbit: non-finite state at z = {}", z));
            }
        }
        if (opt.stop && opt.stop(z, x)) {
            tr.stopped = true;
            break;
        }
    }
    return tr;
}

struct FrontProfile {
    std::vector<double> z;  ///< increasing
    std::vector<FrontState> states;
    double c = 0.0;
    double k = 0.0;          ///< c / kappa
    double max_drift = 0.0;  ///< max |k(state) - k|
    double phi1_left = 0.0;
    double left_residual = 0.0;   ///< distance of the left sample to (1/kappa, 0, 0, 0)
    double right_residual = 0.0;  ///< distance of the right sample to (0, 1, 0, 0)
    bool phi2_monotone = true;    ///< diagnostic only
};

inline void write_profile_csv(std::ostream& os, const ModelParams& p, const FrontProfile& prof) {
    os << "z,phi1,phi2,phi3,phi4,k_drift\n";
    for (std::size_t i = 0; i < prof.z.size(); ++i) {
        const auto& s = prof.states[i];
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", prof.z[i], s[0], s[1], s[2], s[3],
                          conserved_k(p, s) - prof.k);
    }
}

struct ShootOptions {
    double tol = 1e-12;        ///< integrator tolerance
    double delta = 1e-8;       ///< offset along the unstable eigenvector
    double s_max = 2000.0;     ///< longest leftward integration
    double left_threshold = 1e-10;
    int left_confirm = 50;     ///< consecutive accepted steps below the threshold
    int max_bisections = 200;
    double h_max = 0.25;
};

struct ShootResult {
    double c_star = 0.0;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    int bisections = 0;
    FrontProfile profile;
};

namespace detail {

inline FrontState unburned_start(const ModelParams& p, double delta) {
    const double nrm = std::sqrt(1.0 + p.c * p.c);
    return {delta / nrm, 1.0, -p.c * delta / nrm, 0.0};
}

struct Shot {
    double functional;  ///< phi1 - 1/kappa where the orbit is judged
    bool reached_left;
    Trajectory tr;
    std::size_t left_index = 0;  ///< first sample of the confirmed left run
};

/// Leftward integration from the unburned end. With judge_only the orbit is
/// followed until it leaves a band around 1/kappa, which fixes the sign
/// robustly; otherwise it stops once the left end is confirmed.
inline Shot shoot_once(const ModelParams& p, const ShootOptions& o, bool judge_only) {
    const double target = 1.0 / p.kappa;
    const double band = 0.1 / p.kappa;
    int below = 0;
    std::size_t count = 0;
    std::size_t first_below = 0;
    bool left = false;
    OrbitOptions opt;
    opt.tol = o.tol;
    opt.h_max = o.h_max;
    opt.stop = [&](double, const FrontState& x) {
        ++count;
        if (x[0] < 0.0 || x[0] > target + band) {
            return true;
        }
        if (x[1] < o.left_threshold) {
            if (below++ == 0) {
                first_below = count;
            }
            left = left || below >= o.left_confirm;
        } else {
            below = 0;
        }
        if (judge_only) {
            return x[1] < o.left_threshold && std::abs(x[0] - target) > band;
        }
        return left;
    };
    Shot shot{0.0, false, integrate_orbit(p, unburned_start(p, o.delta), 0.0, -o.s_max, opt), 0};
    shot.reached_left = left;
    shot.left_index = first_below;
    const auto& end = judge_only || !left ? shot.tr.states.back() : shot.tr.states[first_below];
    shot.functional = end[0] - target;
    return shot;
}

}  // namespace detail

/// Coarse scan for a sign change of the shooting functional on [c_min, c_max].
inline std::optional<std::pair<double, double>> scan_bracket(ModelParams p, double c_min, double c_max, int count,
                                                             const ShootOptions& o = {}) {
    if (count < 2 || !(c_min > 0.0) || !(c_max > c_min)) {
        throw std::invalid_argument("scan_bracket: need 0 < c_min < c_max and count >= 2");
    }
    double prev_c = c_min;
    p.c = c_min;
    double prev_f = detail::shoot_once(p, o, true).functional;
    for (int i = 1; i < count; ++i) {
        const double c = c_min + (c_max - c_min) * i / (count - 1);
        p.c = c;
        const double f = detail::shoot_once(p, o, true).functional;
        if ((f > 0.0) != (prev_f > 0.0)) {
            return std::make_pair(prev_c, c);
        }
        prev_c = c;
        prev_f = f;
    }
    return std::nullopt;
}

/// Bisection on c for the connecting orbit of the epsilon = 0 system.
inline ShootResult shoot_speed(ModelParams p, double c_lo, double c_hi, const ShootOptions& o = {}) {
    if (p.epsilon != 0.0) {
        throw std::invalid_argument("shoot_speed: shooting is defined for epsilon = 0 only");
    }
    if (!(p.kappa > 0.0) || !(c_lo > 0.0) || !(c_hi > c_lo)) {
        throw std::invalid_argument("shoot_speed: need kappa > 0 and 0 < c_lo < c_hi");
    }
    ShootResult res;
    p.c = c_lo;
    double f_lo = detail::shoot_once(p, o, true).functional;
    p.c = c_hi;
    double f_hi = detail::shoot_once(p, o, true).functional;
    res.f_lo = f_lo;
    res.f_hi = f_hi;
    if ((f_lo > 0.0) == (f_hi > 0.0)) {
        throw FrontError(fmt::format("shoot_speed: no sign change on [{}, {}]: F = {:.6g}, {:.6g}", c_lo, c_hi,
                                     f_lo, f_hi));
    }
    double lo = c_lo;
    double hi = c_hi;
    for (int i = 0; i < o.max_bisections; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        p.c = mid;
        const double fm = detail::shoot_once(p, o, true).functional;
        ++res.bisections;
        if ((fm > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    res.bracket_lo = lo;
    res.bracket_hi = hi;

    // both ends of the final bracket; keep the one landing closer to 1/kappa
    std::optional<detail::Shot> best;
    for (double c : {lo, hi}) {
        p.c = c;
        detail::Shot s = detail::shoot_once(p, o, false);
        if (!s.reached_left) {
            continue;
        }
        if (!best || std::abs(s.functional) < std::abs(best->functional)) {
            best = std::move(s);
            res.c_star = c;
        }
    }
    if (!best) {
        throw FrontError(fmt::format("shoot_speed: orbit escaped before reaching the burned end (c in [{}, {}])",
                                     lo, hi));
    }
    p.c = res.c_star;

    FrontProfile& prof = res.profile;
    prof.c = res.c_star;
    prof.k = p.c / p.kappa;
    const std::size_t last = best->left_index;
    for (std::size_t i = last + 1; i-- > 0;) {
        prof.z.push_back(best->tr.z[i]);
        prof.states.push_back(best->tr.states[i]);
    }
    for (const auto& s : prof.states) {
        prof.max_drift = std::max(prof.max_drift, std::abs(conserved_k(p, s) - prof.k));
    }
    const FrontState& l = prof.states.front();
    const FrontState& r = prof.states.back();
    prof.phi1_left = l[0];
    prof.left_residual = std::hypot(l[0] - 1.0 / p.kappa, l[1], l[2]);
    prof.right_residual = std::hypot(r[0], r[1] - 1.0, r[2]);
    for (std::size_t i = 1; i < prof.states.size(); ++i) {
        // phi2 should rise from the burned end toward the unburned end
        if (prof.states[i][1] < prof.states[i - 1][1]) {
            prof.phi2_monotone = false;
            break;
        }
    }
    return res;
}

}  // namespace frontlab
