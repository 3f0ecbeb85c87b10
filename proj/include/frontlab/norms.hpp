#pragma once

// Discrete H^k norms (k = 0, 1), weighted and intersection norms, decay
// fits and the verdict report for the end-state decay checks.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "frontlab/fft.hpp"
#include "frontlab/field.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/model.hpp"

namespace frontlab {

/// Raised when the weight e^{alpha z} would overflow on the field's support.
class ContaminationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kWeightExponentLimit = 700.0;

/// Norm evaluator bound to a grid and weight exponent. Owns an FFT plan, so
/// one meter must not be shared between threads.
class NormMeter {
public:
    NormMeter(const Grid& grid, double alpha) : grid_(grid), alpha_(alpha), plan_(grid), modes_(grid.modes()) {
        if (alpha < 0.0) {
            throw std::invalid_argument("norm: alpha must be nonnegative");
        }
        weight_.resize(grid.size());
        exponent_.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) {
            exponent_[i] = alpha * grid.z_of(i);
            weight_[i] = std::exp(std::min(exponent_[i], kWeightExponentLimit));
        }
        scratch_.resize(grid.size());
    }

    const Grid& grid() const { return grid_; }
    double alpha() const { return alpha_; }

    /// Squared discrete H^k norm of one component.
    double squared(std::span<const double> v, int k) {
        check_k(k);
        if (k == 0) {
            double s = 0.0;
            for (double x : v) {
                s += x * x;
            }
            return s * grid_.cell_volume();
        }
        plan_.forward(v);
        const auto spec = plan_.data();
        double s = 0.0;
        for (std::size_t i = 0; i < spec.size(); ++i) {
            s += (1.0 + modes_.xi_sq[i]) * std::norm(spec[i]);
        }
        // Parseval: sum |v|^2 = (1/N) sum |v^|^2
        return s * grid_.cell_volume() / static_cast<double>(grid_.size());
    }

    /// Squared norm of e^{alpha z} v.
    double squared_weighted(std::span<const double> v, int k) {
        guard(v);
        for (std::size_t i = 0; i < v.size(); ++i) {
            scratch_[i] = weight_[i] * v[i];
        }
        return squared(scratch_, k);
    }

    double unweighted(const FieldState& f, int k, int first, int last) {
        double s = 0.0;
        for (int c = first; c < last; ++c) {
            s += squared(f[c], k);
        }
        return std::sqrt(s);
    }

    double unweighted(const FieldState& f, int k) { return unweighted(f, k, 0, f.size()); }

    double weighted(const FieldState& f, int k) {
        double s = 0.0;
        for (int c = 0; c < f.size(); ++c) {
            s += squared_weighted(f[c], k);
        }
        return std::sqrt(s);
    }

    double intersection(const FieldState& f, int k) { return std::max(unweighted(f, k), weighted(f, k)); }

    /// Fraction of the weighted L2 mass lying within 5% of either z end.
    double boundary_fraction(const FieldState& f) {
        double edge = 0.0;
        double total = 0.0;
        const double cut = 0.95 * grid_.half_length(0);
        for (int c = 0; c < f.size(); ++c) {
            guard(f[c]);
            const auto v = f[c];
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double m = weight_[i] * weight_[i] * v[i] * v[i];
                total += m;
                if (std::abs(grid_.z_of(i)) >= cut) {
                    edge += m;
                }
            }
        }
        return total > 0.0 ? edge / total : 0.0;
    }

private:
    static void check_k(int k) {
        if (k != 0 && k != 1) {
            throw std::invalid_argument(fmt::format("norm: Sobolev index must be 0 or 1, got {}", k));
        }
    }

    void guard(std::span<const double> v) const {
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (v[i] != 0.0 && exponent_[i] > kWeightExponentLimit) {
                throw ContaminationError(fmt::format(
                    "weighted norm: alpha z = {} exceeds {} on the support", exponent_[i], kWeightExponentLimit));
            }
        }
    }

    Grid grid_;
    double alpha_;
    FftPlan plan_;
    Grid::ModeTable modes_;
    std::vector<double> weight_;
    std::vector<double> exponent_;
    std::vector<double> scratch_;
};

inline double norm_unweighted(const Grid& grid, const FieldState& f, int k) {
    NormMeter m(grid, 0.0);
    return m.unweighted(f, k);
}

inline double norm_weighted(const Grid& grid, const FieldState& f, double alpha, int k) {
    NormMeter m(grid, alpha);
    return m.weighted(f, k);
}

inline double norm_E(const Grid& grid, const FieldState& f, double alpha, int k) {
    NormMeter m(grid, alpha);
    return m.intersection(f, k);
}

/// One row of the norm table.
struct NormSample {
    double t = 0.0;
    int k = 0;
    double v1 = 0.0;  ///< ||v1-block||_0
    double v2 = 0.0;  ///< ||v2-block||_0
    double v = 0.0;   ///< ||v||_0
    double weighted = 0.0;
    double e = 0.0;   ///< max(||v||_0, ||v||_alpha)
};

inline NormSample measure(NormMeter& meter, const FieldState& f, int k) {
    NormSample s;
    s.t = f.t;
    s.k = k;
    s.v1 = meter.unweighted(f, k, 0, f.n1);
    s.v2 = meter.unweighted(f, k, f.n1, f.size());
    s.v = std::sqrt(s.v1 * s.v1 + s.v2 * s.v2);
    s.weighted = meter.weighted(f, k);
    s.e = std::max(s.v, s.weighted);
    return s;
}

struct NormSeries {
    std::vector<NormSample> rows;

    std::vector<NormSample> at_index(int k) const {
        std::vector<NormSample> out;
        for (const auto& r : rows) {
            if (r.k == k) {
                out.push_back(r);
            }
        }
        return out;
    }

    template <class Proj>
    void column(int k, Proj proj, std::vector<double>& t, std::vector<double>& y) const {
        t.clear();
        y.clear();
        for (const auto& r : rows) {
            if (r.k == k) {
                t.push_back(r.t);
                y.push_back(proj(r));
            }
        }
    }
};

inline void write_norm_csv(std::ostream& os, const NormSeries& s) {
    os << "t,norm0_v1,norm0_v2,norm0_v,normalpha_v,normE_v,k\n";
    for (const auto& r : s.rows) {
        os << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", r.t, r.v1, r.v2, r.v, r.weighted,
                          r.e, r.k);
    }
}

struct FitWindow {
    double skip_fraction = 0.1;  ///< leading share of samples dropped as transient
    std::optional<double> t_start;
    std::optional<double> t_end;
};

struct DecayFit {
    double nu = 0.0;
    double amplitude = 0.0;
    double r_squared = 1.0;
    double t_start = 0.0;
    double t_end = 0.0;
    int samples = 0;
    std::string diagnostic;

    bool decayed_to_zero() const { return std::isinf(nu); }
};

/// Least-squares line through (t, log y) on the window.
inline DecayFit fit_decay(std::span<const double> t, std::span<const double> y, const FitWindow& window = {}) {
    if (t.size() != y.size()) {
        throw std::invalid_argument("fit_decay: time and value series differ in length");
    }
    std::vector<std::size_t> idx;
    const auto skip = static_cast<std::size_t>(std::floor(window.skip_fraction * static_cast<double>(t.size())));
    for (std::size_t i = skip; i < t.size(); ++i) {
        if (window.t_start && t[i] < *window.t_start) {
            continue;
        }
        if (window.t_end && t[i] > *window.t_end) {
            continue;
        }
        idx.push_back(i);
    }
    if (idx.size() < 10) {
        throw std::invalid_argument(fmt::format("fit_decay: window holds {} samples, need at least 10", idx.size()));
    }
    DecayFit fit;
    fit.samples = static_cast<int>(idx.size());
    fit.t_start = t[idx.front()];
    fit.t_end = t[idx.back()];
    for (std::size_t i : idx) {
        if (!(y[i] > 0.0)) {
            fit.nu = std::numeric_limits<double>::infinity();
            fit.amplitude = 0.0;
            fit.r_squared = 0.0;
            fit.diagnostic = fmt::format("nonpositive value {} at t = {}", y[i], t[i]);
            return fit;
        }
    }
    const double n = static_cast<double>(idx.size());
    double mt = 0.0;
    double ml = 0.0;
    for (std::size_t i : idx) {
        mt += t[i];
        ml += std::log(y[i]);
    }
    mt /= n;
    ml /= n;
    double stt = 0.0;
    double stl = 0.0;
    double sll = 0.0;
    for (std::size_t i : idx) {
        const double dt = t[i] - mt;
        const double dl = std::log(y[i]) - ml;
        stt += dt * dt;
        stl += dt * dl;
        sll += dl * dl;
    }
    if (stt == 0.0) {
        throw std::invalid_argument("fit_decay: window spans a single time");
    }
    const double slope = stl / stt;
    const double intercept = ml - slope * mt;
    fit.nu = -slope;
    fit.amplitude = std::exp(intercept);
    double sse = 0.0;
    for (std::size_t i : idx) {
        const double r = std::log(y[i]) - (intercept + slope * t[i]);
        sse += r * r;
    }
    // a flat series is fitted exactly
    fit.r_squared = sll > 0.0 ? 1.0 - sse / sll : 1.0;
    return fit;
}

struct VerifyConfig {
    double eta = 1e-3;
    double delta = 1e-2;         ///< bound for sup ||v||_E
    double rate_floor = 0.8;
    double item4_constant = 10.0;  ///< C in sup ||v1||_0 <= C ||v0||_E
    double item3_cap = 10.0;       ///< largest acceptable measured C in item (3)
    FitWindow window;
};

struct ItemVerdict {
    int item = 0;
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct VerdictReport {
    std::vector<ItemVerdict> items;
    double nu_weighted = 0.0;   ///< c alpha - alpha^2
    double nu_reactant = 0.0;   ///< kappa e^{-kappa}
    DecayFit weighted_fit;
    DecayFit reactant_fit;

    bool passed() const {
        return std::all_of(items.begin(), items.end(), [](const ItemVerdict& v) { return v.passed; });
    }

    const ItemVerdict& item(int n) const {
        for (const auto& v : items) {
            if (v.item == n) {
                return v;
            }
        }
        throw std::out_of_range(fmt::format("no verdict for item {}", n));
    }
};

namespace detail {
inline DecayFit fit_or_flag(const std::vector<double>& t, const std::vector<double>& y, const FitWindow& w) {
    bool all_zero = std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
    if (all_zero) {
        DecayFit f;
        f.nu = std::numeric_limits<double>::infinity();
        f.samples = static_cast<int>(y.size());
        f.diagnostic = "identically zero";
        return f;
    }
    return fit_decay(t, y, w);
}
}  // namespace detail

/// Checks verdict items (1)-(5) against a k = 0 norm table
/// produced from initial data with ||v0||_E = eta, given the sharp weighted
/// rate and the sharp rate of the decaying block.
inline VerdictReport verify_decay(const NormSeries& series, double nu_weighted, double nu_reactant,
                                  const VerifyConfig& cfg) {
    const auto rows = series.at_index(0);
    if (rows.empty()) {
        throw std::invalid_argument("verify: norm series has no k = 0 rows");
    }
    VerdictReport rep;
    rep.nu_weighted = nu_weighted;
    rep.nu_reactant = nu_reactant;

    std::vector<double> t;
    std::vector<double> weighted;
    std::vector<double> reactant;
    double sup_e = 0.0;
    double sup_v1 = 0.0;
    bool finite = true;
    for (const auto& r : rows) {
        t.push_back(r.t);
        weighted.push_back(r.weighted);
        reactant.push_back(r.v2);
        sup_e = std::max(sup_e, r.e);
        sup_v1 = std::max(sup_v1, r.v1);
        finite = finite && std::isfinite(r.e) && std::isfinite(r.v1) && std::isfinite(r.v2);
    }
    const double e0 = rows.front().e;
    const double w0 = rows.front().weighted;

    rep.items.push_back({1, "global existence", finite, rows.back().t, 0.0,
                         finite ? "all recorded norms finite" : "non-finite norm recorded"});

    rep.items.push_back({2, "sup ||v||_E <= delta", sup_e <= cfg.delta, sup_e, cfg.delta,
                         fmt::format("||v0||_E = {:.6g}", e0)});

    rep.weighted_fit = detail::fit_or_flag(t, weighted, cfg.window);
    {
        const double floor = cfg.rate_floor * rep.nu_weighted;
        double c_meas = 0.0;
        if (w0 > 0.0 && !rep.weighted_fit.decayed_to_zero()) {
            for (std::size_t i = 0; i < t.size(); ++i) {
                c_meas = std::max(c_meas, weighted[i] * std::exp(rep.weighted_fit.nu * t[i]) / w0);
            }
        }
        const bool ok = rep.weighted_fit.nu >= floor && c_meas <= cfg.item3_cap;
        rep.items.push_back({3, "weighted decay", ok, rep.weighted_fit.nu, floor,
                             fmt::format("nu_fit = {:.6g}, floor = {:.6g}, C = {:.6g} (cap {:.6g}), R^2 = {:.6g}",
                                         rep.weighted_fit.nu, floor, c_meas, cfg.item3_cap,
                                         rep.weighted_fit.r_squared)});
    }

    {
        const double bound = cfg.item4_constant * e0;
        const double ratio = e0 > 0.0 ? sup_v1 / e0 : 0.0;
        rep.items.push_back({4, "sup ||v1||_0 <= C ||v0||_E", sup_v1 <= bound, sup_v1, bound,
                             fmt::format("measured C = {:.6g}", ratio)});
    }

    rep.reactant_fit = detail::fit_or_flag(t, reactant, cfg.window);
    {
        const double floor = cfg.rate_floor * rep.nu_reactant;
        rep.items.push_back({5, "reactant decay", rep.reactant_fit.nu >= floor, rep.reactant_fit.nu, floor,
                             fmt::format("nu_fit = {:.6g}, floor = {:.6g}, R^2 = {:.6g}", rep.reactant_fit.nu,
                                         floor, rep.reactant_fit.r_squared)});
    }
    return rep;
}

/// Combustion model: rates c alpha - alpha^2 and kappa e^{-kappa}.
inline VerdictReport verify_decay(const NormSeries& series, const ModelParams& p, const VerifyConfig& cfg) {
    return verify_decay(series, p.c * p.alpha - p.alpha * p.alpha, p.kappa * std::exp(-p.kappa), cfg);
}

/// key: value lines.
inline void write_verdict(std::ostream& os, const VerdictReport& rep) {
    os << fmt::format("nu_weighted_sharp: {:.17g}\n", rep.nu_weighted);
    os << fmt::format("nu_reactant_sharp: {:.17g}\n", rep.nu_reactant);
    for (const auto& v : rep.items) {
        os << fmt::format("item{}_{}: {}\n", v.item, "status", v.passed ? "pass" : "fail");
        os << fmt::format("item{}_measured: {:.17g}\n", v.item, v.measured);
        os << fmt::format("item{}_threshold: {:.17g}\n", v.item, v.threshold);
        os << fmt::format("item{}_detail: {} ({})\n", v.item, v.detail, v.name);
    }
    os << "verdict: " << (rep.passed() ? "pass" : "fail") << '\n';
}

}  // namespace frontlab
