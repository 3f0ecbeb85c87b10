#pragma once

// Typed view of a scenario file. Every value a command consumes, default or
// not, is echoed into the summary so outputs describe themselves.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "frontlab/cli/config.hpp"
#include "frontlab/grid.hpp"
#include "frontlab/model.hpp"
#include "frontlab/norms.hpp"
#include "frontlab/sim.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::cli {

/// Ordered key: value record.
class Summary {
public:
    void add(const std::string& key, const std::string& value) { rows_.emplace_back(key, value); }
    void add(const std::string& key, const char* value) { add(key, std::string(value)); }
    void add(const std::string& key, double value) { add(key, fmt::format("{:.17g}", value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add(const std::string& key, long value) { add(key, std::to_string(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
    void add(const std::string& key, bool value) { add(key, std::string(value ? "true" : "false")); }

    void write(std::ostream& os) const {
        for (const auto& [k, v] : rows_) {
            os << k << ": " << v << '\n';
        }
    }

    std::optional<std::string> find(const std::string& key) const {
        for (const auto& [k, v] : rows_) {
            if (k == key) {
                return v;
            }
        }
        return std::nullopt;
    }

private:
    std::vector<std::pair<std::string, std::string>> rows_;
};

inline const std::map<std::string, std::set<std::string>>& scenario_schema() {
    static const std::map<std::string, std::set<std::string>> schema{
        {"model",
         {"kind", "epsilon", "kappa", "c", "nonlinear", "beta", "d2", "d3", "sigma", "tau", "a2", "a3", "b2", "b3",
          "burned_temperature"}},
        {"weights", {"alpha"}},
        {"grid", {"dim", "L", "N"}},
        {"time", {"T", "dt", "record_every", "snapshot_every"}},
        {"perturbation", {"shape", "eta", "amplitude", "center", "width", "mask"}},
        {"verify", {"delta", "rate_floor", "item4_constant", "item3_cap", "skip_fraction"}},
        {"spectrum",
         {"dim", "extent", "count", "envelope_tmax", "envelope_nt", "envelope_extent", "envelope_nxi",
          "envelope_cap", "probe_radius", "probe_trials"}},
        {"front",
         {"mode", "c_min", "c_max", "scan_count", "c_lo", "c_hi", "tol", "delta", "s_max", "phi0", "z_end",
          "phi1_tolerance", "drift_tolerance"}},
        {"sweep", {"parameter", "values", "command"}},
    };
    return schema;
}

/// The model under study, either the two-species combustion model or a
/// block system written about its burned end state.
struct ModelSpec {
    std::string kind = "combustion";
    ModelParams params;
    bool nonlinear = true;
    std::optional<BlockSystem> block;  ///< set for non-combustion kinds

    bool is_combustion() const { return kind == "combustion"; }

    int components() const { return is_combustion() ? 2 : block->size(); }
    int first_block() const { return is_combustion() ? 1 : block->n1; }
    double speed() const { return is_combustion() ? params.c : block->c; }

    SymbolMatrix symbol(int dim, double alpha) const {
        return is_combustion() ? combustion_symbol(params, dim, alpha) : block_symbol(*block, dim, alpha);
    }

    Dynamics dynamics() const {
        return is_combustion() ? combustion_dynamics(params, nonlinear) : block_dynamics(*block, nonlinear);
    }

    BlockSystem as_block() const { return is_combustion() ? combustion_block_system(params) : *block; }

    /// Sharp rate of the weighted linear flow: minus its spectral abscissa.
    double nu_weighted(double alpha) const {
        if (is_combustion()) {
            ModelParams p = params;
            p.alpha = alpha;
            return -abscissa_weighted(p);
        }
        const auto a = closed_form_abscissa(symbol(1, alpha));
        return a ? -*a : -sweep_spectrum(symbol(1, alpha)).realized_abscissa;
    }

    /// Sharp rate of the decaying block at zero frequency.
    double nu_reactant() const {
        if (is_combustion()) {
            return params.kappa * std::exp(-params.kappa);
        }
        const BlockSystem& b = *block;
        const Eigen::MatrixXd j = b.jacobian(Eigen::VectorXd::Zero(b.size()));
        const Eigen::MatrixXd b22 = j.bottomRightCorner(b.n2, b.n2);
        Eigen::EigenSolver<Eigen::MatrixXd> es(b22, false);
        return -es.eigenvalues().real().maxCoeff();
    }
};

inline ModelSpec parse_model(const Config& cfg, Summary& sum) {
    cfg.require_section("model");
    ModelSpec m;
    m.kind = cfg.get_string("model", "kind", "combustion");
    m.nonlinear = cfg.get_bool("model", "nonlinear", true);
    sum.add("model.kind", m.kind);
    sum.add("model.nonlinear", m.nonlinear);
    const double c = cfg.get_double("model", "c", 1.0);
    try {
        if (m.kind == "combustion") {
            m.params.epsilon = cfg.get_double("model", "epsilon", 0.5);
            m.params.kappa = cfg.get_double("model", "kappa", 1.0);
            m.params.c = c;
            m.params.validate_model();
            sum.add("model.epsilon", m.params.epsilon);
            sum.add("model.kappa", m.params.kappa);
            sum.add("model.c", m.params.c);
        } else if (m.kind == "exo_endo") {
            const double d2 = cfg.get_double("model", "d2", 0.5);
            const double d3 = cfg.get_double("model", "d3", 0.5);
            const double sigma = cfg.get_double("model", "sigma", 0.5);
            const double tau = cfg.get_double("model", "tau", 1.0);
            const double a2 = cfg.get_double("model", "a2", 1.0);
            const double a3 = cfg.get_double("model", "a3", 1.0);
            const double b2 = cfg.get_double("model", "b2", 1.0);
            const double b3 = cfg.get_double("model", "b3", 1.0);
            const double burned = cfg.get_double("model", "burned_temperature", 1.0);
            const BlockSystem raw = make_exo_endo_system(d2, d3, sigma, tau, {a2, a3}, {b2, b3}, c);
            m.block = recentered(raw, Eigen::Vector3d(burned, 0.0, 0.0));
            const std::pair<const char*, double> echoed[] = {
                {"d2", d2}, {"d3", d3}, {"sigma", sigma}, {"tau", tau}, {"a2", a2},
                {"a3", a3}, {"b2", b2}, {"b3", b3}, {"burned_temperature", burned}, {"c", c}};
            for (const auto& [k, v] : echoed) {
                sum.add(std::string("model.") + k, v);
            }
        } else if (m.kind == "gasless") {
            const double beta = cfg.get_double("model", "beta", 1.0);
            const double burned = cfg.get_double("model", "burned_temperature", 1.0);
            m.block = recentered(make_gasless_system(beta, c), Eigen::Vector2d(burned, 0.0));
            sum.add("model.beta", beta);
            sum.add("model.burned_temperature", burned);
            sum.add("model.c", c);
        } else {
            throw ConfigError(fmt::format("{}: unknown model kind '{}' (combustion, exo_endo, gasless)",
                                          cfg.where("model", "kind"), m.kind));
        }
        if (m.block) {
            m.block->validate();
            sum.add("model.degenerate_diffusion", m.block->degenerate_diffusion());
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: [model] {}", cfg.origin(), e.what()));
    }
    return m;
}

/// Weight exponent; "optimal" selects c/2. With strict, the value must lie
/// in the open band (0, c/2).
inline double parse_alpha(const Config& cfg, const ModelSpec& m, Summary& sum, bool strict) {
    cfg.require_section("weights");
    const std::string raw = cfg.get_string("weights", "alpha", "0.4");
    double alpha = 0.0;
    if (raw == "optimal") {
        alpha = optimal_weight(m.speed()).alpha;
    } else {
        alpha = cfg.get_double("weights", "alpha", 0.4);
    }
    if (!(alpha >= 0.0)) {
        throw ConfigError(fmt::format("{}: alpha must be nonnegative", cfg.where("weights", "alpha")));
    }
    if (strict && !(alpha > 0.0 && alpha < 0.5 * m.speed())) {
        throw ConfigError(fmt::format("{}: alpha = {} lies outside the admissible band (0, c/2) = (0, {})",
                                      cfg.where("weights", "alpha"), alpha, 0.5 * m.speed()));
    }
    sum.add("weights.alpha_setting", raw);
    sum.add("weights.alpha", alpha);
    return alpha;
}

inline Grid parse_grid(const Config& cfg, Summary& sum) {
    cfg.require_section("grid");
    const long dim = cfg.get_int("grid", "dim", 1);
    const auto ls = cfg.get_doubles("grid", "L", {50.0});
    const auto ns = cfg.get_ints("grid", "N", {1024});
    if (dim != 1 && dim != 2) {
        throw ConfigError(fmt::format("{}: grid dim must be 1 or 2", cfg.where("grid", "dim")));
    }
    auto pick = [&](const auto& v, int axis, const char* key) {
        if (v.empty()) {
            throw ConfigError(fmt::format("{}: [grid] {} is empty", cfg.where("grid", key), key));
        }
        return axis < static_cast<int>(v.size()) ? v[axis] : v.back();
    };
    try {
        Grid g(static_cast<int>(dim), {pick(ls, 0, "L"), dim == 2 ? pick(ls, 1, "L") : 0.0},
               {static_cast<int>(pick(ns, 0, "N")), dim == 2 ? static_cast<int>(pick(ns, 1, "N")) : 1});
        sum.add("grid.dim", dim);
        sum.add("grid.L", dim == 2 ? fmt::format("{:.17g}, {:.17g}", g.half_length(0), g.half_length(1))
                                   : fmt::format("{:.17g}", g.half_length(0)));
        sum.add("grid.N", dim == 2 ? fmt::format("{}, {}", g.points(0), g.points(1)) : fmt::format("{}", g.points(0)));
        return g;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", cfg.where("grid", "N"), e.what()));
    }
}

inline RunConfig parse_time(const Config& cfg, double alpha, Summary& sum) {
    cfg.require_section("time");
    RunConfig rc;
    rc.t_final = cfg.get_double("time", "T", 40.0);
    rc.dt = cfg.get_double("time", "dt", 0.05);
    rc.record_every = static_cast<int>(cfg.get_int("time", "record_every", 4));
    rc.snapshot_every = static_cast<int>(cfg.get_int("time", "snapshot_every", 0));
    rc.alpha = alpha;
    if (!(rc.t_final > 0.0)) {
        throw ConfigError(fmt::format("{}: T must be positive", cfg.where("time", "T")));
    }
    if (!(rc.dt > 0.0)) {
        throw ConfigError(fmt::format("{}: dt must be positive", cfg.where("time", "dt")));
    }
    if (rc.record_every < 1) {
        throw ConfigError(fmt::format("{}: record_every must be >= 1", cfg.where("time", "record_every")));
    }
    if (rc.snapshot_every < 0) {
        throw ConfigError(fmt::format("{}: snapshot_every must be >= 0", cfg.where("time", "snapshot_every")));
    }
    sum.add("time.T", rc.t_final);
    sum.add("time.dt", rc.dt);
    sum.add("time.record_every", rc.record_every);
    sum.add("time.snapshot_every", rc.snapshot_every);
    return rc;
}

inline Perturbation parse_perturbation(const Config& cfg, const Grid& grid, int components, Summary& sum) {
    cfg.require_section("perturbation");
    Perturbation p;
    const std::string shape = cfg.get_string("perturbation", "shape", "gaussian");
    if (shape == "gaussian") {
        p.shape = Perturbation::Shape::gaussian;
    } else if (shape == "bump") {
        p.shape = Perturbation::Shape::bump;
    } else {
        throw ConfigError(fmt::format("{}: shape must be gaussian or bump, got '{}'",
                                      cfg.where("perturbation", "shape"), shape));
    }
    p.amplitude = cfg.get_double("perturbation", "amplitude", 1.0);
    if (cfg.has("perturbation", "eta")) {
        p.target_e = cfg.get_double("perturbation", "eta", 1e-3);
    } else if (!cfg.has("perturbation", "amplitude")) {
        p.target_e = 1e-3;
    }
    const auto center = cfg.get_doubles("perturbation", "center", {0.0, 0.0});
    const auto width = cfg.get_doubles("perturbation", "width", {5.0, 5.0});
    if (center.empty() || width.empty()) {
        throw ConfigError(fmt::format("{}: center and width need at least one entry", cfg.origin()));
    }
    p.center = {center[0], center.size() > 1 ? center[1] : 0.0};
    p.width = {width[0], width.size() > 1 ? width[1] : width[0]};
    std::vector<long> def_mask;
    for (int c = 1; c <= components; ++c) {
        def_mask.push_back(c);
    }
    // 1-based component numbers in the file
    const auto mask = cfg.get_ints("perturbation", "mask", def_mask);
    for (long m : mask) {
        if (m < 1 || m > components) {
            throw ConfigError(fmt::format("{}: mask entry {} outside 1..{}", cfg.where("perturbation", "mask"), m,
                                          components));
        }
        p.mask.push_back(static_cast<int>(m - 1));
    }
    try {
        p.validate(grid, components);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(fmt::format("{}: {}", cfg.where("perturbation", "center"), e.what()));
    }
    sum.add("perturbation.shape", shape);
    sum.add("perturbation.amplitude", p.amplitude);
    sum.add("perturbation.eta", p.target_e ? fmt::format("{:.17g}", *p.target_e) : std::string("none"));
    sum.add("perturbation.center", fmt::format("{:.17g}, {:.17g}", p.center[0], p.center[1]));
    sum.add("perturbation.width", fmt::format("{:.17g}, {:.17g}", p.width[0], p.width[1]));
    std::string m;
    for (int c : p.mask) {
        m += (m.empty() ? "" : ", ") + std::to_string(c + 1);
    }
    sum.add("perturbation.mask", m);
    return p;
}

inline VerifyConfig parse_verify(const Config& cfg, double eta, bool linear_only, Summary& sum) {
    VerifyConfig v;
    v.eta = eta;
    v.delta = cfg.get_double("verify", "delta", 10.0 * eta);
    v.rate_floor = cfg.get_double("verify", "rate_floor", linear_only ? 0.98 : 0.8);
    v.item4_constant = cfg.get_double("verify", "item4_constant", 10.0);
    v.item3_cap = cfg.get_double("verify", "item3_cap", 10.0);
    v.window.skip_fraction = cfg.get_double("verify", "skip_fraction", 0.1);
    if (!(v.rate_floor > 0.0) || !(v.delta > 0.0) || !(v.window.skip_fraction >= 0.0 && v.window.skip_fraction < 1.0)) {
        throw ConfigError(fmt::format("{}: [verify] needs delta > 0, rate_floor > 0, 0 <= skip_fraction < 1",
                                      cfg.origin()));
    }
    sum.add("verify.delta", v.delta);
    sum.add("verify.rate_floor", v.rate_floor);
    sum.add("verify.item4_constant", v.item4_constant);
    sum.add("verify.item3_cap", v.item3_cap);
    sum.add("verify.skip_fraction", v.window.skip_fraction);
    return v;
}

}  // namespace frontlab::cli
