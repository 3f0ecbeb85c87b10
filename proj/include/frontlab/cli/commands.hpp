#pragma once

// spectrum / front / simulate / verify / sweep workflows. Each returns the
// process exit code: 0 pass, 1 scientific failure, 2 usage or config error
// (raised as ConfigError and mapped by the caller).

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "frontlab/cli/config.hpp"
#include "frontlab/cli/scenario.hpp"
#include "frontlab/front.hpp"
#include "frontlab/model.hpp"
#include "frontlab/norms.hpp"
#include "frontlab/parallel.hpp"
#include "frontlab/sim.hpp"
#include "frontlab/spectral.hpp"

namespace frontlab::cli {

struct CommandContext {
    std::filesystem::path out_dir = "out";
    std::uint64_t seed = 42;
    std::ostream* log = &std::cerr;
};

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) {
        throw std::runtime_error(fmt::format("cannot write '{}'", path.string()));
    }
    return os;
}

inline void write_summary(const CommandContext& ctx, const Summary& sum) {
    auto os = open_output(ctx.out_dir / "summary.txt");
    sum.write(os);
}

inline void prepare(const CommandContext& ctx, const Config& cfg, const std::string& command, Summary& sum) {
    cfg.check_schema(scenario_schema());
    std::filesystem::create_directories(ctx.out_dir);
    sum.add("command", command);
    sum.add("config", cfg.origin());
    sum.add("seed", static_cast<long>(ctx.seed));
    sum.add("threads", static_cast<long>(worker_count()));
}

}  // namespace detail

// ---------------------------------------------------------------- spectrum

struct SpectrumOutcome {
    SpectrumSweep unweighted;
    SpectrumSweep weighted;
};

inline SpectrumOutcome evaluate_spectrum(const Config& cfg, const CommandContext& ctx, Summary& sum) {
    const ModelSpec m = parse_model(cfg, sum);
    const double alpha = parse_alpha(cfg, m, sum, false);
    const int dim = static_cast<int>(cfg.get_int("spectrum", "dim", 1));
    if (dim < 1) {
        throw ConfigError(fmt::format("{}: spectrum dim must be >= 1", cfg.where("spectrum", "dim")));
    }
    SweepConfig sc;
    sc.extent = cfg.get_double("spectrum", "extent", 0.0);
    sc.count = static_cast<int>(cfg.get_int("spectrum", "count", dim == 1 ? 401 : 101));
    if (sc.count < 2) {
        throw ConfigError(fmt::format("{}: count must be >= 2", cfg.where("spectrum", "count")));
    }
    sum.add("spectrum.dim", dim);
    sum.add("spectrum.extent_setting", sc.extent > 0.0 ? fmt::format("{:.17g}", sc.extent) : std::string("auto"));
    sum.add("spectrum.count", sc.count);

    SpectrumOutcome out;
    out.unweighted = sweep_spectrum(m.symbol(dim, 0.0), sc);
    out.weighted = sweep_spectrum(m.symbol(dim, alpha), sc);
    for (auto [tag, sw] : {std::pair{"unweighted", &out.unweighted}, std::pair{"weighted", &out.weighted}}) {
        sum.add(fmt::format("{}.extent", tag), sw->extent);
        sum.add(fmt::format("{}.extent_certified", tag), sw->extent_certified);
        sum.add(fmt::format("{}.grid_resolution", tag), sw->resolution);
        sum.add(fmt::format("{}.realized_abscissa", tag), sw->realized_abscissa);
        sum.add(fmt::format("{}.closed_form_abscissa", tag),
                sw->closed_form ? fmt::format("{:.17g}", *sw->closed_form) : std::string("unavailable"));
    }

    if (m.is_combustion()) {
        ModelParams p = m.params;
        p.alpha = alpha;
        sum.add("abscissa_unweighted", abscissa_unweighted(p));
        sum.add("abscissa_weighted", abscissa_weighted(p));
        const OptimalWeight ow = optimal_weight(p.c);
        sum.add("optimal_alpha", ow.alpha);
        sum.add("optimal_abscissa", ow.abscissa);
        const BlockAbscissas ba = block_abscissas(p);
        sum.add("block_abscissa_driven", ba.driven);
        sum.add("block_abscissa_decaying", ba.decaying);
        const double nu = -abscissa_weighted(p);
        sum.add("nu", nu);

        const double tmax = cfg.get_double("spectrum", "envelope_tmax", 40.0);
        const long nt = cfg.get_int("spectrum", "envelope_nt", 201);
        const double ext = cfg.get_double("spectrum", "envelope_extent", 10.0);
        const long nxi = cfg.get_int("spectrum", "envelope_nxi", 201);
        const double cap = cfg.get_double("spectrum", "envelope_cap", 1e6);
        if (nt < 2 || nxi < 2 || !(tmax > 0.0) || !(ext > 0.0)) {
            throw ConfigError(fmt::format("{}: envelope grid needs tmax > 0, extent > 0 and >= 2 samples",
                                          cfg.origin()));
        }
        sum.add("envelope.tmax", tmax);
        sum.add("envelope.nt", nt);
        sum.add("envelope.extent", ext);
        sum.add("envelope.nxi", nxi);
        sum.add("envelope.cap", cap);
        std::vector<double> tg;
        std::vector<double> xg;
        for (long i = 0; i < nt; ++i) {
            tg.push_back(tmax * static_cast<double>(i) / static_cast<double>(nt - 1));
        }
        for (long i = 0; i < nxi; ++i) {
            xg.push_back(-ext + 2.0 * ext * static_cast<double>(i) / static_cast<double>(nxi - 1));
        }
        try {
            const EnvelopeEstimate env = semigroup_envelope(p, tg, xg, cap);
            sum.add("envelope.status", "ok");
            sum.add("K_est", env.constant);
        } catch (const EnvelopeError& e) {
            sum.add("envelope.status", fmt::format("failed: {}", e.what()));
            sum.add("K_est", e.partial);
        } catch (const std::invalid_argument& e) {
            sum.add("envelope.status", fmt::format("skipped: {}", e.what()));
        }

        if (dim >= 2) {
            const double r = out.weighted.extent;
            const TensorSumReport ts = tensor_sum_check(p, r, sc.count, dim);
            sum.add("tensor_sum.abscissa_full", ts.abscissa_full);
            sum.add("tensor_sum.abscissa_longitudinal", ts.abscissa_longitudinal);
            sum.add("tensor_sum.difference", ts.difference);
            sum.add("tensor_sum.transverse_shift_error", ts.transverse_shift_error);
            sum.add("tensor_sum.passed", ts.passed);
        }
    } else {
        sum.add("zero_reactant_residual", zero_reactant_residual(m.as_block(), 1000, ctx.seed));
    }

    const double radius = cfg.get_double("spectrum", "probe_radius", 1.0);
    const long trials = cfg.get_int("spectrum", "probe_trials", 10000);
    if (!(radius > 0.0) || trials < 1) {
        throw ConfigError(fmt::format("{}: probe_radius must be positive and probe_trials >= 1", cfg.origin()));
    }
    sum.add("probe.radius", radius);
    sum.add("probe.trials", trials);
    sum.add("lipschitz_estimate", lipschitz_probe(m.as_block(), radius, static_cast<int>(trials), ctx.seed));
    return out;
}

inline int cmd_spectrum(const Config& cfg, const CommandContext& ctx) {
    Summary sum;
    detail::prepare(ctx, cfg, "spectrum", sum);
    const SpectrumOutcome out = evaluate_spectrum(cfg, ctx, sum);
    {
        auto os = detail::open_output(ctx.out_dir / "spectrum_unweighted.csv");
        write_spectrum_csv(os, out.unweighted);
    }
    {
        auto os = detail::open_output(ctx.out_dir / "spectrum_weighted.csv");
        write_spectrum_csv(os, out.weighted);
    }
    detail::write_summary(ctx, sum);
    return 0;
}

// ---------------------------------------------------------------- front

inline int cmd_front(const Config& cfg, const CommandContext& ctx) {
    Summary sum;
    detail::prepare(ctx, cfg, "front", sum);
    const ModelSpec m = parse_model(cfg, sum);
    if (!m.is_combustion()) {
        throw ConfigError(fmt::format("{}: the front command supports the combustion model only",
                                      cfg.where("model", "kind")));
    }
    ModelParams p = m.params;
    const std::string mode = cfg.get_string("front", "mode", p.epsilon == 0.0 ? "shoot" : "orbit");
    sum.add("front.mode", mode);

    if (mode == "shoot") {
        if (p.epsilon != 0.0) {
            throw ConfigError(fmt::format("{}: shooting needs epsilon = 0 (got {})", cfg.where("model", "epsilon"),
                                          p.epsilon));
        }
        ShootOptions o;
        o.tol = cfg.get_double("front", "tol", o.tol);
        o.delta = cfg.get_double("front", "delta", o.delta);
        o.s_max = cfg.get_double("front", "s_max", o.s_max);
        const double phi_tol = cfg.get_double("front", "phi1_tolerance", 1e-6);
        const double drift_tol = cfg.get_double("front", "drift_tolerance", 1e-8);
        if (!(o.tol > 0.0) || !(o.delta > 0.0) || !(o.s_max > 0.0)) {
            throw ConfigError(fmt::format("{}: [front] tol, delta and s_max must be positive", cfg.origin()));
        }
        sum.add("front.tol", o.tol);
        sum.add("front.delta", o.delta);
        sum.add("front.s_max", o.s_max);
        sum.add("front.phi1_tolerance", phi_tol);
        sum.add("front.drift_tolerance", drift_tol);

        std::optional<std::pair<double, double>> bracket;
        if (cfg.has("front", "c_lo") || cfg.has("front", "c_hi")) {
            bracket = std::make_pair(cfg.get_double("front", "c_lo", 0.1), cfg.get_double("front", "c_hi", 2.0));
            sum.add("front.bracket_source", "config");
        } else {
            const double c_min = cfg.get_double("front", "c_min", 0.1);
            const double c_max = cfg.get_double("front", "c_max", 3.0);
            const long count = cfg.get_int("front", "scan_count", 30);
            sum.add("front.c_min", c_min);
            sum.add("front.c_max", c_max);
            sum.add("front.scan_count", count);
            sum.add("front.bracket_source", "scan");
            try {
                bracket = scan_bracket(p, c_min, c_max, static_cast<int>(count), o);
            } catch (const std::invalid_argument& e) {
                throw ConfigError(fmt::format("{}: {}", cfg.origin(), e.what()));
            }
            if (!bracket) {
                sum.add("status", "fail: no sign change of the shooting functional on the scan");
                detail::write_summary(ctx, sum);
                return 1;
            }
        }
        ShootResult res;
        try {
            res = shoot_speed(p, bracket->first, bracket->second, o);
        } catch (const FrontError& e) {
            sum.add("status", fmt::format("fail: {}", e.what()));
            detail::write_summary(ctx, sum);
            return 1;
        } catch (const std::invalid_argument& e) {
            throw ConfigError(fmt::format("{}: {}", cfg.origin(), e.what()));
        }
        p.c = res.c_star;
        {
            auto os = detail::open_output(ctx.out_dir / "profile.csv");
            write_profile_csv(os, p, res.profile);
        }
        const double err = std::abs(res.profile.phi1_left - 1.0 / p.kappa);
        const bool ok = err <= phi_tol && res.profile.max_drift <= drift_tol;
        sum.add("bracket_lo", res.bracket_lo);
        sum.add("bracket_hi", res.bracket_hi);
        sum.add("bisections", res.bisections);
        sum.add("c_star", res.c_star);
        sum.add("k", res.profile.k);
        sum.add("phi1_left", res.profile.phi1_left);
        sum.add("phi1_left_error", err);
        sum.add("max_k_drift", res.profile.max_drift);
        sum.add("left_residual", res.profile.left_residual);
        sum.add("right_residual", res.profile.right_residual);
        sum.add("profile_samples", res.profile.z.size());
        sum.add("phi2_monotone", res.profile.phi2_monotone);
        sum.add("status", ok ? "pass" : "fail");
        detail::write_summary(ctx, sum);
        return ok ? 0 : 1;
    }
    if (mode == "orbit") {
        const auto phi0 = cfg.get_doubles("front", "phi0", {1.0 / p.kappa, 0.0, 0.0, 0.0});
        if (phi0.size() != 4) {
            throw ConfigError(fmt::format("{}: phi0 needs four entries", cfg.where("front", "phi0")));
        }
        const double z_end = cfg.get_double("front", "z_end", 10.0);
        OrbitOptions o;
        o.tol = cfg.get_double("front", "tol", 1e-10);
        if (!(o.tol > 0.0)) {
            throw ConfigError(fmt::format("{}: tol must be positive", cfg.where("front", "tol")));
        }
        sum.add("front.phi0", fmt::format("{:.17g}, {:.17g}, {:.17g}, {:.17g}", phi0[0], phi0[1], phi0[2], phi0[3]));
        sum.add("front.z_end", z_end);
        sum.add("front.tol", o.tol);
        const FrontState s0{phi0[0], phi0[1], phi0[2], p.epsilon > 0.0 ? phi0[3] : 0.0};
        Trajectory tr;
        try {
            tr = integrate_orbit(p, s0, 0.0, z_end, o);
        } catch (const FrontError& e) {
            sum.add("status", fmt::format("fail: {}", e.what()));
            detail::write_summary(ctx, sum);
            return 1;
        }
        FrontProfile prof;
        prof.c = p.c;
        prof.k = tr.k0;
        prof.z = tr.z;
        prof.states = tr.states;
        prof.max_drift = tr.max_drift;
        {
            auto os = detail::open_output(ctx.out_dir / "profile.csv");
            write_profile_csv(os, p, prof);
        }
        const double bound = 10.0 * o.tol * std::abs(z_end);
        const bool ok = tr.max_drift <= bound;
        sum.add("k0", tr.k0);
        sum.add("max_k_drift", tr.max_drift);
        sum.add("drift_bound", bound);
        sum.add("samples", tr.z.size());
        sum.add("status", ok ? "pass" : "fail");
        detail::write_summary(ctx, sum);
        return ok ? 0 : 1;
    }
    throw ConfigError(fmt::format("{}: front mode must be shoot or orbit, got '{}'", cfg.where("front", "mode"), mode));
}

// ---------------------------------------------------------------- simulate / verify

struct SimulationOutcome {
    ModelSpec model;
    Grid grid;
    double alpha = 0.0;
    RunResult run;
    std::optional<VerdictReport> verdict;
    std::optional<std::string> step_failure;
};

inline SimulationOutcome evaluate_simulation(const Config& cfg, Summary& sum, bool verify) {
    SimulationOutcome out;
    out.model = parse_model(cfg, sum);
    out.alpha = parse_alpha(cfg, out.model, sum, verify);
    out.grid = parse_grid(cfg, sum);
    const RunConfig rc = parse_time(cfg, out.alpha, sum);
    const Perturbation pert = parse_perturbation(cfg, out.grid, out.model.components(), sum);
    FieldState v0 = build_perturbation(out.grid, pert, out.alpha, out.model.components(), out.model.first_block());
    double eta = 0.0;
    {
        NormMeter meter(out.grid, out.alpha);
        eta = meter.intersection(v0, 0);
        sum.add("initial.norm0", meter.unweighted(v0, 0));
        sum.add("initial.normalpha", meter.weighted(v0, 0));
        sum.add("initial.normE", eta);
    }
    std::optional<VerifyConfig> vc;
    if (verify) {
        vc = parse_verify(cfg, eta, !out.model.nonlinear, sum);
    }
    try {
        out.run = run(out.grid, out.model.dynamics(), std::move(v0), rc);
    } catch (const StepError& e) {
        out.step_failure = e.what();
        sum.add("status", fmt::format("fail: {}", e.what()));
        return out;
    }
    sum.add("steps", out.run.steps);
    sum.add("dt_used", out.run.dt);
    sum.add("max_boundary_fraction", out.run.max_boundary_fraction);
    sum.add("warnings", out.run.warnings.size());
    for (std::size_t i = 0; i < out.run.warnings.size(); ++i) {
        sum.add(fmt::format("warning_{}", i), out.run.warnings[i]);
    }
    if (verify) {
        out.verdict = verify_decay(out.run.series, out.model.nu_weighted(out.alpha), out.model.nu_reactant(), *vc);
    }
    return out;
}

namespace detail {

inline void write_snapshots(const CommandContext& ctx, const SimulationOutcome& o) {
    std::vector<const FieldState*> frames;
    for (const auto& f : o.run.snapshots) {
        frames.push_back(&f);
    }
    if (frames.empty()) {
        frames.push_back(&o.run.final_state);
    }
    const Grid& g = o.grid;
    for (std::size_t s = 0; s < frames.size(); ++s) {
        const FieldState& f = *frames[s];
        nlohmann::json meta;
        meta["time"] = f.t;
        meta["grid"] = {{"dim", g.dim()},
                        {"L", g.dim() == 2 ? std::vector<double>{g.half_length(0), g.half_length(1)}
                                           : std::vector<double>{g.half_length(0)}},
                        {"N", g.dim() == 2 ? std::vector<int>{g.points(0), g.points(1)} : std::vector<int>{g.points(0)}}};
        meta["model"] = {{"kind", o.model.kind}, {"nonlinear", o.model.nonlinear}, {"alpha", o.alpha}};
        if (o.model.is_combustion()) {
            meta["model"]["epsilon"] = o.model.params.epsilon;
            meta["model"]["kappa"] = o.model.params.kappa;
            meta["model"]["c"] = o.model.params.c;
        }
        nlohmann::json files = nlohmann::json::array();
        for (int c = 0; c < f.size(); ++c) {
            const std::string name = fmt::format("snapshot_{:04d}_v{}.csv", s, c + 1);
            files.push_back(name);
            auto os = open_output(ctx.out_dir / name);
            os << (g.dim() == 2 ? "z,y,value\n" : "z,value\n");
            const auto v = f[c];
            for (int i = 0; i < g.points(0); ++i) {
                for (int j = 0; j < g.points(1); ++j) {
                    const std::size_t idx = static_cast<std::size_t>(i) * g.points(1) + j;
                    if (g.dim() == 2) {
                        os << fmt::format("{:.17g},{:.17g},{:.17g}\n", g.coordinate(0, i), g.coordinate(1, j), v[idx]);
                    } else {
                        os << fmt::format("{:.17g},{:.17g}\n", g.coordinate(0, i), v[idx]);
                    }
                }
            }
        }
        meta["components"] = files;
        auto os = open_output(ctx.out_dir / fmt::format("snapshot_{:04d}.json", s));
        os << meta.dump(2) << '\n';
    }
}

}  // namespace detail

inline int cmd_simulate(const Config& cfg, const CommandContext& ctx, bool verify = false) {
    Summary sum;
    detail::prepare(ctx, cfg, verify ? "verify" : "simulate", sum);
    const SimulationOutcome o = evaluate_simulation(cfg, sum, verify);
    if (o.step_failure) {
        detail::write_summary(ctx, sum);
        return 1;
    }
    for (const auto& w : o.run.warnings) {
        *ctx.log << "warning: " << w << '\n';
    }
    {
        auto os = detail::open_output(ctx.out_dir / "norms.csv");
        write_norm_csv(os, o.run.series);
    }
    detail::write_snapshots(ctx, o);
    int code = 0;
    if (o.verdict) {
        auto os = detail::open_output(ctx.out_dir / "verdict.txt");
        write_verdict(os, *o.verdict);
        for (const auto& item : o.verdict->items) {
            sum.add(fmt::format("item{}", item.item), fmt::format("{} ({})", item.passed ? "pass" : "fail", item.detail));
        }
        sum.add("verdict", o.verdict->passed() ? "pass" : "fail");
        code = o.verdict->passed() ? 0 : 1;
    } else {
        sum.add("status", "completed");
    }
    detail::write_summary(ctx, sum);
    return code;
}

inline int cmd_verify(const Config& cfg, const CommandContext& ctx) { return cmd_simulate(cfg, ctx, true); }

// ---------------------------------------------------------------- sweep

struct SweepRow {
    std::string value;
    bool ok = false;
    std::string verdict = "n/a";
    double abscissa_unweighted = std::numeric_limits<double>::quiet_NaN();
    double abscissa_weighted = std::numeric_limits<double>::quiet_NaN();
    double nu_weighted_fit = std::numeric_limits<double>::quiet_NaN();
    double nu_reactant_fit = std::numeric_limits<double>::quiet_NaN();
    std::string message;
};

inline std::pair<std::string, std::string> sweep_target(const Config& cfg, const std::string& name) {
    static const std::map<std::string, std::pair<std::string, std::string>> aliases{
        {"alpha", {"weights", "alpha"}}, {"kappa", {"model", "kappa"}},     {"epsilon", {"model", "epsilon"}},
        {"c", {"model", "c"}},           {"eta", {"perturbation", "eta"}}, {"T", {"time", "T"}},
    };
    if (auto it = aliases.find(name); it != aliases.end()) {
        return it->second;
    }
    const auto dot = name.find('.');
    if (dot == std::string::npos) {
        throw ConfigError(fmt::format("{}: unknown sweep parameter '{}'", cfg.where("sweep", "parameter"), name));
    }
    std::pair<std::string, std::string> t{name.substr(0, dot), name.substr(dot + 1)};
    const auto& schema = scenario_schema();
    auto it = schema.find(t.first);
    if (it == schema.end() || !it->second.count(t.second) || t.first == "sweep") {
        throw ConfigError(fmt::format("{}: unknown sweep parameter '{}'", cfg.where("sweep", "parameter"), name));
    }
    return t;
}

inline SweepRow sweep_one(const Config& base, const std::string& command, const std::string& section,
                          const std::string& key, const std::string& value, const CommandContext& ctx) {
    SweepRow row;
    row.value = value;
    Summary sink;
    try {
        const Config cfg = base.with(section, key, value);
        if (command == "spectrum") {
            const SpectrumOutcome o = evaluate_spectrum(cfg, ctx, sink);
            row.abscissa_unweighted = o.unweighted.realized_abscissa;
            row.abscissa_weighted = o.weighted.realized_abscissa;
            row.ok = true;
            row.verdict = "n/a";
        } else {
            const SimulationOutcome o = evaluate_simulation(cfg, sink, true);
            const SymbolMatrix s0 = o.model.symbol(1, 0.0);
            const SymbolMatrix sa = o.model.symbol(1, o.alpha);
            row.abscissa_unweighted = closed_form_abscissa(s0).value_or(std::numeric_limits<double>::quiet_NaN());
            row.abscissa_weighted = closed_form_abscissa(sa).value_or(std::numeric_limits<double>::quiet_NaN());
            if (o.step_failure) {
                row.message = *o.step_failure;
                row.verdict = "fail";
                return row;
            }
            row.nu_weighted_fit = o.verdict->weighted_fit.nu;
            row.nu_reactant_fit = o.verdict->reactant_fit.nu;
            row.verdict = o.verdict->passed() ? "pass" : "fail";
            row.ok = true;
            if (!o.run.warnings.empty()) {
                row.message = o.run.warnings.front();
            }
        }
    } catch (const std::exception& e) {
        row.ok = false;
        row.verdict = "error";
        row.message = e.what();
    }
    return row;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char ch : s) {
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return q + "\"";
}

inline int cmd_sweep(const Config& cfg, const CommandContext& ctx) {
    Summary sum;
    detail::prepare(ctx, cfg, "sweep", sum);
    cfg.require_section("sweep");
    const std::string name = cfg.get_string("sweep", "parameter", "");
    if (name.empty()) {
        throw ConfigError(fmt::format("{}: [sweep] parameter is required", cfg.origin()));
    }
    const auto [section, key] = sweep_target(cfg, name);
    const std::string command = cfg.get_string("sweep", "command", "verify");
    if (command != "verify" && command != "spectrum") {
        throw ConfigError(fmt::format("{}: sweep command must be verify or spectrum", cfg.where("sweep", "command")));
    }
    const auto values = split_list(cfg.get_string("sweep", "values", ""));
    sum.add("sweep.parameter", fmt::format("{}.{}", section, key));
    sum.add("sweep.command", command);
    sum.add("sweep.count", values.size());

    std::vector<SweepRow> rows(values.size());
    parallel_for(values.size(), [&](std::size_t i) { rows[i] = sweep_one(cfg, command, section, key, values[i], ctx); });

    auto os = detail::open_output(ctx.out_dir / "sweep.csv");
    os << "index,value,status,abscissa_unweighted,abscissa_weighted,nu_weighted_fit,nu_reactant_fit,verdict,message\n";
    int failed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        failed += r.ok ? 0 : 1;
        os << fmt::format("{},{},{},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", i, csv_field(r.value),
                          r.ok ? "ok" : "failed", r.abscissa_unweighted, r.abscissa_weighted, r.nu_weighted_fit,
                          r.nu_reactant_fit, r.verdict, csv_field(r.message));
    }
    sum.add("sweep.failed_rows", failed);
    detail::write_summary(ctx, sum);
    return 0;
}

}  // namespace frontlab::cli
