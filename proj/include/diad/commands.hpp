#pragma once

#include "diad/config.hpp"
#include "diad/evolution.hpp"
#include "diad/io.hpp"
#include "diad/metric.hpp"
#include "diad/models.hpp"
#include "diad/optimize.hpp"
#include "diad/parallel.hpp"
#include "diad/pulse.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace diad {

struct CommandOptions {
    int threads = 1;
    std::optional<std::uint64_t> seed;  // overrides optimize.seed
};

struct CommandOutput {
    std::string csv;       // primary table, empty when the command emits none
    Json summary;          // JSON summary, null when the command emits none
    std::string aux_csv;   // populations table for evolve, empty otherwise
};

namespace detail {

inline std::string pulse_header(const RunConfig& config, double t_f) {
    const DiadExponents& e = config.diad.exponents;
    return "# model=" + config.model.tag() + " alpha=" + format_number(e.alpha) +
           " beta=" + format_number(e.beta) + " alpha_hat=" + format_number(e.alpha_hat) +
           " beta_hat=" + format_number(e.beta_hat) + " t_f=" + format_number(t_f);
}

/// Exponent grid axes for sweep/optimize: base exponents from the diad
/// section with the named axes replaced per point.
inline DiadExponents exponents_with(const DiadSection& base, const std::vector<std::string>& axes,
                                    const std::vector<double>& values) {
    DiadExponents e = base.exponents;
    for (size_t i = 0; i < axes.size(); ++i) {
        if (axes[i] == "alpha") e.alpha = values[i];
        else if (axes[i] == "beta") e.beta = values[i];
        else if (axes[i] == "alpha_hat") e.alpha_hat = values[i];
        else e.beta_hat = values[i];
    }
    return e;
}

struct TransferSetup {
    Spectrum initial;
    Spectrum final;
};

inline TransferSetup endpoint_spectra(const ModelSpec& model) {
    return {eigendecompose(hamiltonian(model, model.control_start)),
            eigendecompose(hamiltonian(model, model.control_end))};
}

inline double evolve_fidelity(const RunConfig& config, const DiadExponents& exps, double t_f,
                              const TransferSetup& setup, ComplexMatrix* propagator = nullptr) {
    const TransitionMatrix xi = config.diad.transition_matrix(config.model.dimension());
    const PulseProfile profile =
        generate_pulse(config.model, exps, xi, config.pulse.grid_points);
    const double max_entry = max_hamiltonian_entry(config.model, profile.control);
    const int steps =
        config.evolution.steps > 0 ? config.evolution.steps : default_steps(t_f, max_entry);
    const TimeDomainPulse pulse = time_domain(profile, t_f, 2 * steps + 1);
    const ComplexMatrix u = propagate(config.model, pulse, steps);
    if (propagator) *propagator = u;
    return transfer_fidelity(u, setup.initial, setup.final, config.evolution.initial,
                             config.evolution.target);
}

}  // namespace detail

/// Energy spectrum across the control range: one row per control sample.
inline CommandOutput cmd_spectrum(const RunConfig& config, int samples = 501) {
    const ModelSpec& model = config.model;
    const int d = model.dimension();
    CsvBuilder csv;
    csv.comment("model=" + model.tag());
    std::string columns = "columns: control";
    for (int k = 0; k < d; ++k) columns += ",E_" + std::to_string(k);
    csv.comment(columns);
    for (int i = 0; i < samples; ++i) {
        const double u = samples == 1 ? 0.0 : static_cast<double>(i) / (samples - 1);
        const double control = model.control_start + u * (model.control_end - model.control_start);
        const Spectrum spec = eigendecompose(hamiltonian(model, control));
        std::vector<double> row = {control};
        for (int k = 0; k < d; ++k) row.push_back(spec.energies[k]);
        csv.row(row);
    }
    return {csv.str(), Json(), ""};
}

/// Control pulse in the time domain as a two-column (t, control) table.
inline CommandOutput cmd_pulse(const RunConfig& config) {
    const double t_f = config.pulse.single_t_f();
    const TransitionMatrix xi = config.diad.transition_matrix(config.model.dimension());
    const PulseProfile profile =
        generate_pulse(config.model, config.diad.exponents, xi, config.pulse.grid_points);
    const TimeDomainPulse pulse = time_domain(profile, t_f, config.pulse.grid_points + 1);
    CsvBuilder csv;
    csv.raw_line(detail::pulse_header(config, t_f));
    for (int i = 0; i < pulse.times.size(); ++i) csv.row({pulse.times[i], pulse.control[i]});
    return {csv.str(), Json(), ""};
}

/// Single evolution at the configured t_f; JSON fidelity report plus an
/// optional instantaneous-eigenbasis population table.
inline CommandOutput cmd_evolve(const RunConfig& config) {
    const double t_f = config.pulse.single_t_f();
    const TransitionMatrix xi = config.diad.transition_matrix(config.model.dimension());
    const PulseProfile profile =
        generate_pulse(config.model, config.diad.exponents, xi, config.pulse.grid_points);
    const TransferResult result =
        run_transfer(config.model, profile, t_f, config.evolution.initial,
                     config.evolution.target, config.evolution.steps,
                     config.evolution.populations);

    CommandOutput out;
    out.summary = Json{{"fidelity", result.fidelity},
                       {"t_f", t_f},
                       {"unitarity_residual", unitarity_residual(result.propagator)}};
    if (result.populations) {
        const RealMatrix& populations = *result.populations;
        const int steps = static_cast<int>(populations.rows()) - 1;
        CsvBuilder csv;
        csv.comment("model=" + config.model.tag());
        std::string columns = "columns: t";
        for (int k = 0; k < config.model.dimension(); ++k) columns += ",p_" + std::to_string(k);
        csv.comment(columns);
        for (int i = 0; i <= steps; ++i) {
            std::vector<double> row = {t_f * i / steps};
            for (int k = 0; k < populations.cols(); ++k) row.push_back(populations(i, k));
            csv.row(row);
        }
        out.aux_csv = csv.str();
    }
    return out;
}

/// Exponent-grid x pulse-time sweep. One CSV row per (theta, t_f) pair and a
/// JSON summary with the argmin. The normalized profile is generated once per
/// exponent point and reused across pulse times.
inline CommandOutput cmd_sweep(const RunConfig& config, const CommandOptions& options = {}) {
    const ModelSpec& model = config.model;
    const int d = model.dimension();
    const TransitionMatrix xi = config.diad.transition_matrix(d);
    const std::vector<double> t_f_values = config.pulse.t_f_values();
    for (double t : t_f_values)
        if (!(t > 0.0)) throw ConfigError("sweep: pulse times must be positive");

    // Exponent grid: lexicographic enumeration over the configured axes.
    std::vector<std::vector<double>> grid_axes;
    std::vector<std::string> axes;
    if (config.optimize && !config.optimize->axes.empty()) {
        const OptimizeConfig& opt = *config.optimize;
        axes = opt.axes;
        for (const auto& axis : axes) {
            const auto& b = opt.bounds.at(axis);
            std::vector<double> values;
            for (int k = 0; k < opt.resolution; ++k)
                values.push_back(opt.resolution == 1
                                     ? b[0]
                                     : b[0] + k * (b[1] - b[0]) / (opt.resolution - 1));
            grid_axes.push_back(values);
        }
    }
    long total = 1;
    for (const auto& v : grid_axes) total *= static_cast<long>(v.size());

    struct PointResult {
        DiadExponents exps;
        std::vector<TimeSweepPoint> points;
        bool failed = false;
    };
    std::vector<PointResult> results(total);
    const detail::TransferSetup setup = detail::endpoint_spectra(model);

    parallel_for(total, options.threads, [&](long flat) {
        std::vector<double> values(axes.size());
        long rest = flat;
        for (size_t i = axes.size(); i-- > 0;) {
            const long r = static_cast<long>(grid_axes[i].size());
            values[i] = grid_axes[i][rest % r];
            rest /= r;
        }
        PointResult& pr = results[flat];
        pr.exps = detail::exponents_with(config.diad, axes, values);
        try {
            const PulseProfile profile =
                generate_pulse(model, pr.exps, xi, config.pulse.grid_points);
            const double max_entry = max_hamiltonian_entry(model, profile.control);
            for (double t_f : t_f_values) {
                const int steps = config.evolution.steps > 0
                                      ? config.evolution.steps
                                      : default_steps(t_f, max_entry);
                const TimeDomainPulse pulse = time_domain(profile, t_f, 2 * steps + 1);
                const ComplexMatrix u = propagate(model, pulse, steps);
                pr.points.push_back({t_f, transfer_fidelity(u, setup.initial, setup.final,
                                                            config.evolution.initial,
                                                            config.evolution.target)});
            }
        } catch (const NumericalError&) {
            pr.failed = true;
            pr.points.clear();
            for (double t_f : t_f_values) pr.points.push_back({t_f, 0.0});
        }
    });

    CsvBuilder csv;
    csv.comment("model=" + model.tag());
    csv.comment("columns: alpha,beta,alpha_hat,beta_hat,t_f,fidelity");
    DiadExponents best_exps;
    double best_t_f = 0.0;
    double min_infidelity = 2.0;
    int failures = 0;
    for (const PointResult& pr : results) {
        if (pr.failed) ++failures;
        for (const TimeSweepPoint& pt : pr.points) {
            csv.row({pr.exps.alpha, pr.exps.beta, pr.exps.alpha_hat, pr.exps.beta_hat, pt.t_f,
                     pt.fidelity});
            if (!pr.failed && 1.0 - pt.fidelity < min_infidelity) {
                min_infidelity = 1.0 - pt.fidelity;
                best_exps = pr.exps;
                best_t_f = pt.t_f;
            }
        }
    }
    if (min_infidelity > 1.5) throw NumericalError("sweep: every grid point failed");

    CommandOutput out;
    out.csv = csv.str();
    out.summary = Json{{"argmin",
                        Json{{"alpha", best_exps.alpha},
                             {"beta", best_exps.beta},
                             {"alpha_hat", best_exps.alpha_hat},
                             {"beta_hat", best_exps.beta_hat}}},
                       {"t_f", best_t_f},
                       {"min_infidelity", min_infidelity},
                       {"failures", failures}};
    return out;
}

/// Optimizer run over the configured axes at fixed t_f. Trace CSV plus a JSON
/// best record.
inline CommandOutput cmd_optimize(const RunConfig& config, const CommandOptions& options = {}) {
    if (!config.optimize) throw ConfigError("optimize: section required for this command");
    const OptimizeConfig& opt = *config.optimize;
    const double t_f = config.pulse.single_t_f();
    const detail::TransferSetup setup = detail::endpoint_spectra(config.model);

    OptimizationProblem problem;
    for (const auto& axis : opt.axes) {
        const auto& b = opt.bounds.at(axis);
        problem.lower.push_back(b[0]);
        problem.upper.push_back(b[1]);
    }
    problem.budget = opt.budget;
    problem.seed = options.seed.value_or(opt.seed);
    problem.objective = cached_objective([&config, &setup, t_f, axes = opt.axes](
                                             const std::vector<double>& values) {
        const DiadExponents exps = detail::exponents_with(config.diad, axes, values);
        return 1.0 - detail::evolve_fidelity(config, exps, t_f, setup);
    });

    OptimizeResult result;
    switch (opt.method) {
        case OptimizeMethod::GridSweep:
            result = grid_sweep(problem, std::vector<int>(opt.axes.size(), opt.resolution),
                                options.threads);
            break;
        case OptimizeMethod::NelderMead: {
            std::vector<double> initial;
            if (opt.initial) {
                initial = *opt.initial;
            } else {
                for (size_t i = 0; i < problem.lower.size(); ++i)
                    initial.push_back(0.5 * (problem.lower[i] + problem.upper[i]));
            }
            result = nelder_mead(problem, initial, opt.budget);
            break;
        }
        case OptimizeMethod::RandomSearch:
            result = random_search(problem, options.threads);
            break;
    }

    CsvBuilder csv;
    csv.comment("model=" + config.model.tag());
    csv.comment("columns: eval_index,alpha,beta,alpha_hat,beta_hat,infidelity");
    for (size_t i = 0; i < result.trace.size(); ++i) {
        const Evaluation& e = result.trace[i];
        const DiadExponents exps = detail::exponents_with(config.diad, opt.axes, e.theta);
        csv.row({static_cast<double>(i), exps.alpha, exps.beta, exps.alpha_hat, exps.beta_hat,
                 e.value});
    }

    const DiadExponents best = detail::exponents_with(config.diad, opt.axes, result.best.theta);
    CommandOutput out;
    out.csv = csv.str();
    out.summary = Json{{"best",
                        Json{{"alpha", best.alpha},
                             {"beta", best.beta},
                             {"alpha_hat", best.alpha_hat},
                             {"beta_hat", best.beta_hat}}},
                       {"infidelity", result.best.value},
                       {"evaluations", result.trace.size()},
                       {"failures", result.failures},
                       {"t_f", t_f}};
    return out;
}

/// Median wall-clock time of pulse generation over the configured repeats.
inline CommandOutput cmd_bench(const RunConfig& config) {
    const int repeats = config.pulse.repeats;
    const TransitionMatrix xi = config.diad.transition_matrix(config.model.dimension());
    std::vector<double> timings;
    timings.reserve(repeats);
    for (int r = 0; r < repeats; ++r) {
        const auto start = std::chrono::steady_clock::now();
        const PulseProfile profile =
            generate_pulse(config.model, config.diad.exponents, xi, config.pulse.grid_points);
        const auto stop = std::chrono::steady_clock::now();
        (void)profile;
        timings.push_back(std::chrono::duration<double>(stop - start).count());
    }
    std::vector<double> sorted = timings;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted.size() % 2 == 1
                              ? sorted[sorted.size() / 2]
                              : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    const DiadExponents& e = config.diad.exponents;
    CommandOutput out;
    out.summary = Json{{"results",
                        Json::array({Json{{"alpha", e.alpha},
                                          {"beta", e.beta},
                                          {"alpha_hat", e.alpha_hat},
                                          {"beta_hat", e.beta_hat},
                                          {"median_pulse_generation_seconds", median},
                                          {"repeats", repeats}}})}};
    return out;
}

}  // namespace diad
