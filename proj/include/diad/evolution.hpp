#pragma once

#include "diad/common.hpp"
#include "diad/models.hpp"
#include "diad/pulse.hpp"
#include "diad/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace diad {

struct TransferResult {
    ComplexMatrix propagator;
    double fidelity = 0.0;
    std::optional<RealMatrix> populations;
};

inline double unitarity_residual(const ComplexMatrix& u) {
    const ComplexMatrix r = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
    return max_abs(r);
}

/// Largest Hamiltonian entry magnitude over a set of control values; sets the
/// time step so the per-step phase advance stays small.
inline double max_hamiltonian_entry(const ModelSpec& model, const RealVector& controls) {
    double best = 0.0;
    for (int i = 0; i < controls.size(); ++i)
        best = std::max(best, max_abs(hamiltonian(model, controls[i])));
    return best;
}

inline int default_steps(double t_f, double max_entry) {
    return std::max(1000, static_cast<int>(std::ceil(20.0 * t_f * max_entry)));
}

/// Time-ordered product of midpoint-sampled piecewise-constant exponentials,
/// U = prod_k exp(-i H(eps(t_k + dt/2)) dt), hbar = 1. Each factor is exact
/// through the eigendecomposition of the step Hamiltonian, so U is unitary by
/// construction.
inline ComplexMatrix propagate(const ModelSpec& model, const TimeDomainPulse& pulse, int steps) {
    if (steps < 1) throw ValidationError("propagate: steps must be positive");
    const int d = model.dimension();
    const double dt = pulse.t_f / steps;
    ComplexMatrix u = ComplexMatrix::Identity(d, d);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    for (int k = 0; k < steps; ++k) {
        const double t_mid = (k + 0.5) * dt;
        const ComplexMatrix h = hamiltonian(model, pulse.value_at(t_mid));
        if (!h.allFinite()) throw PropagationError("propagate: non-finite Hamiltonian entries");
        solver.compute(h);
        const ComplexVector phases =
            (Complex(0.0, -dt) * solver.eigenvalues().cast<Complex>()).array().exp();
        u = solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint() * u;
    }
    const double residual = unitarity_residual(u);
    if (!(residual <= 1e-8))
        throw PropagationError("propagate: propagator lost unitarity (residual = " +
                               std::to_string(residual) + ")");
    return u;
}

/// State-transfer fidelity |<psi_n(t_f)| U |psi_m(0)>|^2.
inline double transfer_fidelity(const ComplexMatrix& u, const Spectrum& initial,
                                const Spectrum& final, int m, int n) {
    if (m < 0 || m >= initial.dimension() || n < 0 || n >= final.dimension())
        throw ValidationError("transfer_fidelity: level index out of range");
    const Complex amp = final.states.col(n).adjoint() * u * initial.states.col(m);
    return std::norm(amp);
}

/// Effective X-gate average gate fidelity on the two lowest levels:
/// (1 + sum_j |<psi_{1-j}(t_f)| U |psi_j(0)>|^2) / 3.
inline double gate_fidelity_x(const ComplexMatrix& u, const Spectrum& initial,
                              const Spectrum& final) {
    if (initial.dimension() < 2 || final.dimension() < 2)
        throw ValidationError("gate_fidelity_x: needs at least two levels");
    return (1.0 + transfer_fidelity(u, initial, final, 0, 1) +
            transfer_fidelity(u, initial, final, 1, 0)) /
           3.0;
}

struct TimeSweepPoint {
    double t_f = 0.0;
    double fidelity = 0.0;
};

struct TimeSweepResult {
    std::vector<TimeSweepPoint> points;
    double best_t_f = 0.0;
    double min_infidelity = 1.0;
    int skipped_nonpositive = 0;
};

/// Evaluate the transfer over a grid of pulse times, reusing the single
/// normalized profile for every t_f. Ties break toward smaller t_f.
inline TimeSweepResult min_infidelity_over_times(const ModelSpec& model,
                                                 const PulseProfile& profile,
                                                 const std::vector<double>& t_f_grid, int m, int n,
                                                 int steps_override = 0) {
    if (t_f_grid.empty()) throw ValidationError("min_infidelity_over_times: empty t_f grid");
    for (size_t i = 0; i + 1 < t_f_grid.size(); ++i)
        if (!(t_f_grid[i] < t_f_grid[i + 1]))
            throw ValidationError("min_infidelity_over_times: t_f grid must be strictly increasing");

    const Spectrum initial = eigendecompose(hamiltonian(model, model.control_start));
    const Spectrum final = eigendecompose(hamiltonian(model, model.control_end));
    const double max_entry = max_hamiltonian_entry(model, profile.control);

    TimeSweepResult result;
    for (double t_f : t_f_grid) {
        if (!(t_f > 0.0)) {
            ++result.skipped_nonpositive;
            continue;
        }
        const int steps = steps_override > 0 ? steps_override : default_steps(t_f, max_entry);
        const TimeDomainPulse pulse = time_domain(profile, t_f, 2 * steps + 1);
        const ComplexMatrix u = propagate(model, pulse, steps);
        const double fid = transfer_fidelity(u, initial, final, m, n);
        result.points.push_back({t_f, fid});
        if (1.0 - fid < result.min_infidelity) {
            result.min_infidelity = 1.0 - fid;
            result.best_t_f = t_f;
        }
    }
    if (result.points.empty())
        throw ValidationError("min_infidelity_over_times: no positive t_f in grid");
    return result;
}

struct PopulationTrace {
    RealVector times;
    RealMatrix populations;  // (steps+1) x d, instantaneous-eigenbasis occupations
};

/// One full transfer at a given pulse time: propagator, fidelity between the
/// endpoint eigenstates, and optionally the population time series.
TransferResult run_transfer(const ModelSpec& model, const PulseProfile& profile, double t_f,
                            int m, int n, int steps_override = 0, bool with_populations = false);

/// Evolve |psi_m0(0)> under the pulse and record the populations in the
/// instantaneous eigenbasis after every step.
inline PopulationTrace population_trace(const ModelSpec& model, const TimeDomainPulse& pulse,
                                        int steps, int m0) {
    if (steps < 1) throw ValidationError("population_trace: steps must be positive");
    const int d = model.dimension();
    if (m0 < 0 || m0 >= d) throw ValidationError("population_trace: level index out of range");

    const double dt = pulse.t_f / steps;
    PopulationTrace trace;
    trace.times.resize(steps + 1);
    trace.populations.resize(steps + 1, d);

    Spectrum at_start = eigendecompose(hamiltonian(model, pulse.value_at(0.0)));
    ComplexVector psi = at_start.states.col(m0);
    auto record = [&](int row, double t, const ComplexVector& state) {
        const Spectrum spec = eigendecompose(hamiltonian(model, pulse.value_at(t)));
        trace.times[row] = t;
        for (int k = 0; k < d; ++k)
            trace.populations(row, k) = std::norm(Complex(spec.states.col(k).adjoint() * state));
    };
    record(0, 0.0, psi);

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver;
    for (int k = 0; k < steps; ++k) {
        const ComplexMatrix h = hamiltonian(model, pulse.value_at((k + 0.5) * dt));
        if (!h.allFinite()) throw PropagationError("population_trace: non-finite Hamiltonian");
        solver.compute(h);
        const ComplexVector phases =
            (Complex(0.0, -dt) * solver.eigenvalues().cast<Complex>()).array().exp();
        psi = solver.eigenvectors() * phases.asDiagonal() * (solver.eigenvectors().adjoint() * psi);
        record(k + 1, (k + 1) * dt, psi);
    }
    return trace;
}

inline TransferResult run_transfer(const ModelSpec& model, const PulseProfile& profile,
                                   double t_f, int m, int n, int steps_override,
                                   bool with_populations) {
    const Spectrum initial = eigendecompose(hamiltonian(model, model.control_start));
    const Spectrum final = eigendecompose(hamiltonian(model, model.control_end));
    const double max_entry = max_hamiltonian_entry(model, profile.control);
    const int steps = steps_override > 0 ? steps_override : default_steps(t_f, max_entry);
    const TimeDomainPulse pulse = time_domain(profile, t_f, 2 * steps + 1);

    TransferResult result;
    result.propagator = propagate(model, pulse, steps);
    result.fidelity = transfer_fidelity(result.propagator, initial, final, m, n);
    if (with_populations)
        result.populations = population_trace(model, pulse, steps, m).populations;
    return result;
}

}  // namespace diad
