#pragma once

#include "diad/common.hpp"
#include "diad/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <vector>

namespace diad {

using Objective = std::function<double(const std::vector<double>&)>;

struct OptimizationProblem {
    Objective objective;
    std::vector<double> lower;
    std::vector<double> upper;
    int budget = 100;
    std::uint64_t seed = 0;

    size_t dimension() const { return lower.size(); }

    void validate() const {
        if (!objective) throw ValidationError("optimization problem: missing objective");
        if (lower.size() != upper.size() || lower.empty())
            throw ValidationError("optimization problem: mismatched bounds");
        for (size_t i = 0; i < lower.size(); ++i)
            if (!(lower[i] < upper[i]))
                throw ValidationError("optimization problem: lower bound must be below upper");
        if (budget < 1) throw ValidationError("optimization problem: budget must be at least 1");
    }
};

struct Evaluation {
    std::vector<double> theta;
    double value = 1.0;
    bool failed = false;
};

struct OptimizeResult {
    std::vector<Evaluation> trace;  // in evaluation order
    Evaluation best;
    int failures = 0;
};

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Memoize an objective keyed by the coordinates rounded to 1e-9. Simplex
/// methods revisit vertices and pulse generation dominates the cost.
inline Objective cached_objective(Objective fn) {
    auto cache = std::make_shared<std::map<std::vector<std::int64_t>, double>>();
    auto mutex = std::make_shared<std::mutex>();
    return [fn = std::move(fn), cache, mutex](const std::vector<double>& theta) {
        std::vector<std::int64_t> key(theta.size());
        for (size_t i = 0; i < theta.size(); ++i)
            key[i] = static_cast<std::int64_t>(std::llround(theta[i] * 1e9));
        {
            std::lock_guard<std::mutex> lock(*mutex);
            auto it = cache->find(key);
            if (it != cache->end()) return it->second;
        }
        const double value = fn(theta);
        std::lock_guard<std::mutex> lock(*mutex);
        cache->emplace(std::move(key), value);
        return value;
    };
}

namespace detail {

/// Failures in the objective are scored as infidelity 1 and flagged, not fatal.
inline Evaluation evaluate(const OptimizationProblem& problem, std::vector<double> theta) {
    Evaluation e;
    e.theta = std::move(theta);
    try {
        e.value = problem.objective(e.theta);
        if (!std::isfinite(e.value)) {
            e.value = 1.0;
            e.failed = true;
        }
    } catch (const NumericalError&) {
        e.value = 1.0;
        e.failed = true;
    }
    return e;
}

inline bool lex_less(const std::vector<double>& a, const std::vector<double>& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

inline void track_best(OptimizeResult& result, const Evaluation& e) {
    if (e.failed) ++result.failures;
    // A failed evaluation never beats a real one.
    const bool better =
        result.trace.empty() ||
        (result.best.failed && !e.failed) ||
        (result.best.failed == e.failed &&
         (e.value < result.best.value ||
          (e.value == result.best.value && lex_less(e.theta, result.best.theta))));
    if (better) result.best = e;
    result.trace.push_back(e);
}

}  // namespace detail

/// Exhaustive evaluation on a per-axis uniform grid. Deterministic argmin with
/// lexicographic tie-break on theta (enumeration is lexicographic and the scan
/// keeps the first minimum).
inline OptimizeResult grid_sweep(const OptimizationProblem& problem,
                                 const std::vector<int>& resolution, int threads = 1) {
    problem.validate();
    const size_t dim = problem.dimension();
    if (resolution.size() != dim)
        throw ValidationError("grid_sweep: one resolution per coordinate required");
    long total = 1;
    for (int r : resolution) {
        if (r < 1) throw ValidationError("grid_sweep: resolution must be at least 1");
        total *= r;
    }

    auto point_at = [&](long flat) {
        std::vector<double> theta(dim);
        for (size_t i = dim; i-- > 0;) {
            const int r = resolution[i];
            const long k = flat % r;
            flat /= r;
            theta[i] = r == 1 ? problem.lower[i]
                              : problem.lower[i] +
                                    k * (problem.upper[i] - problem.lower[i]) / (r - 1);
        }
        return theta;
    };

    std::vector<Evaluation> evals(total);
    parallel_for(total, threads,
                 [&](long flat) { evals[flat] = detail::evaluate(problem, point_at(flat)); });

    OptimizeResult result;
    for (const Evaluation& e : evals) detail::track_best(result, e);
    return result;
}

/// Standard Nelder-Mead simplex with reflection/expansion/contraction/shrink
/// coefficients (1, 2, 0.5, 0.5). Bounds are handled by coordinate clipping;
/// the best evaluation ever seen is returned once the budget is exhausted.
inline OptimizeResult nelder_mead(const OptimizationProblem& problem,
                                  std::vector<double> initial, int max_evals) {
    problem.validate();
    const size_t dim = problem.dimension();
    if (initial.size() != dim) throw ValidationError("nelder_mead: initial point dimension mismatch");
    for (size_t i = 0; i < dim; ++i)
        if (initial[i] < problem.lower[i] || initial[i] > problem.upper[i])
            throw ValidationError("nelder_mead: initial point outside bounds");
    if (max_evals < 1) throw ValidationError("nelder_mead: max_evals must be at least 1");

    auto clip = [&](std::vector<double> theta) {
        for (size_t i = 0; i < dim; ++i)
            theta[i] = std::clamp(theta[i], problem.lower[i], problem.upper[i]);
        return theta;
    };

    OptimizeResult result;
    int evals = 0;
    auto eval = [&](std::vector<double> theta) {
        Evaluation e = detail::evaluate(problem, clip(std::move(theta)));
        ++evals;
        detail::track_best(result, e);
        return e;
    };

    std::vector<Evaluation> simplex;
    simplex.push_back(eval(initial));
    for (size_t i = 0; i < dim && evals < max_evals; ++i) {
        std::vector<double> vertex = initial;
        const double step = 0.1 * (problem.upper[i] - problem.lower[i]);
        vertex[i] = vertex[i] + step <= problem.upper[i] ? vertex[i] + step : vertex[i] - step;
        simplex.push_back(eval(vertex));
    }

    auto order = [&]() {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Evaluation& a, const Evaluation& b) {
            if (a.value != b.value) return a.value < b.value;
            return detail::lex_less(a.theta, b.theta);
        });
    };

    while (evals < max_evals && simplex.size() == dim + 1) {
        order();
        const Evaluation& best = simplex.front();
        Evaluation& worst = simplex.back();
        const Evaluation& second_worst = simplex[simplex.size() - 2];

        std::vector<double> centroid(dim, 0.0);
        for (size_t v = 0; v + 1 < simplex.size(); ++v)
            for (size_t i = 0; i < dim; ++i) centroid[i] += simplex[v].theta[i] / dim;

        auto along = [&](double coeff) {
            std::vector<double> theta(dim);
            for (size_t i = 0; i < dim; ++i)
                theta[i] = centroid[i] + coeff * (centroid[i] - worst.theta[i]);
            return theta;
        };

        const Evaluation reflected = eval(along(1.0));
        if (evals >= max_evals) break;
        if (reflected.value < best.value) {
            const Evaluation expanded = eval(along(2.0));
            worst = expanded.value < reflected.value ? expanded : reflected;
            continue;
        }
        if (reflected.value < second_worst.value) {
            worst = reflected;
            continue;
        }
        // Contraction: outside against the reflected point, inside otherwise.
        Evaluation contracted = reflected.value < worst.value
                                    ? eval(along(0.5))
                                    : eval(along(-0.5));
        if (contracted.value < std::min(reflected.value, worst.value)) {
            worst = contracted;
            continue;
        }
        // Shrink toward the best vertex.
        for (size_t v = 1; v < simplex.size() && evals < max_evals; ++v) {
            std::vector<double> theta(dim);
            for (size_t i = 0; i < dim; ++i)
                theta[i] = best.theta[i] + 0.5 * (simplex[v].theta[i] - best.theta[i]);
            simplex[v] = eval(std::move(theta));
        }
    }
    return result;
}

/// Uniform sampling within the bounds. Every sample derives its own generator
/// from the seed, so the trace is reproducible and independent of the thread
/// count.
inline OptimizeResult random_search(const OptimizationProblem& problem, int threads = 1) {
    problem.validate();
    const size_t dim = problem.dimension();
    std::vector<Evaluation> evals(problem.budget);
    parallel_for(problem.budget, threads, [&](long i) {
        std::mt19937_64 rng(splitmix64(problem.seed ^ splitmix64(static_cast<std::uint64_t>(i))));
        std::vector<double> theta(dim);
        for (size_t k = 0; k < dim; ++k) {
            std::uniform_real_distribution<double> dist(problem.lower[k], problem.upper[k]);
            theta[k] = dist(rng);
        }
        evals[i] = detail::evaluate(problem, std::move(theta));
    });
    OptimizeResult result;
    for (const Evaluation& e : evals) detail::track_best(result, e);
    return result;
}

}  // namespace diad
