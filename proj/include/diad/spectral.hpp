#pragma once

#include "diad/common.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace diad {

/// Eigendecomposition of a Hermitian matrix with energies sorted ascending
/// and a deterministic phase gauge on the eigenvector columns.
struct Spectrum {
    RealVector energies;   // ascending
    ComplexMatrix states;  // column k belongs to energies[k]

    int dimension() const { return static_cast<int>(energies.size()); }
};

namespace detail {

/// Rotate every column so that its largest-magnitude entry (ties broken
/// by lowest row index) is real and nonnegative.
inline void gauge_fix(ComplexMatrix& states) {
    const int d = static_cast<int>(states.rows());
    for (int k = 0; k < states.cols(); ++k) {
        int pivot = 0;
        double best = -1.0;
        for (int i = 0; i < d; ++i) {
            const double mag = std::abs(states(i, k));
            if (mag > best) {
                best = mag;
                pivot = i;
            }
        }
        if (best <= 0.0) continue;
        const Complex phase = std::conj(states(pivot, k)) / best;
        states.col(k) *= phase;
        states(pivot, k) = Complex(std::abs(states(pivot, k)), 0.0);
    }
}

}  // namespace detail

inline Spectrum eigendecompose(const ComplexMatrix& h) {
    const double scale = std::max(1.0, max_abs(h));
    if (!is_hermitian(h, 1e-12 * scale))
        throw ValidationError("eigendecompose: input matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigendecompose: eigensolver did not converge");
    Spectrum spec;
    spec.energies = solver.eigenvalues();  // Eigen returns them ascending
    spec.states = solver.eigenvectors();
    detail::gauge_fix(spec.states);
    return spec;
}

/// Greedy level matching by descending overlap magnitude. Entry k of the
/// returned permutation is the column of `cur` matched to column k of `prev`.
inline std::vector<int> match_levels(const Spectrum& prev, const Spectrum& cur) {
    const int d = prev.dimension();
    if (cur.dimension() != d)
        throw ValidationError("match_levels: spectra have different dimensions");
    struct Candidate {
        double overlap;
        int from, to;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(static_cast<size_t>(d) * d);
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < d; ++j) {
            const Complex o = prev.states.col(k).adjoint() * cur.states.col(j);
            candidates.push_back({std::norm(o), k, j});
        }
    std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
        if (a.overlap != b.overlap) return a.overlap > b.overlap;
        if (a.from != b.from) return a.from < b.from;
        return a.to < b.to;
    });
    std::vector<int> perm(d, -1);
    std::vector<bool> used(d, false);
    int assigned = 0;
    for (const Candidate& c : candidates) {
        if (assigned == d) break;
        if (perm[c.from] >= 0 || used[c.to]) continue;
        perm[c.from] = c.to;
        used[c.to] = true;
        ++assigned;
    }
    return perm;
}

}  // namespace diad
