#pragma once

#include "diad/common.hpp"
#include "diad/spectral.hpp"

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

namespace diad {

/// Exponent quadruple of the generalized tensor. (alpha, beta) weight the
/// adiabatic level pairs, (alpha_hat, beta_hat) the diabatic ones.
struct DiadExponents {
    double alpha = 2.0;
    double beta = 2.0;
    double alpha_hat = 0.0;
    double beta_hat = 0.0;

    double n_plus() const { return 0.5 * (alpha + beta); }
    double n_plus_hat() const { return 0.5 * (alpha_hat + beta_hat); }

    void validate() const {
        for (double v : {alpha, beta, alpha_hat, beta_hat})
            if (!std::isfinite(v)) throw ConfigError("diad exponents must be finite");
    }
};

/// Symmetric 0/1 matrix with zero diagonal selecting which level pairs are
/// traversed diabatically.
class TransitionMatrix {
  public:
    explicit TransitionMatrix(int dimension)
        : xi_(Eigen::MatrixXi::Zero(dimension, dimension)) {
        if (dimension < 1) throw ValidationError("TransitionMatrix: dimension must be positive");
    }

    static TransitionMatrix adiabatic(int dimension) { return TransitionMatrix(dimension); }

    /// Ones exactly on the requested symmetric pairs, zeros elsewhere.
    static TransitionMatrix with_pairs(int dimension,
                                       const std::vector<std::pair<int, int>>& pairs) {
        TransitionMatrix xi(dimension);
        for (const auto& [m, n] : pairs) xi.set_diabatic(m, n);
        return xi;
    }

    int dimension() const { return static_cast<int>(xi_.rows()); }

    bool diabatic(int m, int n) const {
        check_indices(m, n);
        return xi_(m, n) != 0;
    }

    void set_diabatic(int m, int n, bool value = true) {
        check_indices(m, n);
        if (m == n) throw ValidationError("TransitionMatrix: diagonal pairs are excluded");
        xi_(m, n) = xi_(n, m) = value ? 1 : 0;
    }

    const Eigen::MatrixXi& matrix() const { return xi_; }

  private:
    void check_indices(int m, int n) const {
        if (m < 0 || n < 0 || m >= dimension() || n >= dimension())
            throw ValidationError("TransitionMatrix: level index out of range");
    }
    Eigen::MatrixXi xi_;
};

struct DiadDiagnostics {
    int clamped_elements = 0;  // matrix elements lifted to the floor for negative exponents
};

namespace detail {

inline double energy_scale(const Spectrum& spec) {
    return std::max(1.0, spec.energies.cwiseAbs().maxCoeff());
}

/// Floor used when a negative power of a vanishing matrix element would
/// otherwise diverge.
inline double element_floor(const ComplexMatrix& dh) {
    return 1e-12 * dh.norm();
}

inline double clamped_magnitude(double mag, double floor, double exponent,
                                DiadDiagnostics* diag) {
    if (exponent < 0.0 && mag < floor) {
        if (diag) ++diag->clamped_elements;
        return floor;
    }
    return mag;
}

/// One ordered-pair term of the tensor for a (mu, nu) gradient pair:
/// Re[(A*B)^{b/2}] / |E_n - E_m|^a with A = <m|dH_mu|n>, B = <n|dH_nu|m>.
/// The product A*B is gauge invariant; for mu == nu it equals |A|^2, so the
/// term reduces to |A|^b / |dE|^a with no branch ambiguity.
inline double pair_term(const Spectrum& spec, const ComplexMatrix& m_mu,
                        const ComplexMatrix& m_nu, bool same_gradient, double floor_mu,
                        double floor_nu, int m, int n, double a, double b,
                        DiadDiagnostics* diag) {
    const double gap = std::abs(spec.energies[n] - spec.energies[m]);
    if (a > 0.0 && gap <= 1e-12 * energy_scale(spec))
        throw GapSingularityError(m, n, gap);

    double value;
    if (same_gradient) {
        const double mag = clamped_magnitude(std::abs(m_mu(m, n)), floor_mu, b, diag);
        value = std::pow(mag, b);
    } else {
        Complex amn = m_mu(m, n);
        Complex bnm = m_nu(n, m);
        const double mag_a = clamped_magnitude(std::abs(amn), floor_mu, b, diag);
        const double mag_b = clamped_magnitude(std::abs(bnm), floor_nu, b, diag);
        if (std::abs(amn) > 0.0) amn *= mag_a / std::abs(amn); else amn = mag_a;
        if (std::abs(bnm) > 0.0) bnm *= mag_b / std::abs(bnm); else bnm = mag_b;
        value = std::pow(amn * bnm, Complex(0.5 * b, 0.0)).real();
    }
    return value / std::pow(gap, a);
}

}  // namespace detail

/// Single component |<psi_m|dH|psi_n>|^b / |E_n - E_m|^a of the tensor.
inline double component(const Spectrum& spec, const ComplexMatrix& dh, int m, int n, double a,
                        double b, DiadDiagnostics* diag = nullptr) {
    const int d = spec.dimension();
    if (m < 0 || n < 0 || m >= d || n >= d)
        throw ValidationError("component: level index out of range");
    if (m == n) throw ValidationError("component: requires m != n");
    const Complex mel = spec.states.col(m).adjoint() * dh * spec.states.col(n);
    const double gap = std::abs(spec.energies[n] - spec.energies[m]);
    if (a > 0.0 && gap <= 1e-12 * detail::energy_scale(spec))
        throw GapSingularityError(m, n, gap);
    const double mag =
        detail::clamped_magnitude(std::abs(mel), detail::element_floor(dh), b, diag);
    return std::pow(mag, b) / std::pow(gap, a);
}

/// Quantum metric of level m:
/// g_{mu nu} = Re sum_{n != m} <m|dH_mu|n><n|dH_nu|m> / (E_n - E_m)^2.
inline RealMatrix quantum_metric(const Spectrum& spec, const std::vector<ComplexMatrix>& dh_list,
                                 int m) {
    const int d = spec.dimension();
    if (m < 0 || m >= d) throw ValidationError("quantum_metric: level index out of range");
    const int p = static_cast<int>(dh_list.size());
    std::vector<ComplexMatrix> melems;
    melems.reserve(p);
    for (const auto& dh : dh_list)
        melems.emplace_back(spec.states.adjoint() * dh * spec.states);

    RealMatrix g = RealMatrix::Zero(p, p);
    const double scale = detail::energy_scale(spec);
    for (int n = 0; n < d; ++n) {
        if (n == m) continue;
        const double gap = spec.energies[n] - spec.energies[m];
        if (std::abs(gap) <= 1e-12 * scale) throw GapSingularityError(m, n, std::abs(gap));
        const double denom = gap * gap;
        for (int mu = 0; mu < p; ++mu)
            for (int nu = 0; nu < p; ++nu)
                g(mu, nu) += (melems[mu](m, n) * melems[nu](n, m)).real() / denom;
    }
    return g;
}

/// Generalized tensor: the double sum over ordered level pairs with the
/// adiabatic exponents on xi = 0 pairs and the diabatic ones on xi = 1 pairs.
/// Each unordered pair therefore contributes twice; the overall factor is
/// absorbed by the pulse normalization. `levels`, when given, restricts the
/// outer sum.
inline RealMatrix diad_tensor(const Spectrum& spec, const std::vector<ComplexMatrix>& dh_list,
                              const DiadExponents& exps, const TransitionMatrix& xi,
                              DiadDiagnostics* diag = nullptr,
                              const std::vector<int>* levels = nullptr) {
    const int d = spec.dimension();
    if (xi.dimension() != d)
        throw ValidationError("diad_tensor: transition matrix dimension mismatch");
    const int p = static_cast<int>(dh_list.size());
    std::vector<ComplexMatrix> melems;
    std::vector<double> floors;
    melems.reserve(p);
    floors.reserve(p);
    for (const auto& dh : dh_list) {
        melems.emplace_back(spec.states.adjoint() * dh * spec.states);
        floors.push_back(detail::element_floor(dh));
    }

    std::vector<int> all_levels;
    if (!levels) {
        all_levels.resize(d);
        for (int i = 0; i < d; ++i) all_levels[i] = i;
        levels = &all_levels;
    }

    RealMatrix g = RealMatrix::Zero(p, p);
    for (int m : *levels) {
        if (m < 0 || m >= d) throw ValidationError("diad_tensor: level index out of range");
        for (int n = 0; n < d; ++n) {
            if (n == m) continue;
            const bool dia = xi.diabatic(m, n);
            const double a = dia ? exps.alpha_hat : exps.alpha;
            const double b = dia ? exps.beta_hat : exps.beta;
            for (int mu = 0; mu < p; ++mu)
                for (int nu = 0; nu < p; ++nu)
                    g(mu, nu) += detail::pair_term(spec, melems[mu], melems[nu], mu == nu,
                                                   floors[mu], floors[nu], m, n, a, b, diag);
        }
    }
    return g;
}

}  // namespace diad
