#pragma once

#include "diad/common.hpp"

#include <cmath>
#include <string>
#include <variant>

namespace diad {

/// Two-level avoided crossing H = z*sigma_z + x*sigma_x with control z.
struct LandauZener {
    double x = 1.0;  // transverse coupling; sets the energy unit
};

/// Five-level double-quantum-dot spin-to-charge model in the basis
/// {(2,0) singlet, |uu>, |ud>, |du>, |dd>}, all constants in units of t_c.
/// The control is the detuning between the dot chemical potentials.
struct DqdInit {
    double t_c = 1.0;      // tunnel coupling
    double u_tilde = 10.0; // effective Coulomb repulsion
    double e_z = 0.9;      // total Zeeman energy
    double de_z = 0.1;     // Zeeman splitting difference
    double de_x = 0.01;    // spin-flip coupling
};

/// Four-level orbital (x) valley bucket-brigade shuttling model.
/// delta_l/delta_r are the valley coupling magnitudes |Delta_L|, |Delta_R|;
/// the valley phases enter through the tunneling matrix elements.
struct BucketBrigade {
    double t_c = 0.1;
    double delta_l = 1.0;
    double delta_r = 5.0;
    double phi_l = 0.0;
    double phi_r = 0.0;
};

struct ModelSpec {
    std::variant<LandauZener, DqdInit, BucketBrigade> family;
    double control_start = 0.0;
    double control_end = 1.0;

    int dimension() const {
        struct V {
            int operator()(const LandauZener&) const { return 2; }
            int operator()(const DqdInit&) const { return 5; }
            int operator()(const BucketBrigade&) const { return 4; }
        };
        return std::visit(V{}, family);
    }

    std::string tag() const {
        struct V {
            std::string operator()(const LandauZener&) const { return "landau_zener"; }
            std::string operator()(const DqdInit&) const { return "dqd_init"; }
            std::string operator()(const BucketBrigade&) const { return "bucket_brigade"; }
        };
        return std::visit(V{}, family);
    }

    void validate() const {
        struct V {
            void operator()(const LandauZener& m) const {
                require_finite(m.x, "x");
                if (m.x <= 0.0) throw ConfigError("landau_zener: x must be positive");
            }
            void operator()(const DqdInit& m) const {
                require_finite(m.t_c, "t_c");
                require_finite(m.u_tilde, "u_tilde");
                require_finite(m.e_z, "e_z");
                require_finite(m.de_z, "de_z");
                require_finite(m.de_x, "de_x");
                if (m.t_c <= 0.0) throw ConfigError("dqd_init: t_c must be positive");
            }
            void operator()(const BucketBrigade& m) const {
                require_finite(m.t_c, "t_c");
                require_finite(m.delta_l, "delta_l");
                require_finite(m.delta_r, "delta_r");
                require_finite(m.phi_l, "phi_l");
                require_finite(m.phi_r, "phi_r");
                if (m.delta_l <= 0.0) throw ConfigError("bucket_brigade: delta_l must be positive");
                if (m.delta_r < 0.0) throw ConfigError("bucket_brigade: delta_r must be nonnegative");
                if (m.t_c < 0.0) throw ConfigError("bucket_brigade: t_c must be nonnegative");
            }
            static void require_finite(double v, const char* name) {
                if (!std::isfinite(v)) throw ConfigError(std::string("model constant not finite: ") + name);
            }
        };
        std::visit(V{}, family);
        if (!std::isfinite(control_start) || !std::isfinite(control_end))
            throw ConfigError("control_range endpoints must be finite");
        if (control_start == control_end)
            throw ConfigError("control_range endpoints must be distinct");
    }
};

struct ValleyCouplings {
    Complex ee, eg, ge, gg;
};

/// Tunnel couplings modified by the valley phases:
/// t_ee = t_gg* = (t_c/2)(1 + e^{i(phi_l - phi_r)}),
/// t_eg = -t_ge* = (t_c/2)(e^{i phi_l} - e^{i phi_r}).
inline ValleyCouplings valley_tunnelings(double t_c, double phi_l, double phi_r) {
    ValleyCouplings t;
    t.ee = 0.5 * t_c * (1.0 + std::polar(1.0, phi_l - phi_r));
    t.gg = std::conj(t.ee);
    t.eg = 0.5 * t_c * (std::polar(1.0, phi_l) - std::polar(1.0, phi_r));
    t.ge = -std::conj(t.eg);
    return t;
}

/// Hamiltonian of the model at the given control value.
inline ComplexMatrix hamiltonian(const ModelSpec& model, double control) {
    struct V {
        double c;
        ComplexMatrix operator()(const LandauZener& m) const {
            ComplexMatrix h(2, 2);
            h << c, m.x,
                 m.x, -c;
            return h;
        }
        ComplexMatrix operator()(const DqdInit& m) const {
            ComplexMatrix h = ComplexMatrix::Zero(5, 5);
            h(0, 0) = m.u_tilde - c;
            h(1, 1) = m.e_z;
            h(2, 2) = m.de_z;
            h(3, 3) = -m.de_z;
            h(4, 4) = -m.e_z;
            h(0, 2) = h(2, 0) = -m.t_c;
            h(0, 3) = h(3, 0) = m.t_c;
            h(1, 2) = h(2, 1) = m.de_x;
            h(1, 3) = h(3, 1) = -m.de_x;
            h(2, 4) = h(4, 2) = m.de_x;
            h(3, 4) = h(4, 3) = -m.de_x;
            return h;
        }
        ComplexMatrix operator()(const BucketBrigade& m) const {
            const ValleyCouplings t = valley_tunnelings(m.t_c, m.phi_l, m.phi_r);
            ComplexMatrix h = ComplexMatrix::Zero(4, 4);
            h(0, 0) = c + m.delta_l;
            h(1, 1) = c - m.delta_l;
            h(2, 2) = m.delta_r;
            h(3, 3) = -m.delta_r;
            h(0, 2) = t.ee;
            h(0, 3) = t.eg;
            h(1, 2) = t.ge;
            h(1, 3) = t.gg;
            h(2, 0) = std::conj(t.ee);
            h(3, 0) = std::conj(t.eg);
            h(2, 1) = std::conj(t.ge);
            h(3, 1) = std::conj(t.gg);
            return h;
        }
    };
    return std::visit(V{control}, model.family);
}

/// Analytic derivative of the Hamiltonian with respect to the control.
/// Constant in the control for all three families.
inline ComplexMatrix hamiltonian_gradient(const ModelSpec& model, double /*control*/ = 0.0) {
    struct V {
        ComplexMatrix operator()(const LandauZener&) const {
            ComplexMatrix g(2, 2);
            g << 1.0, 0.0,
                 0.0, -1.0;
            return g;
        }
        ComplexMatrix operator()(const DqdInit&) const {
            ComplexMatrix g = ComplexMatrix::Zero(5, 5);
            g(0, 0) = -1.0;
            return g;
        }
        ComplexMatrix operator()(const BucketBrigade&) const {
            ComplexMatrix g = ComplexMatrix::Zero(4, 4);
            g(0, 0) = 1.0;
            g(1, 1) = 1.0;
            return g;
        }
    };
    return std::visit(V{}, model.family);
}

}  // namespace diad
