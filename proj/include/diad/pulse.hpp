#pragma once

#include "diad/common.hpp"
#include "diad/metric.hpp"
#include "diad/models.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace diad {

/// Fritsch-Carlson monotone cubic interpolant. Monotone input data yields a
/// monotone interpolant; evaluation outside the abscissa range is clamped to
/// the end values.
class MonotoneCubic {
  public:
    MonotoneCubic() = default;

    MonotoneCubic(RealVector x, RealVector y) : x_(std::move(x)), y_(std::move(y)) {
        const int n = static_cast<int>(x_.size());
        if (n < 2 || y_.size() != n)
            throw ValidationError("MonotoneCubic: need at least two matching samples");
        for (int i = 0; i + 1 < n; ++i)
            if (!(x_[i + 1] > x_[i]))
                throw ValidationError("MonotoneCubic: abscissae must be strictly increasing");

        slopes_ = RealVector::Zero(n);
        if (n == 2) {
            slopes_[0] = slopes_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
            return;
        }
        RealVector h(n - 1), delta(n - 1);
        for (int i = 0; i < n - 1; ++i) {
            h[i] = x_[i + 1] - x_[i];
            delta[i] = (y_[i + 1] - y_[i]) / h[i];
        }
        for (int i = 1; i < n - 1; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                slopes_[i] = 0.0;
            } else {
                const double w1 = 2.0 * h[i] + h[i - 1];
                const double w2 = h[i] + 2.0 * h[i - 1];
                slopes_[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
            }
        }
        slopes_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        slopes_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    double operator()(double t) const {
        const int n = static_cast<int>(x_.size());
        if (t <= x_[0]) return y_[0];
        if (t >= x_[n - 1]) return y_[n - 1];
        const double* begin = x_.data();
        int i = static_cast<int>(std::upper_bound(begin, begin + n, t) - begin) - 1;
        i = std::min(i, n - 2);
        const double h = x_[i + 1] - x_[i];
        const double u = (t - x_[i]) / h;
        const double h00 = (1.0 + 2.0 * u) * (1.0 - u) * (1.0 - u);
        const double h10 = u * (1.0 - u) * (1.0 - u);
        const double h01 = u * u * (3.0 - 2.0 * u);
        const double h11 = u * u * (u - 1.0);
        return h00 * y_[i] + h * h10 * slopes_[i] + h01 * y_[i + 1] + h * h11 * slopes_[i + 1];
    }

    double derivative(double t) const {
        const int n = static_cast<int>(x_.size());
        t = std::clamp(t, x_[0], x_[n - 1]);
        const double* begin = x_.data();
        int i = static_cast<int>(std::upper_bound(begin, begin + n, t) - begin) - 1;
        i = std::clamp(i, 0, n - 2);
        const double h = x_[i + 1] - x_[i];
        const double u = (t - x_[i]) / h;
        const double d00 = 6.0 * u * (u - 1.0) / h;
        const double d10 = (1.0 - u) * (1.0 - 3.0 * u);
        const double d01 = -d00;
        const double d11 = u * (3.0 * u - 2.0);
        return d00 * y_[i] + d10 * slopes_[i] + d01 * y_[i + 1] + d11 * slopes_[i + 1];
    }

  private:
    // Non-centered three-point estimate at the boundary, limited to keep
    // monotonicity (shape-preserving end conditions).
    static double edge_slope(double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0)
            m = 0.0;
        else if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0))
            m = 3.0 * d0;
        return m;
    }

    RealVector x_, y_, slopes_;
};

/// Scalar metric along the control axis.
using MetricScalarField = std::function<double(double)>;

/// Cumulative arc length s(control) of the metric over the control range.
struct ArcLengthTable {
    RealVector control;     // uniform samples from start to end
    RealVector arc_length;  // s[0] = 0, strictly increasing

    double length() const { return arc_length[arc_length.size() - 1]; }
};

/// Control-parameter trajectory on normalized time tau in [0, 1].
struct PulseProfile {
    RealVector tau;      // uniform, tau[0] = 0, tau[N] = 1
    RealVector control;  // strictly monotone between the range endpoints
    double length = 0.0; // metric path length L
    MonotoneCubic inverse;  // control as a function of arc length s in [0, L]

    /// Evaluate the pulse at normalized time: control = s^{-1}(tau L). The
    /// inversion knots are uniform in the control, so the evaluation stays
    /// accurate where the pulse moves fastest.
    double at(double t) const { return inverse(t * length); }

    /// Adiabaticity delta = L / t_f.
    double delta_for(double t_f) const {
        if (!(t_f > 0.0)) throw ValidationError("delta_for: t_f must be positive");
        return length / t_f;
    }
};

/// Pulse resampled on physical time [0, t_f].
struct TimeDomainPulse {
    RealVector times;
    RealVector control;
    double t_f = 0.0;

    /// Piecewise-linear evaluation, clamped to the end values.
    double value_at(double t) const {
        const int n = static_cast<int>(times.size());
        if (t <= times[0]) return control[0];
        if (t >= times[n - 1]) return control[n - 1];
        const double* begin = times.data();
        int i = static_cast<int>(std::upper_bound(begin, begin + n, t) - begin) - 1;
        i = std::min(i, n - 2);
        const double u = (t - times[i]) / (times[i + 1] - times[i]);
        return control[i] + u * (control[i + 1] - control[i]);
    }
};

inline ArcLengthTable arc_length_table_from_field(const MetricScalarField& metric, double start,
                                                  double end, int grid_points) {
    if (grid_points < 64)
        throw ValidationError("arc_length_table: grid_points must be at least 64");
    const int n = grid_points;
    ArcLengthTable table;
    table.control.resize(n + 1);
    table.arc_length.resize(n + 1);
    const double step = (end - start) / n;
    RealVector integrand(n + 1);
    for (int i = 0; i <= n; ++i) {
        table.control[i] = start + i * step;
        const double g = metric(table.control[i]);
        if (!std::isfinite(g) || g < 0.0)
            throw PulseGenerationError("arc_length_table: metric not finite and nonnegative at control = " +
                                       std::to_string(table.control[i]));
        integrand[i] = std::sqrt(g);
    }
    table.arc_length[0] = 0.0;
    const double width = std::abs(step);
    for (int i = 0; i < n; ++i) {
        table.arc_length[i + 1] =
            table.arc_length[i] + 0.5 * (integrand[i] + integrand[i + 1]) * width;
        if (!(table.arc_length[i + 1] > table.arc_length[i]))
            throw PulseGenerationError("arc_length_table: arc length is not strictly increasing "
                                       "(metric vanishes on a grid cell)");
    }
    if (!std::isfinite(table.length()))
        throw PulseGenerationError("arc_length_table: path length is not finite");
    return table;
}

/// The (control, control) component of the generalized tensor for a
/// single-parameter model.
inline MetricScalarField diad_metric_field(const ModelSpec& model, const DiadExponents& exps,
                                           const TransitionMatrix& xi) {
    return [model, exps, xi](double control) {
        const Spectrum spec = eigendecompose(hamiltonian(model, control));
        const std::vector<ComplexMatrix> dh = {hamiltonian_gradient(model, control)};
        return diad_tensor(spec, dh, exps, xi)(0, 0);
    };
}

inline ArcLengthTable arc_length_table(const ModelSpec& model, const DiadExponents& exps,
                                       const TransitionMatrix& xi, int grid_points) {
    return arc_length_table_from_field(diad_metric_field(model, exps, xi), model.control_start,
                                       model.control_end, grid_points);
}

namespace detail {

inline PulseProfile invert_arc_length(const ArcLengthTable& table) {
    const int n = static_cast<int>(table.control.size()) - 1;
    const double length = table.length();
    PulseProfile profile;
    profile.inverse = MonotoneCubic(table.arc_length, table.control);
    profile.tau.resize(n + 1);
    profile.control.resize(n + 1);
    profile.length = length;
    for (int i = 0; i <= n; ++i) {
        profile.tau[i] = static_cast<double>(i) / n;
        profile.control[i] = profile.inverse(profile.tau[i] * length);
    }
    profile.control[0] = table.control[0];
    profile.control[n] = table.control[n];
    return profile;
}

}  // namespace detail

/// Solves G(eps) (d eps/d tau)^2 = L^2 by quadrature of the arc length and
/// monotone inversion: eps(tau) = s^{-1}(tau L).
inline PulseProfile generate_pulse_from_field(const MetricScalarField& metric, double start,
                                              double end, int grid_points) {
    return detail::invert_arc_length(arc_length_table_from_field(metric, start, end, grid_points));
}

inline PulseProfile generate_pulse(const ModelSpec& model, const DiadExponents& exps,
                                   const TransitionMatrix& xi, int grid_points = 2048) {
    return detail::invert_arc_length(arc_length_table(model, exps, xi, grid_points));
}

/// Rescale the normalized profile onto physical time [0, t_f].
inline TimeDomainPulse time_domain(const PulseProfile& profile, double t_f, int samples) {
    if (!(t_f > 0.0)) throw ValidationError("time_domain: t_f must be positive");
    if (samples < 2) throw ValidationError("time_domain: need at least two samples");
    TimeDomainPulse pulse;
    pulse.t_f = t_f;
    pulse.times.resize(samples);
    pulse.control.resize(samples);
    for (int i = 0; i < samples; ++i) {
        const double tau = static_cast<double>(i) / (samples - 1);
        pulse.times[i] = tau * t_f;
        pulse.control[i] = profile.at(tau);
    }
    pulse.control[0] = profile.control[0];
    pulse.control[samples - 1] = profile.control[profile.control.size() - 1];
    return pulse;
}

/// Matrix-valued metric over a few-parameter control space.
using MetricField = std::function<RealMatrix(const RealVector&)>;

struct GeodesicPath {
    RealVector tau;         // nodes in [0, 1]
    RealMatrix positions;   // (steps+1) x P
    RealMatrix velocities;  // (steps+1) x P
    RealVector speed;       // g_{mu nu} xdot^mu xdot^nu at the nodes
};

namespace detail {

struct ChristoffelContext {
    const MetricField& metric;
    int p;

    RealMatrix metric_checked(const RealVector& x, double tau) const {
        const RealMatrix g = metric(x);
        if (g.rows() != p || g.cols() != p)
            throw GeodesicError("geodesic_integrate: metric dimension mismatch", tau);
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(g);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (!(lo > 0.0) || hi / lo >= 1e12)
            throw GeodesicError("geodesic_integrate: metric singular or badly conditioned", tau);
        return g;
    }

    /// Geodesic acceleration -Gamma^mu_{ab} v^a v^b with the Christoffel
    /// symbols from centered finite differences of the metric.
    RealVector acceleration(const RealVector& x, const RealVector& v, double tau) const {
        const RealMatrix g = metric_checked(x, tau);
        const double h = 1e-5 * std::max(1.0, x.cwiseAbs().maxCoeff());
        std::vector<RealMatrix> dg(p);
        for (int nu = 0; nu < p; ++nu) {
            RealVector xp = x, xm = x;
            xp[nu] += h;
            xm[nu] -= h;
            dg[nu] = (metric(xp) - metric(xm)) / (2.0 * h);
        }
        const RealMatrix ginv = g.inverse();
        RealVector acc = RealVector::Zero(p);
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b) {
                const double vv = v[a] * v[b];
                if (vv == 0.0) continue;
                for (int mu = 0; mu < p; ++mu) {
                    double gamma = 0.0;
                    for (int nu = 0; nu < p; ++nu)
                        gamma += ginv(mu, nu) * (dg[b](nu, a) + dg[a](nu, b) - dg[nu](a, b));
                    acc[mu] -= 0.5 * gamma * vv;
                }
            }
        return acc;
    }
};

}  // namespace detail

/// Fourth-order Runge-Kutta integration of the geodesic equation over
/// tau in [0, 1] from initial position x0 and velocity v0.
inline GeodesicPath geodesic_integrate(const MetricField& metric, const RealVector& x0,
                                       const RealVector& v0, int steps) {
    if (steps < 1) throw ValidationError("geodesic_integrate: steps must be positive");
    const int p = static_cast<int>(x0.size());
    if (v0.size() != p)
        throw ValidationError("geodesic_integrate: position/velocity dimension mismatch");
    detail::ChristoffelContext ctx{metric, p};

    GeodesicPath path;
    path.tau.resize(steps + 1);
    path.positions.resize(steps + 1, p);
    path.velocities.resize(steps + 1, p);
    path.speed.resize(steps + 1);

    RealVector x = x0, v = v0;
    const double dt = 1.0 / steps;
    for (int k = 0; k <= steps; ++k) {
        const double tau = static_cast<double>(k) / steps;
        path.tau[k] = tau;
        path.positions.row(k) = x;
        path.velocities.row(k) = v;
        path.speed[k] = v.dot(ctx.metric_checked(x, tau) * v);
        if (k == steps) break;

        const RealVector k1x = v;
        const RealVector k1v = ctx.acceleration(x, v, tau);
        const RealVector k2x = v + 0.5 * dt * k1v;
        const RealVector k2v = ctx.acceleration(x + 0.5 * dt * k1x, k2x, tau);
        const RealVector k3x = v + 0.5 * dt * k2v;
        const RealVector k3v = ctx.acceleration(x + 0.5 * dt * k2x, k3x, tau);
        const RealVector k4x = v + dt * k3v;
        const RealVector k4v = ctx.acceleration(x + dt * k3x, k4x, tau);
        x += dt / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
    }
    return path;
}

}  // namespace diad
