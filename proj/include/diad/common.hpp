#pragma once

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace diad {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Base class for all library errors.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or interface misuse. CLI exit code 2.
class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Precondition violation on an operation input. CLI exit code 2.
class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& what) : Error(what) {}
};

/// Failure during a numerical computation. CLI exit code 3.
class NumericalError : public Error {
  public:
    explicit NumericalError(const std::string& what) : Error(what) {}
};

/// A level pair is too close to degenerate for a positive gap exponent.
class GapSingularityError : public NumericalError {
  public:
    GapSingularityError(int m, int n, double gap)
        : NumericalError("gap singularity between levels " + std::to_string(m) + " and " +
                         std::to_string(n) + " (gap = " + std::to_string(gap) + ")"),
          m(m), n(n), gap(gap) {}
    int m;
    int n;
    double gap;
};

class PulseGenerationError : public NumericalError {
  public:
    explicit PulseGenerationError(const std::string& what) : NumericalError(what) {}
};

class GeodesicError : public NumericalError {
  public:
    GeodesicError(const std::string& what, double tau)
        : NumericalError(what + " at tau = " + std::to_string(tau)), tau(tau) {}
    double tau;
};

class PropagationError : public NumericalError {
  public:
    explicit PropagationError(const std::string& what) : NumericalError(what) {}
};

inline double max_abs(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

/// Hermiticity to within `tol` in absolute entry difference.
inline bool is_hermitian(const ComplexMatrix& h, double tol = 1e-12) {
    if (h.rows() != h.cols()) return false;
    return max_abs(ComplexMatrix(h - h.adjoint())) <= tol;
}

}  // namespace diad
