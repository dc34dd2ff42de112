#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace rilab {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using CVector = Vector<Complex>;
using CMatrix = Matrix<Complex>;
using RVector = Vector<Real>;
using RMatrix = Matrix<Real>;

/// Sorted, duplicate-free list of column indices (0-based).
using Support = std::vector<Index>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors. Everything thrown by the library derives from rilab::Error.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad configuration or argument values; the CLI maps these to exit code 2.
class ValidationError : public Error {
public:
    using Error::Error;
};

class CoincidentPointsError : public Error {
public:
    CoincidentPointsError() : Error("green function evaluated at coincident points") {}
};

class NormalizationRiskError : public Error {
public:
    NormalizationRiskError(Index sensor, double ratio)
        : Error("sensor " + std::to_string(sensor) + " violates the pixel-gain normalizability condition (ratio " +
                std::to_string(ratio) + " >= 1)"),
          sensor_(sensor), ratio_(ratio) {}
    Index sensor() const { return sensor_; }
    double ratio() const { return ratio_; }

private:
    Index sensor_;
    double ratio_;
};

class DimensionOverflowError : public Error {
public:
    DimensionOverflowError(Index rows, Index cols, Index cap)
        : Error("sensing matrix " + std::to_string(rows) + "x" + std::to_string(cols) + " exceeds the entry cap " +
                std::to_string(cap)) {}
};

class MissingInputError : public Error {
public:
    explicit MissingInputError(std::string symbol)
        : Error("missing input: " + symbol), symbol_(std::move(symbol)) {}
    const std::string& symbol() const { return symbol_; }

private:
    std::string symbol_;
};

class MissingReferenceError : public Error {
public:
    MissingReferenceError() : Error("relative noise model needs a reference data vector") {}
};

class CombinatorialBlowupError : public Error {
public:
    CombinatorialBlowupError(Index n, Index s, double count)
        : Error("C(" + std::to_string(n) + "," + std::to_string(s) + ") = " + std::to_string(count) +
                " subsets exceeds the enumeration guard") {}
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, double last_value)
        : Error(what + " did not converge (last value " + std::to_string(last_value) + ")"), last_(last_value) {}
    double last_value() const { return last_; }

private:
    double last_;
};

class RankDeficientError : public Error {
public:
    explicit RankDeficientError(Support columns)
        : Error("rank-deficient least-squares refit on columns {" + join(columns) + "}"), columns_(std::move(columns)) {}
    const Support& columns() const { return columns_; }

private:
    static std::string join(const Support& s) {
        std::string out;
        for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
        return out;
    }
    Support columns_;
};

class InfeasibleError : public Error {
public:
    InfeasibleError(double epsilon, double min_residual)
        : Error("residual budget " + std::to_string(epsilon) + " is below the least-squares residual " +
                std::to_string(min_residual)) {}
};

class RootFindError : public Error {
public:
    RootFindError(double low_residual, double high_residual)
        : Error("pareto root-finding failed; bracket residuals " + std::to_string(low_residual) + " .. " +
                std::to_string(high_residual)),
          low_(low_residual), high_(high_residual) {}
    double low_residual() const { return low_; }
    double high_residual() const { return high_; }

private:
    double low_, high_;
};

class IoError : public Error {
public:
    using Error::Error;
};

class HeaderMismatchError : public IoError {
public:
    using IoError::IoError;
};

class ImageError : public IoError {
public:
    using IoError::IoError;
};

} // namespace rilab
