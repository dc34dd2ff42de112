#pragma once

#include "rilab/core.hpp"
#include "rilab/geometry.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace rilab {

struct WorstCaseCoherence {
    double mu;
    Index first;  ///< lower column index of the maximizing pair
    Index second; ///< higher column index of the maximizing pair
};

/// max_{i != j} |<Phi_i, Phi_j>| / (||Phi_i|| ||Phi_j||), exact over all pairs.
/// Ties resolve to the lexicographically smallest pair.
template <typename Derived>
WorstCaseCoherence worst_case_coherence(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Index N = phi.cols();
    if (N < 2) throw ValidationError("coherence needs at least two columns");
    const Matrix<Scalar> gram = phi.adjoint() * phi;
    RVector norms(N);
    for (Index j = 0; j < N; ++j) norms(j) = std::sqrt(std::abs(gram(j, j)));
    WorstCaseCoherence best{-1.0, 0, 1};
    for (Index j = 1; j < N; ++j)
        for (Index i = 0; i < j; ++i) {
            const double denom = norms(i) * norms(j);
            const double c = denom > 0.0 ? std::abs(gram(i, j)) / denom : 0.0;
            if (c > best.mu || (c == best.mu && (i < best.first || (i == best.first && j < best.second))))
                best = {c, i, j};
        }
    return best;
}

/// (1/(N-1)) max_j' |sum_{j != j'} <Phi_j', Phi_j>|.
template <typename Derived>
double average_coherence(const Eigen::MatrixBase<Derived>& phi) {
    using Scalar = typename Derived::Scalar;
    const Index N = phi.cols();
    if (N < 2) throw ValidationError("average coherence needs at least two columns");
    const Vector<Scalar> total = phi.rowwise().sum();
    const Vector<Scalar> row_sums = phi.adjoint() * total;
    double best = 0.0;
    for (Index j = 0; j < N; ++j) {
        const Scalar off = row_sums(j) - Scalar(phi.col(j).squaredNorm());
        best = std::max(best, std::abs(off));
    }
    return best / static_cast<double>(N - 1);
}

/// Largest singular value by power iteration on the smaller Gram matrix (formed once).
/// Converged when ||G v - lambda v|| <= tol * lambda. Starts from the normalized all-ones
/// vector; if that start has not converged after half the cap, restarts once from a
/// shifted start.
template <typename Derived>
double spectral_norm(const Eigen::MatrixBase<Derived>& phi, double tol = 1e-10, int max_iterations = 100'000) {
    using Scalar = typename Derived::Scalar;
    const bool wide = phi.rows() < phi.cols();
    const Index dim = wide ? phi.rows() : phi.cols();
    if (dim == 0) return 0.0;
    Matrix<Scalar> gram = Matrix<Scalar>::Zero(dim, dim);
    if (wide) gram.template selfadjointView<Eigen::Lower>().rankUpdate(phi.derived());
    else gram.template selfadjointView<Eigen::Lower>().rankUpdate(phi.derived().adjoint());
    gram = gram.template selfadjointView<Eigen::Lower>();
    auto apply = [&](const Vector<Scalar>& v) -> Vector<Scalar> { return gram * v; };
    auto run = [&](Vector<Scalar> v, int budget, double& lambda) {
        v.normalize();
        for (int it = 0; it < budget; ++it) {
            Vector<Scalar> w = apply(v);
            lambda = std::real(v.dot(w));
            const double wn = w.norm();
            if (wn == 0.0) return false; // start vector in the null space
            if ((w - lambda * v).norm() <= tol * lambda) return true;
            v = w / wn;
        }
        return false;
    };
    if (phi.norm() == 0.0) return 0.0;
    double lambda = 0.0;
    if (run(Vector<Scalar>::Ones(dim), max_iterations / 2, lambda)) return std::sqrt(std::max(lambda, 0.0));
    Vector<Scalar> shifted(dim);
    for (Index i = 0; i < dim; ++i) shifted(i) = Scalar(1.0 + static_cast<double>(i) / static_cast<double>(dim));
    if (run(shifted, max_iterations - max_iterations / 2, lambda)) return std::sqrt(std::max(lambda, 0.0));
    throw NonConvergenceError("spectral norm power iteration", std::sqrt(std::max(lambda, 0.0)));
}

/// sqrt((N - m) / (m (N - 1))), a lower bound on the coherence of any m x N matrix.
double welch_lower_bound(Index m, Index N);

struct RicBound {
    double bound;  ///< mu (s - 1), clipped to 1
    bool vacuous;  ///< true when mu (s - 1) >= 1
};
RicBound ric_upper_from_mu(double mu, Index s);

/// Exact restricted isometry constant by enumerating every s-column submatrix.
/// Refuses when C(N, s) exceeds `max_subsets`.
template <typename Derived>
double ric_exhaustive(const Eigen::MatrixBase<Derived>& phi, Index s, double max_subsets = 1e6) {
    using Scalar = typename Derived::Scalar;
    const Index N = phi.cols();
    if (s < 1 || s > N) throw ValidationError("sparsity must be in [1, N]");
    double count = 1.0;
    for (Index k = 0; k < s; ++k) count = count * static_cast<double>(N - k) / static_cast<double>(k + 1);
    if (count > max_subsets) throw CombinatorialBlowupError(N, s, count);
    const Matrix<Scalar> gram = phi.adjoint() * phi;
    std::vector<Index> idx(static_cast<std::size_t>(s));
    for (Index k = 0; k < s; ++k) idx[static_cast<std::size_t>(k)] = k;
    double delta = 0.0;
    Matrix<Scalar> sub(s, s);
    for (;;) {
        for (Index a = 0; a < s; ++a)
            for (Index b = 0; b < s; ++b) sub(a, b) = gram(idx[a], idx[b]);
        Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> eig(sub, Eigen::EigenvaluesOnly);
        const auto& ev = eig.eigenvalues();
        delta = std::max({delta, ev(s - 1) - 1.0, 1.0 - ev(0)});
        Index k = s - 1;
        while (k >= 0 && idx[static_cast<std::size_t>(k)] == N - s + k) --k;
        if (k < 0) break;
        ++idx[static_cast<std::size_t>(k)];
        for (Index r = k + 1; r < s; ++r) idx[static_cast<std::size_t>(r)] = idx[static_cast<std::size_t>(r - 1)] + 1;
    }
    return delta;
}

/// 4 sqrt(ln N) max(sigma, 12 sqrt(2) mu). Natural logarithm.
double ost_threshold(Index N, double sigma, double mu);

struct CoherenceReport {
    Index rows = 0;
    Index cols = 0;
    double mu = 0.0;
    double nu = 0.0;
    double spectral_norm = 0.0;
    double welch_lower = 0.0;
    Index argmax_first = 0;
    Index argmax_second = 0;
};

template <typename Derived>
CoherenceReport coherence_report(const Eigen::MatrixBase<Derived>& phi) {
    CoherenceReport r;
    r.rows = phi.rows();
    r.cols = phi.cols();
    const auto wc = worst_case_coherence(phi);
    r.mu = wc.mu;
    r.argmax_first = wc.first;
    r.argmax_second = wc.second;
    r.nu = average_coherence(phi);
    r.spectral_norm = spectral_norm(phi);
    r.welch_lower = r.rows <= r.cols ? welch_lower_bound(r.rows, r.cols) : 0.0;
    return r;
}

// ---------------------------------------------------------------------------
// Theoretical predictors. All logarithms are natural logarithms.

enum class PredictMethod { OMP, OST, LassoRI, LassoMR, BPDN };

std::string to_string(PredictMethod method);

struct PredictionInputs {
    std::optional<double> mu;
    std::optional<double> nu;
    std::optional<double> sigma;
    std::optional<double> x_min;
    std::optional<double> spectral_norm;
    std::optional<double> epsilon;
    std::optional<double> K;
    std::optional<double> delta;
    std::optional<double> a;
    std::optional<double> t;
    std::optional<double> rho;
    std::optional<Index> n;
    std::optional<Index> p;
    std::optional<Index> N;
    std::optional<Index> s;
    std::optional<Index> m;
    // constants left symbolic in the theory; config-overridable
    double c0 = 1.0;
    double a0 = 1.0;
    double c1 = 1.0;
};

struct TheoryPrediction {
    PredictMethod method;
    Index sparsity_cap = 0;
    std::optional<double> threshold;          ///< OST threshold
    std::optional<double> x_min_requirement;  ///< X_min must exceed this
    std::optional<double> probability_lower_bound;
    bool vacuous = false;                     ///< probability bound <= 0
    bool premise_holds = true;                ///< every evaluated condition holds
    std::map<std::string, bool> conditions;
    std::map<std::string, double> parameters;
    std::string formula;
};

/// Throws MissingInputError naming the first absent required symbol.
TheoryPrediction predict(PredictMethod method, const PredictionInputs& inputs);

/// Smallest K with N^2 <= (delta/2) exp(K^2/2).
double mesh_constant_K(Index N, double delta);

/// max over distinct lattice separations of |E e^{i xi w dx/z0}| |E e^{i eta w dy/z0}| for sensor
/// coordinates uniform on the discrete aperture set. 0 for a single-point lattice.
double a_parameter(const ImagingGeometry& geometry);

/// Modulus of the expectation of exp(i xi w d spacing / z0), xi uniform on the sensor set,
/// for an integer lattice separation d.
double separation_expectation(const ImagingGeometry& geometry, int d);

/// Density bound of the scaled sensor separation (triangular density peak): 1 / rayleigh_ratio.
double density_bound_rho(const ImagingGeometry& geometry);

/// BPDN error constants for a given delta_2s < sqrt2 - 1:
/// ||X^ - X|| <= c_tail s^{-1/2} ||X - X_s||_1 + c_noise eps.
struct BpdnConstants {
    double c_tail;
    double c_noise;
};
BpdnConstants bpdn_error_constants(double delta_2s);

struct BoundFrequency {
    Index exceed = 0;
    double frequency = 0.0;
    double standard_error = 0.0;
    double threshold = 0.0;         ///< the bound that was tested
    double theoretical_failure = 0.0;
};

struct CoherenceBoundCheck {
    Index trials = 0;
    double a = 0.0;
    BoundFrequency mu;   ///< mu > a K sqrt2/sqrt p + 2K^2/sqrt(np); failure <= 2 delta
    BoundFrequency nu;   ///< nu > c/(np); failure <= 8N exp(-(c/2) sqrt((N-1)/np))
    BoundFrequency norm; ///< ||Phi||^2 >= 2N/(np); failure per the operator-norm lemma
    double nu_constant = 0.0;
    double mean_mu = 0.0;
    double mean_norm_squared = 0.0;
};

/// Builds `trials` independent paraxial point ensembles and tallies bound exceedances.
/// `nu_constant` <= 0 picks c such that the average-coherence failure bound equals delta.
CoherenceBoundCheck coherence_bound_check(const ImagingGeometry& geometry, Index n, Index p, double K, double delta,
                                          Index trials, std::uint64_t seed, double nu_constant = 0.0,
                                          unsigned threads = 0);

} // namespace rilab
