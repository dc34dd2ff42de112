#pragma once

#include "rilab/analysis.hpp"
#include "rilab/core.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

namespace rilab {

enum class Method { OST, OMP, Lasso, BPDN, SubspacePursuit };

std::string to_string(Method method);
Method parse_method(const std::string& name);

struct SolverConfig {
    int max_iterations = 20000;
    /// KKT tolerance for the Lasso; tightened to 1e-3 * lambda when that is smaller.
    double tolerance = 1e-6;
    /// Lasso multiplier; unset means 2 sqrt(2 ln N).
    std::optional<double> gamma;
    /// BPDN residual budget.
    std::optional<double> epsilon;
    /// Entries with |X_j| <= support_threshold * max|X| are zeroed and left out of the support.
    double support_threshold = 1e-8;
    /// Noiseless Lasso runs use lambda = ratio * ||Phi^* Y||_inf.
    double noiseless_lambda_ratio = 1e-2;
    int bpdn_max_steps = 40;
    /// BPDN stops once | ||Y - Phi X|| - eps | <= bpdn_rel_tol * ||Y||.
    double bpdn_rel_tol = 1e-6;
    /// Restrict the Lasso/BPDN unknown to real values.
    bool real_only = false;
    /// Subspace pursuit iteration cap.
    int sp_max_iterations = 100;
};

template <typename Scalar>
struct RecoveryResult {
    Vector<Scalar> estimate;
    Support support;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = true;
    Method method = Method::OST;
    /// Lasso only: max violation of the optimality conditions at the estimate.
    std::optional<double> kkt_residual;
    /// Penalty weight actually used (Lasso, BPDN).
    std::optional<double> lambda;
    /// OST only: the threshold that was applied.
    std::optional<double> threshold;
    /// Condition number of the final support submatrix, when a least-squares fit was made.
    std::optional<double> condition;
    std::string note;
};

double default_gamma(Index N);

namespace detail {

inline double modulus(double v) { return std::abs(v); }
inline double modulus(const Complex& v) { return std::abs(v); }

inline double unit_phase(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }
inline Complex unit_phase(const Complex& v) {
    const double a = std::abs(v);
    return a > 0.0 ? v / a : Complex(0.0);
}

template <typename Scalar>
Support support_of(const Vector<Scalar>& x) {
    Support s;
    for (Index j = 0; j < x.size(); ++j)
        if (x(j) != Scalar(0)) s.push_back(j);
    return s;
}

template <typename Derived>
Matrix<typename Derived::Scalar> columns(const Eigen::MatrixBase<Derived>& phi, const Support& support) {
    Matrix<typename Derived::Scalar> a(phi.rows(), static_cast<Index>(support.size()));
    for (std::size_t k = 0; k < support.size(); ++k) a.col(static_cast<Index>(k)) = phi.col(support[k]);
    return a;
}

/// Indices of the `count` largest entries of `v`, ties going to the lower index, returned sorted.
inline Support top_indices(const RVector& v, Index count) {
    std::vector<Index> order(static_cast<std::size_t>(v.size()));
    std::iota(order.begin(), order.end(), Index{0});
    count = std::min<Index>(count, v.size());
    std::partial_sort(order.begin(), order.begin() + count, order.end(), [&](Index a, Index b) {
        return v(a) > v(b) || (v(a) == v(b) && a < b);
    });
    Support s(order.begin(), order.begin() + count);
    std::sort(s.begin(), s.end());
    return s;
}

template <typename Scalar>
RVector abs_values(const Vector<Scalar>& v) {
    RVector out(v.size());
    for (Index j = 0; j < v.size(); ++j) out(j) = modulus(v(j));
    return out;
}

/// Least squares on the given columns; throws RankDeficientError when the columns are dependent.
template <typename Derived>
Vector<typename Derived::Scalar> strict_least_squares(const Eigen::MatrixBase<Derived>& phi,
                                                       const Vector<typename Derived::Scalar>& y,
                                                       const Support& support) {
    using Scalar = typename Derived::Scalar;
    if (support.empty()) return Vector<Scalar>();
    const Matrix<Scalar> a = columns(phi, support);
    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(a);
    qr.setThreshold(1e-12);
    if (qr.rank() < a.cols()) throw RankDeficientError(support);
    return qr.solve(y);
}

} // namespace detail

/// Least-squares fit of Y on the support columns, zeros elsewhere. The condition number of
/// the support submatrix is written to `condition` when given.
template <typename Derived>
Vector<typename Derived::Scalar> debias(const Eigen::MatrixBase<Derived>& phi,
                                        const Vector<typename Derived::Scalar>& y, const Support& support,
                                        double* condition = nullptr) {
    using Scalar = typename Derived::Scalar;
    const Index k = static_cast<Index>(support.size());
    if (k > phi.rows()) throw ValidationError("debias support larger than the number of measurements");
    Vector<Scalar> x = Vector<Scalar>::Zero(phi.cols());
    if (k == 0) {
        if (condition) *condition = 1.0;
        return x;
    }
    const Matrix<Scalar> a = detail::columns(phi, support);
    Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (condition) *condition = sv(k - 1) > 0.0 ? sv(0) / sv(k - 1) : std::numeric_limits<double>::infinity();
    const Vector<Scalar> coef = svd.solve(y);
    for (Index i = 0; i < k; ++i) x(support[static_cast<std::size_t>(i)]) = coef(i);
    return x;
}

namespace detail {

constexpr double kIllConditioned = 1e8;

template <typename Derived, typename Scalar>
void finish_result(const Eigen::MatrixBase<Derived>& phi, const Vector<Scalar>& y, RecoveryResult<Scalar>& r) {
    r.support = support_of(r.estimate);
    r.residual_norm = (y - phi * r.estimate).norm();
    if (r.condition && *r.condition > kIllConditioned) {
        if (!r.note.empty()) r.note += "; ";
        r.note += "ill-conditioned support submatrix";
    }
}

} // namespace detail

/// One-step thresholding: support {j : |(Phi^* Y)_j| > tau}, amplitudes by debiasing.
/// A support larger than m cannot be debiased; the correlation values are kept instead.
template <typename Derived>
RecoveryResult<typename Derived::Scalar> ost(const Eigen::MatrixBase<Derived>& phi,
                                             const Vector<typename Derived::Scalar>& y, double tau) {
    using Scalar = typename Derived::Scalar;
    if (!(tau >= 0.0)) throw ValidationError("threshold must be >= 0");
    const Vector<Scalar> z = phi.adjoint() * y;
    Support s;
    for (Index j = 0; j < z.size(); ++j)
        if (detail::modulus(z(j)) > tau) s.push_back(j);
    RecoveryResult<Scalar> r;
    r.method = Method::OST;
    r.threshold = tau;
    r.iterations = 1;
    if (static_cast<Index>(s.size()) > phi.rows()) {
        r.estimate = Vector<Scalar>::Zero(phi.cols());
        for (Index j : s) r.estimate(j) = z(j);
        r.note = "support larger than m; correlation values kept";
    } else {
        double cond = 1.0;
        r.estimate = debias(phi, y, s, &cond);
        r.condition = cond;
    }
    detail::finish_result(phi, y, r);
    return r;
}

/// Orthogonal matching pursuit with a least-squares refit after each selection. Stops when the
/// residual is <= epsilon, m columns are selected, or the residual is orthogonal to all columns.
template <typename Derived>
RecoveryResult<typename Derived::Scalar> omp(const Eigen::MatrixBase<Derived>& phi,
                                             const Vector<typename Derived::Scalar>& y, double epsilon) {
    using Scalar = typename Derived::Scalar;
    if (!(epsilon >= 0.0)) throw ValidationError("OMP stopping residual must be >= 0");
    const Index m = phi.rows(), N = phi.cols();
    RecoveryResult<Scalar> r;
    r.method = Method::OMP;
    Support selected;
    std::vector<char> used(static_cast<std::size_t>(N), 0);
    Vector<Scalar> residual = y;
    Vector<Scalar> coef;
    double rnorm = residual.norm();
    const Index cap = std::min(m, N);
    while (rnorm > epsilon && static_cast<Index>(selected.size()) < cap) {
        const Vector<Scalar> corr = phi.adjoint() * residual;
        Index best = -1;
        double best_val = 0.0;
        for (Index j = 0; j < N; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            const double v = detail::modulus(corr(j));
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        if (best < 0) {
            r.note = "residual orthogonal to the remaining columns";
            break;
        }
        used[static_cast<std::size_t>(best)] = 1;
        selected.push_back(best);
        Support sorted = selected;
        std::sort(sorted.begin(), sorted.end());
        coef = detail::strict_least_squares(phi, y, sorted);
        residual = y - detail::columns(phi, sorted) * coef;
        rnorm = residual.norm();
        ++r.iterations;
    }
    std::sort(selected.begin(), selected.end());
    r.estimate = Vector<Scalar>::Zero(N);
    for (std::size_t k = 0; k < selected.size(); ++k) r.estimate(selected[k]) = coef(static_cast<Index>(k));
    r.converged = rnorm <= epsilon;
    if (!selected.empty()) {
        double cond = 1.0;
        debias(phi, y, selected, &cond);
        r.condition = cond;
    }
    detail::finish_result(phi, y, r);
    return r;
}

// ---------------------------------------------------------------------------
// Lasso

struct LassoOptions {
    /// Squared spectral norm of Phi; computed when absent.
    std::optional<double> lipschitz;
    /// Initial point (warm start).
    std::optional<CVector> warm_start_complex;
    std::optional<RVector> warm_start_real;
};

template <typename Scalar>
double l1_norm(const Vector<Scalar>& x) {
    double s = 0.0;
    for (Index j = 0; j < x.size(); ++j) s += detail::modulus(x(j));
    return s;
}

/// 0.5 ||Y - Phi X||^2 + lambda ||X||_1 with the complex modulus as the l1 summand.
template <typename Derived>
double lasso_objective(const Eigen::MatrixBase<Derived>& phi, const Vector<typename Derived::Scalar>& y,
                       const Vector<typename Derived::Scalar>& x, double lambda) {
    return 0.5 * (y - phi * x).squaredNorm() + lambda * l1_norm(x);
}

/// Largest violation of the Lasso optimality conditions, g = Phi^*(Y - Phi X):
/// |g_j - lambda phase(X_j)| on the support, max(0, |g_j| - lambda) off it.
/// In real-only mode g is replaced by its real part.
template <typename Derived>
double lasso_kkt_residual(const Eigen::MatrixBase<Derived>& phi, const Vector<typename Derived::Scalar>& y,
                          const Vector<typename Derived::Scalar>& x, double lambda, bool real_only = false) {
    using Scalar = typename Derived::Scalar;
    Vector<Scalar> g = phi.adjoint() * (y - phi * x);
    if (real_only) g = g.real().template cast<Scalar>();
    double worst = 0.0;
    for (Index j = 0; j < x.size(); ++j) {
        const double v = x(j) != Scalar(0) ? detail::modulus(g(j) - lambda * detail::unit_phase(x(j)))
                                           : std::max(0.0, detail::modulus(g(j)) - lambda);
        worst = std::max(worst, v);
    }
    return worst;
}

namespace detail {

template <typename Scalar>
Scalar soft_threshold(const Scalar& v, double t) {
    const double a = modulus(v);
    return a > t ? v * ((a - t) / a) : Scalar(0);
}

template <typename Scalar>
Scalar restrict_real(const Scalar& v, bool real_only) {
    if constexpr (std::is_same_v<Scalar, Complex>) return real_only ? Scalar(v.real()) : v;
    else return v;
}

template <typename Scalar>
void zero_small(Vector<Scalar>& x, double rel) {
    double mx = 0.0;
    for (Index j = 0; j < x.size(); ++j) mx = std::max(mx, modulus(x(j)));
    const double cut = rel * mx;
    for (Index j = 0; j < x.size(); ++j)
        if (modulus(x(j)) <= cut) x(j) = Scalar(0);
}

/// Solves the optimality conditions on a fixed support exactly:
/// X_S = (A^*A)^{-1}(A^*Y - lambda phase(X_S)), iterated for the phase. Returns false
/// when the support is unusable (too large, singular, a coefficient vanishes or fails to settle).
template <typename Derived>
bool polish_on_support(const Eigen::MatrixBase<Derived>& phi, const Vector<typename Derived::Scalar>& y,
                       double lambda, bool real_only, Vector<typename Derived::Scalar>& x) {
    using Scalar = typename Derived::Scalar;
    const Support s = support_of(x);
    const Index k = static_cast<Index>(s.size());
    if (k == 0 || k > phi.rows()) return false;
    const Matrix<Scalar> a = columns(phi, s);
    Matrix<Scalar> gram = a.adjoint() * a;
    Vector<Scalar> rhs = a.adjoint() * y;
    if (real_only) {
        gram = gram.real().template cast<Scalar>();
        rhs = rhs.real().template cast<Scalar>();
    }
    Eigen::LDLT<Matrix<Scalar>> ldlt(gram);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const double dmin = ldlt.vectorD().real().minCoeff();
    if (!(dmin > 1e-12 * ldlt.vectorD().real().maxCoeff())) return false;
    Vector<Scalar> xs(k), ph(k);
    for (Index i = 0; i < k; ++i) xs(i) = x(s[static_cast<std::size_t>(i)]);
    bool settled = false;
    for (int it = 0; it < 100; ++it) {
        for (Index i = 0; i < k; ++i) {
            ph(i) = unit_phase(xs(i));
            if (ph(i) == Scalar(0)) return false;
        }
        const Vector<Scalar> next = ldlt.solve(rhs - lambda * ph);
        const double change = (next - xs).norm();
        xs = next;
        if (change <= 1e-14 * std::max(1.0, xs.norm())) {
            settled = true;
            break;
        }
    }
    if (!settled) return false;
    for (Index i = 0; i < k; ++i)
        if (modulus(xs(i)) == 0.0 || modulus(unit_phase(xs(i)) - ph(i)) > 1e-6) return false;
    x.setZero();
    for (Index i = 0; i < k; ++i) x(s[static_cast<std::size_t>(i)]) = xs(i);
    return true;
}

struct StageOutcome {
    int iterations = 0;
    double kkt = 0.0;
    bool converged = false;
};

/// Monotone FISTA with function-value restart for one penalty level, starting at x.
template <typename Derived>
StageOutcome mfista_stage(const Eigen::MatrixBase<Derived>& phi, const Vector<typename Derived::Scalar>& y,
                          double lambda, double lipschitz, double tolerance, int max_iterations, bool real_only,
                          double support_threshold, Vector<typename Derived::Scalar>& x) {
    using Scalar = typename Derived::Scalar;
    const double step = 1.0 / lipschitz;
    const int check_every = 10;
    Vector<Scalar> z = x, u(x.size());
    Vector<Scalar> phix = phi * x, phiz = phix, phiu;
    double fx = 0.5 * (y - phix).squaredNorm() + lambda * l1_norm(x);
    double t = 1.0;
    StageOutcome out;
    auto certify = [&]() {
        Vector<Scalar> trial = x;
        zero_small(trial, support_threshold);
        const double kkt = lasso_kkt_residual(phi, y, trial, lambda, real_only);
        if (kkt <= tolerance) {
            x = trial;
            out.kkt = kkt;
            return true;
        }
        if (polish_on_support(phi, y, lambda, real_only, trial)) {
            const double pk = lasso_kkt_residual(phi, y, trial, lambda, real_only);
            if (pk <= tolerance) {
                x = trial;
                out.kkt = pk;
                return true;
            }
        }
        out.kkt = kkt;
        return false;
    };
    for (int it = 1; it <= max_iterations; ++it) {
        const Vector<Scalar> grad = phi.adjoint() * (phiz - y);
        for (Index j = 0; j < x.size(); ++j)
            u(j) = soft_threshold(restrict_real(Scalar(z(j) - step * grad(j)), real_only), step * lambda);
        phiu = phi * u;
        const double fu = 0.5 * (y - phiu).squaredNorm() + lambda * l1_norm(u);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if (fu <= fx) {
            // momentum from the accepted point
            const double beta = (t - 1.0) / t_next;
            z = u + beta * (u - x);
            phiz = phiu + beta * (phiu - phix);
            x = u;
            phix = phiu;
            fx = fu;
            t = t_next;
        } else {
            // objective went up: keep x and restart the momentum
            z = x;
            phiz = phix;
            t = 1.0;
        }
        out.iterations = it;
        if (it % check_every == 0 && certify()) {
            out.converged = true;
            return out;
        }
    }
    out.converged = certify();
    return out;
}

} // namespace detail

/// min 0.5 ||Y - Phi Z||^2 + lambda ||Z||_1 by monotone accelerated proximal gradient with step
/// 1/L, L = ||Phi||^2. Small penalties are approached by continuation from lambda_max.
/// Converged when the KKT residual is <= config.tolerance; each stage also tries an exact
/// solve of the optimality conditions on the current support.
template <typename Derived>
RecoveryResult<typename Derived::Scalar> lasso_penalized(const Eigen::MatrixBase<Derived>& phi,
                                                         const Vector<typename Derived::Scalar>& y, double lambda,
                                                         const SolverConfig& config, const LassoOptions& options = {}) {
    using Scalar = typename Derived::Scalar;
    if (!(lambda >= 0.0)) throw ValidationError("Lasso penalty must be >= 0");
    const Index N = phi.cols();
    RecoveryResult<Scalar> r;
    r.method = Method::Lasso;
    r.lambda = lambda;
    Vector<Scalar> corr = phi.adjoint() * y;
    if (config.real_only) corr = corr.real().template cast<Scalar>();
    const double lambda_max = detail::abs_values(corr).maxCoeff();
    if (lambda >= lambda_max) {
        r.estimate = Vector<Scalar>::Zero(N);
        r.kkt_residual = lasso_kkt_residual(phi, y, r.estimate, lambda, config.real_only);
        r.converged = true;
        detail::finish_result(phi, y, r);
        return r;
    }
    double lipschitz = 0.0;
    if (options.lipschitz) lipschitz = *options.lipschitz;
    else {
        const double sn = spectral_norm(phi);
        lipschitz = sn * sn;
    }
    lipschitz *= 1.0 + 1e-9; // the power-iteration estimate approaches from below

    Vector<Scalar> x = Vector<Scalar>::Zero(N);
    if constexpr (std::is_same_v<Scalar, Complex>) {
        if (options.warm_start_complex) x = *options.warm_start_complex;
    } else {
        if (options.warm_start_real) x = *options.warm_start_real;
    }
    if (x.size() != N) throw ValidationError("warm start has the wrong length");

    std::vector<double> stages;
    if (!options.warm_start_complex && !options.warm_start_real) {
        for (double l = 0.2 * lambda_max; l > std::max(2.0 * lambda, 1e-6 * lambda_max); l *= 0.2) stages.push_back(l);
    }
    stages.push_back(lambda);
    // an absolute certificate is meaningless once lambda itself is below it
    const double final_tol = lambda > 0.0 ? std::min(config.tolerance, 1e-3 * lambda) : config.tolerance;
    int budget = config.max_iterations;
    detail::StageOutcome last;
    for (std::size_t k = 0; k < stages.size(); ++k) {
        const bool final_stage = k + 1 == stages.size();
        const double tol = final_stage ? final_tol : std::max(final_tol, 1e-3 * stages[k]);
        const int cap = final_stage ? budget : std::min(budget, std::max(50, config.max_iterations / 10));
        last = detail::mfista_stage(phi, y, stages[k], lipschitz, tol, cap, config.real_only,
                                    config.support_threshold, x);
        budget -= last.iterations;
        r.iterations += last.iterations;
        if (budget <= 0 && !final_stage) {
            last = detail::mfista_stage(phi, y, lambda, lipschitz, final_tol, 0, config.real_only,
                                        config.support_threshold, x);
            break;
        }
    }
    detail::zero_small(x, config.support_threshold);
    r.estimate = x;
    r.kkt_residual = lasso_kkt_residual(phi, y, x, lambda, config.real_only);
    r.converged = *r.kkt_residual <= final_tol;
    if (!r.converged) r.note = "iteration cap reached";
    detail::finish_result(phi, y, r);
    return r;
}

/// Lasso with lambda = gamma * sigma (gamma defaults to 2 sqrt(2 ln N) when not positive).
template <typename Derived>
RecoveryResult<typename Derived::Scalar> lasso(const Eigen::MatrixBase<Derived>& phi,
                                               const Vector<typename Derived::Scalar>& y, double gamma, double sigma,
                                               const SolverConfig& config, const LassoOptions& options = {}) {
    if (!(sigma >= 0.0)) throw ValidationError("sigma must be >= 0");
    if (!(gamma > 0.0)) gamma = default_gamma(phi.cols());
    return lasso_penalized(phi, y, gamma * sigma, config, options);
}

/// min ||Z||_1 subject to ||Y - Phi Z|| <= epsilon, by bisection in log(lambda) on the Lasso
/// path until the residual meets epsilon.
template <typename Derived>
RecoveryResult<typename Derived::Scalar> bpdn(const Eigen::MatrixBase<Derived>& phi,
                                              const Vector<typename Derived::Scalar>& y, double epsilon,
                                              const SolverConfig& config, const LassoOptions& options = {}) {
    using Scalar = typename Derived::Scalar;
    if (!(epsilon >= 0.0)) throw ValidationError("BPDN budget must be >= 0");
    const Index N = phi.cols();
    const double ynorm = y.norm();
    const double tol = config.bpdn_rel_tol * ynorm;
    RecoveryResult<Scalar> r;
    r.method = Method::BPDN;
    if (epsilon >= ynorm) {
        r.estimate = Vector<Scalar>::Zero(N);
        r.lambda = std::numeric_limits<double>::infinity();
        detail::finish_result(phi, y, r);
        r.method = Method::BPDN;
        return r;
    }
    // smallest achievable residual: distance from Y to the range of Phi
    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(phi.eval());
    const Vector<Scalar> ls = qr.solve(y);
    const double min_res = (y - phi * ls).norm();
    if (min_res > epsilon + tol) throw InfeasibleError(epsilon, min_res);

    LassoOptions opts = options;
    if (!opts.lipschitz) {
        const double sn = spectral_norm(phi);
        opts.lipschitz = sn * sn;
    }
    Vector<Scalar> corr = phi.adjoint() * y;
    if (config.real_only) corr = corr.real().template cast<Scalar>();
    const double lambda_max = detail::abs_values(corr).maxCoeff();

    if (epsilon <= tol) {
        // equality constrained: a full-column-rank system has a unique solution
        if (qr.rank() == N) {
            r.estimate = ls;
            if (config.real_only) r.estimate = r.estimate.real().template cast<Scalar>();
            r.converged = true;
            r.lambda = 0.0;
            detail::finish_result(phi, y, r);
            r.method = Method::BPDN;
            return r;
        }
    }

    auto solve = [&](double lambda, const Vector<Scalar>* warm) {
        LassoOptions o = opts;
        if (warm) {
            if constexpr (std::is_same_v<Scalar, Complex>) o.warm_start_complex = *warm;
            else o.warm_start_real = *warm;
        }
        return lasso_penalized(phi, y, lambda, config, o);
    };

    double lo = std::log(lambda_max * 1e-10), hi = std::log(lambda_max);
    RecoveryResult<Scalar> best;
    bool have_best = false;
    double lo_res = 0.0, hi_res = ynorm;
    int steps = 0, iterations = 0;
    for (; steps < config.bpdn_max_steps; ++steps) {
        const double mid = 0.5 * (lo + hi);
        RecoveryResult<Scalar> cur = solve(std::exp(mid), have_best ? &best.estimate : nullptr);
        iterations += cur.iterations;
        const double res = cur.residual_norm;
        if (res <= epsilon + tol) {
            best = cur; // feasible
            have_best = true;
            lo = mid;
            lo_res = res;
            if (res >= epsilon - tol) break;
        } else {
            hi = mid;
            hi_res = res;
            if (!have_best) best = cur;
        }
    }
    if (best.residual_norm > epsilon + tol) {
        // never reached the budget: finish at the smallest penalty and debias
        RecoveryResult<Scalar> cur = solve(std::exp(lo), nullptr);
        iterations += cur.iterations;
        double cond = 1.0;
        Vector<Scalar> refit = debias(phi, y, cur.support, &cond);
        if ((y - phi * refit).norm() > epsilon + tol)
            throw RootFindError(lo_res > 0.0 ? lo_res : cur.residual_norm, hi_res);
        best = cur;
        best.estimate = refit;
        best.condition = cond;
        best.note = "budget met by debiasing the smallest-penalty support";
    }
    r = best;
    r.method = Method::BPDN;
    r.iterations = iterations;
    r.converged = std::abs(r.residual_norm - epsilon) <= tol || r.residual_norm <= epsilon;
    if (steps == config.bpdn_max_steps && r.residual_norm < epsilon - tol) {
        if (!r.note.empty()) r.note += "; ";
        r.note += "bisection cap reached below the budget";
    }
    detail::finish_result(phi, y, r);
    return r;
}

/// Subspace pursuit (Dai and Milenkovic): keep an s-column estimate, merge the s best residual
/// correlations, refit, prune back to s, and stop once the residual no longer decreases.
/// The initial selection counts as iteration 1.
template <typename Derived>
RecoveryResult<typename Derived::Scalar> subspace_pursuit(const Eigen::MatrixBase<Derived>& phi,
                                                          const Vector<typename Derived::Scalar>& y, Index s,
                                                          int max_iterations = 100) {
    using Scalar = typename Derived::Scalar;
    const Index m = phi.rows(), N = phi.cols();
    if (s < 1 || s > m) throw ValidationError("subspace pursuit needs 1 <= s <= m");
    RecoveryResult<Scalar> r;
    r.method = Method::SubspacePursuit;
    auto fit = [&](const Support& t, Vector<Scalar>& coef) {
        coef = detail::strict_least_squares(phi, y, t);
        return Vector<Scalar>(y - detail::columns(phi, t) * coef);
    };
    Support t = detail::top_indices(detail::abs_values(Vector<Scalar>(phi.adjoint() * y)), s);
    Vector<Scalar> coef;
    Vector<Scalar> res = fit(t, coef);
    r.iterations = 1;
    r.converged = false;
    const double floor = 1e-12 * y.norm();
    while (r.iterations < max_iterations) {
        if (res.norm() <= floor) {
            r.converged = true;
            break;
        }
        const Support extra = detail::top_indices(detail::abs_values(Vector<Scalar>(phi.adjoint() * res)), s);
        Support merged;
        std::set_union(t.begin(), t.end(), extra.begin(), extra.end(), std::back_inserter(merged));
        if (static_cast<Index>(merged.size()) > m) merged.resize(static_cast<std::size_t>(m));
        Vector<Scalar> wide_coef;
        fit(merged, wide_coef);
        RVector mags = RVector::Zero(N);
        for (std::size_t k = 0; k < merged.size(); ++k) mags(merged[k]) = detail::modulus(wide_coef(static_cast<Index>(k)));
        // pruning only considers merged columns
        for (Index j = 0; j < N; ++j)
            if (!std::binary_search(merged.begin(), merged.end(), j)) mags(j) = -1.0;
        const Support next = detail::top_indices(mags, s);
        Vector<Scalar> next_coef;
        const Vector<Scalar> next_res = fit(next, next_coef);
        ++r.iterations;
        if (next_res.norm() >= res.norm()) {
            r.converged = true;
            break;
        }
        t = next;
        coef = next_coef;
        res = next_res;
    }
    r.estimate = Vector<Scalar>::Zero(N);
    for (std::size_t k = 0; k < t.size(); ++k) r.estimate(t[k]) = coef(static_cast<Index>(k));
    if (!r.converged) r.note = "iteration cap reached";
    double cond = 1.0;
    debias(phi, y, t, &cond);
    r.condition = cond;
    detail::finish_result(phi, y, r);
    return r;
}

struct SupportMetrics {
    bool exact = false;
    Index false_positives = 0;
    Index false_negatives = 0;
    /// ||X^ - X|| / ||X||; the absolute error when X = 0.
    double relative_l2_error = 0.0;
    /// s^{-1/2} ||X^ - X||, with s the true sparsity (absolute error when s = 0).
    double per_pixel_error = 0.0;
};

/// Compares a recovered support and estimate with the truth.
SupportMetrics support_metrics(const Support& truth_support, const CVector& truth, const Support& estimate_support,
                               const CVector& estimate);

} // namespace rilab
