#pragma once

#include "rilab/core.hpp"
#include "rilab/random.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace rilab::test {

inline CMatrix gaussian_matrix(Index m, Index N, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    CMatrix a(m, N);
    for (Index j = 0; j < N; ++j)
        for (Index i = 0; i < m; ++i) a(i, j) = Complex(g(rng), g(rng));
    return a;
}

inline CMatrix unit_columns(Index m, Index N, std::uint64_t seed) {
    CMatrix a = gaussian_matrix(m, N, seed);
    for (Index j = 0; j < N; ++j) a.col(j).normalize();
    return a;
}

inline CMatrix unitary(Index m, std::uint64_t seed) {
    Eigen::HouseholderQR<CMatrix> qr(gaussian_matrix(m, m, seed));
    return qr.householderQ() * CMatrix::Identity(m, m);
}

/// Unitary DFT matrix of size m.
inline CMatrix dft(Index m) {
    CMatrix f(m, m);
    for (Index r = 0; r < m; ++r)
        for (Index c = 0; c < m; ++c)
            f(r, c) = std::polar(1.0 / std::sqrt(static_cast<double>(m)), -kTwoPi * static_cast<double>(r * c) / m);
    return f;
}

/// [I | first `extra` DFT columns], columns randomly permuted and rephased; coherence 1/sqrt(m).
inline CMatrix spike_fourier(Index m, Index extra, std::uint64_t seed) {
    CMatrix base(m, m + extra);
    base.leftCols(m) = CMatrix::Identity(m, m);
    base.rightCols(extra) = dft(m).leftCols(extra);
    Rng rng(seed);
    std::vector<Index> perm(static_cast<std::size_t>(m + extra));
    for (Index j = 0; j < m + extra; ++j) perm[static_cast<std::size_t>(j)] = j;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> ph(0.0, kTwoPi);
    CMatrix out(m, m + extra);
    for (Index j = 0; j < m + extra; ++j) out.col(j) = base.col(perm[static_cast<std::size_t>(j)]) * std::polar(1.0, ph(rng));
    return out;
}

/// Brute-force pairwise coherence with explicit loops.
inline double brute_mu(const CMatrix& a) {
    double best = 0.0;
    for (Index i = 0; i < a.cols(); ++i)
        for (Index j = i + 1; j < a.cols(); ++j) {
            Complex dot = 0.0;
            double ni = 0.0, nj = 0.0;
            for (Index r = 0; r < a.rows(); ++r) {
                dot += std::conj(a(r, i)) * a(r, j);
                ni += std::norm(a(r, i));
                nj += std::norm(a(r, j));
            }
            best = std::max(best, std::abs(dot) / std::sqrt(ni * nj));
        }
    return best;
}

/// Gram-matrix row-sum oracle for the average coherence.
inline double brute_nu(const CMatrix& a) {
    const CMatrix g = a.adjoint() * a;
    const Index N = a.cols();
    double best = 0.0;
    for (Index j = 0; j < N; ++j) {
        Complex s = 0.0;
        for (Index i = 0; i < N; ++i)
            if (i != j) s += g(j, i);
        best = std::max(best, std::abs(s));
    }
    return best / static_cast<double>(N - 1);
}

/// Largest singular value from a full eigendecomposition of the smaller Gram matrix.
inline double eig_norm(const CMatrix& a) {
    const CMatrix g = a.rows() < a.cols() ? CMatrix(a * a.adjoint()) : CMatrix(a.adjoint() * a);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
    return std::sqrt(es.eigenvalues().maxCoeff());
}

inline CVector sparse_vector(Index N, const Support& support, std::uint64_t seed, bool real = false) {
    Rng rng(seed);
    std::uniform_real_distribution<double> amp(1.0, 2.0), ph(0.0, kTwoPi);
    CVector x = CVector::Zero(N);
    for (Index j : support) x(j) = real ? Complex(amp(rng), 0.0) : std::polar(amp(rng), ph(rng));
    return x;
}

inline Support random_support(Index N, Index s, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<Index> idx(static_cast<std::size_t>(N));
    for (Index j = 0; j < N; ++j) idx[static_cast<std::size_t>(j)] = j;
    std::shuffle(idx.begin(), idx.end(), rng);
    Support s_(idx.begin(), idx.begin() + s);
    std::sort(s_.begin(), s_.end());
    return s_;
}

inline CVector vector_of_norm(Index m, double norm, std::uint64_t seed) {
    CVector e = gaussian_matrix(m, 1, seed).col(0);
    return e * (norm / e.norm());
}

/// Accelerated projected gradient on min 0.5||y - A z||^2 + lambda sum t_j s.t. |z_j| <= t_j.
inline double epigraph_oracle(const CMatrix& a, const CVector& y, double lambda, int iterations = 200000) {
    const Index N = a.cols();
    Eigen::JacobiSVD<CMatrix> svd(a);
    const double L = svd.singularValues()(0) * svd.singularValues()(0);
    CVector z = CVector::Zero(N), zp = z, vz = z;
    RVector t = RVector::Zero(N), tp = t, vt = t;
    auto project = [](Complex& zz, double& tt) {
        const double r = std::abs(zz);
        if (r <= tt) return;
        if (r <= -tt) {
            zz = 0.0;
            tt = 0.0;
            return;
        }
        const double s = 0.5 * (r + tt);
        zz *= s / r;
        tt = s;
    };
    for (int k = 1; k <= iterations; ++k) {
        const CVector g = a.adjoint() * (a * vz - y);
        zp = z;
        tp = t;
        z = vz - g / L;
        t = vt.array() - lambda / L;
        for (Index j = 0; j < N; ++j) project(z(j), t(j));
        const double beta = (k - 1.0) / (k + 2.0);
        vz = z + beta * (z - zp);
        vt = t + beta * (t - tp);
    }
    return 0.5 * (y - a * z).squaredNorm() + lambda * t.sum();
}

/// Exhaustive best-subset search: the s-subset with the smallest least-squares residual (first wins ties).
inline Support best_subset(const CMatrix& a, const CVector& y, Index s) {
    const Index N = a.cols();
    Support best, cur;
    double best_res = std::numeric_limits<double>::infinity();
    std::function<void(Index)> rec = [&](Index start) {
        if (static_cast<Index>(cur.size()) == s) {
            CMatrix sub(a.rows(), s);
            for (Index k = 0; k < s; ++k) sub.col(k) = a.col(cur[k]);
            const CVector c = sub.colPivHouseholderQr().solve(y);
            const double res = (y - sub * c).norm();
            if (res < best_res - 1e-12) {
                best_res = res;
                best = cur;
            }
            return;
        }
        for (Index j = start; j < N; ++j) {
            cur.push_back(j);
            rec(j + 1);
            cur.pop_back();
        }
    };
    rec(0);
    return best;
}

} // namespace rilab::test
