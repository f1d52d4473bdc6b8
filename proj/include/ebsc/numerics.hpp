#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "ebsc/errors.hpp"

namespace ebsc {

// Pairwise (cascade) summation: deterministic tree independent of thread
// count, error O(log n) ulps instead of O(n).
inline double pairwise_sum(std::span<const double> xs) {
    const std::size_t n = xs.size();
    if (n == 0) return 0.0;
    if (n <= 8) {
        double s = 0.0;
        for (double x : xs) s += x;
        return s;
    }
    const std::size_t half = n / 2;
    return pairwise_sum(xs.subspan(0, half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_mean(std::span<const double> xs) {
    return xs.empty() ? 0.0 : pairwise_sum(xs) / static_cast<double>(xs.size());
}

// Composite trapezoid over uniformly spaced knot values.
inline double trapezoid(std::span<const double> values, double dt) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    std::vector<double> w(values.begin(), values.end());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return dt * pairwise_sum(w);
}

inline double sup_abs(std::span<const double> xs) {
    double m = 0.0;
    for (double x : xs) m = std::max(m, std::fabs(x));
    return m;
}

namespace la {

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

inline double asymmetry(const Eigen::MatrixXd& m) {
    const double scale = std::max(1.0, m.norm());
    return (m - m.transpose()).norm() / scale;
}

inline double min_eigenvalue(const Eigen::MatrixXd& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

// PSD up to the floor -1e-10 * (1 + ||M||).
inline bool is_psd(const Eigen::MatrixXd& sym) {
    return min_eigenvalue(sym) >= -1e-10 * (1.0 + sym.norm());
}

inline bool is_spd(const Eigen::MatrixXd& sym) {
    return min_eigenvalue(sym) > 0.0;
}

// Inverse of (I + M) with a condition guard; everything downstream of the
// Riccati layer funnels resolvent inversions through here.
inline Eigen::MatrixXd resolvent_inverse(const Eigen::MatrixXd& m, const std::string& origin) {
    const Eigen::MatrixXd a = Eigen::MatrixXd::Identity(m.rows(), m.cols()) + m;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
    const double rc = lu.rcond();
    if (!(rc > 1e-12))
        throw NumericalError(ErrorCode::SingularResolvent, origin,
                             "condition number of I + Theta*N exceeds 1e12");
    return lu.inverse();
}

// log det of an SPD matrix via Cholesky; throws NonSPD on failure.
inline double log_det_spd(const Eigen::MatrixXd& sym, const std::string& origin) {
    Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success)
        throw NumericalError(ErrorCode::NonSPD, origin, "matrix is not positive definite");
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

}  // namespace la

// Chunked parallel loop; fn(begin, end) on disjoint ranges. Results must not
// depend on the split, which holds for all users here (counter-based RNG,
// per-index writes).
inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn,
                         unsigned n_threads = 0) {
    if (n == 0) return;
    unsigned hw = n_threads ? n_threads : std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    hw = std::min<unsigned>(hw, 8);
    if (hw <= 1 || n < 256) {
        fn(0, n);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + hw - 1) / hw;
    for (unsigned t = 0; t < hw; ++t) {
        const std::size_t lo = t * chunk;
        if (lo >= n) break;
        const std::size_t hi = std::min(n, lo + chunk);
        pool.emplace_back(fn, lo, hi);
    }
    for (auto& th : pool) th.join();
}

}  // namespace ebsc
