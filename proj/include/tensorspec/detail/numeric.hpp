#pragma once

// Internal numeric plumbing: Eigen interop, SVD helpers, a damped
// Gauss-Newton polisher, seeded RNG and a deterministic parallel loop.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <random>
#include <thread>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "tensorspec/contract.hpp"
#include "tensorspec/tensor.hpp"

namespace tensorspec::detail {

inline Eigen::MatrixXd to_eigen(const Matrix& a)
{
    require_matrix(a, "matrix");
    return Eigen::Map<const Eigen::MatrixXd>(a.data().data(), static_cast<Eigen::Index>(a.rows()),
                                             static_cast<Eigen::Index>(a.cols()));
}

inline Matrix from_eigen(const Eigen::MatrixXd& a)
{
    std::vector<double> buf(a.data(), a.data() + a.size());
    return DenseTensor(Shape{static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(a.cols())},
                       std::move(buf));
}

inline Eigen::VectorXd to_eigen(const Vector& v)
{
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

struct LeftSvd {
    Eigen::MatrixXd u;        // left singular vectors, columns
    Eigen::VectorXd sigma;    // descending
};

inline LeftSvd left_svd(const Matrix& a)
{
    Eigen::BDCSVD<Eigen::MatrixXd> svd(to_eigen(a), Eigen::ComputeThinU);
    return {svd.matrixU(), svd.singularValues()};
}

inline double norm2(const Vector& v) { return std::sqrt(dot(v, v)); }

inline double norm_inf(const Vector& v)
{
    double m = 0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double norm_p(const Vector& v, double p)
{
    if (p == 2.0) return norm2(v);
    long double acc = 0;
    for (double x : v) acc += std::pow(static_cast<long double>(std::abs(x)), p);
    return static_cast<double>(std::pow(acc, 1.0L / p));
}

/// Scale to unit p-norm. Returns false for the zero vector (left unchanged).
inline bool normalize_p(Vector& v, double p)
{
    const double n = norm_p(v, p);
    if (!(n > 0) || !std::isfinite(n)) return false;
    for (auto& x : v) x /= n;
    return true;
}

/// Entrywise integer power.
inline Vector pow_entries(const Vector& v, std::size_t n)
{
    Vector out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        double p = 1;
        for (std::size_t k = 0; k < n; ++k) p *= v[i];
        out[i] = p;
    }
    return out;
}

inline double ipow(double x, std::size_t n)
{
    double p = 1;
    for (std::size_t k = 0; k < n; ++k) p *= x;
    return p;
}

using Rng = std::mt19937_64;

inline Vector random_uniform(Rng& rng, std::size_t n, double lo = -1.0, double hi = 1.0)
{
    std::uniform_real_distribution<double> dist(lo, hi);
    Vector v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline Vector random_unit(Rng& rng, std::size_t n)
{
    std::normal_distribution<double> dist;
    Vector v(n);
    do {
        for (auto& x : v) x = dist(rng);
    } while (!normalize_p(v, 2.0));
    return v;
}

/// Residual/Jacobian callback: fills F (size m) and J (m x n) at z.
using SystemFn = std::function<void(const Eigen::VectorXd& z, Eigen::VectorXd& f, Eigen::MatrixXd& j)>;

struct PolishResult {
    Eigen::VectorXd z;
    double defect;   // ||F(z)||_inf at exit
    int iterations;
};

/// Damped Gauss-Newton on a (possibly overdetermined) zero-residual system.
/// Steps are least-squares solutions of J d = -F with backtracking on ||F||.
inline PolishResult gauss_newton(const SystemFn& fn, Eigen::VectorXd z, int max_iters = 50,
                                 double tol = 1e-15)
{
    Eigen::VectorXd f, fn_trial;
    Eigen::MatrixXd j, j_trial;
    fn(z, f, j);
    double defect = f.lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < max_iters && defect > tol; ++it) {
        Eigen::VectorXd step = j.completeOrthogonalDecomposition().solve(-f);
        if (!step.allFinite()) break;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
            Eigen::VectorXd trial = z + alpha * step;
            fn(trial, fn_trial, j_trial);
            if (!fn_trial.allFinite()) continue;
            if (fn_trial.norm() < f.norm()) {
                z = std::move(trial);
                f = fn_trial;
                j = j_trial;
                accepted = true;
                break;
            }
        }
        const double next = f.lpNorm<Eigen::Infinity>();
        if (!accepted || alpha * step.lpNorm<Eigen::Infinity>() <= 1e-17 * (1 + z.lpNorm<Eigen::Infinity>())) {
            defect = next;
            break;
        }
        defect = next;
    }
    return {std::move(z), defect, it};
}

/// Run body(k) for k in [0, n) on up to `threads` threads. Each k must write
/// only to its own slot, so results do not depend on scheduling.
inline void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body)
{
    threads = std::max<std::size_t>(1, std::min(threads, n));
    if (threads == 1) {
        for (std::size_t k = 0; k < n; ++k) body(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t k; (k = next.fetch_add(1)) < n;) body(k);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

/// Lexicographic comparison of two vectors of doubles.
inline bool lex_less(const Vector& a, const Vector& b)
{
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

} // namespace tensorspec::detail
