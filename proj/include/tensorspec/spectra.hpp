#pragma once

// Generalized eigenpairs and singular value tuples of real tensors.
//
// Mode-o eigenpairs contract x on every mode except o:
//   Z:  t •(all but o) x = λ x,          ||x||_2 = 1
//   H:  t •(all but o) x = λ x^{O-1},    x^{n} the entrywise power
// Singular tuples solve, for every mode o,
//   l2: t •(all but o) (x_1..x_O) = σ x_o,          ||x_o||_2 = 1
//   lO: t •(all but o) (x_1..x_O) = σ x_o^{O-1},    ||x_o||_O = 1
//
// Finding eigen- or singular values of order-3 tensors is NP-hard in
// general. The solvers here are multi-start local methods: exhaustive only
// for 2-dimensional modes (grid path), best effort otherwise.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tensorspec/contract.hpp"
#include "tensorspec/detail/numeric.hpp"
#include "tensorspec/error.hpp"
#include "tensorspec/tensor.hpp"

namespace tensorspec {

enum class EigenVariant { z, h };
enum class SingularVariant { l2, lO };

inline std::string to_string(EigenVariant v) { return v == EigenVariant::z ? "z" : "h"; }
inline std::string to_string(SingularVariant v) { return v == SingularVariant::l2 ? "l2" : "lO"; }

struct EigenPair {
    EigenVariant variant = EigenVariant::z;
    std::size_t mode = 1;
    double lambda = 0;
    Vector x;
    double residual = 0;
    bool converged = true;
};

struct SingularTuple {
    SingularVariant variant = SingularVariant::l2;
    double sigma = 0;
    std::vector<Vector> xs;
    double residual = 0;
    bool converged = true;

    /// Exponent of the normalizing norm: 2, or the tensor order.
    double p() const { return variant == SingularVariant::l2 ? 2.0 : static_cast<double>(xs.size()); }
};

struct EigenOptions {
    double tol = 1e-10;          // residual acceptance threshold
    std::size_t max_iters = 1000;
    std::uint64_t seed = 0;
    std::size_t starts = 32;
    std::size_t grid = 2048;     // θ samples on the 2-dimensional path
    std::size_t threads = 1;
    double dedup_tol = 1e-8;
};

struct SingularOptions {
    double tol = 1e-10;
    std::size_t max_iters = 1000;
    std::uint64_t seed = 0;
    std::size_t starts = 32;
    std::size_t threads = 1;
    double dedup_tol = 1e-8;
    bool canonical = true;       // report σ >= 0 with sign-normalized vectors
};

struct SearchStats {
    std::size_t starts_run = 0;
    std::size_t restarts = 0;    // starts abandoned on a zero iterate
};

// ---------------------------------------------------------------------------
// Residuals

namespace detail {

inline void require_cubical(const DenseTensor& t)
{
    require<ShapeError>(t.shape().is_cubical(), "eigenpairs need a cubical tensor");
    require<ShapeError>(t.order() >= 2, "eigenpairs need order >= 2");
}

/// Right-hand-side vector: x for Z, x^{O-1} for H.
inline Vector eigen_rhs(EigenVariant v, const Vector& x, std::size_t order)
{
    return v == EigenVariant::z ? x : pow_entries(x, order - 1);
}

inline Vector singular_rhs(SingularVariant v, const Vector& x, std::size_t order)
{
    return v == SingularVariant::l2 ? x : pow_entries(x, order - 1);
}

} // namespace detail

/// ∞-norm defect of the mode-`mode` eigen equation for (lambda, x).
inline double eig_defect(const DenseTensor& t, EigenVariant variant, std::size_t mode, double lambda,
                         const Vector& x)
{
    detail::require_cubical(t);
    t.shape().check_mode(mode);
    detail::require<ShapeError>(x.size() == t.dim(1), "eigenvector length does not match tensor");
    const auto f = contract_all_but_same(t, mode, x);
    const auto h = detail::eigen_rhs(variant, x, t.order());
    double d = 0;
    for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - lambda * h[i]));
    return d;
}

inline double eig_residual(const DenseTensor& t, const EigenPair& pair)
{
    return eig_defect(t, pair.variant, pair.mode, pair.lambda, pair.x);
}

inline double singular_residual(const DenseTensor& t, const SingularTuple& tuple)
{
    detail::require<ShapeError>(tuple.xs.size() == t.order(), "singular tuple needs one vector per mode");
    for (std::size_t o = 1; o <= t.order(); ++o)
        detail::require<ShapeError>(tuple.xs[o - 1].size() == t.dim(o),
                                    "singular vector length does not match mode " + std::to_string(o));
    double d = 0;
    for (std::size_t o = 1; o <= t.order(); ++o) {
        const auto f = contract_all_but_slots(t, o, tuple.xs);
        const auto h = detail::singular_rhs(tuple.variant, tuple.xs[o - 1], t.order());
        for (std::size_t i = 0; i < f.size(); ++i) d = std::max(d, std::abs(f[i] - tuple.sigma * h[i]));
    }
    return d;
}

// ---------------------------------------------------------------------------
// Equivalence orbits

/// Rescale x by `t_scale`: Z gives (t^{O-2} λ, t x), H gives (λ, t x).
/// The defect scales exactly by |t|^{O-1}; the stored residual follows.
inline EigenPair eig_orbit(const EigenPair& pair, double t_scale, std::size_t order)
{
    detail::require(t_scale != 0.0 && std::isfinite(t_scale), "orbit scale must be nonzero");
    detail::require(order >= 2, "orbit needs order >= 2");
    EigenPair out = pair;
    for (auto& v : out.x) v *= t_scale;
    if (pair.variant == EigenVariant::z) out.lambda = pair.lambda * detail::ipow(t_scale, order - 2);
    out.residual = pair.residual * std::pow(std::abs(t_scale), static_cast<double>(order - 1));
    return out;
}

/// Same as above, with the residual re-evaluated against `t`.
inline EigenPair eig_orbit(const DenseTensor& t, const EigenPair& pair, double t_scale)
{
    auto out = eig_orbit(pair, t_scale, t.order());
    out.residual = eig_residual(t, out);
    return out;
}

/// Scale every vector of a singular tuple by `t`.
struct OrbitScale {
    double t;
};

/// Flip the sign of each x_o whose mask entry is set.
struct OrbitFlip {
    std::vector<bool> mask;
};

using SingularOrbitOp = std::variant<OrbitScale, OrbitFlip>;

/// Apply one equivalence operation. l2: scaling multiplies σ by t^{O-2};
/// flipping an odd number of vectors negates σ. lO: scaling leaves σ
/// unchanged; sign flips are only valid for even O.
inline SingularTuple singular_orbit(const SingularTuple& tuple, const SingularOrbitOp& op)
{
    const std::size_t order = tuple.xs.size();
    detail::require(order >= 1, "empty singular tuple");
    SingularTuple out = tuple;
    if (const auto* s = std::get_if<OrbitScale>(&op)) {
        detail::require(s->t != 0.0 && std::isfinite(s->t), "orbit scale must be nonzero");
        for (auto& x : out.xs)
            for (auto& v : x) v *= s->t;
        if (tuple.variant == SingularVariant::l2 && order >= 2)
            out.sigma = tuple.sigma * detail::ipow(s->t, order - 2);
        out.residual = tuple.residual * std::pow(std::abs(s->t), static_cast<double>(order - 1));
        return out;
    }
    const auto& mask = std::get<OrbitFlip>(op).mask;
    detail::require<ShapeError>(mask.size() == order, "flip mask needs one entry per mode");
    detail::require(tuple.variant == SingularVariant::l2 || order % 2 == 0,
                    "lO singular tuples of odd order have no sign indeterminacy");
    std::size_t flips = 0;
    for (std::size_t o = 0; o < order; ++o)
        if (mask[o]) {
            ++flips;
            for (auto& v : out.xs[o]) v = -v;
        }
    if (flips % 2 == 1) out.sigma = -tuple.sigma;
    return out;
}

// ---------------------------------------------------------------------------
// Newton polishing

namespace detail {

/// Jacobian of x -> t •(all but mode) x.
inline Eigen::MatrixXd same_vector_jacobian(const DenseTensor& t, std::size_t mode, const Vector& x)
{
    const auto m = static_cast<Eigen::Index>(t.dim(1));
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(m, m);
    const std::vector<Vector> slots(t.order(), x);
    for (std::size_t k = 1; k <= t.order(); ++k)
        if (k != mode) j += to_eigen(contract_all_but_two(t, mode, k, slots));
    return j;
}

inline double eigen_lambda_estimate(const DenseTensor& t, EigenVariant variant, std::size_t mode,
                                    const Vector& x)
{
    const auto f = contract_all_but_same(t, mode, x);
    const auto h = eigen_rhs(variant, x, t.order());
    const double hh = dot(h, h);
    return hh > 0 ? dot(f, h) / hh : 0.0;
}

/// Polish (x, λ) on the system [f(x) - λ h(x); (x·x - 1)/2] = 0.
inline EigenPair polish_eigen(const DenseTensor& t, std::size_t mode, EigenVariant variant, Vector x,
                              double lambda)
{
    const auto m = static_cast<Eigen::Index>(x.size());
    const std::size_t order = t.order();
    SystemFn fn = [&](const Eigen::VectorXd& z, Eigen::VectorXd& f, Eigen::MatrixXd& j) {
        const Vector xv(z.data(), z.data() + m);
        const double lam = z[m];
        const auto fx = contract_all_but_same(t, mode, xv);
        const auto h = eigen_rhs(variant, xv, order);
        f.resize(m + 1);
        j.setZero(m + 1, m + 1);
        for (Eigen::Index i = 0; i < m; ++i) f[i] = fx[i] - lam * h[i];
        f[m] = 0.5 * (dot(xv, xv) - 1.0);
        j.topLeftCorner(m, m) = same_vector_jacobian(t, mode, xv);
        for (Eigen::Index i = 0; i < m; ++i) {
            const double dh = variant == EigenVariant::z
                                  ? 1.0
                                  : static_cast<double>(order - 1) * ipow(xv[i], order - 2);
            j(i, i) -= lam * dh;
            j(i, m) = -h[i];
            j(m, i) = xv[i];
        }
    };
    Eigen::VectorXd z0(m + 1);
    for (Eigen::Index i = 0; i < m; ++i) z0[i] = x[i];
    z0[m] = lambda;
    const auto res = gauss_newton(fn, z0);

    EigenPair pair;
    pair.variant = variant;
    pair.mode = mode;
    pair.x.assign(res.z.data(), res.z.data() + m);
    if (!normalize_p(pair.x, 2.0) || !res.z.allFinite()) {
        pair.x = x;
        pair.residual = std::numeric_limits<double>::infinity();
        pair.converged = false;
        return pair;
    }
    pair.lambda = eigen_lambda_estimate(t, variant, mode, pair.x);
    pair.residual = eig_residual(t, pair);
    return pair;
}

/// Polish a singular tuple on the stacked per-mode equations plus one
/// normalization equation per mode.
inline SingularTuple polish_singular(const DenseTensor& t, SingularVariant variant,
                                     std::vector<Vector> xs, double sigma)
{
    const std::size_t order = t.order();
    std::vector<Eigen::Index> start(order + 1, 0);
    for (std::size_t o = 0; o < order; ++o) start[o + 1] = start[o] + static_cast<Eigen::Index>(t.dim(o + 1));
    const Eigen::Index n = start[order];
    const auto rows = n + static_cast<Eigen::Index>(order);
    const double pnorm = variant == SingularVariant::l2 ? 2.0 : static_cast<double>(order);

    auto unpack = [&](const Eigen::VectorXd& z) {
        std::vector<Vector> v(order);
        for (std::size_t o = 0; o < order; ++o) v[o].assign(z.data() + start[o], z.data() + start[o + 1]);
        return v;
    };

    SystemFn fn = [&](const Eigen::VectorXd& z, Eigen::VectorXd& f, Eigen::MatrixXd& j) {
        const auto v = unpack(z);
        const double sig = z[n];
        f.resize(rows);
        j.setZero(rows, n + 1);
        for (std::size_t o = 1; o <= order; ++o) {
            const auto fo = contract_all_but_slots(t, o, v);
            const auto h = singular_rhs(variant, v[o - 1], order);
            const auto r0 = start[o - 1];
            const auto mo = static_cast<Eigen::Index>(fo.size());
            for (Eigen::Index i = 0; i < mo; ++i) {
                f[r0 + i] = fo[i] - sig * h[i];
                j(r0 + i, n) = -h[i];
                const double dh = variant == SingularVariant::l2
                                      ? 1.0
                                      : static_cast<double>(order - 1) * ipow(v[o - 1][i], order - 2);
                j(r0 + i, r0 + i) -= sig * dh;
            }
            for (std::size_t k = 1; k <= order; ++k) {
                if (k == o) continue;
                j.block(r0, start[k - 1], mo, static_cast<Eigen::Index>(t.dim(k))) +=
                    to_eigen(contract_all_but_two(t, o, k, v));
            }
            // normalization row: (||x_o||_p^p - 1) / p
            const auto nr = n + static_cast<Eigen::Index>(o - 1);
            long double acc = 0;
            for (Eigen::Index i = 0; i < mo; ++i) {
                const double xi = v[o - 1][i];
                acc += std::pow(static_cast<long double>(std::abs(xi)), pnorm);
                j(nr, r0 + i) = (xi < 0 ? -1.0 : 1.0) * std::pow(std::abs(xi), pnorm - 1.0);
            }
            f[nr] = static_cast<double>((acc - 1.0L) / pnorm);
        }
    };

    Eigen::VectorXd z0(n + 1);
    for (std::size_t o = 0; o < order; ++o)
        for (std::size_t i = 0; i < xs[o].size(); ++i) z0[start[o] + static_cast<Eigen::Index>(i)] = xs[o][i];
    z0[n] = sigma;
    const auto res = gauss_newton(fn, z0);

    SingularTuple out;
    out.variant = variant;
    out.xs = unpack(res.z);
    out.sigma = res.z[n];
    bool ok = res.z.allFinite();
    for (auto& x : out.xs) ok = ok && normalize_p(x, pnorm);
    if (!ok) {
        out.xs = std::move(xs);
        out.sigma = sigma;
        out.residual = std::numeric_limits<double>::infinity();
        out.converged = false;
        return out;
    }
    out.residual = singular_residual(t, out);
    return out;
}

inline bool same_pair(const EigenPair& a, const EigenPair& b, double tol)
{
    if (std::abs(a.lambda - b.lambda) > tol) return false;
    for (std::size_t i = 0; i < a.x.size(); ++i)
        if (std::abs(a.x[i] - b.x[i]) > tol) return false;
    return true;
}

inline bool same_tuple(const SingularTuple& a, const SingularTuple& b, double tol)
{
    if (std::abs(a.sigma - b.sigma) > tol) return false;
    for (std::size_t o = 0; o < a.xs.size(); ++o)
        for (std::size_t i = 0; i < a.xs[o].size(); ++i)
            if (std::abs(a.xs[o][i] - b.xs[o][i]) > tol) return false;
    return true;
}

/// Sort by decreasing |value|, then lexicographically by vector, then by
/// decreasing value.
inline void sort_pairs(std::vector<EigenPair>& pairs)
{
    std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) {
        const double ma = std::abs(a.lambda), mb = std::abs(b.lambda);
        if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) return ma > mb;
        if (a.x != b.x) return lex_less(a.x, b.x);
        return a.lambda > b.lambda;
    });
}

inline Vector concat(const std::vector<Vector>& xs)
{
    Vector out;
    for (const auto& x : xs) out.insert(out.end(), x.begin(), x.end());
    return out;
}

inline void sort_tuples(std::vector<SingularTuple>& tuples)
{
    std::stable_sort(tuples.begin(), tuples.end(), [](const SingularTuple& a, const SingularTuple& b) {
        const double ma = std::abs(a.sigma), mb = std::abs(b.sigma);
        if (std::abs(ma - mb) > 1e-12 * std::max(1.0, std::max(ma, mb))) return ma > mb;
        const auto ca = concat(a.xs), cb = concat(b.xs);
        if (ca != cb) return lex_less(ca, cb);
        return a.sigma > b.sigma;
    });
}

// -- 2-dimensional grid path ------------------------------------------------

inline std::vector<EigenPair> eigen_grid_candidates(const DenseTensor& t, std::size_t mode,
                                                    EigenVariant variant, const EigenOptions& opts)
{
    const std::size_t order = t.order();
    auto point = [](double th) { return Vector{std::cos(th), std::sin(th)}; };
    // Cross product of f(x) and h(x): zero exactly when they are parallel.
    auto defect = [&](double th) {
        const auto x = point(th);
        const auto f = contract_all_but_same(t, mode, x);
        const auto h = eigen_rhs(variant, x, order);
        return f[0] * h[1] - f[1] * h[0];
    };

    const std::size_t n = std::max<std::size_t>(opts.grid, 8);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = defect(step * static_cast<double>(i));

    std::vector<double> roots;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t next = (i + 1) % n, prev = (i + n - 1) % n;
        const double a = step * static_cast<double>(i);
        if (g[i] == 0.0) {
            roots.push_back(a);
            continue;
        }
        if (g[i] * g[next] < 0) {
            // safeguarded Newton inside the bracket [lo, hi]
            double lo = a, hi = a + step, glo = g[i];
            double th = 0.5 * (lo + hi);
            for (int it = 0; it < 50; ++it) {
                const double gt = defect(th);
                if (gt == 0.0) break;
                if ((gt < 0) == (glo < 0)) {
                    lo = th;
                    glo = gt;
                } else {
                    hi = th;
                }
                const double hstep = 1e-7;
                const double dg = (defect(th + hstep) - defect(th - hstep)) / (2 * hstep);
                double nt = dg != 0.0 ? th - gt / dg : 0.5 * (lo + hi);
                if (!(nt > lo && nt < hi)) nt = 0.5 * (lo + hi);
                const bool done = std::abs(nt - th) < 1e-13;
                th = nt;
                if (done) break;
            }
            roots.push_back(th);
        } else if (std::abs(g[i]) <= std::abs(g[prev]) && std::abs(g[i]) <= std::abs(g[next])) {
            // touching zero without a sign change (even-multiplicity root)
            roots.push_back(a);
        }
    }

    std::vector<EigenPair> out;
    out.reserve(roots.size());
    for (double th : roots) {
        const auto x = point(th);
        out.push_back(polish_eigen(t, mode, variant, x, eigen_lambda_estimate(t, variant, mode, x)));
    }
    return out;
}

// -- power-iteration path ---------------------------------------------------

inline Vector leading_left_vector(const DenseTensor& t, std::size_t mode)
{
    const auto svd = left_svd(unfold(t, mode));
    Vector v(svd.u.rows());
    for (Eigen::Index i = 0; i < svd.u.rows(); ++i) v[i] = svd.u(i, 0);
    if (!normalize_p(v, 2.0)) v.assign(v.size(), 0.0), v[0] = 1.0;
    return v;
}

enum class EigenStartKind { ascent, descent, newton };

inline EigenPair eigen_power_start(const DenseTensor& t, std::size_t mode, EigenVariant variant,
                                   Vector x, EigenStartKind kind, bool symmetric, bool nonnegative,
                                   double shift, const EigenOptions& opts)
{
    const std::size_t order = t.order();
    if (kind != EigenStartKind::newton) {
        const bool nqz = variant == EigenVariant::h && nonnegative && kind == EigenStartKind::ascent;
        if (nqz)
            for (auto& v : x) v = std::abs(v) + 1e-3;
        double alpha = symmetric ? shift : 0.0;
        if (kind == EigenStartKind::descent) alpha = -shift;
        for (std::size_t it = 0; it < opts.max_iters; ++it) {
            auto f = contract_all_but_same(t, mode, x);
            if (nqz) {
                // positive (O-1)-th roots of a nonnegative map
                for (auto& v : f) v = std::pow(std::max(v, 0.0), 1.0 / static_cast<double>(order - 1));
            } else {
                for (std::size_t i = 0; i < f.size(); ++i) f[i] += alpha * x[i];
                if (alpha < 0)
                    for (auto& v : f) v = -v;
            }
            if (!normalize_p(f, 2.0)) break;
            double change = 0;
            for (std::size_t i = 0; i < f.size(); ++i) change = std::max(change, std::abs(f[i] - x[i]));
            x = std::move(f);
            if (change < 1e-14) break;
        }
    }
    return polish_eigen(t, mode, variant, x, eigen_lambda_estimate(t, variant, mode, x));
}

inline std::vector<EigenPair> eigen_power_candidates(const DenseTensor& t, std::size_t mode,
                                                     EigenVariant variant, const EigenOptions& opts)
{
    const std::size_t m = t.dim(1);
    const bool symmetric = symmetry_defect(t) <= 1e-12 * (1.0 + max_abs(t));
    const bool nonnegative = std::all_of(t.data().begin(), t.data().end(), [](double v) { return v >= 0; });
    double abs_sum = 0;
    for (double v : t.data()) abs_sum += std::abs(v);
    const double shift = 1.0 + static_cast<double>(t.order() - 1) * abs_sum;

    struct Task {
        Vector x;
        EigenStartKind kind;
    };
    std::vector<Task> tasks;
    const auto lead = leading_left_vector(t, mode);
    tasks.push_back({lead, EigenStartKind::ascent});
    tasks.push_back({lead, EigenStartKind::descent});
    for (std::size_t s = 0; s < opts.starts; ++s) {
        Rng rng(opts.seed + s);
        const auto kind = static_cast<EigenStartKind>(s % 3);
        tasks.push_back({random_unit(rng, m), kind});
    }
    std::vector<EigenPair> out(tasks.size());
    parallel_for(tasks.size(), opts.threads, [&](std::size_t k) {
        out[k] = eigen_power_start(t, mode, variant, tasks[k].x, tasks[k].kind, symmetric, nonnegative,
                                   shift, opts);
    });
    return out;
}

inline std::vector<EigenPair> finalize_pairs(const DenseTensor& t, std::vector<EigenPair> candidates,
                                             const EigenOptions& opts)
{
    std::vector<EigenPair> accepted;
    const double snap = 64 * std::numeric_limits<double>::epsilon() * (1 + max_abs(t));
    auto consider = [&](EigenPair p) {
        if (!(p.residual <= opts.tol)) return;
        if (std::abs(p.lambda) <= snap) {
            const double r = eig_defect(t, p.variant, p.mode, 0.0, p.x);
            if (r <= opts.tol) {
                p.lambda = 0.0;
                p.residual = r;
            }
        }
        for (auto& xi : p.x)
            if (xi == 0.0) xi = 0.0;
        for (const auto& q : accepted)
            if (same_pair(p, q, opts.dedup_tol)) return;
        accepted.push_back(p);
    };
    for (const auto& p : candidates) {
        if (!(p.residual <= opts.tol)) continue;
        consider(p);
        consider(eig_orbit(t, p, -1.0));
    }
    if (accepted.empty() && !candidates.empty()) {
        auto best = *std::min_element(candidates.begin(), candidates.end(),
                                      [](const EigenPair& a, const EigenPair& b) { return a.residual < b.residual; });
        best.converged = false;
        return {best};
    }
    sort_pairs(accepted);
    return accepted;
}

} // namespace detail

/// All mode-`mode` eigenpairs the solver can find, deduplicated and
/// normalized to ||x||_2 = 1. Both x and -x appear when both solve the
/// equation. If nothing converges, the best candidate is returned with
/// converged = false.
inline std::vector<EigenPair> find_eigenpairs(const DenseTensor& t, std::size_t mode, EigenVariant variant,
                                              const EigenOptions& opts = {})
{
    detail::require_cubical(t);
    t.shape().check_mode(mode);
    detail::require(opts.tol > 0, "tolerance must be positive");
    auto candidates = t.dim(1) == 2 ? detail::eigen_grid_candidates(t, mode, variant, opts)
                                    : detail::eigen_power_candidates(t, mode, variant, opts);
    return detail::finalize_pairs(t, std::move(candidates), opts);
}

/// Convention that contracts the last O-1 modes (mode-1 eigenpairs).
inline std::vector<EigenPair> find_eigenpairs_last_modes(const DenseTensor& t, EigenVariant variant,
                                                         const EigenOptions& opts = {})
{
    return find_eigenpairs(t, 1, variant, opts);
}

/// Convention that contracts the first O-1 modes (mode-O eigenpairs).
inline std::vector<EigenPair> find_eigenpairs_first_modes(const DenseTensor& t, EigenVariant variant,
                                                          const EigenOptions& opts = {})
{
    return find_eigenpairs(t, t.order(), variant, opts);
}

// ---------------------------------------------------------------------------
// Singular tuples

namespace detail {

/// Entrywise inverse of x -> x^{O-1}: signed real root. For odd O the power
/// is even, so only |f| is recoverable; Newton polishing settles the rest.
inline Vector entry_root(const Vector& f, std::size_t order)
{
    const double e = 1.0 / static_cast<double>(order - 1);
    Vector out(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) out[i] = std::copysign(std::pow(std::abs(f[i]), e), f[i]);
    return out;
}

inline double sigma_estimate(const DenseTensor& t, SingularVariant variant, const std::vector<Vector>& xs)
{
    if (variant == SingularVariant::l2) return contract_full(t, xs);
    long double num = 0, den = 0;
    for (std::size_t o = 1; o <= t.order(); ++o) {
        const auto f = contract_all_but_slots(t, o, xs);
        const auto h = singular_rhs(variant, xs[o - 1], t.order());
        for (std::size_t i = 0; i < f.size(); ++i) {
            num += static_cast<long double>(f[i]) * h[i];
            den += static_cast<long double>(h[i]) * h[i];
        }
    }
    return den > 0 ? static_cast<double>(num / den) : 0.0;
}

/// Higher-order power method: cyclic per-mode updates. Returns false if an
/// iterate vanishes.
inline bool hopm(const DenseTensor& t, SingularVariant variant, std::vector<Vector>& xs,
                 std::size_t max_iters)
{
    const std::size_t order = t.order();
    const double p = variant == SingularVariant::l2 ? 2.0 : static_cast<double>(order);
    for (std::size_t it = 0; it < max_iters; ++it) {
        double change = 0;
        for (std::size_t o = 1; o <= order; ++o) {
            auto f = contract_all_but_slots(t, o, xs);
            if (variant == SingularVariant::lO) f = entry_root(f, order);
            if (!normalize_p(f, p)) return false;
            for (std::size_t i = 0; i < f.size(); ++i) change = std::max(change, std::abs(f[i] - xs[o - 1][i]));
            xs[o - 1] = std::move(f);
        }
        if (change < 1e-14) break;
    }
    return true;
}

inline void canonicalize(SingularTuple& tuple)
{
    const std::size_t order = tuple.xs.size();
    auto leading_negative = [](const Vector& x) {
        std::size_t arg = 0;
        for (std::size_t i = 1; i < x.size(); ++i)
            if (std::abs(x[i]) > std::abs(x[arg]) * (1 + 1e-9)) arg = i;
        return x[arg] < 0;
    };
    if (tuple.variant == SingularVariant::lO && order % 2 == 1) {
        // only the scale t = -1 is left: it negates every vector at once
        if (leading_negative(tuple.xs[0])) tuple = singular_orbit(tuple, OrbitScale{-1.0});
        return;
    }
    std::vector<bool> mask(order, false);
    for (std::size_t o = 0; o + 1 < order; ++o) mask[o] = leading_negative(tuple.xs[o]);
    auto flipped = singular_orbit(tuple, OrbitFlip{mask});
    if (flipped.sigma < 0) {
        std::vector<bool> last(order, false);
        last.back() = true;
        flipped = singular_orbit(flipped, OrbitFlip{last});
    }
    tuple = std::move(flipped);
}

inline std::vector<Vector> hosvd_start(const DenseTensor& t)
{
    std::vector<Vector> xs;
    for (std::size_t o = 1; o <= t.order(); ++o) xs.push_back(leading_left_vector(t, o));
    return xs;
}

inline SingularTuple singular_from_start(const DenseTensor& t, SingularVariant variant, std::vector<Vector> xs,
                                         bool run_hopm, std::size_t max_iters, bool& vanished)
{
    const double p = variant == SingularVariant::l2 ? 2.0 : static_cast<double>(t.order());
    vanished = false;
    for (auto& x : xs) normalize_p(x, p);
    if (run_hopm && !hopm(t, variant, xs, max_iters)) {
        vanished = true;
        SingularTuple bad;
        bad.variant = variant;
        bad.xs = std::move(xs);
        bad.residual = std::numeric_limits<double>::infinity();
        bad.converged = false;
        return bad;
    }
    return polish_singular(t, variant, xs, sigma_estimate(t, variant, xs));
}

} // namespace detail

/// Singular value tuples found by multi-start HOPM, Newton-only starts and
/// deflation seeds, all finished by Newton polishing.
inline std::vector<SingularTuple> find_singular_tuples(const DenseTensor& t, SingularVariant variant,
                                                       const SingularOptions& opts = {},
                                                       SearchStats* stats = nullptr)
{
    detail::require<ShapeError>(t.order() >= 2, "singular tuples need order >= 2");
    detail::require(opts.tol > 0, "tolerance must be positive");
    const std::size_t order = t.order();

    struct Task {
        std::vector<Vector> xs;
        bool run_hopm;
    };
    std::vector<Task> tasks;
    tasks.push_back({detail::hosvd_start(t), true});
    for (std::size_t s = 0; s < opts.starts; ++s) {
        detail::Rng rng(opts.seed + s);
        std::vector<Vector> xs;
        for (std::size_t o = 1; o <= order; ++o) xs.push_back(detail::random_unit(rng, t.dim(o)));
        tasks.push_back({std::move(xs), s % 2 == 0});
    }

    std::vector<SingularTuple> results(tasks.size());
    std::vector<char> vanished(tasks.size(), 0);
    auto run = [&](std::size_t k) {
        bool v = false;
        results[k] = detail::singular_from_start(t, variant, tasks[k].xs, tasks[k].run_hopm, opts.max_iters, v);
        vanished[k] = v;
    };
    detail::parallel_for(tasks.size(), opts.threads, run);

    std::size_t restarts = 0;
    for (char v : vanished) restarts += v ? 1 : 0;

    // Deflation seeds: best rank-one term of t - σ x_1⊗...⊗x_O, polished on t.
    std::vector<SingularTuple> seeds;
    {
        std::vector<SingularTuple> good;
        for (const auto& r : results)
            if (r.residual <= opts.tol) good.push_back(r);
        detail::sort_tuples(good);
        const std::size_t take = std::min<std::size_t>(good.size(), 8);
        std::vector<SingularTuple> extra(take);
        detail::parallel_for(take, opts.threads, [&](std::size_t k) {
            const auto& g = good[k];
            std::vector<DenseTensor> fs;
            for (const auto& x : g.xs) fs.push_back(DenseTensor::vector(x));
            const DenseTensor rest = t - g.sigma * outer(fs);
            if (max_abs(rest) == 0.0) {
                extra[k].residual = std::numeric_limits<double>::infinity();
                return;
            }
            auto xs = detail::hosvd_start(rest);
            bool v = false;
            if (variant == SingularVariant::l2 && !detail::hopm(rest, variant, xs, opts.max_iters)) v = true;
            if (v) {
                extra[k].residual = std::numeric_limits<double>::infinity();
                return;
            }
            extra[k] = detail::singular_from_start(t, variant, xs, false, opts.max_iters, v);
        });
        seeds = std::move(extra);
    }
    results.insert(results.end(), seeds.begin(), seeds.end());

    if (stats) {
        stats->starts_run = tasks.size() + seeds.size();
        stats->restarts = restarts;
    }

    std::vector<SingularTuple> accepted;
    for (auto r : results) {
        if (!(r.residual <= opts.tol)) continue;
        if (opts.canonical) detail::canonicalize(r);
        bool dup = false;
        for (const auto& q : accepted) dup = dup || detail::same_tuple(r, q, opts.dedup_tol);
        if (!dup) accepted.push_back(std::move(r));
    }
    if (accepted.empty()) {
        std::vector<SingularTuple> finite;
        for (const auto& r : results)
            if (std::isfinite(r.residual)) finite.push_back(r);
        if (finite.empty()) return {};
        auto best = *std::min_element(finite.begin(), finite.end(),
                                      [](const auto& a, const auto& b) { return a.residual < b.residual; });
        best.converged = false;
        return {best};
    }
    detail::sort_tuples(accepted);
    return accepted;
}

// ---------------------------------------------------------------------------
// Best rank-one approximation and the eigen/singular bridge

struct RankOneApproximation {
    double sigma = 0;                // largest l2 singular value found
    std::vector<Vector> xs;          // unit vectors
    DenseTensor tensor;              // sigma * x_1 ⊗ ... ⊗ x_O
    double error = 0;                // ||t - tensor||_F
    bool converged = true;
};

/// Best rank-one approximation via the top l2 singular tuple. For the zero
/// tensor σ = 0 and every x_o is e_1.
inline RankOneApproximation best_rank_one(const DenseTensor& t, const SingularOptions& opts = {})
{
    RankOneApproximation out;
    if (max_abs(t) == 0.0) {
        for (std::size_t o = 1; o <= t.order(); ++o) {
            Vector e(t.dim(o), 0.0);
            e[0] = 1.0;
            out.xs.push_back(std::move(e));
        }
        out.tensor = DenseTensor(t.shape());
        return out;
    }
    auto local = opts;
    local.canonical = true;
    const auto tuples = find_singular_tuples(t, SingularVariant::l2, local);
    detail::require(!tuples.empty(), "no singular tuple found");
    const auto& top = tuples.front();
    out.sigma = top.sigma;
    out.xs = top.xs;
    out.converged = top.converged;
    std::vector<DenseTensor> fs;
    for (const auto& x : top.xs) fs.push_back(DenseTensor::vector(x));
    out.tensor = top.sigma * outer(fs);
    out.error = frobenius_norm(t - out.tensor);
    return out;
}

enum class BridgeStatus {
    ok,
    not_z_variant,
    not_an_eigenvector_for_every_mode,
    eigenvalue_differs_across_modes,
};

inline std::string to_string(BridgeStatus s)
{
    switch (s) {
    case BridgeStatus::ok: return "ok";
    case BridgeStatus::not_z_variant: return "not_z_variant";
    case BridgeStatus::not_an_eigenvector_for_every_mode: return "not_an_eigenvector_for_every_mode";
    case BridgeStatus::eigenvalue_differs_across_modes: return "eigenvalue_differs_across_modes";
    }
    return "unknown";
}

struct BridgeResult {
    BridgeStatus status = BridgeStatus::ok;
    std::optional<SingularTuple> tuple;
    std::size_t failing_mode = 0;    // first mode violating the precondition
};

/// O copies of x form an l2 singular tuple iff x is a Z-eigenvector for
/// every mode with one common eigenvalue. Maps such a pair to (|λ|, ±x, ..., x).
inline BridgeResult eig_singular_bridge(const DenseTensor& t, const EigenPair& pair, double tol = 1e-10)
{
    detail::require_cubical(t);
    BridgeResult out;
    if (pair.variant != EigenVariant::z) {
        out.status = BridgeStatus::not_z_variant;
        return out;
    }
    for (std::size_t o = 1; o <= t.order(); ++o) {
        if (eig_defect(t, EigenVariant::z, o, pair.lambda, pair.x) <= tol) continue;
        const double lam_o = detail::eigen_lambda_estimate(t, EigenVariant::z, o, pair.x);
        out.status = eig_defect(t, EigenVariant::z, o, lam_o, pair.x) <= tol
                         ? BridgeStatus::eigenvalue_differs_across_modes
                         : BridgeStatus::not_an_eigenvector_for_every_mode;
        out.failing_mode = o;
        return out;
    }
    SingularTuple tuple;
    tuple.variant = SingularVariant::l2;
    tuple.sigma = pair.lambda;
    tuple.xs.assign(t.order(), pair.x);
    if (tuple.sigma < 0) {
        std::vector<bool> mask(t.order(), false);
        mask[0] = true;
        tuple = singular_orbit(tuple, OrbitFlip{mask});
    }
    tuple.residual = singular_residual(t, tuple);
    out.tuple = std::move(tuple);
    return out;
}

} // namespace tensorspec
