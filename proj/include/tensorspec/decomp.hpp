#pragma once

// CP and Tucker formats, HOSVD, multilinear rank, CP-ALS and recovery of
// orthogonally decomposable (odeco) tensors by power iteration with
// deflation.
//
// cp_als is a heuristic fit. Exact CP is NP-hard and best rank-r
// approximations (r >= 2) need not exist (border-rank tensors such as the
// W family), so no optimality is claimed.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "tensorspec/contract.hpp"
#include "tensorspec/detail/numeric.hpp"
#include "tensorspec/error.hpp"
#include "tensorspec/spectra.hpp"
#include "tensorspec/tensor.hpp"

namespace tensorspec {

/// Σ_r weights[r] · a_1r ⊗ ... ⊗ a_Or, factor o of size M_o x R.
struct CpDecomposition {
    Vector weights;
    std::vector<Matrix> factors;

    std::size_t rank() const noexcept { return weights.size(); }
    std::size_t order() const noexcept { return factors.size(); }

    Shape shape() const
    {
        std::vector<std::size_t> d;
        for (const auto& f : factors) d.push_back(f.rows());
        return Shape(std::move(d));
    }

    void validate() const
    {
        detail::require<ShapeError>(!factors.empty(), "CP decomposition needs at least one factor");
        detail::require<ShapeError>(!weights.empty(), "CP decomposition needs rank >= 1");
        for (const auto& f : factors) {
            require_matrix(f, "CP factor");
            detail::require<ShapeError>(f.cols() == weights.size(),
                                        "CP factor column count must equal the rank");
        }
    }

    /// True when every factor column has unit l2 norm.
    bool is_normalized(double tol = 1e-12) const
    {
        for (const auto& f : factors)
            for (std::size_t r = 0; r < f.cols(); ++r) {
                const auto col = f.data().subspan(r * f.rows(), f.rows());
                if (std::abs(std::sqrt(dot(col, col)) - 1.0) > tol) return false;
            }
        return true;
    }
};

/// core •_1 L_1 ... •_O L_O, factor o of size M_o x I_o.
struct TuckerDecomposition {
    DenseTensor core;
    std::vector<Matrix> factors;

    void validate() const
    {
        detail::require<ShapeError>(factors.size() == core.order(),
                                    "Tucker decomposition needs one factor per core mode");
        for (std::size_t o = 1; o <= core.order(); ++o) {
            require_matrix(factors[o - 1], "Tucker factor");
            detail::require<ShapeError>(factors[o - 1].cols() == core.dim(o),
                                        "Tucker factor width must match core mode " + std::to_string(o));
        }
    }
};

namespace detail {

/// Column r (1-based) of a matrix.
inline Vector column(const Matrix& a, std::size_t r)
{
    const auto c = a.data().subspan((r - 1) * a.rows(), a.rows());
    return Vector(c.begin(), c.end());
}

inline Matrix matrix_from_columns(const std::vector<Vector>& cols, std::size_t rows)
{
    std::vector<double> buf;
    buf.reserve(cols.size() * rows);
    for (const auto& c : cols) buf.insert(buf.end(), c.begin(), c.end());
    return DenseTensor(Shape{rows, cols.size()}, std::move(buf));
}

} // namespace detail

inline DenseTensor cp_eval(const CpDecomposition& cp)
{
    cp.validate();
    const Shape shape = cp.shape();
    std::vector<long double> acc(shape.cardinality(), 0.0L);
    std::vector<DenseTensor> cols(cp.order());
    for (std::size_t r = 0; r < cp.rank(); ++r) {
        for (std::size_t o = 0; o < cp.order(); ++o)
            cols[o] = DenseTensor::vector(detail::column(cp.factors[o], r + 1));
        const auto term = outer(cols);
        for (std::size_t k = 0; k < acc.size(); ++k)
            acc[k] += static_cast<long double>(cp.weights[r]) * term.data()[k];
    }
    return DenseTensor(shape, std::vector<double>(acc.begin(), acc.end()));
}

/// Move column norms into the weights. A zero column gets weight 0 and is
/// replaced by e_1.
inline CpDecomposition cp_normalize(const CpDecomposition& cp)
{
    cp.validate();
    CpDecomposition out;
    out.weights = cp.weights;
    for (const auto& f : cp.factors) {
        std::vector<Vector> cols;
        for (std::size_t r = 0; r < cp.rank(); ++r) {
            auto c = detail::column(f, r + 1);
            const double n = detail::norm2(c);
            if (n > 0) {
                for (auto& v : c) v /= n;
                out.weights[r] *= n;
            } else {
                std::fill(c.begin(), c.end(), 0.0);
                c[0] = 1.0;
                out.weights[r] = 0.0;
            }
            cols.push_back(std::move(c));
        }
        out.factors.push_back(detail::matrix_from_columns(cols, f.rows()));
    }
    return out;
}

/// CP as Tucker with a hyperdiagonal R x ... x R core.
inline TuckerDecomposition cp_to_tucker(const CpDecomposition& cp)
{
    cp.validate();
    return {DenseTensor::hyperdiagonal(cp.weights, cp.order()), cp.factors};
}

inline DenseTensor tucker_eval(const TuckerDecomposition& tk)
{
    tk.validate();
    return multi_mode_product(tk.core, tk.factors);
}

/// Truncated higher-order SVD: factor o holds the leading ranks[o] left
/// singular vectors of the mode-o unfolding; the core is t contracted with
/// the factor transposes.
inline TuckerDecomposition hosvd(const DenseTensor& t, std::span<const std::size_t> ranks)
{
    detail::require<ShapeError>(ranks.size() == t.order(), "hosvd needs one rank per mode");
    TuckerDecomposition out;
    std::vector<Matrix> transposes;
    for (std::size_t o = 1; o <= t.order(); ++o) {
        const auto r = ranks[o - 1];
        detail::require<ValueError>(r >= 1 && r <= t.dim(o),
                                    "hosvd rank for mode " + std::to_string(o) + " out of range");
        const auto svd = detail::left_svd(unfold(t, o));
        Eigen::MatrixXd u = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.dim(o)), static_cast<Eigen::Index>(r));
        const auto avail = std::min<Eigen::Index>(svd.u.cols(), static_cast<Eigen::Index>(r));
        u.leftCols(avail) = svd.u.leftCols(avail);
        if (avail < static_cast<Eigen::Index>(r)) {
            // unfolding has fewer columns than requested rank: complete the basis
            Eigen::HouseholderQR<Eigen::MatrixXd> qr(u.leftCols(avail));
            Eigen::MatrixXd q = qr.householderQ();
            u.rightCols(static_cast<Eigen::Index>(r) - avail) = q.middleCols(avail, static_cast<Eigen::Index>(r) - avail);
        }
        out.factors.push_back(detail::from_eigen(u));
        transposes.push_back(detail::from_eigen(u.transpose()));
    }
    out.core = multi_mode_product(t, transposes);
    return out;
}

inline TuckerDecomposition hosvd(const DenseTensor& t, std::initializer_list<std::size_t> ranks)
{
    return hosvd(t, std::span<const std::size_t>(ranks.begin(), ranks.size()));
}

/// Numerical rank of each mode-o unfolding: singular values above
/// tol·σ_max. The zero tensor has rank 0 in every mode.
inline std::vector<std::size_t> multilinear_rank(const DenseTensor& t, double tol = 1e-8)
{
    detail::require(tol >= 0, "rank tolerance must be >= 0");
    std::vector<std::size_t> out;
    for (std::size_t o = 1; o <= t.order(); ++o) {
        const auto s = detail::left_svd(unfold(t, o)).sigma;
        const double smax = s.size() ? s[0] : 0.0;
        std::size_t r = 0;
        if (smax > 0)
            for (Eigen::Index k = 0; k < s.size(); ++k)
                if (s[k] > tol * smax) ++r;
        out.push_back(r);
    }
    return out;
}

// ---------------------------------------------------------------------------
// CP-ALS

struct AlsOptions {
    std::size_t max_iters = 500;   // sweeps per start
    double tol = 1e-12;            // stop once the relative error is below this
    std::uint64_t seed = 0;
    std::size_t starts = 8;
    std::size_t threads = 1;
    double ridge = 1e-12;          // added to singular normal equations
    std::size_t polish_iters = 200;          // damped Gauss-Newton steps after the sweeps
    std::size_t polish_max_jacobian = 1u << 22;  // skip the polish above this many Jacobian entries
};

struct AlsResult {
    CpDecomposition cp;            // normalized
    double relative_error = 0;     // ||t - cp_eval(cp)||_F / ||t||_F
    std::vector<double> history;   // relative error after each sweep, winning start
    std::size_t best_start = 0;
    std::size_t sweeps = 0;
    std::size_t regularized_solves = 0;
};

namespace detail {

/// Σ over entries of t_m Π_{k≠mode} A_k(m_k, r), as an M_mode x R matrix.
inline Eigen::MatrixXd mttkrp(const DenseTensor& t, const std::vector<Eigen::MatrixXd>& a, std::size_t mode)
{
    const auto rank = a.front().cols();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(t.dim(mode)), rank);
    Eigen::RowVectorXd prod(rank);
    MultiIndex m(t.order(), 1);
    std::size_t k = 0;
    do {
        prod.setConstant(t.data()[k++]);
        for (std::size_t o = 0; o < m.size(); ++o)
            if (o + 1 != mode) prod.array() *= a[o].row(static_cast<Eigen::Index>(m[o] - 1)).array();
        out.row(static_cast<Eigen::Index>(m[mode - 1] - 1)) += prod;
    } while (next_colex(t.shape(), m));
    return out;
}

inline CpDecomposition cp_from_eigen(const Eigen::VectorXd& w, const std::vector<Eigen::MatrixXd>& a)
{
    CpDecomposition cp;
    cp.weights = from_eigen_vector(w);
    for (const auto& f : a) cp.factors.push_back(from_eigen(f));
    return cp;
}

inline double relative_error(const DenseTensor& t, const CpDecomposition& cp, double tnorm)
{
    const double e = frobenius_norm(t - cp_eval(cp));
    return tnorm > 0 ? e / tnorm : e;
}

/// Levenberg-Marquardt on the factor entries of a CP fit (weights folded
/// into the factors). Each accepted step lowers the error and is appended to
/// `history`. Returns whether any step was accepted.
inline bool gauss_newton_polish(const DenseTensor& t, std::vector<Eigen::MatrixXd>& f, const AlsOptions& opts,
                                std::vector<double>& history)
{
    const std::size_t order = t.order();
    const Eigen::Index rank = f.front().cols();
    const auto n = static_cast<Eigen::Index>(t.size());
    Eigen::Index p = 0;
    std::vector<Eigen::Index> offset(order);
    for (std::size_t o = 0; o < order; ++o) offset[o] = p, p += f[o].size();
    if (static_cast<double>(n) * static_cast<double>(p) > static_cast<double>(opts.polish_max_jacobian)) return false;

    const double tnorm = frobenius_norm(t);
    const double scale = tnorm > 0 ? tnorm : 1.0;
    auto residual = [&](const std::vector<Eigen::MatrixXd>& g, Eigen::MatrixXd* jac) {
        Eigen::VectorXd res(n);
        if (jac) jac->setZero(n, p);
        MultiIndex m(order, 1);
        Eigen::Index k = 0;
        Eigen::RowVectorXd prod(rank), partial(rank);
        do {
            prod.setOnes();
            for (std::size_t o = 0; o < order; ++o) prod.array() *= g[o].row(static_cast<Eigen::Index>(m[o] - 1)).array();
            res[k] = t.data()[static_cast<std::size_t>(k)] - prod.sum();
            if (jac)
                for (std::size_t o = 0; o < order; ++o) {
                    partial.setOnes();
                    for (std::size_t q = 0; q < order; ++q)
                        if (q != o) partial.array() *= g[q].row(static_cast<Eigen::Index>(m[q] - 1)).array();
                    const auto rows = g[o].rows();
                    for (Eigen::Index c = 0; c < rank; ++c)
                        (*jac)(k, offset[o] + c * rows + static_cast<Eigen::Index>(m[o] - 1)) = -partial[c];
                }
            ++k;
        } while (next_colex(t.shape(), m));
        return res;
    };

    bool moved = false;
    double mu = 1e-3;
    Eigen::MatrixXd jac;
    Eigen::VectorXd res = residual(f, &jac);
    double err = res.norm() / scale;
    for (std::size_t it = 0; it < opts.polish_iters && err > opts.tol; ++it) {
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd grad = jac.transpose() * res;
        bool accepted = false;
        while (mu < 1e12) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal().array() += mu * (1.0 + jtj.diagonal().array());
            const Eigen::VectorXd step = lhs.ldlt().solve(-grad);
            auto g = f;
            for (std::size_t o = 0; o < order; ++o)
                g[o] += Eigen::Map<const Eigen::MatrixXd>(step.data() + offset[o], f[o].rows(), rank);
            const Eigen::VectorXd r2 = residual(g, nullptr);
            const double e2 = r2.norm() / scale;
            if (std::isfinite(e2) && e2 < err) {
                f = std::move(g);
                err = e2;
                mu = std::max(mu / 3, 1e-15);
                accepted = true;
                break;
            }
            mu *= 4;
        }
        if (!accepted) break;
        moved = true;
        history.push_back(err);
        res = residual(f, &jac);
    }
    return moved;
}

struct AlsRun {
    CpDecomposition cp;
    double error = std::numeric_limits<double>::infinity();
    std::vector<double> history;
    std::size_t regularized = 0;
};

inline AlsRun als_single(const DenseTensor& t, std::size_t rank, const AlsOptions& opts, std::size_t start)
{
    const std::size_t order = t.order();
    const auto r = static_cast<Eigen::Index>(rank);
    Rng rng(opts.seed + start);
    std::vector<Eigen::MatrixXd> a(order);
    for (std::size_t o = 1; o <= order; ++o) {
        const auto m = static_cast<Eigen::Index>(t.dim(o));
        if (start == 0 && rank <= t.dim(o)) {
            a[o - 1] = left_svd(unfold(t, o)).u.leftCols(r);
        } else {
            a[o - 1].resize(m, r);
            const auto v = random_uniform(rng, static_cast<std::size_t>(m * r));
            for (Eigen::Index k = 0; k < m * r; ++k) a[o - 1].data()[k] = v[static_cast<std::size_t>(k)];
        }
    }
    Eigen::VectorXd w = Eigen::VectorXd::Ones(r);
    const double tnorm = frobenius_norm(t);

    // factors with the weights folded into the last mode
    auto absorbed = [&](std::vector<Eigen::MatrixXd> f, const Eigen::VectorXd& wt) {
        f.back() = f.back() * wt.asDiagonal();
        return f;
    };
    auto split = [&](std::vector<Eigen::MatrixXd>& f, Eigen::VectorXd& wt) {
        wt = Eigen::VectorXd::Ones(r);
        for (auto& m : f)
            for (Eigen::Index c = 0; c < r; ++c) {
                const double n = m.col(c).norm();
                wt[c] *= n;
                if (n > 0) m.col(c) /= n;
            }
    };

    AlsRun run;
    for (std::size_t sweep = 0; sweep < opts.max_iters; ++sweep) {
        const auto prev = absorbed(a, w);
        for (std::size_t o = 1; o <= order; ++o) {
            Eigen::MatrixXd gram = Eigen::MatrixXd::Ones(r, r);
            for (std::size_t k = 1; k <= order; ++k)
                if (k != o) gram.array() *= (a[k - 1].transpose() * a[k - 1]).array();
            const Eigen::MatrixXd rhs = mttkrp(t, a, o);
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
            const bool singular = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                                  ldlt.rcond() < 1e-14;
            Eigen::MatrixXd sol;
            if (singular) {
                ++run.regularized;
                const Eigen::MatrixXd reg = gram + opts.ridge * Eigen::MatrixXd::Identity(r, r);
                sol = reg.ldlt().solve(rhs.transpose()).transpose();
            } else {
                sol = ldlt.solve(rhs.transpose()).transpose();
            }
            // keep columns unit length, magnitudes in w
            for (Eigen::Index c = 0; c < r; ++c) {
                const double n = sol.col(c).norm();
                w[c] = n;
                if (n > 0) sol.col(c) /= n;
            }
            a[o - 1] = std::move(sol);
        }
        double err = relative_error(t, cp_from_eigen(w, a), tnorm);
        if (sweep >= 1 && err > opts.tol) {
            // line-search extrapolation along the last sweep's step, kept only if it lowers the error
            auto x = absorbed(a, w);
            const double step = std::cbrt(static_cast<double>(sweep + 1));
            for (std::size_t o = 0; o < order; ++o) x[o] += step * (x[o] - prev[o]);
            Eigen::VectorXd wx;
            split(x, wx);
            const double ex = relative_error(t, cp_from_eigen(wx, x), tnorm);
            if (ex < err) {
                a = std::move(x);
                w = std::move(wx);
                err = ex;
            }
        }
        run.history.push_back(err);
        if (err <= opts.tol) break;
        // stagnation
        if (run.history.size() >= 2 && run.history[run.history.size() - 2] - err <= 1e-15) break;
    }
    if (!run.history.empty() && run.history.back() > opts.tol) {
        auto x = absorbed(a, w);
        if (gauss_newton_polish(t, x, opts, run.history)) {
            split(x, w);
            a = std::move(x);
        }
    }
    run.cp = cp_normalize(cp_from_eigen(w, a));
    run.error = run.history.empty() ? relative_error(t, run.cp, tnorm) : run.history.back();
    return run;
}

} // namespace detail

/// Rank-R CP fit by alternating least squares from several starts. Start 0
/// uses leading HOSVD vectors where R <= M_o; every other factor is seeded
/// uniform(-1, 1) from seed + start. The lowest error wins, ties going to
/// the lower start index.
inline AlsResult cp_als(const DenseTensor& t, std::size_t rank, const AlsOptions& opts = {})
{
    detail::require(rank >= 1, "CP rank must be >= 1");
    detail::require(opts.starts >= 1, "need at least one start");
    std::vector<detail::AlsRun> runs(opts.starts);
    detail::parallel_for(opts.starts, opts.threads,
                         [&](std::size_t s) { runs[s] = detail::als_single(t, rank, opts, s); });
    std::size_t best = 0;
    for (std::size_t s = 1; s < runs.size(); ++s)
        if (runs[s].error < runs[best].error) best = s;
    AlsResult out;
    out.cp = runs[best].cp;
    out.relative_error = runs[best].error;
    out.history = runs[best].history;
    out.best_start = best;
    out.sweeps = runs[best].history.size();
    for (const auto& r : runs) out.regularized_solves += r.regularized;
    return out;
}

// ---------------------------------------------------------------------------
// Odeco recovery

struct OdecoOptions {
    bool symmetric = true;
    std::size_t max_iters = 1000;  // power iterations per start
    double tol = 1e-10;            // stop once ||remainder|| <= tol·||t||
    double orth_tol = 1e-8;        // allowed deviation of factor Gram matrices from I
    std::uint64_t seed = 0;
    std::size_t starts = 10;       // random starts per extracted component
    std::size_t rank = 0;          // components to extract; 0 = smallest mode size
};

enum class OdecoStatus { ok, not_converged, not_orthogonal };

inline std::string to_string(OdecoStatus s)
{
    switch (s) {
    case OdecoStatus::ok: return "ok";
    case OdecoStatus::not_converged: return "not_converged";
    case OdecoStatus::not_orthogonal: return "not_orthogonal";
    }
    return "unknown";
}

struct OdecoResult {
    CpDecomposition cp;
    OdecoStatus status = OdecoStatus::ok;
    double residual = 0;                  // ||t - cp_eval(cp)||_F / ||t||_F
    double orthogonality_defect = 0;      // max |Gram - I| over factors
    std::vector<double> remainder_norms;  // ||remainder||_F before each step and at the end
};

namespace detail {

struct RankOneTerm {
    double weight = 0;
    std::vector<Vector> xs;
    bool converged = false;
};

inline RankOneTerm symmetric_power_term(const DenseTensor& rest, const OdecoOptions& opts, std::uint64_t seed)
{
    const std::size_t order = rest.order();
    const std::size_t m = rest.dim(1);
    RankOneTerm best;
    for (std::size_t s = 0; s < opts.starts; ++s) {
        Rng rng(seed + s);
        Vector x = random_unit(rng, m);
        bool conv = false;
        for (std::size_t it = 0; it < opts.max_iters; ++it) {
            auto f = contract_all_but_same(rest, 1, x);
            if (!normalize_p(f, 2.0)) break;
            double plus = 0, minus = 0;
            for (std::size_t i = 0; i < m; ++i) {
                plus = std::max(plus, std::abs(f[i] - x[i]));
                minus = std::max(minus, std::abs(f[i] + x[i]));
            }
            x = std::move(f);
            if (std::min(plus, minus) < 1e-14) {
                conv = true;
                break;
            }
        }
        const double lam = contract_full(rest, std::vector<Vector>(order, x));
        if (s == 0 || std::abs(lam) > std::abs(best.weight)) best = {lam, std::vector<Vector>(order, x), conv};
    }
    // Newton finish on the Z-eigen system of the remainder
    auto pair = polish_eigen(rest, 1, EigenVariant::z, best.xs[0], best.weight);
    if (pair.residual < eig_defect(rest, EigenVariant::z, 1, best.weight, best.xs[0])) {
        best.xs.assign(order, pair.x);
        best.weight = pair.lambda;
    }
    if (order % 2 == 1 && best.weight < 0) {
        best.weight = -best.weight;
        for (auto& v : best.xs[0]) v = -v;
        best.xs.assign(order, best.xs[0]);
    }
    return best;
}

inline RankOneTerm general_power_term(const DenseTensor& rest, const OdecoOptions& opts, std::uint64_t seed)
{
    const std::size_t order = rest.order();
    RankOneTerm best;
    for (std::size_t s = 0; s < opts.starts; ++s) {
        Rng rng(seed + s);
        std::vector<Vector> xs;
        for (std::size_t o = 1; o <= order; ++o) xs.push_back(random_unit(rng, rest.dim(o)));
        bool conv = false;
        for (std::size_t it = 0; it < opts.max_iters && !conv; ++it) {
            double change = 0;
            bool ok = true;
            for (std::size_t o = 1; o <= order && ok; ++o) {
                auto f = contract_all_but_slots(rest, o, xs);
                ok = normalize_p(f, 2.0);
                for (std::size_t i = 0; ok && i < f.size(); ++i)
                    change = std::max(change, std::abs(f[i] - xs[o - 1][i]));
                if (ok) xs[o - 1] = std::move(f);
            }
            if (!ok) break;
            conv = change < 1e-14;
        }
        const double lam = contract_full(rest, xs);
        if (s == 0 || std::abs(lam) > std::abs(best.weight)) best = {lam, xs, conv};
    }
    auto tuple = polish_singular(rest, SingularVariant::l2, best.xs, best.weight);
    if (tuple.converged && tuple.residual < singular_residual(rest, {SingularVariant::l2, best.weight, best.xs, 0, true})) {
        best.xs = tuple.xs;
        best.weight = tuple.sigma;
    }
    if (best.weight < 0) {
        best.weight = -best.weight;
        for (auto& v : best.xs[0]) v = -v;
    }
    return best;
}

} // namespace detail

/// Recover an orthogonal CP decomposition by repeated rank-one power
/// iteration and deflation. Stops once the remainder is below
/// tol·||t||_F or `rank` components have been extracted.
inline OdecoResult odeco_decompose(const DenseTensor& t, const OdecoOptions& opts = {})
{
    if (opts.symmetric)
        detail::require<ShapeError>(t.shape().is_cubical(), "symmetric odeco recovery needs a cubical tensor");
    detail::require<ShapeError>(t.order() >= 2, "odeco recovery needs order >= 2");
    std::size_t max_rank = opts.rank;
    if (max_rank == 0) max_rank = *std::min_element(t.shape().dims().begin(), t.shape().dims().end());

    const double tnorm = frobenius_norm(t);
    OdecoResult out;
    DenseTensor rest = t;
    std::vector<detail::RankOneTerm> terms;
    bool all_converged = true;
    out.remainder_norms.push_back(tnorm);
    while (terms.size() < max_rank && out.remainder_norms.back() > opts.tol * tnorm) {
        const std::uint64_t seed = opts.seed + 1000 * terms.size();
        auto term = opts.symmetric ? detail::symmetric_power_term(rest, opts, seed)
                                   : detail::general_power_term(rest, opts, seed);
        all_converged = all_converged && term.converged;
        std::vector<DenseTensor> fs;
        for (const auto& x : term.xs) fs.push_back(DenseTensor::vector(x));
        rest = rest - term.weight * outer(fs);
        out.remainder_norms.push_back(frobenius_norm(rest));
        terms.push_back(std::move(term));
    }

    if (terms.empty()) {
        // zero tensor
        out.cp.weights = {0.0};
        for (std::size_t o = 1; o <= t.order(); ++o) {
            Vector e(t.dim(o), 0.0);
            e[0] = 1.0;
            out.cp.factors.push_back(detail::matrix_from_columns({e}, t.dim(o)));
        }
        return out;
    }

    for (const auto& term : terms) out.cp.weights.push_back(term.weight);
    for (std::size_t o = 0; o < t.order(); ++o) {
        std::vector<Vector> cols;
        for (const auto& term : terms) cols.push_back(term.xs[o]);
        out.cp.factors.push_back(detail::matrix_from_columns(cols, t.dim(o + 1)));
    }
    out.residual = detail::relative_error(t, out.cp, tnorm);
    for (const auto& f : out.cp.factors) {
        const auto a = detail::to_eigen(f);
        const Eigen::MatrixXd gram = a.transpose() * a;
        out.orthogonality_defect = std::max(
            out.orthogonality_defect,
            (gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).lpNorm<Eigen::Infinity>());
    }
    if (out.orthogonality_defect > opts.orth_tol)
        out.status = OdecoStatus::not_orthogonal;
    else if (!all_converged || out.remainder_norms.back() > std::max(opts.tol * tnorm, 1e-8 * tnorm))
        out.status = OdecoStatus::not_converged;
    return out;
}

} // namespace tensorspec
