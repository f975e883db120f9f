#pragma once

// Test support: seeded generators for random inputs and naive oracles that
// recompute results with plain loops, independent of the library algorithms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

#include "tensorspec/tensorspec.hpp"

namespace ts_test {

using namespace tensorspec;
using Dims = std::vector<std::size_t>;

// ---------------------------------------------------------------------------
// generators

struct Gen {
    std::mt19937_64 rng;

    explicit Gen(std::uint64_t seed) : rng(seed) {}

    std::size_t size(std::size_t lo, std::size_t hi)
    {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
    }

    double real(double lo = -1.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

    Dims dims(std::size_t max_order, std::size_t max_dim, std::size_t min_order = 1, std::size_t min_dim = 1)
    {
        Dims d(size(min_order, max_order));
        for (auto& m : d) m = size(min_dim, max_dim);
        return d;
    }

    std::vector<double> reals(std::size_t n, double lo = -1.0, double hi = 1.0)
    {
        std::vector<double> v(n);
        for (auto& x : v) x = real(lo, hi);
        return v;
    }

    std::vector<double> unit(std::size_t n)
    {
        std::normal_distribution<double> g;
        std::vector<double> v(n);
        double s = 0;
        do {
            s = 0;
            for (auto& x : v) {
                x = g(rng);
                s += x * x;
            }
        } while (s < 1e-12);
        for (auto& x : v) x /= std::sqrt(s);
        return v;
    }

    DenseTensor tensor(const Dims& d) { return DenseTensor(Shape(d), reals(Shape(d).cardinality())); }

    DenseTensor matrix(std::size_t r, std::size_t c) { return tensor({r, c}); }

    Permutation permutation(std::size_t n)
    {
        Permutation p(n);
        std::iota(p.begin(), p.end(), 1);
        std::shuffle(p.begin(), p.end(), rng);
        return p;
    }

    // random composition of n into contiguous blocks
    std::vector<std::size_t> composition(std::size_t n)
    {
        std::vector<std::size_t> out;
        std::size_t left = n;
        while (left > 0) {
            const auto b = size(1, left);
            out.push_back(b);
            left -= b;
        }
        return out;
    }

    // random orthonormal columns (m x r, r <= m) by Gram-Schmidt
    std::vector<std::vector<double>> orthonormal(std::size_t m, std::size_t r)
    {
        std::vector<std::vector<double>> q;
        while (q.size() < r) {
            auto v = unit(m);
            for (const auto& u : q) {
                double d = 0;
                for (std::size_t i = 0; i < m; ++i) d += u[i] * v[i];
                for (std::size_t i = 0; i < m; ++i) v[i] -= d * u[i];
            }
            double n = 0;
            for (double x : v) n += x * x;
            n = std::sqrt(n);
            if (n < 1e-6) continue;
            for (auto& x : v) x /= n;
            q.push_back(v);
        }
        return q;
    }
};

// ---------------------------------------------------------------------------
// naive index arithmetic

// all multi-indices of `d`, first index varying fastest
inline std::vector<Dims> all_indices(const Dims& d)
{
    std::vector<Dims> out;
    Dims m(d.size(), 1);
    std::function<void(std::size_t)> loop = [&](std::size_t k) {
        if (k == 0) {
            out.push_back(m);
            return;
        }
        for (std::size_t i = 1; i <= d[k - 1]; ++i) {
            m[k - 1] = i;
            loop(k - 1);
        }
    };
    loop(d.size());
    return out;
}

inline std::size_t naive_colex(const Dims& d, const Dims& m)
{
    std::size_t r = 0;
    for (std::size_t k = d.size(); k-- > 0;) r = r * d[k] + (m[k] - 1);
    return r;
}

inline std::size_t naive_lex(const Dims& d, const Dims& m)
{
    std::size_t r = 0;
    for (std::size_t k = 0; k < d.size(); ++k) r = r * d[k] + (m[k] - 1);
    return r;
}

inline double entry(const DenseTensor& t, const Dims& m) { return t.data()[naive_colex(t.shape().dims(), m)]; }

inline DenseTensor build(const Dims& d, const std::function<double(const Dims&)>& f)
{
    std::vector<double> buf(Shape(d).cardinality());
    for (const auto& m : all_indices(d)) buf[naive_colex(d, m)] = f(m);
    return DenseTensor(Shape(d), buf);
}

// ---------------------------------------------------------------------------
// naive oracles

inline double naive_inner(const DenseTensor& a, const DenseTensor& b)
{
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.data()[k] * b.data()[k];
    return s;
}

// t ×_mode L, new index at position `mode`
inline DenseTensor naive_mode_product(const DenseTensor& t, std::size_t mode, const DenseTensor& l)
{
    Dims d = t.shape().dims();
    const std::size_t n = l.shape().dims()[0], m = l.shape().dims()[1];
    Dims out = d;
    out[mode - 1] = n;
    return build(out, [&](const Dims& idx) {
        double s = 0;
        Dims src = idx;
        for (std::size_t j = 1; j <= m; ++j) {
            src[mode - 1] = j;
            s += entry(l, {idx[mode - 1], j}) * entry(t, src);
        }
        return s;
    });
}

inline std::vector<double> naive_matvec(const DenseTensor& a, const std::vector<double>& x)
{
    const auto r = a.shape().dims()[0], c = a.shape().dims()[1];
    std::vector<double> y(r, 0.0);
    for (std::size_t i = 1; i <= r; ++i)
        for (std::size_t j = 1; j <= c; ++j) y[i - 1] += entry(a, {i, j}) * x[j - 1];
    return y;
}

inline DenseTensor naive_matmul(const DenseTensor& a, const DenseTensor& b)
{
    const auto r = a.shape().dims()[0], k = a.shape().dims()[1], c = b.shape().dims()[1];
    return build({r, c}, [&](const Dims& m) {
        double s = 0;
        for (std::size_t j = 1; j <= k; ++j) s += entry(a, {m[0], j}) * entry(b, {j, m[1]});
        return s;
    });
}

// block Kronecker product: (A ⊗ B)[(i-1)p + k, (j-1)q + l] = A[i,j] B[k,l]
inline DenseTensor naive_kron(const DenseTensor& a, const DenseTensor& b)
{
    const auto ar = a.shape().dims()[0], ac = a.shape().dims()[1];
    const auto br = b.shape().dims()[0], bc = b.shape().dims()[1];
    return build({ar * br, ac * bc}, [&](const Dims& m) {
        const auto i = (m[0] - 1) / br + 1, k = (m[0] - 1) % br + 1;
        const auto j = (m[1] - 1) / bc + 1, l = (m[1] - 1) % bc + 1;
        return entry(a, {i, j}) * entry(b, {k, l});
    });
}

// f_o(x) = Σ t[m] Π_{k≠o} x[m_k]
inline std::vector<double> naive_all_but(const DenseTensor& t, std::size_t mode, const std::vector<double>& x)
{
    const Dims& d = t.shape().dims();
    std::vector<double> f(d[mode - 1], 0.0);
    for (const auto& m : all_indices(d)) {
        double p = entry(t, m);
        for (std::size_t k = 0; k < d.size(); ++k)
            if (k + 1 != mode) p *= x[m[k] - 1];
        f[m[mode - 1] - 1] += p;
    }
    return f;
}

inline std::vector<double> naive_all_but_tuple(const DenseTensor& t, std::size_t mode,
                                               const std::vector<std::vector<double>>& xs)
{
    const Dims& d = t.shape().dims();
    std::vector<double> f(d[mode - 1], 0.0);
    for (const auto& m : all_indices(d)) {
        double p = entry(t, m);
        for (std::size_t k = 0; k < d.size(); ++k)
            if (k + 1 != mode) p *= xs[k][m[k] - 1];
        f[m[mode - 1] - 1] += p;
    }
    return f;
}

inline double naive_full(const DenseTensor& t, const std::vector<std::vector<double>>& xs)
{
    double s = 0;
    for (const auto& m : all_indices(t.shape().dims())) {
        double p = entry(t, m);
        for (std::size_t k = 0; k < m.size(); ++k) p *= xs[k][m[k] - 1];
        s += p;
    }
    return s;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b)
{
    double m = 0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return a.size() == b.size() ? m : INFINITY;
}

inline double max_diff(const DenseTensor& a, const DenseTensor& b)
{
    if (a.shape().dims() != b.shape().dims()) return INFINITY;
    return max_diff(a.entries(), b.entries());
}

// symmetric tensor Σ_r w_r v_r^{⊗O} with plain loops
inline DenseTensor naive_symmetric_sum(const std::vector<double>& w, const std::vector<std::vector<double>>& vs,
                                       std::size_t order)
{
    const std::size_t m = vs.front().size();
    return build(Dims(order, m), [&](const Dims& idx) {
        double s = 0;
        for (std::size_t r = 0; r < w.size(); ++r) {
            double p = w[r];
            for (auto i : idx) p *= vs[r][i - 1];
            s += p;
        }
        return s;
    });
}

// random symmetric tensor: average a random tensor over all mode permutations
inline DenseTensor random_symmetric(Gen& g, std::size_t m, std::size_t order)
{
    const Dims d(order, m);
    const auto base = g.tensor(d);
    return build(d, [&](const Dims& idx) {
        Dims p = idx;
        std::sort(p.begin(), p.end());
        double s = 0;
        std::size_t n = 0;
        do {
            s += entry(base, p);
            ++n;
        } while (std::next_permutation(p.begin(), p.end()));
        return s / static_cast<double>(n);
    });
}

// ---------------------------------------------------------------------------
// θ-grid oracle for 2-dimensional modes

struct GridRoot {
    double lambda;
    std::vector<double> x;
};

// Mode-o eigenpairs of a 2x...x2 tensor by scanning x = (cos θ, sin θ) over
// θ ∈ [0, π). Roots of g(θ) = f1 h2 - f2 h1 (h = x or x^{O-1}) are bracketed on
// the grid and refined by bisection; near-zero local minima of |g| are also
// reported. λ is recovered from the component with the largest |h|.
inline std::vector<GridRoot> theta_grid_oracle(const DenseTensor& t, std::size_t mode, bool h_variant,
                                               std::size_t samples)
{
    const std::size_t order = t.shape().order();
    auto hvec = [&](const std::vector<double>& x) {
        if (!h_variant) return x;
        std::vector<double> h(2);
        for (int i = 0; i < 2; ++i) h[i] = std::pow(x[i], static_cast<double>(order - 1));
        return h;
    };
    auto g = [&](double th) {
        const std::vector<double> x{std::cos(th), std::sin(th)};
        const auto f = naive_all_but(t, mode, x);
        const auto h = hvec(x);
        return f[0] * h[1] - f[1] * h[0];
    };
    auto root_at = [&](double th) {
        const std::vector<double> x{std::cos(th), std::sin(th)};
        const auto f = naive_all_but(t, mode, x);
        const auto h = hvec(x);
        const int i = std::abs(h[0]) >= std::abs(h[1]) ? 0 : 1;
        return GridRoot{f[i] / h[i], x};
    };
    const double pi = std::acos(-1.0);
    const double step = pi / static_cast<double>(samples);
    std::vector<double> vals(samples + 1);
    for (std::size_t k = 0; k <= samples; ++k) vals[k] = g(k * step);
    double scale = 0;
    for (double v : vals) scale = std::max(scale, std::abs(v));
    std::vector<GridRoot> out;
    for (std::size_t k = 0; k < samples; ++k) {
        double a = k * step, b = a + step, ga = vals[k], gb = vals[k + 1];
        if (ga == 0) {
            out.push_back(root_at(a));
            continue;
        }
        if ((ga < 0) != (gb < 0) && gb != 0) {
            for (int it = 0; it < 200 && b - a > 1e-16; ++it) {
                const double c = 0.5 * (a + b), gc = g(c);
                if ((gc < 0) == (ga < 0)) {
                    a = c;
                    ga = gc;
                } else {
                    b = c;
                }
            }
            out.push_back(root_at(0.5 * (a + b)));
        } else if (k > 0 && std::abs(vals[k]) <= std::abs(vals[k - 1]) && std::abs(vals[k]) < std::abs(vals[k + 1]) &&
                   std::abs(vals[k]) < 1e-6 * scale) {
            // touching root: golden-section on |g|
            double lo = a - step, hi = b;
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) * 0.381966, m2 = hi - (hi - lo) * 0.381966;
                if (std::abs(g(m1)) < std::abs(g(m2)))
                    hi = m2;
                else
                    lo = m1;
            }
            out.push_back(root_at(0.5 * (lo + hi)));
        }
    }
    return out;
}

} // namespace ts_test
