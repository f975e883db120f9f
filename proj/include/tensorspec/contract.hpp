#pragma once

// Contractions: dot products, internal traces, binary single-mode
// contraction, mode-o products and vector contractions on all or all-but-one
// modes.
//
// Scalar-valued contractions (order would drop to 0) are returned as shape
// [1] tensors; `scalar()` extracts the value.
//
// mode_product keeps the transformed mode in position o. Some references
// move it to the last position instead; that convention is not used here.

#include <cstddef>
#include <span>
#include <vector>

#include "tensorspec/error.hpp"
#include "tensorspec/shape.hpp"
#include "tensorspec/tensor.hpp"

namespace tensorspec {

using Vector = std::vector<double>;

/// Value of a shape-[1] (or any single-entry) tensor.
inline double scalar(const DenseTensor& t)
{
    detail::require<ShapeError>(t.size() == 1, "tensor is not a scalar");
    return t.data()[0];
}

inline double dot(std::span<const double> u, std::span<const double> v)
{
    detail::require<ShapeError>(u.size() == v.size(), "dot: length mismatch");
    long double acc = 0;
    for (std::size_t k = 0; k < u.size(); ++k) acc += static_cast<long double>(u[k]) * v[k];
    return static_cast<double>(acc);
}

inline double dot(const DenseTensor& u, const DenseTensor& v)
{
    detail::require<ShapeError>(u.order() == 1 && v.order() == 1, "dot needs two vectors");
    return dot(u.data(), v.data());
}

namespace detail {

inline Shape shape_or_scalar(std::vector<std::size_t> dims)
{
    if (dims.empty()) dims.push_back(1);
    return Shape(std::move(dims));
}

inline std::vector<std::size_t> dims_without(const Shape& s, std::size_t mode_a,
                                             std::size_t mode_b = 0)
{
    std::vector<std::size_t> d;
    for (std::size_t o = 1; o <= s.order(); ++o)
        if (o != mode_a && o != mode_b) d.push_back(s.dim(o));
    return d;
}

/// View of a tensor as (prefix, mode, suffix) blocks around one mode.
struct ModeSplit {
    std::size_t inner;  // product of dims before the mode (its stride)
    std::size_t n;      // the mode's size
    std::size_t outer;  // product of dims after the mode

    ModeSplit(const Shape& s, std::size_t mode)
    {
        s.check_mode(mode);
        inner = 1;
        for (std::size_t o = 1; o < mode; ++o) inner *= s.dim(o);
        n = s.dim(mode);
        outer = s.cardinality() / (inner * n);
    }

    std::size_t offset(std::size_t i, std::size_t k, std::size_t j) const noexcept
    {
        return i + inner * (k + n * j);
    }
};

} // namespace detail

/// Contract modes `mode_a` and `mode_b` of `t` against each other.
inline DenseTensor trace_pair(const DenseTensor& t, std::size_t mode_a, std::size_t mode_b)
{
    t.shape().check_mode(mode_a);
    t.shape().check_mode(mode_b);
    detail::require<ShapeError>(mode_a != mode_b, "trace needs two distinct modes");
    detail::require<ShapeError>(t.dim(mode_a) == t.dim(mode_b),
                                "traced modes must have equal sizes");
    const Shape out_shape = detail::shape_or_scalar(detail::dims_without(t.shape(), mode_a, mode_b));
    std::vector<long double> acc(out_shape.cardinality(), 0.0L);
    const auto dims = t.shape().dims();
    MultiIndex m(t.order(), 1);
    std::size_t k = 0;
    do {
        if (m[mode_a - 1] == m[mode_b - 1]) {
            std::size_t off = 0;
            for (std::size_t o = t.order(); o-- > 0;) {
                if (o + 1 == mode_a || o + 1 == mode_b) continue;
                off = off * dims[o] + (m[o] - 1);
            }
            acc[off] += t.data()[k];
        }
        ++k;
    } while (next_colex(t.shape(), m));
    std::vector<double> out(acc.begin(), acc.end());
    return DenseTensor(out_shape, std::move(out));
}

/// Trace of a square matrix.
inline double trace(const Matrix& a)
{
    require_matrix(a, "trace operand");
    return scalar(trace_pair(a, 1, 2));
}

/// Contract mode `mode_a` of `a` with mode `mode_b` of `b`. The result keeps
/// the surviving modes of `a` first, then those of `b`.
inline DenseTensor contract(const DenseTensor& a, std::size_t mode_a, const DenseTensor& b,
                            std::size_t mode_b)
{
    a.shape().check_mode(mode_a);
    b.shape().check_mode(mode_b);
    detail::require<ShapeError>(a.dim(mode_a) == b.dim(mode_b),
                                "contracted modes must have equal sizes");
    const detail::ModeSplit sa(a.shape(), mode_a), sb(b.shape(), mode_b);
    const auto n = sa.n;
    const auto rest_a = sa.inner * sa.outer, rest_b = sb.inner * sb.outer;

    auto dims = detail::dims_without(a.shape(), mode_a);
    const auto db = detail::dims_without(b.shape(), mode_b);
    dims.insert(dims.end(), db.begin(), db.end());

    std::vector<double> out(rest_a * rest_b);
    for (std::size_t jb = 0; jb < sb.outer; ++jb)
        for (std::size_t ib = 0; ib < sb.inner; ++ib)
            for (std::size_t ja = 0; ja < sa.outer; ++ja)
                for (std::size_t ia = 0; ia < sa.inner; ++ia) {
                    long double acc = 0;
                    for (std::size_t k = 0; k < n; ++k)
                        acc += static_cast<long double>(a.data()[sa.offset(ia, k, ja)]) *
                               b.data()[sb.offset(ib, k, jb)];
                    const auto ra = ia + sa.inner * ja, rb = ib + sb.inner * jb;
                    out[ra + rest_a * rb] = static_cast<double>(acc);
                }
    return DenseTensor(detail::shape_or_scalar(std::move(dims)), std::move(out));
}

/// Matrix product X·Y.
inline Matrix matmul(const Matrix& x, const Matrix& y)
{
    require_matrix(x, "matmul operand");
    require_matrix(y, "matmul operand");
    return contract(x, 2, y, 1);
}

/// Replace every mode-`mode` fiber f by L·f. The new mode stays at `mode`
/// and has size L.rows().
inline DenseTensor mode_product(const DenseTensor& t, std::size_t mode, const Matrix& l)
{
    require_matrix(l, "mode product factor");
    t.shape().check_mode(mode);
    detail::require<ShapeError>(l.cols() == t.dim(mode),
                                "mode product: factor width " + std::to_string(l.cols()) +
                                    " does not match mode size " + std::to_string(t.dim(mode)));
    const detail::ModeSplit s(t.shape(), mode);
    const auto h = l.rows();
    auto dims = t.shape().dims();
    dims[mode - 1] = h;
    std::vector<double> out(s.inner * h * s.outer);
    for (std::size_t j = 0; j < s.outer; ++j)
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t i = 0; i < s.inner; ++i) {
                long double acc = 0;
                for (std::size_t k = 0; k < s.n; ++k)
                    acc += static_cast<long double>(l.data()[k * h + r]) * t.data()[s.offset(i, k, j)];
                out[i + s.inner * (r + h * j)] = static_cast<double>(acc);
            }
    return DenseTensor(Shape(std::move(dims)), std::move(out));
}

/// (L_1 ⊗ ... ⊗ L_O)(g): one mode product per mode.
inline DenseTensor multi_mode_product(const DenseTensor& g, std::span<const Matrix> factors)
{
    detail::require<ShapeError>(factors.size() == g.order(),
                                "multi-mode product needs one factor per mode");
    DenseTensor out = g;
    for (std::size_t o = 1; o <= g.order(); ++o) out = mode_product(out, o, factors[o - 1]);
    return out;
}

/// Entrywise dot product over all modes.
inline double contract_all(const DenseTensor& t, const DenseTensor& u)
{
    return frobenius_inner(t, u);
}

/// ⟨t, x_1 ⊗ ... ⊗ x_O⟩.
inline double contract_full(const DenseTensor& t, std::span<const Vector> xs)
{
    detail::require<ShapeError>(xs.size() == t.order(), "need one vector per mode");
    for (std::size_t o = 0; o < xs.size(); ++o)
        detail::require<ShapeError>(xs[o].size() == t.shape().dims()[o],
                                    "vector length does not match mode size");
    long double acc = 0;
    MultiIndex m(t.order(), 1);
    std::size_t k = 0;
    do {
        long double p = t.data()[k++];
        for (std::size_t o = 0; o < m.size(); ++o) p *= xs[o][m[o] - 1];
        acc += p;
    } while (next_colex(t.shape(), m));
    return static_cast<double>(acc);
}

namespace detail {

// Shared kernel: `xs` holds one vector per mode; entries for skipped modes
// are ignored.
inline Vector contract_skipping(const DenseTensor& t, std::size_t skip, std::span<const Vector> xs)
{
    std::vector<long double> acc(t.dim(skip), 0.0L);
    MultiIndex m(t.order(), 1);
    std::size_t k = 0;
    do {
        long double p = t.data()[k++];
        for (std::size_t o = 0; o < m.size(); ++o)
            if (o + 1 != skip) p *= xs[o][m[o] - 1];
        acc[m[skip - 1] - 1] += p;
    } while (next_colex(t.shape(), m));
    return Vector(acc.begin(), acc.end());
}

inline void check_all_but(const DenseTensor& t, std::size_t skip, std::span<const Vector> xs)
{
    t.shape().check_mode(skip);
    detail::require<ShapeError>(xs.size() == t.order(), "need one vector slot per mode");
    for (std::size_t o = 1; o <= t.order(); ++o)
        if (o != skip)
            detail::require<ShapeError>(xs[o - 1].size() == t.dim(o),
                                        "vector length does not match mode " + std::to_string(o));
}

} // namespace detail

/// Contract `t` with a vector on every mode except `mode`. `xs` lists the
/// O-1 vectors for the remaining modes in increasing mode order.
inline Vector contract_all_but(const DenseTensor& t, std::size_t mode, std::span<const Vector> xs)
{
    t.shape().check_mode(mode);
    detail::require<ShapeError>(xs.size() + 1 == t.order(),
                                "contract_all_but needs O-1 vectors");
    std::vector<Vector> slots;
    slots.reserve(t.order());
    for (std::size_t o = 1, k = 0; o <= t.order(); ++o)
        slots.push_back(o == mode ? Vector{} : xs[k++]);
    detail::check_all_but(t, mode, slots);
    return detail::contract_skipping(t, mode, slots);
}

inline Vector contract_all_but(const DenseTensor& t, std::size_t mode,
                               std::initializer_list<Vector> xs)
{
    return contract_all_but(t, mode, std::span<const Vector>(xs.begin(), xs.size()));
}

/// Same contraction, with `xs` holding one vector per mode (xs[mode-1] unused).
inline Vector contract_all_but_slots(const DenseTensor& t, std::size_t mode,
                                     std::span<const Vector> xs)
{
    detail::check_all_but(t, mode, xs);
    return detail::contract_skipping(t, mode, xs);
}

/// Contract a cubical tensor with the same vector on every mode but `mode`.
inline Vector contract_all_but_same(const DenseTensor& t, std::size_t mode, const Vector& x)
{
    std::vector<Vector> slots(t.order(), x);
    detail::check_all_but(t, mode, slots);
    return detail::contract_skipping(t, mode, slots);
}

/// Contract with vectors on every mode except `mode_a` and `mode_b`,
/// returning the dim(mode_a) x dim(mode_b) matrix. Jacobian building block.
inline Matrix contract_all_but_two(const DenseTensor& t, std::size_t mode_a, std::size_t mode_b,
                                   std::span<const Vector> xs)
{
    t.shape().check_mode(mode_a);
    t.shape().check_mode(mode_b);
    detail::require<ShapeError>(mode_a != mode_b, "need two distinct modes");
    detail::require<ShapeError>(xs.size() == t.order(), "need one vector slot per mode");
    const auto h = t.dim(mode_a), w = t.dim(mode_b);
    std::vector<long double> acc(h * w, 0.0L);
    MultiIndex m(t.order(), 1);
    std::size_t k = 0;
    do {
        long double p = t.data()[k++];
        for (std::size_t o = 0; o < m.size(); ++o)
            if (o + 1 != mode_a && o + 1 != mode_b) p *= xs[o][m[o] - 1];
        acc[(m[mode_b - 1] - 1) * h + (m[mode_a - 1] - 1)] += p;
    } while (next_colex(t.shape(), m));
    return DenseTensor(Shape{h, w}, std::vector<double>(acc.begin(), acc.end()));
}

} // namespace tensorspec
