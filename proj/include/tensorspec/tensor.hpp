#pragma once

// Dense real tensors stored in colex (column-major) order, plus the
// structural operations on them: outer products, fibers, unfoldings,
// mode permutations, Kronecker and Zehfuss products, moment tensors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "tensorspec/error.hpp"
#include "tensorspec/shape.hpp"

namespace tensorspec {

/// Immutable dense tensor. Entries are kept in colex order, so entry
/// (m_1, ..., m_O) lives at Shape::offset(m). Non-finite entries are
/// rejected at construction.
class DenseTensor {
public:
    DenseTensor() : DenseTensor(Shape{1}) {}

    /// Zero tensor.
    explicit DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_.cardinality(), 0.0)
    {
    }

    /// Tensor from a colex-ordered buffer.
    DenseTensor(Shape shape, std::vector<double> colex_entries)
        : shape_(std::move(shape)), data_(std::move(colex_entries))
    {
        detail::require<ShapeError>(data_.size() == shape_.cardinality(),
                                    "entry count " + std::to_string(data_.size()) +
                                        " does not match shape " + shape_.to_string());
        for (double v : data_)
            detail::require(std::isfinite(v), "tensor entries must be finite");
    }

    static DenseTensor vector(std::vector<double> entries)
    {
        const auto n = entries.size();
        return DenseTensor(Shape{n}, std::move(entries));
    }

    /// Matrix from nested rows, e.g. matrix({{1, 2}, {3, 4}}).
    static DenseTensor matrix(const std::vector<std::vector<double>>& rows)
    {
        detail::require<ShapeError>(!rows.empty() && !rows.front().empty(),
                                    "matrix must have at least one row and column");
        const auto h = rows.size(), w = rows.front().size();
        std::vector<double> buf(h * w);
        for (std::size_t i = 0; i < h; ++i) {
            detail::require<ShapeError>(rows[i].size() == w, "ragged matrix rows");
            for (std::size_t j = 0; j < w; ++j) buf[j * h + i] = rows[i][j];
        }
        return DenseTensor(Shape{h, w}, std::move(buf));
    }

    static DenseTensor identity(std::size_t n)
    {
        std::vector<double> buf(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i) buf[i * n + i] = 1.0;
        return DenseTensor(Shape{n, n}, std::move(buf));
    }

    /// Cubical order-`order` tensor with `weights` on the hyperdiagonal.
    static DenseTensor hyperdiagonal(std::span<const double> weights, std::size_t order)
    {
        const auto r = weights.size();
        detail::require<ShapeError>(r >= 1 && order >= 1, "hyperdiagonal needs size and order >= 1");
        Shape shape(std::vector<std::size_t>(order, r));
        std::vector<double> buf(shape.cardinality(), 0.0);
        std::size_t step = 0;
        for (std::size_t o = 0, s = 1; o < order; ++o, s *= r) step += s;
        for (std::size_t k = 0; k < r; ++k) buf[k * step] = weights[k];
        return DenseTensor(std::move(shape), std::move(buf));
    }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.order(); }
    std::size_t dim(std::size_t o) const { return shape_.dim(o); }
    std::size_t size() const noexcept { return data_.size(); }

    /// Colex-ordered entries.
    std::span<const double> data() const noexcept { return data_; }
    const std::vector<double>& entries() const noexcept { return data_; }

    /// Entry at a 1-based multi-index (checked).
    double at(std::span<const std::size_t> m) const
    {
        shape_.check_index(m);
        return data_[shape_.offset(m)];
    }

    double at(std::initializer_list<std::size_t> m) const
    {
        return at(std::span<const std::size_t>(m.begin(), m.size()));
    }

    double operator()(std::span<const std::size_t> m) const { return at(m); }

    template <class... I>
        requires(std::is_integral_v<I> && ...)
    double operator()(I... idx) const
    {
        const std::size_t m[] = {static_cast<std::size_t>(idx)...};
        return at(std::span<const std::size_t>(m));
    }

    bool is_matrix() const noexcept { return order() == 2; }
    std::size_t rows() const { return dim(1); }
    std::size_t cols() const { return dim(2); }

    friend bool operator==(const DenseTensor&, const DenseTensor&) = default;

private:
    Shape shape_;
    std::vector<double> data_;
};

/// Order-2 DenseTensor. Kept as an alias: matrices are tensors.
using Matrix = DenseTensor;

inline void require_matrix(const DenseTensor& t, const char* what)
{
    detail::require<ShapeError>(t.is_matrix(), std::string(what) + " must be a matrix");
}

inline void require_same_shape(const DenseTensor& a, const DenseTensor& b)
{
    detail::require<ShapeError>(a.shape() == b.shape(), "shape mismatch: " +
                                                            a.shape().to_string() + " vs " +
                                                            b.shape().to_string());
}

// ---------------------------------------------------------------------------
// Elementwise arithmetic

inline DenseTensor operator+(const DenseTensor& a, const DenseTensor& b)
{
    require_same_shape(a, b);
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] + b.data()[k];
    return DenseTensor(a.shape(), std::move(out));
}

inline DenseTensor operator-(const DenseTensor& a, const DenseTensor& b)
{
    require_same_shape(a, b);
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = a.data()[k] - b.data()[k];
    return DenseTensor(a.shape(), std::move(out));
}

inline DenseTensor operator*(double s, const DenseTensor& a)
{
    std::vector<double> out(a.data().begin(), a.data().end());
    for (auto& v : out) v *= s;
    return DenseTensor(a.shape(), std::move(out));
}

inline DenseTensor operator*(const DenseTensor& a, double s) { return s * a; }

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b)
{
    require_same_shape(a, b);
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
    return d;
}

inline double max_abs(const DenseTensor& a)
{
    double d = 0;
    for (double v : a.data()) d = std::max(d, std::abs(v));
    return d;
}

// ---------------------------------------------------------------------------
// Construction

inline DenseTensor unit_tensor(const Shape& shape, std::span<const std::size_t> m)
{
    shape.check_index(m);
    std::vector<double> buf(shape.cardinality(), 0.0);
    buf[shape.offset(m)] = 1.0;
    return DenseTensor(shape, std::move(buf));
}

inline DenseTensor unit_tensor(const Shape& shape, std::initializer_list<std::size_t> m)
{
    return unit_tensor(shape, std::span<const std::size_t>(m.begin(), m.size()));
}

/// Standard basis vector e_m of length n (1-based m).
inline DenseTensor unit_vector(std::size_t n, std::size_t m)
{
    return unit_tensor(Shape{n}, {m});
}

/// Outer product of one or more tensors. The result's shape is the
/// concatenation of the factor shapes.
inline DenseTensor outer(std::span<const DenseTensor> factors)
{
    detail::require<ShapeError>(!factors.empty(), "outer product needs at least one factor");
    std::vector<std::size_t> dims;
    std::vector<double> buf{1.0};
    // Colex layout: each new factor's modes are slower than all previous ones.
    for (const auto& f : factors) {
        dims.insert(dims.end(), f.shape().dims().begin(), f.shape().dims().end());
        std::vector<double> next;
        next.reserve(buf.size() * f.size());
        for (double fv : f.data())
            for (double bv : buf) next.push_back(bv * fv);
        buf = std::move(next);
    }
    return DenseTensor(Shape(std::move(dims)), std::move(buf));
}

inline DenseTensor outer(std::initializer_list<DenseTensor> factors)
{
    return outer(std::span<const DenseTensor>(factors.begin(), factors.size()));
}

inline DenseTensor outer(const DenseTensor& a, const DenseTensor& b)
{
    return outer({a, b});
}

/// v ⊗ v ⊗ ... ⊗ v with `order` copies.
inline DenseTensor outer_power(const DenseTensor& v, std::size_t order)
{
    detail::require<ShapeError>(order >= 1, "outer power needs order >= 1");
    std::vector<DenseTensor> f(order, v);
    return outer(f);
}

// ---------------------------------------------------------------------------
// Fibers, inner products, permutations

/// Mode-`mode` fiber through the entries whose other coordinates are `fixed`
/// (listed in mode order, skipping `mode`).
inline DenseTensor fiber(const DenseTensor& t, std::size_t mode, std::span<const std::size_t> fixed)
{
    t.shape().check_mode(mode);
    detail::require<IndexError>(fixed.size() + 1 == t.order(),
                                "fiber needs one fixed index per remaining mode");
    MultiIndex m(t.order());
    for (std::size_t o = 1, k = 0; o <= t.order(); ++o)
        m[o - 1] = (o == mode) ? 1 : fixed[k++];
    t.shape().check_index(m);
    const auto n = t.dim(mode);
    std::vector<double> out(n);
    for (std::size_t i = 1; i <= n; ++i) {
        m[mode - 1] = i;
        out[i - 1] = t.data()[t.shape().offset(m)];
    }
    return DenseTensor::vector(std::move(out));
}

inline DenseTensor fiber(const DenseTensor& t, std::size_t mode,
                         std::initializer_list<std::size_t> fixed)
{
    return fiber(t, mode, std::span<const std::size_t>(fixed.begin(), fixed.size()));
}

inline double frobenius_inner(const DenseTensor& a, const DenseTensor& b)
{
    require_same_shape(a, b);
    long double acc = 0;
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += static_cast<long double>(a.data()[k]) * b.data()[k];
    return static_cast<double>(acc);
}

inline double frobenius_norm(const DenseTensor& a)
{
    return std::sqrt(frobenius_inner(a, a));
}

/// Reorder modes: mode k of the result is mode perm[k] of `t` (1-based).
inline DenseTensor permute_modes(const DenseTensor& t, std::span<const std::size_t> perm)
{
    check_permutation(perm, t.order());
    const auto order = t.order();
    std::vector<std::size_t> dims(order);
    for (std::size_t k = 0; k < order; ++k) dims[k] = t.shape().dims()[perm[k] - 1];
    Shape out_shape(dims);
    const auto src_strides = t.shape().strides();
    std::vector<std::size_t> stride_of(order);
    for (std::size_t k = 0; k < order; ++k) stride_of[k] = src_strides[perm[k] - 1];

    std::vector<double> out(t.size());
    MultiIndex n(order, 1);
    std::size_t k = 0;
    do {
        std::size_t src = 0;
        for (std::size_t o = 0; o < order; ++o) src += (n[o] - 1) * stride_of[o];
        out[k++] = t.data()[src];
    } while (next_colex(out_shape, n));
    return DenseTensor(std::move(out_shape), std::move(out));
}

inline DenseTensor permute_modes(const DenseTensor& t, std::initializer_list<std::size_t> perm)
{
    return permute_modes(t, std::span<const std::size_t>(perm.begin(), perm.size()));
}

/// Matrix transpose.
inline DenseTensor transpose(const DenseTensor& a)
{
    require_matrix(a, "transpose operand");
    return permute_modes(a, {2, 1});
}

/// Largest entrywise deviation between `t` and its images under the
/// adjacent transpositions (k, k+1). These generate the symmetric group, so
/// the defect is zero exactly when t is invariant under every permutation.
inline double symmetry_defect(const DenseTensor& t)
{
    detail::require<ShapeError>(t.shape().is_cubical(), "symmetry needs a cubical tensor");
    double d = 0;
    for (std::size_t k = 1; k < t.order(); ++k)
        d = std::max(d, max_abs_diff(t, permute_modes(t, transposition(t.order(), k, k + 1))));
    return d;
}

inline bool is_symmetric(const DenseTensor& t, double tol = 0.0)
{
    detail::require(tol >= 0, "symmetry tolerance must be >= 0");
    return symmetry_defect(t) <= tol;
}

/// Drop all size-1 modes. A tensor with only size-1 modes becomes shape [1].
inline DenseTensor squeeze(const DenseTensor& t)
{
    std::vector<std::size_t> dims;
    for (auto d : t.shape().dims())
        if (d != 1) dims.push_back(d);
    if (dims.empty()) dims.push_back(1);
    return DenseTensor(Shape(std::move(dims)), t.entries());
}

// ---------------------------------------------------------------------------
// Vectorization and matricization

inline DenseTensor vectorize(const DenseTensor& t, Ordering ord = Ordering::colex)
{
    if (ord == Ordering::colex) return DenseTensor::vector(t.entries());
    std::vector<double> out;
    out.reserve(t.size());
    MultiIndex m(t.order(), 1);
    do {
        out.push_back(t.data()[t.shape().offset(m)]);
    } while (next_lex(t.shape(), m));
    return DenseTensor::vector(std::move(out));
}

/// Inverse of vectorize.
inline DenseTensor tensorize(std::span<const double> v, const Shape& shape,
                             Ordering ord = Ordering::colex)
{
    detail::require<ShapeError>(v.size() == shape.cardinality(),
                                "vector length does not match shape " + shape.to_string());
    if (ord == Ordering::colex) return DenseTensor(shape, std::vector<double>(v.begin(), v.end()));
    std::vector<double> out(v.size());
    MultiIndex m(shape.order(), 1);
    std::size_t k = 0;
    do {
        out[shape.offset(m)] = v[k++];
    } while (next_lex(shape, m));
    return DenseTensor(shape, std::move(out));
}

/// Unfold `t` into a matrix. Rows are indexed by the `ord`-rank over
/// `row_modes` (in the order given), columns by the `ord`-rank over the
/// remaining modes in increasing order.
inline Matrix matricize(const DenseTensor& t, std::span<const std::size_t> row_modes,
                        Ordering ord = Ordering::colex)
{
    const auto order = t.order();
    detail::require<ShapeError>(!row_modes.empty() && row_modes.size() < order,
                                "row modes must be a nonempty proper subset of the modes");
    std::vector<bool> is_row(order, false);
    for (auto o : row_modes) {
        t.shape().check_mode(o);
        detail::require(!is_row[o - 1], "row modes must be distinct");
        is_row[o - 1] = true;
    }
    std::vector<std::size_t> col_modes;
    for (std::size_t o = 1; o <= order; ++o)
        if (!is_row[o - 1]) col_modes.push_back(o);

    auto sub_shape = [&](std::span<const std::size_t> modes) {
        std::vector<std::size_t> d;
        for (auto o : modes) d.push_back(t.dim(o));
        return Shape(std::move(d));
    };
    const Shape rs = sub_shape(row_modes), cs = sub_shape(col_modes);
    const auto h = rs.cardinality(), w = cs.cardinality();

    std::vector<double> out(h * w);
    MultiIndex m(order, 1), ri(row_modes.size()), ci(col_modes.size());
    do {
        for (std::size_t k = 0; k < row_modes.size(); ++k) ri[k] = m[row_modes[k] - 1];
        for (std::size_t k = 0; k < col_modes.size(); ++k) ci[k] = m[col_modes[k] - 1];
        const auto i = rank(rs, ri, ord) - 1, j = rank(cs, ci, ord) - 1;
        out[j * h + i] = t.data()[t.shape().offset(m)];
    } while (next_colex(t.shape(), m));
    return DenseTensor(Shape{h, w}, std::move(out));
}

inline Matrix matricize(const DenseTensor& t, std::initializer_list<std::size_t> row_modes,
                        Ordering ord = Ordering::colex)
{
    return matricize(t, std::span<const std::size_t>(row_modes.begin(), row_modes.size()), ord);
}

/// Mode-o unfolding (M_o rows).
inline Matrix unfold(const DenseTensor& t, std::size_t mode)
{
    if (t.order() == 1) {
        t.shape().check_mode(mode);
        return DenseTensor(Shape{t.dim(1), 1}, t.entries());
    }
    const std::size_t m[] = {mode};
    return matricize(t, std::span<const std::size_t>(m));
}

// ---------------------------------------------------------------------------
// Kronecker and Zehfuss products

inline Matrix kronecker(const Matrix& a, const Matrix& b)
{
    require_matrix(a, "kronecker operand");
    require_matrix(b, "kronecker operand");
    const auto ha = a.rows(), wa = a.cols(), hb = b.rows(), wb = b.cols();
    const auto h = ha * hb, w = wa * wb;
    std::vector<double> out(h * w);
    for (std::size_t ja = 0; ja < wa; ++ja)
        for (std::size_t ia = 0; ia < ha; ++ia) {
            const double av = a.data()[ja * ha + ia];
            for (std::size_t jb = 0; jb < wb; ++jb)
                for (std::size_t ib = 0; ib < hb; ++ib)
                    out[(ja * wb + jb) * h + ia * hb + ib] = av * b.data()[jb * hb + ib];
        }
    return DenseTensor(Shape{h, w}, std::move(out));
}

/// Kronecker product of a list of matrices, left to right.
inline Matrix kronecker(std::span<const Matrix> ms)
{
    detail::require<ShapeError>(!ms.empty(), "kronecker chain needs at least one matrix");
    Matrix acc = ms.front();
    require_matrix(acc, "kronecker operand");
    for (std::size_t k = 1; k < ms.size(); ++k) acc = kronecker(acc, ms[k]);
    return acc;
}

/// Outer product of `a` and `b` with the mode blocks interleaved:
/// (a-block 1, b-block 1, a-block 2, b-block 2, ...).
inline DenseTensor zehfuss(const DenseTensor& a, const ContiguousPartition& pa, const DenseTensor& b,
                           const ContiguousPartition& pb)
{
    detail::require<ShapeError>(pa.ground_size() == a.order() && pb.ground_size() == b.order(),
                                "partitions must cover the modes of their tensors");
    detail::require<ShapeError>(pa.block_count() == pb.block_count(),
                                "Zehfuss product needs equal block counts");
    Permutation perm;
    perm.reserve(a.order() + b.order());
    for (std::size_t blk = 1; blk <= pa.block_count(); ++blk) {
        for (std::size_t k = 0, s = pa.block_begin(blk); k < pa.block_lengths()[blk - 1]; ++k)
            perm.push_back(s + k);
        for (std::size_t k = 0, s = pb.block_begin(blk); k < pb.block_lengths()[blk - 1]; ++k)
            perm.push_back(a.order() + s + k);
    }
    return permute_modes(outer(a, b), perm);
}

// ---------------------------------------------------------------------------
// Moment tensors

/// Empirical O-th moment tensor mean(x^{⊗O}), or mean((x - x̄)^{⊗O}) when
/// `central` is set.
inline DenseTensor moment_tensor(std::span<const std::vector<double>> samples, std::size_t order,
                                 bool central = false)
{
    detail::require(!samples.empty(), "moment tensor needs at least one sample");
    detail::require(order >= 1, "moment order must be >= 1");
    const auto m = samples.front().size();
    detail::require(m >= 1, "samples must be nonempty vectors");
    std::vector<double> mean(m, 0.0);
    for (const auto& x : samples) {
        detail::require<ShapeError>(x.size() == m, "ragged samples");
        for (std::size_t i = 0; i < m; ++i) mean[i] += x[i];
    }
    for (auto& v : mean) v /= static_cast<double>(samples.size());

    const Shape shape(std::vector<std::size_t>(order, m));
    std::vector<long double> acc(shape.cardinality(), 0.0L);
    std::vector<double> y(m);
    MultiIndex idx(order);
    for (const auto& x : samples) {
        for (std::size_t i = 0; i < m; ++i) y[i] = central ? x[i] - mean[i] : x[i];
        std::fill(idx.begin(), idx.end(), 1);
        std::size_t k = 0;
        do {
            long double p = 1;
            for (auto i : idx) p *= y[i - 1];
            acc[k++] += p;
        } while (next_colex(shape, idx));
    }
    std::vector<double> out(acc.size());
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = static_cast<double>(acc[k] / static_cast<long double>(samples.size()));
    return DenseTensor(shape, std::move(out));
}

} // namespace tensorspec
