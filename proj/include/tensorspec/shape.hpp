#pragma once

// Multi-index sets, their lex/colex linear orders, mode permutations and
// contiguous partitions of mode index sets.
//
// All user-facing indices are 1-based: a multi-index over a shape
// (M_1, ..., M_O) has components m_o in {1, ..., M_o}, modes are numbered
// 1..O and ranks run over 1..M_1*...*M_O. Conversion to 0-based offsets
// happens only in Shape::offset and the storage layer built on it.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tensorspec/error.hpp"

namespace tensorspec {

using MultiIndex = std::vector<std::size_t>;

/// 1-based mode permutation: perm[k-1] is the source mode placed at position k.
using Permutation = std::vector<std::size_t>;

enum class Ordering { lex, colex };

inline std::string to_string(Ordering ord)
{
    return ord == Ordering::lex ? "lex" : "colex";
}

/// Ordered list of mode sizes.
class Shape {
public:
    Shape() = default;

    explicit Shape(std::vector<std::size_t> dims) : dims_(std::move(dims))
    {
        detail::require<ShapeError>(!dims_.empty(), "shape must have order >= 1");
        for (auto d : dims_)
            detail::require<ShapeError>(d >= 1, "shape dims must be >= 1");
    }

    Shape(std::initializer_list<std::size_t> dims) : Shape(std::vector<std::size_t>(dims)) {}

    std::size_t order() const noexcept { return dims_.size(); }

    /// Size of mode `o` (1-based).
    std::size_t dim(std::size_t o) const
    {
        check_mode(o);
        return dims_[o - 1];
    }

    const std::vector<std::size_t>& dims() const noexcept { return dims_; }

    std::size_t cardinality() const noexcept
    {
        return std::accumulate(dims_.begin(), dims_.end(), std::size_t{1},
                               std::multiplies<>{});
    }

    bool is_cubical() const noexcept
    {
        return std::adjacent_find(dims_.begin(), dims_.end(), std::not_equal_to<>{}) ==
               dims_.end();
    }

    bool contains(std::span<const std::size_t> m) const noexcept
    {
        if (m.size() != dims_.size()) return false;
        for (std::size_t o = 0; o < m.size(); ++o)
            if (m[o] < 1 || m[o] > dims_[o]) return false;
        return true;
    }

    void check_index(std::span<const std::size_t> m) const
    {
        detail::require<IndexError>(contains(m), "multi-index out of range for shape " +
                                                     to_string());
    }

    void check_mode(std::size_t o) const
    {
        detail::require<IndexError>(o >= 1 && o <= dims_.size(),
                                    "mode " + std::to_string(o) + " out of range for order " +
                                        std::to_string(dims_.size()));
    }

    /// Colex stride of each mode in the 0-based entry buffer.
    std::vector<std::size_t> strides() const
    {
        std::vector<std::size_t> s(dims_.size());
        std::size_t acc = 1;
        for (std::size_t o = 0; o < dims_.size(); ++o) {
            s[o] = acc;
            acc *= dims_[o];
        }
        return s;
    }

    /// 0-based colex offset of a valid 1-based multi-index (unchecked).
    std::size_t offset(std::span<const std::size_t> m) const noexcept
    {
        std::size_t off = 0;
        for (std::size_t o = dims_.size(); o-- > 0;)
            off = off * dims_[o] + (m[o] - 1);
        return off;
    }

    /// Shape with the listed modes (1-based) removed, in original order.
    Shape without(std::span<const std::size_t> modes) const
    {
        std::vector<std::size_t> d;
        for (std::size_t o = 1; o <= order(); ++o)
            if (std::find(modes.begin(), modes.end(), o) == modes.end()) d.push_back(dims_[o - 1]);
        return Shape(std::move(d));
    }

    std::string to_string() const
    {
        std::string s = "[";
        for (std::size_t o = 0; o < dims_.size(); ++o) {
            if (o) s += ",";
            s += std::to_string(dims_[o]);
        }
        return s + "]";
    }

    friend bool operator==(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> dims_;
};

/// Advance `m` to its colex successor. Returns false after the last element,
/// leaving `m` reset to (1, ..., 1).
inline bool next_colex(const Shape& shape, MultiIndex& m) noexcept
{
    for (std::size_t o = 0; o < m.size(); ++o) {
        if (m[o] < shape.dims()[o]) {
            ++m[o];
            return true;
        }
        m[o] = 1;
    }
    return false;
}

/// Advance `m` to its lex successor (last coordinate fastest).
inline bool next_lex(const Shape& shape, MultiIndex& m) noexcept
{
    for (std::size_t o = m.size(); o-- > 0;) {
        if (m[o] < shape.dims()[o]) {
            ++m[o];
            return true;
        }
        m[o] = 1;
    }
    return false;
}

inline std::size_t colex_rank(const Shape& shape, std::span<const std::size_t> m)
{
    shape.check_index(m);
    return shape.offset(m) + 1;
}

inline std::size_t lex_rank(const Shape& shape, std::span<const std::size_t> m)
{
    shape.check_index(m);
    std::size_t off = 0;
    for (std::size_t o = 0; o < m.size(); ++o)
        off = off * shape.dims()[o] + (m[o] - 1);
    return off + 1;
}

inline std::size_t rank(const Shape& shape, std::span<const std::size_t> m, Ordering ord)
{
    return ord == Ordering::colex ? colex_rank(shape, m) : lex_rank(shape, m);
}

inline MultiIndex unrank(const Shape& shape, std::size_t k, Ordering ord)
{
    detail::require<IndexError>(k >= 1 && k <= shape.cardinality(),
                                "rank " + std::to_string(k) + " out of range for shape " +
                                    shape.to_string());
    const auto& d = shape.dims();
    MultiIndex m(d.size());
    std::size_t rest = k - 1;
    if (ord == Ordering::colex) {
        for (std::size_t o = 0; o < d.size(); ++o) {
            m[o] = rest % d[o] + 1;
            rest /= d[o];
        }
    } else {
        for (std::size_t o = d.size(); o-- > 0;) {
            m[o] = rest % d[o] + 1;
            rest /= d[o];
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Permutations

inline bool is_permutation_of_modes(std::span<const std::size_t> perm, std::size_t order)
{
    if (perm.size() != order) return false;
    std::vector<bool> seen(order, false);
    for (auto p : perm) {
        if (p < 1 || p > order || seen[p - 1]) return false;
        seen[p - 1] = true;
    }
    return true;
}

inline void check_permutation(std::span<const std::size_t> perm, std::size_t order)
{
    detail::require(is_permutation_of_modes(perm, order),
                    "not a permutation of modes 1.." + std::to_string(order));
}

inline Permutation identity_permutation(std::size_t order)
{
    Permutation p(order);
    std::iota(p.begin(), p.end(), std::size_t{1});
    return p;
}

inline Permutation inverse(std::span<const std::size_t> perm)
{
    check_permutation(perm, perm.size());
    Permutation inv(perm.size());
    for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k] - 1] = k + 1;
    return inv;
}

/// Permutation equivalent to applying `first`, then `second`, under the
/// "perm[k] is the source of position k" convention.
inline Permutation then(std::span<const std::size_t> first, std::span<const std::size_t> second)
{
    check_permutation(first, first.size());
    check_permutation(second, first.size());
    Permutation out(first.size());
    for (std::size_t k = 0; k < first.size(); ++k) out[k] = first[second[k] - 1];
    return out;
}

/// Swap of modes a and b (1-based).
inline Permutation transposition(std::size_t order, std::size_t a, std::size_t b)
{
    auto p = identity_permutation(order);
    detail::require<IndexError>(a >= 1 && a <= order && b >= 1 && b <= order,
                                "transposition mode out of range");
    std::swap(p[a - 1], p[b - 1]);
    return p;
}

// ---------------------------------------------------------------------------
// Contiguous partitions

/// Partition of {1, ..., N} into consecutive intervals, stored as the block
/// lengths. Equivalent to a monotone surjection [N] -> [B].
class ContiguousPartition {
public:
    ContiguousPartition() = default;

    explicit ContiguousPartition(std::vector<std::size_t> block_lengths)
        : lengths_(std::move(block_lengths))
    {
        detail::require(!lengths_.empty(), "partition must have at least one block");
        for (auto l : lengths_) detail::require(l >= 1, "partition blocks must be nonempty");
    }

    ContiguousPartition(std::initializer_list<std::size_t> block_lengths)
        : ContiguousPartition(std::vector<std::size_t>(block_lengths))
    {
    }

    /// All-singleton partition of [n].
    static ContiguousPartition identity(std::size_t n)
    {
        return ContiguousPartition(std::vector<std::size_t>(n, 1));
    }

    static ContiguousPartition single_block(std::size_t n) { return ContiguousPartition({n}); }

    /// Build from block labels P(1), ..., P(N). Labels must form a monotone
    /// surjection onto 1..B; anything else is not contiguous and is rejected.
    static ContiguousPartition from_labels(std::span<const std::size_t> labels)
    {
        detail::require(!labels.empty() && labels.front() == 1,
                        "partition labels must start at block 1");
        std::vector<std::size_t> lengths{1};
        for (std::size_t n = 1; n < labels.size(); ++n) {
            if (labels[n] == labels[n - 1])
                ++lengths.back();
            else if (labels[n] == labels[n - 1] + 1)
                lengths.push_back(1);
            else
                throw ValueError("partition labels are not a monotone surjection");
        }
        return ContiguousPartition(std::move(lengths));
    }

    /// Parse bar notation such as "123|4|56". The digits must enumerate
    /// 1..N in increasing order; "13|24" and similar are rejected.
    static ContiguousPartition parse(std::string_view text)
    {
        std::vector<std::size_t> lengths{0};
        std::size_t expected = 1;
        for (char c : text) {
            if (c == '|') {
                detail::require<ParseError>(lengths.back() > 0, "empty block in partition '" +
                                                        std::string(text) + "'");
                lengths.push_back(0);
            } else if (c >= '1' && c <= '9') {
                detail::require<ParseError>(static_cast<std::size_t>(c - '0') == expected,
                                "partition '" + std::string(text) + "' is not contiguous");
                ++expected;
                ++lengths.back();
            } else {
                throw ParseError("bad character in partition '" + std::string(text) + "'");
            }
        }
        detail::require<ParseError>(lengths.back() > 0, "empty block in partition '" + std::string(text) + "'");
        return ContiguousPartition(std::move(lengths));
    }

    std::size_t block_count() const noexcept { return lengths_.size(); }

    std::size_t ground_size() const noexcept
    {
        return std::accumulate(lengths_.begin(), lengths_.end(), std::size_t{0});
    }

    const std::vector<std::size_t>& block_lengths() const noexcept { return lengths_; }

    /// The monotone surjection n -> block of n, both 1-based.
    std::vector<std::size_t> labels() const
    {
        std::vector<std::size_t> out;
        out.reserve(ground_size());
        for (std::size_t b = 0; b < lengths_.size(); ++b) out.insert(out.end(), lengths_[b], b + 1);
        return out;
    }

    /// First element (1-based) of block b (1-based).
    std::size_t block_begin(std::size_t b) const
    {
        detail::require<IndexError>(b >= 1 && b <= lengths_.size(), "block out of range");
        return 1 + std::accumulate(lengths_.begin(), lengths_.begin() + (b - 1), std::size_t{0});
    }

    std::string to_string() const
    {
        std::string s;
        std::size_t n = 1;
        for (std::size_t b = 0; b < lengths_.size(); ++b) {
            if (b) s += '|';
            for (std::size_t k = 0; k < lengths_[b]; ++k, ++n) {
                if (n >= 10) s += '(';
                s += std::to_string(n);
                if (n >= 10) s += ')';
            }
        }
        return s;
    }

    friend bool operator==(const ContiguousPartition&, const ContiguousPartition&) = default;

private:
    std::vector<std::size_t> lengths_;
};

/// Composite Q o P: merge the blocks of `p` according to `q`, which must
/// partition the block set [B] of `p`.
inline ContiguousPartition coarsen(const ContiguousPartition& p, const ContiguousPartition& q)
{
    detail::require<ShapeError>(q.ground_size() == p.block_count(),
                                "coarsening partition must partition the " +
                                    std::to_string(p.block_count()) + " blocks of " +
                                    p.to_string());
    std::vector<std::size_t> merged;
    merged.reserve(q.block_count());
    std::size_t next = 0;
    for (auto len : q.block_lengths()) {
        std::size_t sum = 0;
        for (std::size_t k = 0; k < len; ++k) sum += p.block_lengths()[next++];
        merged.push_back(sum);
    }
    return ContiguousPartition(std::move(merged));
}

/// True iff `coarse` is coarser than (or equal to) `fine`: elements sharing
/// a block of `fine` also share a block of `coarse`.
inline bool is_coarser(const ContiguousPartition& coarse, const ContiguousPartition& fine)
{
    detail::require<ShapeError>(coarse.ground_size() == fine.ground_size(),
                                "partitions have different ground sets");
    const auto lc = coarse.labels();
    const auto lf = fine.labels();
    // Contiguity reduces the pairwise condition to neighbouring elements.
    for (std::size_t n = 1; n < lf.size(); ++n)
        if (lf[n] == lf[n - 1] && lc[n] != lc[n - 1]) return false;
    return true;
}

} // namespace tensorspec
