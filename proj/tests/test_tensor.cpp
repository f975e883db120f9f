#include <gtest/gtest.h>

#include "support.hpp"

using namespace ts_test;

namespace {

DenseTensor example_t()
{
    // T[:,:,1] all ones, T[:,:,2] all twos
    return build({2, 2, 2}, [](const Dims& m) { return static_cast<double>(m[2]); });
}

DenseTensor m22() { return DenseTensor::matrix({{1, 2}, {3, 4}}); }

} // namespace

TEST(Tensor, ConstructionValidates)
{
    EXPECT_THROW(DenseTensor(Shape{2, 2}, {1, 2, 3}), ShapeError);
    EXPECT_THROW(DenseTensor(Shape{2}, {1, NAN}), ValueError);
    EXPECT_THROW(DenseTensor(Shape{2}, {INFINITY, 0}), ValueError);
    EXPECT_THROW(DenseTensor::matrix({{1, 2}, {3}}), ShapeError);
    const DenseTensor z(Shape{2, 3});
    EXPECT_EQ(max_abs(z), 0.0);
    EXPECT_EQ(z.size(), 6u);
}

TEST(Tensor, MatrixIsRowMajorInputColexStorage)
{
    const auto a = m22();
    EXPECT_EQ(a(1, 2), 2.0);
    EXPECT_EQ(a(2, 1), 3.0);
    EXPECT_EQ(a.entries(), (std::vector<double>{1, 3, 2, 4}));
    EXPECT_EQ(a.rows(), 2u);
    EXPECT_EQ(a.cols(), 2u);
    EXPECT_THROW(a(3, 1), IndexError);
}

TEST(Tensor, UnitTensorExamples)
{
    EXPECT_EQ(unit_tensor(Shape{2, 2}, {1, 2}), DenseTensor::matrix({{0, 1}, {0, 0}}));
    EXPECT_EQ(unit_tensor(Shape{2}, {1}), DenseTensor::vector({1, 0}));
    const auto u = unit_tensor(Shape{2, 2, 2}, {2, 1, 2});
    for (std::size_t k = 0; k < 8; ++k) EXPECT_EQ(u.data()[k], k == 5 ? 1.0 : 0.0);
    EXPECT_THROW(unit_tensor(Shape{2, 2}, {3, 1}), IndexError);
}

TEST(Tensor, UnitTensorIsOuterOfUnitVectors)
{
    Gen g(21);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = g.dims(4, 3);
        MultiIndex m(d.size());
        std::vector<DenseTensor> fs;
        for (std::size_t k = 0; k < d.size(); ++k) {
            m[k] = g.size(1, d[k]);
            fs.push_back(unit_vector(d[k], m[k]));
        }
        EXPECT_EQ(unit_tensor(Shape(d), m), outer(fs));
    }
}

TEST(Tensor, ReconstructionIdentity)
{
    Gen g(22);
    for (int trial = 0; trial < 50; ++trial) {
        const auto d = g.dims(4, 3);
        const auto t = g.tensor(d);
        DenseTensor acc(Shape{d});
        for (const auto& m : all_indices(d)) acc = acc + entry(t, m) * unit_tensor(Shape(d), m);
        EXPECT_EQ(acc, t);
    }
}

TEST(Tensor, OuterExamples)
{
    const auto e1 = DenseTensor::vector({1, 0}), e2 = DenseTensor::vector({0, 1});
    EXPECT_EQ(outer(e1, e2), DenseTensor::matrix({{0, 1}, {0, 0}}));
    EXPECT_EQ(outer(e2, e1), DenseTensor::matrix({{0, 0}, {1, 0}}));
    EXPECT_NE(outer(e1, e2), outer(e2, e1));
    const auto v = DenseTensor::vector({3, 4, 5});
    const auto vd = outer(v, DenseTensor::vector({1}));
    EXPECT_EQ(vd.shape(), (Shape{3, 1}));
    EXPECT_EQ(vd.entries(), v.entries());
    EXPECT_THROW(outer(std::span<const DenseTensor>{}), ShapeError);
}

TEST(Tensor, OuterMatchesNaiveProducts)
{
    Gen g(23);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = g.tensor(g.dims(2, 3)), b = g.tensor(g.dims(2, 3));
        const auto ab = outer(a, b);
        Dims d = a.shape().dims();
        for (auto x : b.shape().dims()) d.push_back(x);
        ASSERT_EQ(ab.shape().dims(), d);
        for (const auto& m : all_indices(d)) {
            const Dims ma(m.begin(), m.begin() + a.order()), mb(m.begin() + a.order(), m.end());
            ASSERT_DOUBLE_EQ(entry(ab, m), entry(a, ma) * entry(b, mb));
        }
    }
}

TEST(Tensor, OuterIsMultilinear)
{
    Gen g(24);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = g.tensor(g.dims(2, 3)), c = g.tensor(g.dims(2, 3));
        const auto d = g.dims(2, 3);
        const auto u = g.tensor(d), v = g.tensor(d);
        const double al = g.real(-3, 3), be = g.real(-3, 3);
        const auto lhs = outer({a, al * u + be * v, c});
        const auto rhs = al * outer({a, u, c}) + be * outer({a, v, c});
        EXPECT_LE(max_diff(lhs, rhs), 1e-12);
    }
}

TEST(Tensor, OuterIsAssociative)
{
    Gen g(25);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = g.tensor(g.dims(2, 3)), b = g.tensor(g.dims(2, 3)), c = g.tensor(g.dims(2, 3));
        const auto flat = outer({a, b, c});
        // equal up to the rounding of a reassociated triple product
        EXPECT_LE(max_diff(outer(outer(a, b), c), flat), 1e-15);
        EXPECT_LE(max_diff(outer(a, outer(b, c)), flat), 1e-15);
        EXPECT_EQ(outer(outer(a, b), c).shape(), flat.shape());
    }
}

TEST(Tensor, FiberExamples)
{
    EXPECT_EQ(fiber(m22(), 1, {2}), DenseTensor::vector({2, 4}));
    EXPECT_EQ(fiber(m22(), 2, {1}), DenseTensor::vector({1, 2}));
    EXPECT_EQ(fiber(example_t(), 3, {1, 1}), DenseTensor::vector({1, 2}));
    EXPECT_THROW(fiber(m22(), 3, {1}), IndexError);
    EXPECT_THROW(fiber(m22(), 1, {3}), IndexError);
}

TEST(Tensor, StandardFiberDecompositionReconstructs)
{
    Gen g(26);
    for (int trial = 0; trial < 60; ++trial) {
        const auto d = g.dims(4, 3, 2);
        const auto t = g.tensor(d);
        for (std::size_t o = 1; o <= d.size(); ++o) {
            Dims rest;
            for (std::size_t k = 0; k < d.size(); ++k)
                if (k + 1 != o) rest.push_back(d[k]);
            DenseTensor acc(Shape{d});
            for (const auto& fixed : all_indices(rest)) {
                std::vector<DenseTensor> fs;
                for (std::size_t k = 0, j = 0; k < d.size(); ++k)
                    fs.push_back(k + 1 == o ? fiber(t, o, fixed) : unit_vector(d[k], fixed[j++]));
                acc = acc + outer(fs);
            }
            ASSERT_EQ(acc, t);
        }
    }
}

TEST(Tensor, FrobeniusExamples)
{
    EXPECT_EQ(frobenius_inner(m22(), DenseTensor::identity(2)), 5.0);
    EXPECT_EQ(frobenius_inner(m22(), DenseTensor(Shape{2, 2})), 0.0);
    EXPECT_EQ(frobenius_inner(example_t(), example_t()), 20.0);
    EXPECT_DOUBLE_EQ(frobenius_norm(example_t()), std::sqrt(20.0));
    EXPECT_THROW(frobenius_inner(m22(), DenseTensor(Shape{4})), ShapeError);
}

TEST(Tensor, FrobeniusMatchesNaive)
{
    Gen g(27);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = g.dims(4, 4);
        const auto a = g.tensor(d), b = g.tensor(d);
        EXPECT_NEAR(frobenius_inner(a, b), naive_inner(a, b), 1e-13);
        EXPECT_NEAR(frobenius_inner(a, b), frobenius_inner(b, a), 0.0);
    }
}

TEST(Tensor, PermuteExamples)
{
    EXPECT_EQ(permute_modes(m22(), {2, 1}), DenseTensor::matrix({{1, 3}, {2, 4}}));
    EXPECT_EQ(transpose(m22()), DenseTensor::matrix({{1, 3}, {2, 4}}));
    EXPECT_EQ(permute_modes(example_t(), {1, 2, 3}), example_t());
    EXPECT_EQ(permute_modes(example_t(), {2, 1, 3}), example_t());
    EXPECT_NE(permute_modes(example_t(), {3, 2, 1}), example_t());
    EXPECT_THROW(permute_modes(example_t(), {1, 1, 2}), ValueError);
}

TEST(Tensor, PermuteMatchesNaiveIndexing)
{
    Gen g(28);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = g.dims(4, 3);
        const auto t = g.tensor(d);
        const auto p = g.permutation(d.size());
        const auto pt = permute_modes(t, p);
        // result mode k is source mode p[k]
        for (const auto& m : all_indices(pt.shape().dims())) {
            Dims src(d.size());
            for (std::size_t k = 0; k < d.size(); ++k) src[p[k] - 1] = m[k];
            ASSERT_EQ(entry(pt, m), entry(t, src));
        }
    }
}

TEST(Tensor, PermuteIsGroupAction)
{
    Gen g(29);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = g.dims(5, 3);
        const auto t = g.tensor(d);
        const auto p = g.permutation(d.size()), q = g.permutation(d.size());
        EXPECT_EQ(permute_modes(permute_modes(t, p), q), permute_modes(t, then(p, q)));
        EXPECT_EQ(permute_modes(permute_modes(t, p), inverse(p)), t);
        EXPECT_NEAR(frobenius_norm(permute_modes(t, p)), frobenius_norm(t), 1e-14);
    }
}

TEST(Tensor, PermuteOfElementaryReordersFactors)
{
    Gen g(30);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = g.dims(4, 3);
        std::vector<DenseTensor> fs;
        for (auto m : d) fs.push_back(DenseTensor::vector(g.reals(m)));
        const auto p = g.permutation(d.size());
        std::vector<DenseTensor> reordered;
        for (auto k : p) reordered.push_back(fs[k - 1]);
        const auto lhs = permute_modes(outer(fs), p), rhs = outer(reordered);
        EXPECT_EQ(lhs.shape(), rhs.shape());
        EXPECT_LE(max_diff(lhs, rhs), 1e-15);
    }
}

TEST(Tensor, SymmetryExamples)
{
    EXPECT_TRUE(is_symmetric(DenseTensor::matrix({{1, 2}, {2, 5}})));
    EXPECT_FALSE(is_symmetric(example_t()));
    Gen g(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto v = DenseTensor::vector(g.reals(g.size(1, 4)));
        EXPECT_TRUE(is_symmetric(outer_power(v, 3), 1e-15));
    }
    EXPECT_THROW(is_symmetric(DenseTensor(Shape{2, 3})), ShapeError);
}

TEST(Tensor, GeneratorSymmetryEqualsExhaustiveCheck)
{
    Gen g(32);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t order = g.size(1, 4), m = g.size(1, 3);
        DenseTensor t = trial % 2 ? random_symmetric(g, m, order) : g.tensor(Dims(order, m));
        if (trial % 5 == 0) {
            // perturb a single entry of a symmetric tensor
            auto buf = random_symmetric(g, m, order).entries();
            buf[g.size(0, buf.size() - 1)] += 0.5;
            t = DenseTensor(Shape(Dims(order, m)), buf);
        }
        double exhaustive = 0;
        Permutation p = identity_permutation(order);
        do {
            exhaustive = std::max(exhaustive, max_diff(permute_modes(t, p), t));
        } while (std::next_permutation(p.begin(), p.end()));
        // adjacent transpositions generate S_O: zero defect on the generators iff zero on the group,
        // and any permutation is a product of at most O(O-1)/2 of them
        const double gen = symmetry_defect(t);
        EXPECT_EQ(is_symmetric(t), exhaustive == 0.0);
        EXPECT_LE(gen, exhaustive);
        EXPECT_LE(exhaustive, static_cast<double>(order * (order - 1) / 2) * gen + 1e-15);
    }
}

TEST(Tensor, SqueezeDropsOnlyUnitModes)
{
    const DenseTensor t(Shape{1, 3, 1, 2}, {1, 2, 3, 4, 5, 6});
    const auto s = squeeze(t);
    EXPECT_EQ(s.shape(), (Shape{3, 2}));
    EXPECT_EQ(s.entries(), t.entries());
    EXPECT_EQ(squeeze(DenseTensor(Shape{1, 1}, {7})).shape(), (Shape{1}));
    EXPECT_EQ(DenseTensor(Shape{3, 1}).shape(), (Shape{3, 1}));
}

TEST(Tensor, VectorizeExamples)
{
    EXPECT_EQ(vectorize(m22(), Ordering::colex).entries(), (std::vector<double>{1, 3, 2, 4}));
    EXPECT_EQ(vectorize(m22(), Ordering::lex).entries(), (std::vector<double>{1, 2, 3, 4}));
    const auto v = DenseTensor::vector({5, 6, 7});
    EXPECT_EQ(vectorize(v, Ordering::lex), v);
    EXPECT_EQ(vectorize(v, Ordering::colex), v);
}

TEST(Tensor, VectorizeTensorizeRoundTrip)
{
    Gen g(33);
    for (int trial = 0; trial < 200; ++trial) {
        const auto d = g.dims(4, 4);
        const auto t = g.tensor(d);
        for (auto ord : {Ordering::lex, Ordering::colex}) {
            const auto v = vectorize(t, ord);
            for (const auto& m : all_indices(d)) {
                const auto k = ord == Ordering::lex ? naive_lex(d, m) : naive_colex(d, m);
                ASSERT_EQ(v.data()[k], entry(t, m));
            }
            ASSERT_EQ(tensorize(v.data(), Shape(d), ord), t);
        }
    }
    const std::vector<double> bad{1, 2, 3};
    EXPECT_THROW(tensorize(bad, Shape{2, 2}), ShapeError);
}

TEST(Tensor, MatricizeExamples)
{
    EXPECT_EQ(matricize(example_t(), {3}), DenseTensor::matrix({{1, 1, 1, 1}, {2, 2, 2, 2}}));
    EXPECT_EQ(matricize(m22(), {1}), m22());
    EXPECT_EQ(matricize(m22(), {2}), transpose(m22()));
    EXPECT_THROW(matricize(m22(), {1, 2}), ShapeError);
    EXPECT_THROW(matricize(m22(), std::span<const std::size_t>{}), ShapeError);
}

TEST(Tensor, MatricizeMatchesNaiveAndKeepsNorm)
{
    Gen g(34);
    for (int trial = 0; trial < 100; ++trial) {
        const auto d = g.dims(4, 3, 2);
        const auto t = g.tensor(d);
        // random nonempty proper subset, in random order
        auto p = g.permutation(d.size());
        p.resize(g.size(1, d.size() - 1));
        const auto a = matricize(t, p);
        std::vector<bool> row(d.size(), false);
        for (auto o : p) row[o - 1] = true;
        Dims rd, cd;
        for (auto o : p) rd.push_back(d[o - 1]);
        for (std::size_t o = 0; o < d.size(); ++o)
            if (!row[o]) cd.push_back(d[o]);
        for (const auto& m : all_indices(d)) {
            Dims ri, ci;
            for (auto o : p) ri.push_back(m[o - 1]);
            for (std::size_t o = 0; o < d.size(); ++o)
                if (!row[o]) ci.push_back(m[o]);
            ASSERT_EQ(entry(a, {naive_colex(rd, ri) + 1, naive_colex(cd, ci) + 1}), entry(t, m));
        }
        EXPECT_NEAR(frobenius_norm(a), frobenius_norm(t), 1e-14);
    }
}

TEST(Tensor, KroneckerExamples)
{
    const auto a = m22();
    const auto blockdiag = DenseTensor::matrix({{1, 2, 0, 0}, {3, 4, 0, 0}, {0, 0, 1, 2}, {0, 0, 3, 4}});
    EXPECT_EQ(kronecker(DenseTensor::identity(2), a), blockdiag);
    EXPECT_EQ(kronecker(a, DenseTensor::identity(1)), a);
    const auto swap = DenseTensor::matrix({{0, 1}, {1, 0}});
    EXPECT_EQ(kronecker(DenseTensor::identity(2), swap),
              DenseTensor::matrix({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));
}

TEST(Tensor, KroneckerMatchesBlockFormula)
{
    Gen g(35);
    for (int trial = 0; trial < 100; ++trial) {
        const auto a = g.matrix(g.size(1, 4), g.size(1, 4)), b = g.matrix(g.size(1, 4), g.size(1, 4));
        EXPECT_EQ(kronecker(a, b), naive_kron(a, b));
    }
}

TEST(Tensor, ZehfussInterleavesBlocks)
{
    Gen g(36);
    const ContiguousPartition split{1, 1};
    for (int trial = 0; trial < 50; ++trial) {
        const auto l1 = g.matrix(g.size(1, 3), g.size(1, 3)), l2 = g.matrix(g.size(1, 3), g.size(1, 3));
        const auto z = zehfuss(l1, split, l2, split);
        EXPECT_EQ(z.shape(), (Shape{l1.rows(), l2.rows(), l1.cols(), l2.cols()}));
        // the lex matricization by the first two modes is the Kronecker product
        EXPECT_EQ(matricize(z, {1, 2}, Ordering::lex), kronecker(l1, l2));
        EXPECT_EQ(matricize(z, {1, 2}, Ordering::colex), kronecker(l2, l1));
    }
    const auto a = g.tensor({2, 3}), b = g.tensor({3, 2, 2});
    EXPECT_EQ(zehfuss(a, ContiguousPartition{2}, b, ContiguousPartition{3}), outer(a, b));
    EXPECT_THROW(zehfuss(a, split, b, ContiguousPartition{3}), ShapeError);
}

TEST(Tensor, ZehfussOfUnitTensors)
{
    // a-blocks (1)(2,3), b-blocks (1,2)(3): result modes a1 b1 b2 a2 a3 b3
    const Shape sa{2, 3, 2}, sb{3, 2, 2};
    const ContiguousPartition pa{1, 2}, pb{2, 1};
    for (const auto& ma : all_indices(sa.dims()))
        for (const auto& mb : all_indices(sb.dims())) {
            const auto z = zehfuss(unit_tensor(sa, ma), pa, unit_tensor(sb, mb), pb);
            const Shape sz{2, 3, 2, 3, 2, 2};
            const MultiIndex mz{ma[0], mb[0], mb[1], ma[1], ma[2], mb[2]};
            ASSERT_EQ(z, unit_tensor(sz, mz));
        }
}

TEST(Tensor, MomentExamples)
{
    const std::vector<std::vector<double>> s1{{1, 0}, {0, 1}};
    EXPECT_EQ(moment_tensor(s1, 2, false), DenseTensor::matrix({{0.5, 0}, {0, 0.5}}));
    const std::vector<std::vector<double>> s2{{1, 5, -2}, {3, 1, 0}, {2, 2, 2}};
    EXPECT_LE(max_abs(moment_tensor(s2, 1, true)), 1e-15);
    const std::vector<std::vector<double>> s3{{1, 1}};
    EXPECT_EQ(moment_tensor(s3, 3, false), build({2, 2, 2}, [](const Dims&) { return 1.0; }));
    const std::vector<std::vector<double>> ragged{{1, 2}, {1}};
    EXPECT_THROW(moment_tensor(ragged, 2, false), ShapeError);
    EXPECT_THROW(moment_tensor(std::span<const std::vector<double>>{}, 2, false), ValueError);
}

TEST(Tensor, MomentTensorsAreSymmetric)
{
    Gen g(37);
    for (int trial = 0; trial < 60; ++trial) {
        const auto m = g.size(1, 4), n = g.size(1, 20), order = g.size(1, 4);
        std::vector<std::vector<double>> xs;
        for (std::size_t k = 0; k < n; ++k) xs.push_back(g.reals(m, -2, 2));
        for (bool central : {false, true}) {
            const auto t = moment_tensor(xs, order, central);
            EXPECT_TRUE(is_symmetric(t, 1e-12));
            // naive oracle: mean of products
            std::vector<double> mean(m, 0.0);
            if (central)
                for (const auto& x : xs)
                    for (std::size_t i = 0; i < m; ++i) mean[i] += x[i] / n;
            for (const auto& idx : all_indices(Dims(order, m))) {
                double s = 0;
                for (const auto& x : xs) {
                    double p = 1;
                    for (auto i : idx) p *= x[i - 1] - mean[i - 1];
                    s += p;
                }
                ASSERT_NEAR(entry(t, idx), s / n, 1e-12);
            }
        }
    }
}
