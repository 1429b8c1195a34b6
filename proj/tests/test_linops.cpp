#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "lipcert/linops.hpp"
#include "lipcert/random.hpp"

using namespace lipcert;
using lipcert::testing::random_conv;
using lipcert::testing::random_dense;

TEST_CASE("dense apply", "[linops]") {
    DenseOperator eye = DenseOperator::identity(2);
    REQUIRE(eye.apply({3.0, -1.0}) == VectorF{3.0, -1.0});

    DenseOperator diag = DenseOperator::diagonal({2.0, 1.0});
    REQUIRE(diag.apply({1.0, 1.0}) == VectorF{2.0, 1.0});
}

TEST_CASE("conv apply matches the hand stencil", "[linops]") {
    // all-ones 2x2 kernel over an all-ones 3x3 input: every output is 4
    Conv2dOperator conv(TensorShape{1, 3, 3}, VectorF(4, 1.0), 1, 2, 2, 1, 1, 0, 0);
    REQUIRE(conv.out_shape() == TensorShape{1, 2, 2});
    VectorF y = conv.apply(VectorF(9, 1.0));
    REQUIRE(y.size() == 4);
    for (double v : y) REQUIRE(v == Catch::Approx(4.0));
}

TEST_CASE("dense adjoint", "[linops]") {
    DenseOperator eye = DenseOperator::identity(2);
    REQUIRE(eye.apply_adjoint({5.0, 7.0}) == VectorF{5.0, 7.0});

    DenseOperator a(2, 2, {1.0, 2.0, 3.0, 4.0});
    REQUIRE(a.apply_adjoint({1.0, 0.0}) == VectorF{1.0, 2.0});
}

TEST_CASE("adjoint satisfies the inner-product identity", "[linops]") {
    Rng rng(11);
    Conv2dOperator conv = random_conv(rng, 2, 5, 4, 3, 3, 1, 1);
    for (int trial = 0; trial < 100; ++trial) {
        VectorF u = rng.normal_vector(conv.cols());
        VectorF v = rng.normal_vector(conv.rows());
        VectorF au = conv.apply(u);
        double lhs = dot(au, v);
        double rhs = dot(u, conv.apply_adjoint(v));
        REQUIRE(std::abs(lhs - rhs) <= 1e-9 * (norm2(au) * norm2(v) + 1.0));
    }
}

TEST_CASE("extract_rows reads rows off", "[linops]") {
    DenseOperator a(2, 2, {1.0, 2.0, 3.0, 4.0});
    auto rows = extract_rows(a, {1});
    REQUIRE(rows.size() == 1);
    REQUIRE(rows[0] == VectorF{3.0, 4.0});

    REQUIRE_THROWS_AS(extract_rows(a, {2}), InvalidInputError);
}

TEST_CASE("identity conv extracts basis rows", "[linops]") {
    Conv2dOperator conv(TensorShape{1, 3, 3}, {1.0}, 1, 1, 1, 1, 1, 0, 0);
    std::vector<std::size_t> all(9);
    for (std::size_t i = 0; i < 9; ++i) all[i] = i;
    auto rows = extract_rows(conv, all);
    for (std::size_t i = 0; i < 9; ++i) {
        for (std::size_t j = 0; j < 9; ++j) REQUIRE(rows[i][j] == (i == j ? 1.0 : 0.0));
    }

    DenseOperator dense = materialize(conv);
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j) REQUIRE(dense.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("conv rows match materialization", "[linops]") {
    Rng rng(13);
    Conv2dOperator conv = random_conv(rng, 2, 6, 5, 2, 3, 2, 1);
    DenseOperator dense = materialize(conv);
    std::vector<std::size_t> all(conv.rows());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    auto rows = extract_rows(conv, all);
    for (std::size_t i = 0; i < conv.rows(); ++i)
        for (std::size_t j = 0; j < conv.cols(); ++j)
            REQUIRE(rows[i][j] == Catch::Approx(dense.at(i, j)).margin(1e-12));
}

TEST_CASE("materialized stencil of the ones kernel", "[linops]") {
    Conv2dOperator conv(TensorShape{1, 3, 3}, VectorF(4, 1.0), 1, 2, 2, 1, 1, 0, 0);
    DenseOperator dense = materialize(conv);
    REQUIRE(dense.rows() == 4);
    REQUIRE(dense.cols() == 9);
    for (std::size_t i = 0; i < 4; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 9; ++j) {
            REQUIRE((dense.at(i, j) == 0.0 || dense.at(i, j) == 1.0));
            sum += dense.at(i, j);
        }
        REQUIRE(sum == Catch::Approx(4.0));
    }
    // top-left window covers input cells (0,0),(0,1),(1,0),(1,1)
    REQUIRE(dense.at(0, 0) == 1.0);
    REQUIRE(dense.at(0, 1) == 1.0);
    REQUIRE(dense.at(0, 3) == 1.0);
    REQUIRE(dense.at(0, 4) == 1.0);
    REQUIRE(dense.at(0, 2) == 0.0);
}

TEST_CASE("dense materializes to itself", "[linops]") {
    Rng rng(17);
    DenseOperator a = random_dense(rng, 3, 5);
    DenseOperator b = materialize(a);
    REQUIRE(a.entries() == b.entries());
}

TEST_CASE("materialization cap", "[linops]") {
    Conv2dOperator conv(TensorShape{1, 3, 3}, VectorF(4, 1.0), 1, 2, 2, 1, 1, 0, 0);
    REQUIRE_THROWS_AS(materialize(conv, 10), CapacityError);
    REQUIRE_THROWS_WITH(materialize(conv, 10), Catch::Matchers::ContainsSubstring("36"));
}

TEST_CASE("apply rejects wrong lengths", "[linops]") {
    DenseOperator a(2, 3, VectorF(6, 1.0));
    REQUIRE_THROWS_AS(a.apply(VectorF(2, 0.0)), InvalidInputError);
    REQUIRE_THROWS_AS(a.apply_adjoint(VectorF(3, 0.0)), InvalidInputError);
}

TEST_CASE("conv output shape follows the stride/padding formula", "[linops]") {
    Rng rng(19);
    for (std::size_t stride : {std::size_t{1}, std::size_t{2}}) {
        for (std::size_t pad : {std::size_t{0}, std::size_t{1}, std::size_t{2}}) {
            for (std::size_t k = 1; k <= 4; ++k) {
                const std::size_t h = 6, w = 5;
                if (h + 2 * pad < k || w + 2 * pad < k) continue;
                Conv2dOperator conv = random_conv(rng, 1, h, w, 1, k, stride, pad);
                REQUIRE(conv.out_shape().dims[1] == (h + 2 * pad - k) / stride + 1);
                REQUIRE(conv.out_shape().dims[2] == (w + 2 * pad - k) / stride + 1);
            }
        }
    }
}

TEST_CASE("operators are linear", "[linops]") {
    Rng rng(23);
    Conv2dOperator conv = random_conv(rng, 2, 4, 4, 2, 2, 1, 0);
    VectorF u = rng.normal_vector(conv.cols());
    VectorF v = rng.normal_vector(conv.cols());
    const double alpha = 0.7, beta = -1.3;
    VectorF mix(conv.cols());
    for (std::size_t j = 0; j < mix.size(); ++j) mix[j] = alpha * u[j] + beta * v[j];
    VectorF lhs = conv.apply(mix);
    VectorF au = conv.apply(u);
    VectorF av = conv.apply(v);
    for (std::size_t i = 0; i < lhs.size(); ++i)
        REQUIRE(lhs[i] == Catch::Approx(alpha * au[i] + beta * av[i]).margin(1e-10));
}

TEST_CASE("conv apply agrees with its materialization", "[linops]") {
    Rng rng(29);
    Conv2dOperator conv = random_conv(rng, 3, 5, 6, 2, 3, 2, 2);
    DenseOperator dense = materialize(conv);
    for (int trial = 0; trial < 5; ++trial) {
        VectorF x = rng.normal_vector(conv.cols());
        VectorF a = conv.apply(x);
        VectorF b = dense.apply(x);
        for (std::size_t i = 0; i < a.size(); ++i)
            REQUIRE(a[i] == Catch::Approx(b[i]).margin(1e-10 * (std::abs(b[i]) + 1.0)));
    }
}
