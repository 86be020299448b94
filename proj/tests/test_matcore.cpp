#include <catch2/catch_amalgamated.hpp>

#include "canonmap/complex_matrix.hpp"
#include "canonmap/linalg.hpp"
#include "canonmap/transforms.hpp"
#include "test_support.hpp"

using namespace canonmap;
using canonmap::testing::random_complex;
using canonmap::testing::random_hermitian;
using canonmap::testing::random_of_rank;

namespace {

ComplexMatrix diag_real(const std::vector<double>& d) {
    std::vector<cdouble> z(d.begin(), d.end());
    return ComplexMatrix::diagonal(z);
}

}  // namespace

TEST_CASE("tensor product basics") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(distance_max(tensor(i2, i2), ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix a = diag_real({1, 0});
    const ComplexMatrix b = diag_real({0, 1});
    CHECK(distance_max(tensor(a, b), diag_real({0, 1, 0, 0})) == 0.0);
}

TEST_CASE("tensor product is multiplicative on traces") {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const ComplexMatrix a = random_complex(3, 3, rng);
        const ComplexMatrix b = random_complex(2, 2, rng);
        const cdouble lhs = tensor(a, b).trace();
        const cdouble rhs = a.trace() * b.trace();
        CHECK(std::abs(lhs - rhs) < 1e-12);
    }
}

TEST_CASE("tensor product is associative up to reshaping") {
    Rng rng(102);
    const ComplexMatrix a = random_complex(2, 2, rng);
    const ComplexMatrix b = random_complex(3, 3, rng);
    const ComplexMatrix c = random_complex(2, 2, rng);
    CHECK(distance_max(tensor(tensor(a, b), c), tensor(a, tensor(b, c))) < 1e-14);
}

TEST_CASE("partial trace over one factor of a product") {
    Rng rng(103);
    ComplexMatrix a = random_hermitian(2, rng);
    a *= cdouble(1.0 / a.trace().real(), 0.0);  // Tr A = 1
    ComplexMatrix b = random_hermitian(3, rng);
    b *= cdouble(1.0 / b.trace().real(), 0.0);  // Tr B = 1
    const TensorShape shape({2, 3});

    CHECK(distance_max(partial_trace(tensor(a, b), shape, {2}), b) < 1e-12);
    CHECK(distance_max(partial_trace(tensor(a, b), shape, {1}), a) < 1e-12);
}

TEST_CASE("partial trace keeping all factors is the identity") {
    Rng rng(104);
    const ComplexMatrix c = random_hermitian(6, rng);
    CHECK(distance_max(partial_trace(c, TensorShape({2, 3}), {1, 2}), c) == 0.0);
}

TEST_CASE("partial trace of a three-factor product keeps the middle factor") {
    Rng rng(105);
    ComplexMatrix a = random_hermitian(2, rng), b = random_hermitian(3, rng),
                  c = random_hermitian(2, rng);
    for (ComplexMatrix* m : {&a, &b, &c}) *m *= cdouble(1.0 / m->trace().real(), 0.0);
    const ComplexMatrix full = tensor(tensor(a, b), c);
    CHECK(distance_max(partial_trace(full, TensorShape({2, 3, 2}), {2}), b) < 1e-12);
}

TEST_CASE("partial trace is linear and trace preserving") {
    Rng rng(106);
    const TensorShape shape({2, 3});
    const ComplexMatrix c1 = random_hermitian(6, rng);
    const ComplexMatrix c2 = random_hermitian(6, rng);
    const cdouble alpha(0.3, 0.0), beta(-1.7, 0.0);

    const ComplexMatrix lhs = partial_trace(alpha * c1 + beta * c2, shape, {2});
    const ComplexMatrix rhs =
        alpha * partial_trace(c1, shape, {2}) + beta * partial_trace(c2, shape, {2});
    CHECK(distance_max(lhs, rhs) < 1e-12);

    for (const auto& keep : std::vector<std::vector<int>>{{1}, {2}, {1, 2}}) {
        CHECK(std::abs(partial_trace(c1, shape, keep).trace() - c1.trace()) < 1e-12);
    }
}

TEST_CASE("partial trace rejects bad arguments") {
    const ComplexMatrix c = ComplexMatrix::identity(6);
    CHECK_THROWS_AS(partial_trace(c, TensorShape({2, 3}), {}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(c, TensorShape({2, 3}), {3}), ArgumentError);
    CHECK_THROWS_AS(partial_trace(c, TensorShape({2, 2}), {1}), ShapeError);
}

TEST_CASE("hermitian_eig on diagonal and Pauli inputs") {
    const auto eig = hermitian_eig(diag_real({3, 1, 2}));
    REQUIRE(eig.values.size() == 3);
    CHECK(eig.values[0] == Catch::Approx(3.0).margin(1e-12));
    CHECK(eig.values[1] == Catch::Approx(2.0).margin(1e-12));
    CHECK(eig.values[2] == Catch::Approx(1.0).margin(1e-12));
    // Permutation eigenvectors: one unit entry per column.
    for (int j = 0; j < 3; ++j) {
        double max_entry = 0.0;
        for (int r = 0; r < 3; ++r) max_entry = std::max(max_entry, std::abs(eig.vectors(r, j)));
        CHECK(max_entry == Catch::Approx(1.0).margin(1e-12));
    }

    ComplexMatrix pauli_x(2, 2);
    pauli_x(0, 1) = 1.0;
    pauli_x(1, 0) = 1.0;
    const auto ex = hermitian_eig(pauli_x);
    CHECK(ex.values[0] == Catch::Approx(1.0).margin(1e-12));
    CHECK(ex.values[1] == Catch::Approx(-1.0).margin(1e-12));
}

TEST_CASE("hermitian_eig reconstructs random Hermitian matrices") {
    Rng rng(107);
    for (int trial = 0; trial < 30; ++trial) {
        const ComplexMatrix a = random_hermitian(6, rng);
        const auto eig = hermitian_eig(a);
        ComplexMatrix recon(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int r = 0; r < 6; ++r)
                for (int c = 0; c < 6; ++c)
                    recon(r, c) += eig.values[static_cast<std::size_t>(i)] * eig.vectors(r, i) *
                                   std::conj(eig.vectors(c, i));
        CHECK(distance_frobenius(recon, a) < 1e-10 * a.frobenius_norm());

        const ComplexMatrix vtv = eig.vectors.adjoint() * eig.vectors;
        CHECK(distance_max(vtv, ComplexMatrix::identity(6)) < 1e-10);
    }
}

TEST_CASE("hermitian_eig rejects non-Hermitian input") {
    Rng rng(108);
    const ComplexMatrix g = random_complex(4, 4, rng);
    CHECK_THROWS_AS(hermitian_eig(g), ContractViolation);
}

TEST_CASE("pseudoinverse of simple matrices") {
    ComplexMatrix m(2, 2);
    m(0, 0) = cdouble(1, 1);
    m(0, 1) = 2.0;
    m(1, 0) = 0.5;
    m(1, 1) = cdouble(0, -1);
    const ComplexMatrix x = pseudoinverse(m);
    CHECK(distance_max(m * x, ComplexMatrix::identity(2)) < 1e-10);
    CHECK(distance_max(x * m, ComplexMatrix::identity(2)) < 1e-10);

    const ComplexMatrix p = diag_real({1, 0});
    CHECK(distance_max(pseudoinverse(p), p) < 1e-12);

    const ComplexMatrix zero(3, 2);
    CHECK(pseudoinverse(zero).max_abs() == 0.0);
}

namespace {

double penrose_residual(const ComplexMatrix& r, const ComplexMatrix& x) {
    double res = 0.0;
    res = std::max(res, distance_frobenius(r * x * r, r));
    res = std::max(res, distance_frobenius(x * r * x, x));
    const ComplexMatrix rx = r * x;
    const ComplexMatrix xr = x * r;
    res = std::max(res, distance_frobenius(rx, rx.adjoint()));
    res = std::max(res, distance_frobenius(xr, xr.adjoint()));
    return res;
}

}  // namespace

TEST_CASE("pseudoinverse satisfies the four Penrose identities") {
    Rng rng(109);
    const ComplexMatrix r = random_of_rank(4, 3, 2, rng);
    CHECK(penrose_residual(r, pseudoinverse(r)) < 1e-9);
}

TEST_CASE("Penrose identities across 500 random matrices of assorted ranks") {
    Rng rng(110);
    for (int trial = 0; trial < 500; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(5));
        const int cols = 2 + static_cast<int>(rng.below(5));
        const int max_rank = std::min(rows, cols);
        const int rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_rank)));
        const ComplexMatrix r = random_of_rank(rows, cols, rank, rng);
        const ComplexMatrix x = pseudoinverse(r);
        INFO("trial " << trial << " rows " << rows << " cols " << cols << " rank " << rank);
        REQUIRE(penrose_residual(r, x) < 1e-9);
        REQUIRE(numerical_rank(r) == rank);
    }
}

TEST_CASE("norms on rank-one projections and the maximally mixed state") {
    Rng rng(111);
    ComplexMatrix v = random_complex(4, 1, rng);
    v *= cdouble(1.0 / v.frobenius_norm(), 0.0);
    const ComplexMatrix p = v * v.adjoint();
    const auto np = norms(p);
    CHECK(np.trace_norm == Catch::Approx(1.0).margin(1e-12));
    CHECK(np.hs_norm == Catch::Approx(1.0).margin(1e-12));
    CHECK(np.rank == 1);

    const int n = 5;
    ComplexMatrix mixed = ComplexMatrix::identity(n);
    mixed *= cdouble(1.0 / n, 0.0);
    const auto nm = norms(mixed);
    CHECK(nm.trace_norm == Catch::Approx(1.0).margin(1e-12));
    CHECK(nm.hs_norm * nm.hs_norm == Catch::Approx(1.0 / n).margin(1e-12));
    CHECK(nm.rank == n);
}

TEST_CASE("norm inequality holds on 1000 random finite-rank matrices") {
    Rng rng(112);
    for (int trial = 0; trial < 1000; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(4));
        const int cols = 2 + static_cast<int>(rng.below(4));
        const int rank = 1 + static_cast<int>(
                                 rng.below(static_cast<std::uint64_t>(std::min(rows, cols))));
        const ComplexMatrix t = random_of_rank(rows, cols, rank, rng);
        const auto n = norms(t);
        const double tr2 = n.trace_norm * n.trace_norm;
        const double hs2 = n.hs_norm * n.hs_norm;
        const double slack = 1e-10 * std::max(1.0, tr2);
        INFO("trial " << trial);
        REQUIRE(hs2 >= tr2 / n.rank - slack);
        REQUIRE(hs2 <= tr2 + slack);
    }
}

TEST_CASE("swap exchanges product factors") {
    Rng rng(113);
    const ComplexMatrix a = random_complex(2, 2, rng);
    const ComplexMatrix b = random_complex(3, 3, rng);
    const ComplexMatrix swapped =
        apply_transform(tensor(a, b), TensorShape({2, 3}), TransformSpec::swap());
    CHECK(distance_max(swapped, tensor(b, a)) < 1e-14);
}

TEST_CASE("partial transpose is an involution") {
    Rng rng(114);
    const ComplexMatrix c = random_hermitian(6, rng);
    const TensorShape shape({2, 3});
    const auto pt = TransformSpec::partial_transpose({2});
    const ComplexMatrix twice = apply_transform(apply_transform(c, shape, pt), shape, pt);
    CHECK(distance_max(twice, c) < 1e-14);
}

TEST_CASE("factor permutation rearranges a three-factor product") {
    Rng rng(115);
    const ComplexMatrix a1 = random_complex(2, 2, rng);
    const ComplexMatrix a2 = random_complex(3, 3, rng);
    const ComplexMatrix a3 = random_complex(2, 2, rng);
    const TensorShape shape({2, 3, 2});
    const ComplexMatrix out = apply_transform(tensor(tensor(a1, a2), a3), shape,
                                              TransformSpec::factor_permutation({2, 3, 1}));
    CHECK(distance_max(out, tensor(tensor(a2, a3), a1)) < 1e-14);
}

TEST_CASE("factor permutations compose on product inputs") {
    Rng rng(116);
    const std::vector<int> pi{3, 1, 2}, sigma{2, 1, 3};
    for (int trial = 0; trial < 10; ++trial) {
        const ComplexMatrix a1 = random_complex(2, 2, rng);
        const ComplexMatrix a2 = random_complex(2, 2, rng);
        const ComplexMatrix a3 = random_complex(3, 3, rng);
        const ComplexMatrix x = tensor(tensor(a1, a2), a3);
        const TensorShape shape({2, 2, 3});

        const ComplexMatrix via_sigma =
            apply_transform(x, shape, TransformSpec::factor_permutation(sigma));
        const TensorShape mid = transformed_shape(shape, TransformSpec::factor_permutation(sigma));
        const ComplexMatrix lhs =
            apply_transform(via_sigma, mid, TransformSpec::factor_permutation(pi));

        // Output slot j of the composition reads input factor sigma(pi(j)).
        std::vector<int> composed;
        for (int p : pi) composed.push_back(sigma[static_cast<std::size_t>(p - 1)]);
        const ComplexMatrix rhs =
            apply_transform(x, shape, TransformSpec::factor_permutation(composed));
        CHECK(distance_max(lhs, rhs) < 1e-13);
    }
}

TEST_CASE("permutation inverse composes to the identity") {
    Rng rng(117);
    const ComplexMatrix c = random_hermitian(12, rng);
    const TensorShape shape({2, 3, 2});
    const std::vector<int> pi{2, 3, 1};
    const auto theta = TransformSpec::factor_permutation(pi);
    const auto theta_inv = TransformSpec::factor_permutation(inverse_permutation(pi));
    const TensorShape mid = transformed_shape(shape, theta);
    CHECK(distance_max(apply_transform(apply_transform(c, shape, theta), mid, theta_inv), c) ==
          0.0);
}

TEST_CASE("transforms preserve trace and Hermiticity") {
    Rng rng(118);
    const ComplexMatrix c = random_hermitian(6, rng);
    const TensorShape shape({2, 3});
    for (const auto& spec :
         {TransformSpec::transpose(), TransformSpec::partial_transpose({1}),
          TransformSpec::swap(), TransformSpec::factor_permutation({2, 1})}) {
        const ComplexMatrix out = apply_transform(c, shape, spec);
        CHECK(std::abs(out.trace() - c.trace()) < 1e-13);
        CHECK(distance_max(out, out.adjoint()) < 1e-13);
    }
}

TEST_CASE("transform argument validation") {
    const ComplexMatrix c = ComplexMatrix::identity(8);
    CHECK_THROWS_AS(apply_transform(c, TensorShape({2, 2, 2}), TransformSpec::swap()),
                    ArgumentError);
    CHECK_THROWS_AS(
        apply_transform(c, TensorShape({2, 2, 2}), TransformSpec::factor_permutation({1, 1, 2})),
        ArgumentError);
    CHECK_THROWS_AS(
        apply_transform(c, TensorShape({2, 2, 2}), TransformSpec::factor_permutation({1, 2})),
        ArgumentError);
}
