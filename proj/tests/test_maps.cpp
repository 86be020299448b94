#include <catch2/catch_amalgamated.hpp>

#include "canonmap/maps.hpp"
#include "test_support.hpp"

using namespace canonmap;
using canonmap::testing::random_complex;
using canonmap::testing::random_injective;

namespace {

ComplexMatrix diag_real(const std::vector<double>& d) {
    std::vector<cdouble> z(d.begin(), d.end());
    return ComplexMatrix::diagonal(z);
}

DensityMatrix maximally_mixed(int n) {
    ComplexMatrix m = ComplexMatrix::identity(n);
    m *= cdouble(1.0 / n, 0.0);
    return DensityMatrix::from_matrix(m);
}

// Best affine interpolation parameter for c ~ s a + (1-s) b.
double fit_s(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) {
    const ComplexMatrix d = a - b;
    const double denom = hs_inner(d, d).real();
    return hs_inner(d, c - b).real() / denom;
}

}  // namespace

TEST_CASE("identity measurement operator yields the identity map") {
    const StateMapOracle psi = measurement_map(MeasurementOp(ComplexMatrix::identity(3)));
    Rng rng(301);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = random_state(3, 3, rng);
        CHECK(distance_frobenius(psi(rho).mat(), rho.mat()) < 1e-12);
    }
}

TEST_CASE("measurement map matches the hand-computed example") {
    const StateMapOracle psi = measurement_map(MeasurementOp(diag_real({1, 2})));
    const DensityMatrix out = psi(maximally_mixed(2));
    // M (I/2) M* = diag(1/2, 2); normalized: diag(1, 4)/5.
    CHECK(distance_frobenius(out.mat(), diag_real({0.2, 0.8})) < 1e-14);
}

TEST_CASE("measurement maps produce valid states and preserve purity") {
    Rng rng(302);
    const MeasurementOp op(random_injective(5, 3, rng));
    const StateMapOracle psi = measurement_map(op);
    for (int trial = 0; trial < 100; ++trial) {
        const int rank = 1 + static_cast<int>(rng.below(3));
        const DensityMatrix rho = random_state(3, rank, rng);
        const DensityMatrix out = psi(rho);  // constructor re-validates
        CHECK(out.dim() == 5);
        if (rank == 1) CHECK(is_pure(out));
    }
}

TEST_CASE("non-injective operators cannot build measurement maps") {
    ComplexMatrix m(3, 2);
    m(0, 0) = 1.0;
    m(1, 1) = 0.0;  // second column zero
    CHECK_THROWS_AS(MeasurementOp(m), ArgumentError);
    CHECK_THROWS_AS(MeasurementOp(random_complex(2, 3, *new Rng(1))), ArgumentError);
}

TEST_CASE("constant maps return the fixed state bit-for-bit") {
    Rng rng(303);
    const PureState q = random_pure(3, rng);
    const StateMapOracle psi = constant_map(q, 4);
    const DensityMatrix first = psi(random_state(4, 4, rng));
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix out = psi(random_state(4, 1 + static_cast<int>(rng.below(4)), rng));
        CHECK(out.mat().data() == first.mat().data());
    }
    CHECK(distance_frobenius(first.mat(), q.mat()) == 0.0);
}

TEST_CASE("segment map sends pure classes to their endpoints and mixtures to the midpoint") {
    Rng rng(304);
    const SegmentSpec spec(random_pure(3, rng), random_pure(3, rng));
    const StateMapOracle psi = segment_map(spec);

    const PureState north = PureState::from_state(bloch_to_state(BlochVector(0, 0, 1)));
    const PureState south = PureState::from_state(bloch_to_state(BlochVector(0, 0, -1)));
    REQUIRE(bloch_z_partition(north) == 1);
    REQUIRE(bloch_z_partition(south) == 2);
    CHECK(distance_frobenius(psi(north.base()).mat(), spec.q1.mat()) == 0.0);
    CHECK(distance_frobenius(psi(south.base()).mat(), spec.q2.mat()) == 0.0);

    const ComplexMatrix mid = 0.5 * (spec.q1.mat() + spec.q2.mat());
    for (double t : {0.1, 0.5, 0.9}) {
        const DensityMatrix m = mix(t, north.base(), south.base());
        CHECK(distance_frobenius(psi(m).mat(), mid) < 1e-12);
    }
}

TEST_CASE("segment map discontinuity witness") {
    Rng rng(305);
    const SegmentSpec spec(random_pure(2, rng), random_pure(2, rng));
    const StateMapOracle psi = segment_map(spec);

    // Class-1 pure states converging to a class-2 pure state: z = 1/k > 0
    // with x < 0, limiting to (-1, 0, 0).
    for (int k = 2; k <= 64; k *= 2) {
        const double z = 1.0 / k;
        const double x = -std::sqrt(1.0 - z * z);
        const DensityMatrix p = bloch_to_state(BlochVector(x, 0.0, z));
        CHECK(distance_frobenius(psi(p).mat(), spec.q1.mat()) == 0.0);
    }
    const DensityMatrix limit = bloch_to_state(BlochVector(-1.0, 0.0, 0.0));
    CHECK(distance_frobenius(psi(limit).mat(), spec.q2.mat()) == 0.0);
    CHECK(distance_frobenius(spec.q1.mat(), spec.q2.mat()) > 1e-6);
}

TEST_CASE("segment maps require dimension-2 inputs") {
    Rng rng(306);
    const SegmentSpec spec(random_pure(2, rng), random_pure(2, rng));
    const StateMapOracle psi = segment_map(spec);
    CHECK_THROWS_AS(psi(maximally_mixed(3)), OracleError);
}

TEST_CASE("composition with the transpose") {
    const StateMapOracle ident = measurement_map(MeasurementOp(ComplexMatrix::identity(3)));
    const StateMapOracle transposed = compose(ident, TransformSpec::transpose());
    Rng rng(307);
    for (int trial = 0; trial < 10; ++trial) {
        const DensityMatrix rho = random_state(3, 3, rng);
        CHECK(distance_frobenius(transposed(rho).mat(), rho.mat().transpose()) < 1e-12);
    }

    const StateMapOracle twice = compose(transposed, TransformSpec::transpose());
    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix rho = random_state(3, 2, rng);
        CHECK(distance_frobenius(twice(rho).mat(), ident(rho).mat()) < 1e-12);
    }
}

TEST_CASE("composition with the swap matches manual evaluation order") {
    Rng rng(308);
    const ComplexMatrix m1 = random_injective(3, 2, rng);
    const ComplexMatrix m2 = random_injective(2, 2, rng);
    const TensorShape in_shape({2, 2}), out_shape({3, 2});
    const StateMapOracle product =
        measurement_map(MeasurementOp(tensor(m1, m2)), in_shape, out_shape);
    const StateMapOracle swapped = compose(product, TransformSpec::swap());

    for (int trial = 0; trial < 50; ++trial) {
        const DensityMatrix a = random_state(2, 1 + static_cast<int>(rng.below(2)), rng);
        const DensityMatrix b = random_state(2, 1 + static_cast<int>(rng.below(2)), rng);
        const DensityMatrix ab =
            DensityMatrix::from_matrix(tensor(a.mat(), b.mat()), in_shape);
        const DensityMatrix ba =
            DensityMatrix::from_matrix(tensor(b.mat(), a.mat()), in_shape);
        CHECK(distance_frobenius(swapped(ab).mat(), product(ba).mat()) < 1e-12);
    }
}

TEST_CASE("constructed oracles preserve pure states") {
    Rng rng(309);
    const StateMapOracle meas = measurement_map(MeasurementOp(random_injective(4, 3, rng)));
    const StateMapOracle trans = compose(meas, TransformSpec::transpose());
    const StateMapOracle cons = constant_map(random_pure(4, rng), 3);
    for (const StateMapOracle* psi : {&meas, &trans, &cons}) {
        for (int trial = 0; trial < 200; ++trial) {
            const DensityMatrix out = (*psi)(random_pure(3, rng).base());
            CHECK(is_pure(out));
        }
    }
}

TEST_CASE("constructed oracles preserve strict convex combinations") {
    Rng rng(310);
    const ComplexMatrix m = random_injective(4, 3, rng);
    const StateMapOracle psi = measurement_map(MeasurementOp(m));
    const ComplexMatrix mstar = m.adjoint();

    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix a = random_state(3, 3, rng);
        const DensityMatrix b = random_state(3, 3, rng);
        const double t = rng.uniform_in(0.05, 0.95);
        const DensityMatrix mixture = mix(t, a, b);

        const ComplexMatrix ia = psi(a).mat(), ib = psi(b).mat(), im = psi(mixture).mat();
        const double s = fit_s(ia, ib, im);
        CHECK(s > 1e-9);
        CHECK(s < 1.0 - 1e-9);
        const ComplexMatrix fitted = cdouble(s, 0.0) * ia + cdouble(1.0 - s, 0.0) * ib;
        CHECK(distance_frobenius(im, fitted) < 1e-8);

        // Closed form from the trace ratio.
        const double s_closed = t * (m * a.mat() * mstar).trace().real() /
                                (m * mixture.mat() * mstar).trace().real();
        CHECK(std::abs(s - s_closed) < 1e-9);
    }
}

TEST_CASE("invertible measurement maps are bijections") {
    Rng rng(311);
    const ComplexMatrix m = random_injective(3, 3, rng);
    const StateMapOracle psi = measurement_map(MeasurementOp(m));
    const StateMapOracle inv = measurement_map(MeasurementOp(pseudoinverse(m)));
    for (int trial = 0; trial < 100; ++trial) {
        const DensityMatrix rho = random_state(3, 1 + static_cast<int>(rng.below(3)), rng);
        CHECK(distance_frobenius(inv(psi(rho)).mat(), rho.mat()) < 1e-9);
    }
}

TEST_CASE("table oracles require exact key matches") {
    Rng rng(312);
    const DensityMatrix in1 = random_state(2, 2, rng);
    const DensityMatrix in2 = random_state(2, 1, rng);
    const PureState q = random_pure(2, rng);
    const StateMapOracle psi = table_map({{in1.mat(), q.mat()}, {in2.mat(), q.mat()}},
                                         TensorShape::single(2), TensorShape::single(2));
    CHECK(distance_frobenius(psi(in1).mat(), q.mat()) < 1e-12);
    CHECK(distance_frobenius(psi(in2).mat(), q.mat()) < 1e-12);
    CHECK_THROWS_AS(psi(random_state(2, 2, rng)), OracleError);
}

TEST_CASE("recording oracles replay through tables") {
    Rng rng(313);
    const StateMapOracle base = measurement_map(MeasurementOp(random_injective(2, 2, rng)));
    auto log = std::make_shared<std::vector<TableEntry>>();
    const StateMapOracle recorded = recording_oracle(base, log);

    std::vector<DensityMatrix> inputs;
    for (int trial = 0; trial < 5; ++trial) inputs.push_back(random_state(2, 2, rng));
    for (const auto& rho : inputs) recorded(rho);

    const StateMapOracle replay =
        table_map(*log, base.in_shape(), base.out_shape());
    for (const auto& rho : inputs)
        CHECK(distance_frobenius(replay(rho).mat(), base(rho).mat()) == 0.0);
}
