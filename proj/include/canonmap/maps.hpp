#pragma once

#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "canonmap/states.hpp"
#include "canonmap/transforms.hpp"

namespace canonmap {

// Canonical fingerprint of a matrix: dimensions plus a 12-significant-digit
// decimal rendering of every entry, row-major. Table oracles key on this.
inline std::string canonical_key(const ComplexMatrix& m) {
    std::string out = std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ":";
    char buf[64];
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c) {
            const double re = m(r, c).real() == 0.0 ? 0.0 : m(r, c).real();
            const double im = m(r, c).imag() == 0.0 ? 0.0 : m(r, c).imag();
            std::snprintf(buf, sizeof buf, "%.12g,%.12g;", re, im);
            out += buf;
        }
    return out;
}

// A fixed measurement operator M together with the flag selecting the
// conjugate-linear variant acting on the transposed input.
struct MeasurementOp {
    ComplexMatrix m;              // dim K x dim H
    bool conjugate_flag = false;  // true: acts on the transposed input

    MeasurementOp(ComplexMatrix op, bool flag = false, const Tolerances& tol = {})
        : m(std::move(op)), conjugate_flag(flag) {
        if (m.rows() < m.cols())
            throw ArgumentError("measurement operator cannot be injective: more columns than rows");
        if (numerical_rank(m, tol) != m.cols())
            throw ArgumentError("measurement operator is not injective");
    }
};

enum class Provenance { Constructed, Table, External };

// Black-box map on states. Evaluation always yields a validated state of the
// declared output shape; the closure and its captures are immutable.
class StateMapOracle {
public:
    using EvalFn = std::function<DensityMatrix(const DensityMatrix&)>;

    StateMapOracle(TensorShape in_shape, TensorShape out_shape, EvalFn eval,
                   Provenance provenance = Provenance::Constructed)
        : in_shape_(std::move(in_shape)),
          out_shape_(std::move(out_shape)),
          eval_(std::move(eval)),
          provenance_(provenance) {}

    const TensorShape& in_shape() const { return in_shape_; }
    const TensorShape& out_shape() const { return out_shape_; }
    Provenance provenance() const { return provenance_; }

    DensityMatrix operator()(const DensityMatrix& rho) const {
        if (rho.dim() != in_shape_.total())
            throw OracleError("oracle input dimension " + std::to_string(rho.dim()) +
                              " does not match declared shape total " +
                              std::to_string(in_shape_.total()));
        DensityMatrix out = eval_(rho);
        if (out.dim() != out_shape_.total())
            throw OracleError("oracle output dimension does not match declared shape");
        if (!out.shape()) out = out.with_shape(out_shape_);
        return out;
    }

private:
    TensorShape in_shape_, out_shape_;
    EvalFn eval_;
    Provenance provenance_;
};

// rho -> M rho M* / Tr(M rho M*), or with the transposed input when the
// conjugate flag is set. Injectivity keeps the trace positive on every state,
// so the map is total on S(H).
inline StateMapOracle measurement_map(const MeasurementOp& op, TensorShape in_shape,
                                      TensorShape out_shape, const Tolerances& tol = {}) {
    if (in_shape.total() != op.m.cols() || out_shape.total() != op.m.rows())
        throw ArgumentError("measurement_map: shapes do not match the operator");
    const ComplexMatrix m = op.m;
    const ComplexMatrix mstar = op.m.adjoint();
    const bool flag = op.conjugate_flag;
    return StateMapOracle(
        in_shape, out_shape,
        [m, mstar, flag, tol](const DensityMatrix& rho) {
            const ComplexMatrix arg = flag ? rho.mat().transpose() : rho.mat();
            ComplexMatrix out = m * arg * mstar;
            const double tr = out.trace().real();
            if (tr <= 0.0) throw OracleError("measurement map hit a nonpositive trace");
            out *= cdouble(1.0 / tr, 0.0);
            return DensityMatrix::from_matrix(out, tol);
        });
}

inline StateMapOracle measurement_map(const MeasurementOp& op, const Tolerances& tol = {}) {
    return measurement_map(op, TensorShape::single(op.m.cols()),
                           TensorShape::single(op.m.rows()), tol);
}

// rho -> q for every input state.
inline StateMapOracle constant_map(const PureState& q, TensorShape in_shape,
                                   TensorShape out_shape) {
    if (out_shape.total() != q.dim())
        throw ArgumentError("constant_map: output shape does not match the fixed state");
    const DensityMatrix value = q.base().with_shape(out_shape);
    return StateMapOracle(std::move(in_shape), std::move(out_shape),
                          [value](const DensityMatrix&) { return value; });
}

inline StateMapOracle constant_map(const PureState& q, int in_dim) {
    return constant_map(q, TensorShape::single(in_dim), TensorShape::single(q.dim()));
}

// Partition of the dimension-2 pure states into two classes with P and its
// orthocomplement always on opposite sides. Class 1 iff the Bloch z
// coordinate is positive, ties broken by the sign of x, then y, then class 1.
inline int bloch_z_partition(const PureState& p) {
    if (p.dim() != 2) throw ArgumentError("partition rule is defined for dimension 2");
    const BlochVector v = state_to_bloch(p.base());
    if (v.z > 0.0) return 1;
    if (v.z < 0.0) return 2;
    if (v.x > 0.0) return 1;
    if (v.x < 0.0) return 2;
    if (v.y > 0.0) return 1;
    if (v.y < 0.0) return 2;
    return 1;
}

// Two distinct target pure states plus the rule assigning each dimension-2
// pure input to one of them.
struct SegmentSpec {
    PureState q1, q2;
    std::string partition_rule_name = "bloch_z";
    std::function<int(const PureState&)> partition_rule = bloch_z_partition;

    SegmentSpec(PureState a, PureState b) : q1(std::move(a)), q2(std::move(b)) {
        if (q1.dim() != q2.dim()) throw ArgumentError("segment endpoints differ in dimension");
        if (distance_frobenius(q1.mat(), q2.mat()) <= 1e-6)
            throw ArgumentError("segment endpoints must be distinct");
    }
};

// The discontinuous map on dimension-2 states: pure inputs go to q1 or q2 by
// class, every non-pure input goes to the midpoint (q1+q2)/2. Its range is
// the closed segment [q1, q2] and it has no continuous representative.
inline StateMapOracle segment_map(const SegmentSpec& spec, const Tolerances& tol = {}) {
    // The antipodal requirement: P and I-P always land in different classes.
    Rng probe_rng(0x5e9);
    for (int trial = 0; trial < 64; ++trial) {
        const PureState p = random_pure(2, probe_rng);
        const PureState perp =
            PureState::from_state(DensityMatrix::from_matrix(ComplexMatrix::identity(2) - p.mat()));
        if (spec.partition_rule(p) == spec.partition_rule(perp))
            throw ArgumentError("segment partition rule is not antipodal");
    }

    const DensityMatrix midpoint = mix(0.5, spec.q1.base(), spec.q2.base(), tol);
    const DensityMatrix v1 = spec.q1.base();
    const DensityMatrix v2 = spec.q2.base();
    const auto rule = spec.partition_rule;
    const TensorShape out_shape = TensorShape::single(spec.q1.dim());
    return StateMapOracle(
        TensorShape::single(2), out_shape,
        [v1, v2, midpoint, rule, tol](const DensityMatrix& rho) {
            if (second_eigenvalue(rho.mat(), tol) <= kPurityTol) {
                const PureState p = PureState::from_state(rho, tol);
                return rule(p) == 1 ? v1 : v2;
            }
            return midpoint;
        });
}

// Pre-compose an oracle with a structural transform: eval'(rho) = eval(T(rho)).
inline StateMapOracle compose(const StateMapOracle& map, const TransformSpec& pre_transform,
                              const Tolerances& tol = {}) {
    const TensorShape new_in = pre_image_shape(map.in_shape(), pre_transform);
    if (transformed_shape(new_in, pre_transform).total() != map.in_shape().total())
        throw ArgumentError("compose: transform output does not match the oracle input");
    const StateMapOracle inner = map;
    return StateMapOracle(
        new_in, map.out_shape(),
        [inner, pre_transform, new_in, tol](const DensityMatrix& rho) {
            const ComplexMatrix transformed = apply_transform(rho.mat(), new_in, pre_transform);
            return inner(DensityMatrix::from_matrix(transformed, tol));
        },
        map.provenance());
}

// Finite lookup table keyed on the canonical fingerprint; exact match only.
struct TableEntry {
    ComplexMatrix in, out;
};

inline StateMapOracle table_map(const std::vector<TableEntry>& entries, TensorShape in_shape,
                                TensorShape out_shape, const Tolerances& tol = {}) {
    auto table = std::make_shared<std::map<std::string, DensityMatrix>>();
    for (const auto& e : entries) {
        in_shape.require_matches(e.in, "table_map entry input");
        out_shape.require_matches(e.out, "table_map entry output");
        table->insert_or_assign(canonical_key(e.in), DensityMatrix::from_matrix(e.out, tol));
    }
    return StateMapOracle(
        std::move(in_shape), std::move(out_shape),
        [table](const DensityMatrix& rho) {
            const auto it = table->find(canonical_key(rho.mat()));
            if (it == table->end())
                throw OracleError("table oracle has no entry for the queried state");
            return it->second;
        },
        Provenance::Table);
}

// Wrapper logging every evaluation, used to tabulate a constructed map over
// exactly the query sequence of a seeded run.
inline StateMapOracle recording_oracle(const StateMapOracle& inner,
                                       std::shared_ptr<std::vector<TableEntry>> log) {
    const StateMapOracle map = inner;
    return StateMapOracle(
        inner.in_shape(), inner.out_shape(),
        [map, log](const DensityMatrix& rho) {
            DensityMatrix out = map(rho);
            log->push_back(TableEntry{rho.mat(), out.mat()});
            return out;
        },
        inner.provenance());
}

// Top spectral projector of the input; pure-state preserving but not strict
// convexity preserving. Serves as a negative control.
inline StateMapOracle spectral_argmax_map(int dim, const Tolerances& tol = {}) {
    return StateMapOracle(TensorShape::single(dim), TensorShape::single(dim),
                          [tol](const DensityMatrix& rho) {
                              const EigResult eig = hermitian_eig(rho.mat(), tol);
                              std::vector<cdouble> x(static_cast<std::size_t>(rho.dim()));
                              for (int r = 0; r < rho.dim(); ++r)
                                  x[static_cast<std::size_t>(r)] = eig.vectors(r, 0);
                              return PureState::from_vector(std::move(x), tol).base();
                          });
}

}  // namespace canonmap
