#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "canonmap/complex_matrix.hpp"

namespace canonmap {

namespace detail {

// Row-major mixed-radix index helpers for composite spaces.
inline std::vector<int> factor_strides(const TensorShape& shape) {
    const int n = shape.factors();
    std::vector<int> strides(static_cast<std::size_t>(n), 1);
    for (int f = n - 2; f >= 0; --f)
        strides[static_cast<std::size_t>(f)] =
            strides[static_cast<std::size_t>(f + 1)] * shape.dims[static_cast<std::size_t>(f + 1)];
    return strides;
}

inline void decompose_index(int idx, const TensorShape& shape, const std::vector<int>& strides,
                            std::vector<int>& out) {
    out.resize(shape.dims.size());
    for (std::size_t f = 0; f < shape.dims.size(); ++f) {
        out[f] = idx / strides[f];
        idx -= out[f] * strides[f];
    }
}

inline int compose_index(const std::vector<int>& factors, const std::vector<int>& strides) {
    int idx = 0;
    for (std::size_t f = 0; f < factors.size(); ++f) idx += factors[f] * strides[f];
    return idx;
}

}  // namespace detail

// Partial trace over the factors NOT listed in keep (1-based, strictly
// increasing, nonempty). On product inputs (x)A_i it returns
// (prod of traced factor traces) * (x)_{j in keep} A_j.
inline ComplexMatrix partial_trace(const ComplexMatrix& c, const TensorShape& shape,
                                   const std::vector<int>& keep) {
    shape.require_matches(c, "partial_trace");
    const int n = shape.factors();
    if (keep.empty()) throw ArgumentError("partial_trace: keep set must be nonempty");
    for (std::size_t i = 0; i < keep.size(); ++i) {
        if (keep[i] < 1 || keep[i] > n)
            throw ArgumentError("partial_trace: keep index out of range");
        if (i > 0 && keep[i] <= keep[i - 1])
            throw ArgumentError("partial_trace: keep set must be strictly increasing");
    }

    std::vector<int> traced;
    for (int f = 1; f <= n; ++f)
        if (!std::binary_search(keep.begin(), keep.end(), f)) traced.push_back(f);

    std::vector<int> keep_dims, traced_dims;
    for (int f : keep) keep_dims.push_back(shape.dim(f));
    for (int f : traced) traced_dims.push_back(shape.dim(f));
    const TensorShape keep_shape(keep_dims);
    const TensorShape traced_shape(traced.empty() ? std::vector<int>{1} : traced_dims);

    const auto full_strides = detail::factor_strides(shape);
    const auto keep_strides = detail::factor_strides(keep_shape);
    const auto traced_strides = detail::factor_strides(traced_shape);

    ComplexMatrix out(keep_shape.total(), keep_shape.total());
    std::vector<int> kf_a, kf_b, tf, full_a(static_cast<std::size_t>(n)),
        full_b(static_cast<std::size_t>(n));
    for (int a = 0; a < out.rows(); ++a) {
        detail::decompose_index(a, keep_shape, keep_strides, kf_a);
        for (int b = 0; b < out.cols(); ++b) {
            detail::decompose_index(b, keep_shape, keep_strides, kf_b);
            cdouble sum = 0.0;
            const int tcount = traced.empty() ? 1 : traced_shape.total();
            for (int t = 0; t < tcount; ++t) {
                if (!traced.empty())
                    detail::decompose_index(t, traced_shape, traced_strides, tf);
                for (std::size_t i = 0; i < keep.size(); ++i) {
                    full_a[static_cast<std::size_t>(keep[i] - 1)] = kf_a[i];
                    full_b[static_cast<std::size_t>(keep[i] - 1)] = kf_b[i];
                }
                for (std::size_t i = 0; i < traced.size(); ++i) {
                    full_a[static_cast<std::size_t>(traced[i] - 1)] = tf[i];
                    full_b[static_cast<std::size_t>(traced[i] - 1)] = tf[i];
                }
                sum += c(detail::compose_index(full_a, full_strides),
                         detail::compose_index(full_b, full_strides));
            }
            out(a, b) = sum;
        }
    }
    return out;
}

// Reduction to a single factor r (1-based).
inline ComplexMatrix reduction(const ComplexMatrix& c, const TensorShape& shape, int factor) {
    return partial_trace(c, shape, {factor});
}

// Structural transform descriptor: full transpose in the computational basis,
// partial transpose on a factor set, the two-factor swap, or a factor
// permutation acting on product operators as (x)A_i -> (x)A_{pi(i)}.
struct TransformSpec {
    enum class Kind { Transpose, PartialTranspose, Swap, FactorPermutation };
    Kind kind = Kind::Transpose;
    std::vector<int> factors;  // PartialTranspose: 1-based factor set
    std::vector<int> perm;     // FactorPermutation: 1-based, output slot j reads factor perm[j-1]

    static TransformSpec transpose() { return {Kind::Transpose, {}, {}}; }
    static TransformSpec partial_transpose(std::vector<int> f) {
        return {Kind::PartialTranspose, std::move(f), {}};
    }
    static TransformSpec swap() { return {Kind::Swap, {}, {}}; }
    static TransformSpec factor_permutation(std::vector<int> p) {
        return {Kind::FactorPermutation, {}, std::move(p)};
    }
};

inline void validate_permutation(const std::vector<int>& perm, int n) {
    if (static_cast<int>(perm.size()) != n)
        throw ArgumentError("permutation length does not match factor count");
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int p : perm) {
        if (p < 1 || p > n || seen[static_cast<std::size_t>(p - 1)])
            throw ArgumentError("not a permutation of 1..n");
        seen[static_cast<std::size_t>(p - 1)] = true;
    }
}

inline std::vector<int> inverse_permutation(const std::vector<int>& perm) {
    std::vector<int> inv(perm.size());
    for (std::size_t j = 0; j < perm.size(); ++j)
        inv[static_cast<std::size_t>(perm[j] - 1)] = static_cast<int>(j) + 1;
    return inv;
}

// Shape of the transform's output given the input shape.
inline TensorShape transformed_shape(const TensorShape& shape, const TransformSpec& spec) {
    switch (spec.kind) {
        case TransformSpec::Kind::Transpose:
        case TransformSpec::Kind::PartialTranspose:
            return shape;
        case TransformSpec::Kind::Swap: {
            if (shape.factors() != 2) throw ArgumentError("swap requires exactly two factors");
            return TensorShape({shape.dims[1], shape.dims[0]});
        }
        case TransformSpec::Kind::FactorPermutation: {
            validate_permutation(spec.perm, shape.factors());
            std::vector<int> d;
            for (int p : spec.perm) d.push_back(shape.dim(p));
            return TensorShape(d);
        }
    }
    throw ArgumentError("unknown transform kind");
}

// Shape S such that transformed_shape(S, spec) equals the given output shape.
inline TensorShape pre_image_shape(const TensorShape& out_shape, const TransformSpec& spec) {
    switch (spec.kind) {
        case TransformSpec::Kind::Transpose:
        case TransformSpec::Kind::PartialTranspose:
            return out_shape;
        case TransformSpec::Kind::Swap: {
            if (out_shape.factors() != 2) throw ArgumentError("swap requires exactly two factors");
            return TensorShape({out_shape.dims[1], out_shape.dims[0]});
        }
        case TransformSpec::Kind::FactorPermutation: {
            validate_permutation(spec.perm, out_shape.factors());
            const auto inv = inverse_permutation(spec.perm);
            std::vector<int> d;
            for (int p : inv) d.push_back(out_shape.dim(p));
            return TensorShape(d);
        }
    }
    throw ArgumentError("unknown transform kind");
}

// Apply a structural transform. All four are linear, trace-preserving and
// Hermiticity-preserving.
inline ComplexMatrix apply_transform(const ComplexMatrix& c, const TensorShape& shape,
                                     const TransformSpec& spec) {
    shape.require_matches(c, "apply_transform");
    switch (spec.kind) {
        case TransformSpec::Kind::Transpose:
            return c.transpose();

        case TransformSpec::Kind::PartialTranspose: {
            const int n = shape.factors();
            if (spec.factors.empty())
                throw ArgumentError("partial transpose: empty factor set");
            std::vector<bool> flip(static_cast<std::size_t>(n), false);
            for (int f : spec.factors) {
                if (f < 1 || f > n) throw ArgumentError("partial transpose: factor out of range");
                flip[static_cast<std::size_t>(f - 1)] = true;
            }
            const auto strides = detail::factor_strides(shape);
            ComplexMatrix out(c.rows(), c.cols());
            std::vector<int> rf, cf, rf2, cf2;
            for (int r = 0; r < c.rows(); ++r) {
                detail::decompose_index(r, shape, strides, rf);
                for (int col = 0; col < c.cols(); ++col) {
                    detail::decompose_index(col, shape, strides, cf);
                    rf2 = rf;
                    cf2 = cf;
                    for (int f = 0; f < n; ++f)
                        if (flip[static_cast<std::size_t>(f)])
                            std::swap(rf2[static_cast<std::size_t>(f)],
                                      cf2[static_cast<std::size_t>(f)]);
                    out(detail::compose_index(rf2, strides),
                        detail::compose_index(cf2, strides)) = c(r, col);
                }
            }
            return out;
        }

        case TransformSpec::Kind::Swap: {
            if (shape.factors() != 2) throw ArgumentError("swap requires exactly two factors");
            return apply_transform(c, shape, TransformSpec::factor_permutation({2, 1}));
        }

        case TransformSpec::Kind::FactorPermutation: {
            const int n = shape.factors();
            validate_permutation(spec.perm, n);
            const TensorShape out_shape = transformed_shape(shape, spec);
            const auto in_strides = detail::factor_strides(shape);
            const auto out_strides = detail::factor_strides(out_shape);
            ComplexMatrix out(out_shape.total(), out_shape.total());
            std::vector<int> of, pf, inf_r(static_cast<std::size_t>(n)),
                inf_c(static_cast<std::size_t>(n));
            for (int r = 0; r < out.rows(); ++r) {
                detail::decompose_index(r, out_shape, out_strides, of);
                for (int col = 0; col < out.cols(); ++col) {
                    detail::decompose_index(col, out_shape, out_strides, pf);
                    for (int j = 0; j < n; ++j) {
                        inf_r[static_cast<std::size_t>(spec.perm[static_cast<std::size_t>(j)] - 1)] =
                            of[static_cast<std::size_t>(j)];
                        inf_c[static_cast<std::size_t>(spec.perm[static_cast<std::size_t>(j)] - 1)] =
                            pf[static_cast<std::size_t>(j)];
                    }
                    out(r, col) = c(detail::compose_index(inf_r, in_strides),
                                    detail::compose_index(inf_c, in_strides));
                }
            }
            return out;
        }
    }
    throw ArgumentError("unknown transform kind");
}

}  // namespace canonmap
