#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canonmap/complex_matrix.hpp"
#include "canonmap/linalg.hpp"
#include "canonmap/rng.hpp"
#include "canonmap/transforms.hpp"

namespace canonmap {

// Fixed thresholds for pure-state recognition; these are part of the library
// contract rather than tunable tolerances.
inline constexpr double kPurityTol = 1e-9;
inline constexpr double kTraceTol = 1e-8;

// A quantum state: Hermitian, positive semidefinite, trace one. Validated on
// construction; eigenvalues in [-psd_floor, 0) are clipped to zero and the
// state renormalized, anything more negative is rejected.
class DensityMatrix {
public:
    static DensityMatrix from_matrix(const ComplexMatrix& m, const Tolerances& tol = {}) {
        return DensityMatrix(m, std::nullopt, tol);
    }
    static DensityMatrix from_matrix(const ComplexMatrix& m, TensorShape shape,
                                     const Tolerances& tol = {}) {
        shape.require_matches(m, "DensityMatrix");
        return DensityMatrix(m, std::move(shape), tol);
    }

    const ComplexMatrix& mat() const { return mat_; }
    const std::optional<TensorShape>& shape() const { return shape_; }
    int dim() const { return mat_.rows(); }

    DensityMatrix with_shape(TensorShape shape) const {
        shape.require_matches(mat_, "DensityMatrix::with_shape");
        DensityMatrix out = *this;
        out.shape_ = std::move(shape);
        return out;
    }

private:
    DensityMatrix(const ComplexMatrix& m, std::optional<TensorShape> shape,
                  const Tolerances& tol)
        : shape_(std::move(shape)) {
        if (!m.square()) throw ArgumentError("density matrix must be square");
        if (!m.all_finite()) throw ArgumentError("density matrix entries must be finite");
        if (distance_max(m, m.adjoint()) > tol.hermiticity_tol)
            throw ArgumentError("density matrix is not Hermitian within tolerance");
        mat_ = 0.5 * (m + m.adjoint());

        const EigResult eig = hermitian_eig(mat_, tol);
        const double min_eig = eig.values.back();
        if (min_eig < -tol.psd_floor)
            throw ArgumentError("density matrix has eigenvalue " + std::to_string(min_eig) +
                                " below the PSD floor");
        if (min_eig < 0.0) {
            // Rebuild from clipped spectrum.
            ComplexMatrix rebuilt(mat_.rows(), mat_.cols());
            for (std::size_t i = 0; i < eig.values.size(); ++i) {
                const double w = std::max(eig.values[i], 0.0);
                if (w == 0.0) continue;
                for (int r = 0; r < mat_.rows(); ++r)
                    for (int c = 0; c < mat_.cols(); ++c)
                        rebuilt(r, c) += w * eig.vectors(r, static_cast<int>(i)) *
                                         std::conj(eig.vectors(c, static_cast<int>(i)));
            }
            mat_ = rebuilt;
        }

        const double tr = mat_.trace().real();
        if (std::abs(tr - 1.0) > kTraceTol)
            throw ArgumentError("density matrix trace " + std::to_string(tr) +
                                " is not 1 within tolerance");
        if (tr != 1.0) mat_ *= cdouble(1.0 / tr, 0.0);
    }

    ComplexMatrix mat_;
    std::optional<TensorShape> shape_;
};

// Deterministic phase gauge for a complex vector: the first entry of largest
// magnitude is made real and positive.
inline std::vector<cdouble> phase_fix(std::vector<cdouble> x) {
    std::size_t best = 0;
    double best_abs = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::abs(x[i]);
        if (a > best_abs) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs > 0.0) {
        const cdouble ph = std::conj(x[best]) / best_abs;
        for (auto& z : x) z *= ph;
        x[best] = cdouble(std::abs(x[best]), 0.0);
    }
    return x;
}

// Rank-one projection P = x x*; carries the unit range generator.
class PureState {
public:
    static PureState from_vector(std::vector<cdouble> x, const Tolerances& tol = {}) {
        double n2 = 0.0;
        for (const auto& z : x) n2 += std::norm(z);
        if (n2 <= 0.0) throw ArgumentError("pure state vector must be nonzero");
        const double inv = 1.0 / std::sqrt(n2);
        for (auto& z : x) z *= inv;
        x = phase_fix(std::move(x));
        DensityMatrix base = DensityMatrix::from_matrix(outer(x, x), tol);
        return PureState(std::move(base), std::move(x));
    }

    static PureState from_state(const DensityMatrix& rho, const Tolerances& tol = {},
                                double purity_tol = kPurityTol) {
        const EigResult eig = hermitian_eig(rho.mat(), tol);
        if (eig.values.size() > 1 && eig.values[1] > purity_tol)
            throw ArgumentError("state is not pure: second eigenvalue " +
                                std::to_string(eig.values[1]));
        std::vector<cdouble> x(static_cast<std::size_t>(rho.dim()));
        for (int r = 0; r < rho.dim(); ++r) x[static_cast<std::size_t>(r)] = eig.vectors(r, 0);
        x = phase_fix(std::move(x));
        DensityMatrix base = DensityMatrix::from_matrix(outer(x, x), tol);
        return PureState(std::move(base), std::move(x));
    }

    const DensityMatrix& base() const { return base_; }
    const ComplexMatrix& mat() const { return base_.mat(); }
    const std::vector<cdouble>& vector() const { return vector_; }
    int dim() const { return base_.dim(); }

private:
    PureState(DensityMatrix base, std::vector<cdouble> x)
        : base_(std::move(base)), vector_(std::move(x)) {}

    DensityMatrix base_;
    std::vector<cdouble> vector_;
};

// Second-largest eigenvalue; zero for a rank-one projection.
inline double second_eigenvalue(const ComplexMatrix& m, const Tolerances& tol = {}) {
    const EigResult eig = hermitian_eig(m, tol);
    return eig.values.size() > 1 ? eig.values[1] : 0.0;
}

inline bool is_pure(const DensityMatrix& rho, const Tolerances& tol = {},
                    double purity_tol = kPurityTol) {
    if (second_eigenvalue(rho.mat(), tol) > purity_tol) return false;
    const ComplexMatrix& p = rho.mat();
    return distance_frobenius(p * p, p) <= 1e-8;
}

// Point of the closed unit ball in R^3.
struct BlochVector {
    double x = 0.0, y = 0.0, z = 0.0;

    BlochVector() = default;
    BlochVector(double x, double y, double z) : x(x), y(y), z(z) {
        if (x * x + y * y + z * z > 1.0 + 1e-12)
            throw ArgumentError("Bloch vector lies outside the closed unit ball");
    }
    double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

// The affine isomorphism between Bloch vectors and 2x2 states:
// v -> I/2 + (1/2) [[z, x-iy], [x+iy, -z]]. Unit vectors correspond exactly
// to pure states.
inline DensityMatrix bloch_to_state(const BlochVector& v, const Tolerances& tol = {}) {
    ComplexMatrix m(2, 2);
    m(0, 0) = 0.5 * (1.0 + v.z);
    m(0, 1) = 0.5 * cdouble(v.x, -v.y);
    m(1, 0) = 0.5 * cdouble(v.x, v.y);
    m(1, 1) = 0.5 * (1.0 - v.z);
    Tolerances t = tol;
    // The sphere parametrization is exact; allow rounding at the boundary.
    t.psd_floor = std::max(t.psd_floor, 1e-12);
    return DensityMatrix::from_matrix(m, t);
}

inline BlochVector state_to_bloch(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw ArgumentError("Bloch coordinates are defined for dimension 2");
    const ComplexMatrix& m = rho.mat();
    BlochVector v;
    v.x = 2.0 * m(1, 0).real();
    v.y = 2.0 * m(1, 0).imag();
    v.z = (m(0, 0) - m(1, 1)).real();
    return v;
}

// Spectral resolution rho = sum_i t_i P_i over the positive eigenvalues,
// zero eigenvalues omitted. Within a degenerate cluster (eigenvalue gap
// below 1e-8) the projector choice is one orthonormal resolution among many.
struct SpectralResolution {
    std::vector<std::pair<double, PureState>> terms;
};

inline SpectralResolution spectral_resolution(const DensityMatrix& rho,
                                              const Tolerances& tol = {}) {
    const EigResult eig = hermitian_eig(rho.mat(), tol);
    const int n = rho.dim();

    // Re-orthonormalize eigenvector clusters by modified Gram-Schmidt.
    ComplexMatrix vecs = eig.vectors;
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && eig.values[static_cast<std::size_t>(end - 1)] -
                                  eig.values[static_cast<std::size_t>(end)] <
                              1e-8)
            ++end;
        for (int j = start; j < end; ++j) {
            for (int k = start; k < j; ++k) {
                cdouble proj = 0.0;
                for (int r = 0; r < n; ++r) proj += std::conj(vecs(r, k)) * vecs(r, j);
                for (int r = 0; r < n; ++r) vecs(r, j) -= proj * vecs(r, k);
            }
            double norm2 = 0.0;
            for (int r = 0; r < n; ++r) norm2 += std::norm(vecs(r, j));
            const double inv = norm2 > 0.0 ? 1.0 / std::sqrt(norm2) : 0.0;
            for (int r = 0; r < n; ++r) vecs(r, j) *= inv;
        }
        start = end;
    }

    SpectralResolution out;
    for (int i = 0; i < n; ++i) {
        const double w = eig.values[static_cast<std::size_t>(i)];
        if (w <= 1e-12) continue;
        std::vector<cdouble> x(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) x[static_cast<std::size_t>(r)] = vecs(r, i);
        out.terms.emplace_back(w, PureState::from_vector(std::move(x), tol));
    }
    return out;
}

// Entrywise convex combination of states.
inline DensityMatrix convex_combine(const std::vector<std::pair<double, DensityMatrix>>& terms,
                                    const Tolerances& tol = {}) {
    if (terms.empty()) throw ArgumentError("convex_combine: empty term list");
    double sum = 0.0;
    for (const auto& [w, rho] : terms) {
        if (w < 0.0) throw ArgumentError("convex_combine: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw ArgumentError("convex_combine: weights sum to " + std::to_string(sum));
    ComplexMatrix acc(terms.front().second.dim(), terms.front().second.dim());
    for (const auto& [w, rho] : terms) acc += cdouble(w, 0.0) * rho.mat();
    DensityMatrix out = DensityMatrix::from_matrix(acc, tol);
    if (terms.front().second.shape())
        out = out.with_shape(*terms.front().second.shape());
    return out;
}

inline DensityMatrix mix(double t, const DensityMatrix& a, const DensityMatrix& b,
                         const Tolerances& tol = {}) {
    return convex_combine({{t, a}, {1.0 - t, b}}, tol);
}

// Haar-like random pure state: complex Gaussian entries, normalized.
inline PureState random_pure(int dim, Rng& rng, const Tolerances& tol = {}) {
    std::vector<cdouble> x(static_cast<std::size_t>(dim));
    for (auto& z : x) z = rng.cgauss();
    return PureState::from_vector(std::move(x), tol);
}

inline PureState random_pure(int dim, std::uint64_t seed, const Tolerances& tol = {}) {
    Rng rng(seed);
    return random_pure(dim, rng, tol);
}

// Random state of the requested rank: rho = G G* / Tr for a dim x rank
// complex Gaussian G.
inline DensityMatrix random_state(int dim, int rank, Rng& rng, const Tolerances& tol = {}) {
    if (rank < 1 || rank > dim) throw ArgumentError("random_state: rank out of range");
    ComplexMatrix g(dim, rank);
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < rank; ++c) g(r, c) = rng.cgauss();
    ComplexMatrix m = g * g.adjoint();
    m *= cdouble(1.0 / m.trace().real(), 0.0);
    return DensityMatrix::from_matrix(m, tol);
}

inline DensityMatrix random_state(int dim, int rank, std::uint64_t seed,
                                  const Tolerances& tol = {}) {
    Rng rng(seed);
    return random_state(dim, rank, rng, tol);
}

// Verdict for the projection-sum check: a positive combination of linearly
// independent rank-one projections is itself a projection only when the
// projections are orthogonal and every weight is one. When the combination
// is a projection but the weights or overlaps disagree, that is a library
// bug and the verdict carries a counterexample description.
struct Lemma21Verdict {
    bool is_projection = false;
    bool assertions_pass = true;
    double idempotency_residual = 0.0;
    std::string counterexample;
};

inline Lemma21Verdict check_lemma21(const std::vector<std::pair<double, PureState>>& terms,
                                    const Tolerances& tol = {}) {
    if (terms.empty()) throw ArgumentError("check_lemma21: empty term list");
    const int dim = terms.front().second.dim();
    const int r = static_cast<int>(terms.size());
    for (const auto& [w, q] : terms) {
        if (w <= 0.0) throw ArgumentError("check_lemma21: weights must be positive");
        if (q.dim() != dim) throw ArgumentError("check_lemma21: dimension mismatch");
    }

    // Linear independence of the projections via the Gram matrix.
    ComplexMatrix gram(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j)
            gram(i, j) = hs_inner(terms[static_cast<std::size_t>(i)].second.mat(),
                                  terms[static_cast<std::size_t>(j)].second.mat());
    if (numerical_rank(gram, tol) < r)
        throw ArgumentError("check_lemma21: projections are linearly dependent");

    ComplexMatrix s(dim, dim);
    for (const auto& [w, q] : terms) s += cdouble(w, 0.0) * q.mat();

    Lemma21Verdict verdict;
    verdict.idempotency_residual = distance_frobenius(s * s, s);
    verdict.is_projection = verdict.idempotency_residual <= 1e-9;
    if (!verdict.is_projection) return verdict;

    for (int i = 0; i < r; ++i) {
        if (std::abs(terms[static_cast<std::size_t>(i)].first - 1.0) > 1e-9) {
            verdict.assertions_pass = false;
            verdict.counterexample = "projection verdict with weight " +
                                     std::to_string(terms[static_cast<std::size_t>(i)].first) +
                                     " at index " + std::to_string(i);
            return verdict;
        }
        for (int j = 0; j < r; ++j) {
            if (i == j) continue;
            const double overlap = (terms[static_cast<std::size_t>(i)].second.mat() *
                                    terms[static_cast<std::size_t>(j)].second.mat())
                                       .frobenius_norm();
            if (overlap > 1e-9) {
                verdict.assertions_pass = false;
                verdict.counterexample = "projection verdict with non-orthogonal pair (" +
                                         std::to_string(i) + "," + std::to_string(j) +
                                         "), overlap " + std::to_string(overlap);
                return verdict;
            }
        }
    }
    return verdict;
}

}  // namespace canonmap
