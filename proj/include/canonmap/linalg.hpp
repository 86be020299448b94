#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "canonmap/complex_matrix.hpp"

namespace canonmap {

// Eigendecomposition a = V diag(values) V* with values sorted descending and
// eigenvectors as the columns of V.
struct EigResult {
    std::vector<double> values;
    ComplexMatrix vectors;
};

namespace detail {

// One complex plane rotation zeroing the (p,q) element of a Hermitian matrix,
// updating the accumulated unitary. Rotation parameters follow the classic
// real Jacobi formulas after factoring out the phase of a(p,q).
struct JacobiRotation {
    double c;
    double s;
    cdouble phase;  // e^{i arg g}
};

inline JacobiRotation jacobi_params(double app, double aqq, cdouble g) {
    const double r = std::abs(g);
    JacobiRotation rot{1.0, 0.0, {1.0, 0.0}};
    if (r == 0.0) return rot;
    rot.phase = g / r;
    const double tau = (aqq - app) / (2.0 * r);
    double t;
    if (tau >= 0.0)
        t = 1.0 / (tau + std::sqrt(1.0 + tau * tau));
    else
        t = -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
    rot.c = 1.0 / std::sqrt(1.0 + t * t);
    rot.s = t * rot.c;
    return rot;
}

inline double off_diagonal_norm(const ComplexMatrix& a) {
    double s = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c)
            if (r != c) s += std::norm(a(r, c));
    return std::sqrt(s);
}

inline void sort_descending(std::vector<double>& values, ComplexMatrix& vectors) {
    const int n = static_cast<int>(values.size());
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return values[static_cast<std::size_t>(i)] >
                                                values[static_cast<std::size_t>(j)]; });
    std::vector<double> sv(static_cast<std::size_t>(n));
    ComplexMatrix sm(vectors.rows(), n);
    for (int k = 0; k < n; ++k) {
        const int src = order[static_cast<std::size_t>(k)];
        sv[static_cast<std::size_t>(k)] = values[static_cast<std::size_t>(src)];
        for (int r = 0; r < vectors.rows(); ++r) sm(r, k) = vectors(r, src);
    }
    values = std::move(sv);
    vectors = std::move(sm);
}

}  // namespace detail

// Cyclic Jacobi eigensolver for Hermitian matrices. Converges when the
// off-diagonal Frobenius mass drops below 1e-13 * |a|_F.
inline EigResult hermitian_eig(const ComplexMatrix& a, const Tolerances& tol = {}) {
    if (!a.square()) throw ArgumentError("hermitian_eig requires a square matrix");
    if (distance_max(a, a.adjoint()) > tol.hermiticity_tol)
        throw ContractViolation("hermitian_eig: input is not Hermitian within tolerance");

    const int n = a.rows();
    ComplexMatrix w = 0.5 * (a + a.adjoint());
    ComplexMatrix v = ComplexMatrix::identity(n);
    const double scale = w.frobenius_norm();

    if (scale > 0.0) {
        const double target = 1e-13 * scale;
        const int max_sweeps = 60;
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            if (detail::off_diagonal_norm(w) <= target) break;
            for (int p = 0; p < n - 1; ++p) {
                for (int q = p + 1; q < n; ++q) {
                    const cdouble g = w(p, q);
                    if (std::abs(g) == 0.0) continue;
                    const auto rot =
                        detail::jacobi_params(w(p, p).real(), w(q, q).real(), g);
                    const cdouble ph = rot.phase;
                    const double c = rot.c, s = rot.s;
                    // w <- W* w W with W the identity except
                    // W(p,p)=c, W(p,q)=s*ph, W(q,p)=-s*conj(ph), W(q,q)=c.
                    for (int k = 0; k < n; ++k) {
                        const cdouble wkp = w(k, p), wkq = w(k, q);
                        w(k, p) = c * wkp - s * std::conj(ph) * wkq;
                        w(k, q) = s * ph * wkp + c * wkq;
                    }
                    for (int k = 0; k < n; ++k) {
                        const cdouble wpk = w(p, k), wqk = w(q, k);
                        w(p, k) = c * wpk - s * ph * wqk;
                        w(q, k) = s * std::conj(ph) * wpk + c * wqk;
                    }
                    w(p, q) = 0.0;
                    w(q, p) = 0.0;
                    w(p, p) = cdouble(w(p, p).real(), 0.0);
                    w(q, q) = cdouble(w(q, q).real(), 0.0);
                    for (int k = 0; k < n; ++k) {
                        const cdouble vkp = v(k, p), vkq = v(k, q);
                        v(k, p) = c * vkp - s * std::conj(ph) * vkq;
                        v(k, q) = s * ph * vkp + c * vkq;
                    }
                }
            }
        }
    }

    EigResult out;
    out.values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out.values[static_cast<std::size_t>(i)] = w(i, i).real();
    out.vectors = std::move(v);
    detail::sort_descending(out.values, out.vectors);
    return out;
}

// Singular value decomposition a = U diag(sigma) V*, sigma sorted descending.
// U is rows x min-rank-width with zero columns past the numerical rank.
struct SvdResult {
    ComplexMatrix u;             // rows x cols(a)
    std::vector<double> sigma;   // length cols(a), descending
    ComplexMatrix v;             // cols(a) x cols(a)
};

// One-sided (Hestenes) Jacobi SVD: orthogonalize the columns of a by plane
// rotations. Small singular values come out to near machine accuracy, which
// the generalized-inverse rank decisions rely on.
inline SvdResult svd(const ComplexMatrix& a) {
    const int m = a.rows(), n = a.cols();
    ComplexMatrix b = a;
    ComplexMatrix v = ComplexMatrix::identity(n);

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                double aii = 0.0, ajj = 0.0;
                cdouble g = 0.0;
                for (int k = 0; k < m; ++k) {
                    aii += std::norm(b(k, i));
                    ajj += std::norm(b(k, j));
                    g += std::conj(b(k, i)) * b(k, j);
                }
                const double denom = std::sqrt(aii * ajj);
                if (denom == 0.0 || std::abs(g) <= 1e-15 * denom) continue;
                rotated = true;
                const auto rot = detail::jacobi_params(aii, ajj, g);
                const cdouble ph = rot.phase;
                const double c = rot.c, s = rot.s;
                for (int k = 0; k < m; ++k) {
                    const cdouble bki = b(k, i), bkj = b(k, j);
                    b(k, i) = c * bki - s * std::conj(ph) * bkj;
                    b(k, j) = s * ph * bki + c * bkj;
                }
                for (int k = 0; k < n; ++k) {
                    const cdouble vki = v(k, i), vkj = v(k, j);
                    v(k, i) = c * vki - s * std::conj(ph) * vkj;
                    v(k, j) = s * ph * vki + c * vkj;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        double s = 0.0;
        for (int k = 0; k < m; ++k) s += std::norm(b(k, j));
        sigma[static_cast<std::size_t>(j)] = std::sqrt(s);
    }
    {
        std::vector<int> order(static_cast<std::size_t>(n));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
            return sigma[static_cast<std::size_t>(i)] > sigma[static_cast<std::size_t>(j)];
        });
        ComplexMatrix bs(m, n), vs(n, n);
        std::vector<double> ss(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) {
            const int src = order[static_cast<std::size_t>(k)];
            ss[static_cast<std::size_t>(k)] = sigma[static_cast<std::size_t>(src)];
            for (int r = 0; r < m; ++r) bs(r, k) = b(r, src);
            for (int r = 0; r < n; ++r) vs(r, k) = v(r, src);
        }
        b = std::move(bs);
        v = std::move(vs);
        sigma = std::move(ss);
    }

    SvdResult out;
    out.u = ComplexMatrix(m, n);
    for (int j = 0; j < n; ++j) {
        const double s = sigma[static_cast<std::size_t>(j)];
        if (s > 0.0)
            for (int k = 0; k < m; ++k) out.u(k, j) = b(k, j) / s;
    }
    out.sigma = std::move(sigma);
    out.v = std::move(v);
    return out;
}

inline double rank_threshold(const std::vector<double>& sigma, double rank_rel_tol,
                             int max_dim) {
    const double smax = sigma.empty() ? 0.0 : sigma.front();
    return rank_rel_tol * smax * static_cast<double>(max_dim);
}

inline int numerical_rank(const std::vector<double>& sigma, double rank_rel_tol, int max_dim) {
    const double thresh = rank_threshold(sigma, rank_rel_tol, max_dim);
    int r = 0;
    for (double s : sigma)
        if (s > thresh) ++r;
    return r;
}

inline int numerical_rank(const ComplexMatrix& a, const Tolerances& tol = {}) {
    return numerical_rank(svd(a).sigma, tol.rank_rel_tol, std::max(a.rows(), a.cols()));
}

// Moore-Penrose generalized inverse. The zero matrix maps to the zero matrix.
inline ComplexMatrix pseudoinverse(const ComplexMatrix& r, const Tolerances& tol = {}) {
    const SvdResult s = svd(r);
    const double thresh =
        rank_threshold(s.sigma, tol.rank_rel_tol, std::max(r.rows(), r.cols()));
    ComplexMatrix out(r.cols(), r.rows());
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        const double sj = s.sigma[j];
        if (sj <= thresh) continue;
        const double inv = 1.0 / sj;
        for (int p = 0; p < r.cols(); ++p) {
            const cdouble vpj = s.v(p, static_cast<int>(j));
            if (vpj == cdouble{}) continue;
            for (int q = 0; q < r.rows(); ++q)
                out(p, q) += inv * vpj * std::conj(s.u(q, static_cast<int>(j)));
        }
    }
    return out;
}

// Trace norm (sum of singular values), Hilbert-Schmidt norm, numerical rank.
struct MatrixNorms {
    double trace_norm;
    double hs_norm;
    int rank;
};

inline MatrixNorms norms(const ComplexMatrix& t, const Tolerances& tol = {}) {
    const SvdResult s = svd(t);
    MatrixNorms out{};
    out.trace_norm = std::accumulate(s.sigma.begin(), s.sigma.end(), 0.0);
    out.hs_norm = t.frobenius_norm();
    out.rank = numerical_rank(s.sigma, tol.rank_rel_tol, std::max(t.rows(), t.cols()));
    return out;
}

// Trace distance (1/2) |a - b|_Tr between Hermitian matrices.
inline double trace_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return 0.5 * norms(a - b).trace_norm;
}

// Least squares min |A x - b| over real x for real-valued A, b handed in as
// rows of doubles; solved through the complex SVD. Returns the minimum-norm
// solution.
inline std::vector<double> lstsq_real(const std::vector<std::vector<double>>& a,
                                      const std::vector<double>& b) {
    const int rows = static_cast<int>(a.size());
    if (rows == 0) throw ArgumentError("lstsq_real: empty system");
    const int cols = static_cast<int>(a.front().size());
    ComplexMatrix am(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) am(r, c) = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    const SvdResult s = svd(am);
    const double thresh = rank_threshold(s.sigma, 1e-12, std::max(rows, cols));
    std::vector<double> x(static_cast<std::size_t>(cols), 0.0);
    for (std::size_t j = 0; j < s.sigma.size(); ++j) {
        if (s.sigma[j] <= thresh) continue;
        cdouble utb = 0.0;
        for (int r = 0; r < rows; ++r)
            utb += std::conj(s.u(r, static_cast<int>(j))) * b[static_cast<std::size_t>(r)];
        const cdouble coef = utb / s.sigma[j];
        for (int c = 0; c < cols; ++c)
            x[static_cast<std::size_t>(c)] += (coef * s.v(c, static_cast<int>(j))).real();
    }
    return x;
}

}  // namespace canonmap
