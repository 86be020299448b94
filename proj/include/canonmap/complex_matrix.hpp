#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include "canonmap/errors.hpp"

namespace canonmap {

using cdouble = std::complex<double>;

// Dense row-major complex matrix. Small and value-semantic; every operator
// in the library is a handful of these at dimensions well under 100.
class ComplexMatrix {
public:
    ComplexMatrix() : rows_(0), cols_(0) {}

    ComplexMatrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols) {
        if (rows <= 0 || cols <= 0) throw ArgumentError("matrix dimensions must be positive");
    }

    ComplexMatrix(int rows, int cols, std::vector<cdouble> entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (rows <= 0 || cols <= 0) throw ArgumentError("matrix dimensions must be positive");
        if (data_.size() != static_cast<std::size_t>(rows) * cols)
            throw ArgumentError("entry count does not match dimensions");
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
                throw ArgumentError("matrix entries must be finite");
    }

    static ComplexMatrix identity(int n) {
        ComplexMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(const std::vector<cdouble>& d) {
        ComplexMatrix m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (int i = 0; i < m.rows(); ++i) m(i, i) = d[static_cast<std::size_t>(i)];
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    cdouble& operator()(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    const cdouble& operator()(int r, int c) const {
        return data_[static_cast<std::size_t>(r) * cols_ + c];
    }

    const std::vector<cdouble>& data() const { return data_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) out(c, r) = (*this)(r, c);
        return out;
    }

    ComplexMatrix conjugate() const {
        ComplexMatrix out(rows_, cols_);
        for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = std::conj(data_[i]);
        return out;
    }

    cdouble trace() const {
        if (!square()) throw ArgumentError("trace requires a square matrix");
        cdouble t = 0.0;
        for (int i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const auto& z : data_) s += std::norm(z);
        return std::sqrt(s);
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& z : data_) m = std::max(m, std::abs(z));
        return m;
    }

    bool all_finite() const {
        for (const auto& z : data_)
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
        return true;
    }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o);
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    ComplexMatrix& operator*=(cdouble s) {
        for (auto& z : data_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cdouble s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, cdouble s) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        if (a.cols_ != b.rows_) throw ShapeError("matrix product dimension mismatch");
        ComplexMatrix out(a.rows_, b.cols_);
        for (int r = 0; r < a.rows_; ++r) {
            for (int k = 0; k < a.cols_; ++k) {
                const cdouble ark = a(r, k);
                if (ark == cdouble{}) continue;
                for (int c = 0; c < b.cols_; ++c) out(r, c) += ark * b(k, c);
            }
        }
        return out;
    }

private:
    void require_same_shape(const ComplexMatrix& o) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw ShapeError("matrix shape mismatch");
    }

    int rows_, cols_;
    std::vector<cdouble> data_;
};

inline double distance_max(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).max_abs();
}

inline double distance_frobenius(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

// Hilbert-Schmidt inner product <a, b> = Tr(a* b).
inline cdouble hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError("inner product shape mismatch");
    cdouble s = 0.0;
    for (int r = 0; r < a.rows(); ++r)
        for (int c = 0; c < a.cols(); ++c) s += std::conj(a(r, c)) * b(r, c);
    return s;
}

// Kronecker product; dimensions multiply and Tr(a (x) b) = Tr(a) Tr(b).
inline ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int ra = 0; ra < a.rows(); ++ra)
        for (int ca = 0; ca < a.cols(); ++ca) {
            const cdouble f = a(ra, ca);
            if (f == cdouble{}) continue;
            for (int rb = 0; rb < b.rows(); ++rb)
                for (int cb = 0; cb < b.cols(); ++cb)
                    out(ra * b.rows() + rb, ca * b.cols() + cb) = f * b(rb, cb);
        }
    return out;
}

inline ComplexMatrix tensor(const std::vector<ComplexMatrix>& factors) {
    if (factors.empty()) throw ArgumentError("tensor of an empty factor list");
    ComplexMatrix out = factors.front();
    for (std::size_t i = 1; i < factors.size(); ++i) out = tensor(out, factors[i]);
    return out;
}

// Outer product x y* of two vectors.
inline ComplexMatrix outer(const std::vector<cdouble>& x, const std::vector<cdouble>& y) {
    ComplexMatrix out(static_cast<int>(x.size()), static_cast<int>(y.size()));
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c)
            out(r, c) = x[static_cast<std::size_t>(r)] * std::conj(y[static_cast<std::size_t>(c)]);
    return out;
}

// Matrix-vector product.
inline std::vector<cdouble> apply(const ComplexMatrix& a, const std::vector<cdouble>& x) {
    if (a.cols() != static_cast<int>(x.size())) throw ShapeError("matrix-vector dimension mismatch");
    std::vector<cdouble> y(static_cast<std::size_t>(a.rows()));
    for (int r = 0; r < a.rows(); ++r) {
        cdouble s = 0.0;
        for (int c = 0; c < a.cols(); ++c) s += a(r, c) * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s;
    }
    return y;
}

// Ordered factor dimensions of a composite space H_1 (x) ... (x) H_n.
struct TensorShape {
    std::vector<int> dims;

    TensorShape() = default;
    explicit TensorShape(std::vector<int> d) : dims(std::move(d)) {
        if (dims.empty()) throw ArgumentError("tensor shape needs at least one factor");
        for (int n : dims)
            if (n <= 0) throw ArgumentError("tensor factor dimensions must be positive");
    }
    static TensorShape single(int dim) { return TensorShape(std::vector<int>{dim}); }

    int factors() const { return static_cast<int>(dims.size()); }
    int total() const {
        return std::accumulate(dims.begin(), dims.end(), 1, [](int a, int b) { return a * b; });
    }
    int dim(int factor) const { return dims[static_cast<std::size_t>(factor - 1)]; }  // 1-based

    bool operator==(const TensorShape& o) const { return dims == o.dims; }

    void require_matches(const ComplexMatrix& m, const char* where) const {
        if (!m.square() || m.rows() != total())
            throw ShapeError(std::string(where) + ": matrix side " + std::to_string(m.rows()) +
                             " does not match tensor shape total " + std::to_string(total()));
    }
};

// Numerical tolerances threaded through validated constructions.
struct Tolerances {
    double hermiticity_tol = 1e-9;  // max |A - A*| allowed before rejection
    double psd_floor = 1e-9;        // eigenvalues in [-psd_floor, 0) are clipped to 0
    double rank_rel_tol = 1e-10;    // numerical rank: sigma > rank_rel_tol * sigma_max * max_dim
    double recovery_tol = 1e-7;     // max residual accepted for a reconstructed map

    void validate() const {
        for (double v : {hermiticity_tol, psd_floor, rank_rel_tol, recovery_tol})
            if (!(v >= 0.0) || !std::isfinite(v))
                throw ArgumentError("tolerances must be finite and non-negative");
    }
};

}  // namespace canonmap
