#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "canonmap/maps.hpp"
#include "canonmap/probes.hpp"

namespace canonmap {

// Canonical forms for a single-system pure-state- and strict-convexity-
// preserving map: constant at a pure state, range inside one segment between
// two pure states, or an injective measurement with an optional input
// transpose.
struct ConstantForm {
    PureState q;
};

struct SegmentForm {
    PureState q1, q2;  // ordered by canonical fingerprint
    std::vector<std::pair<std::string, double>> h_samples;  // (input fingerprint, weight on q1)
};

struct MeasurementForm {
    ComplexMatrix m;      // gauge-fixed: unit Frobenius norm, leading entry real positive
    bool transpose_flag;  // true: acts on the transposed input
    double residual;      // max trace distance over held-out states
};

using CanonicalForm = std::variant<ConstantForm, SegmentForm, MeasurementForm>;

struct CheckResult {
    std::string name;
    bool pass;
    std::string witness;  // description of the offending input when failing
};

enum class ClassifyStatus { Classified, HypothesisViolation, Failure };

struct ClassifierReport {
    ClassifyStatus status = ClassifyStatus::Failure;
    std::optional<CanonicalForm> form;
    std::vector<CheckResult> checks;
    int samples_used = 0;
    std::string detail;
    // Populated on failure of the linearization step: eigenvalues of the
    // reconstructed action, plain and transpose-composed.
    std::vector<double> choi_spectrum_plain;
    std::vector<double> choi_spectrum_transposed;
};

struct ClassifyOptions {
    int pure_samples = 100;
    int convex_samples = 100;
    int constancy_samples = 50;
    int residual_samples = 50;
};

// Scalar-phase gauge: unit Frobenius norm, first entry of largest magnitude
// made real and positive.
inline ComplexMatrix gauge_fix_operator(ComplexMatrix m) {
    const double norm = m.frobenius_norm();
    if (norm == 0.0) throw ArgumentError("cannot gauge-fix the zero operator");
    m *= cdouble(1.0 / norm, 0.0);
    int br = 0, bc = 0;
    double best = -1.0;
    for (int r = 0; r < m.rows(); ++r)
        for (int c = 0; c < m.cols(); ++c)
            if (std::abs(m(r, c)) > best) {
                best = std::abs(m(r, c));
                br = r;
                bc = c;
            }
    const cdouble lead = m(br, bc);
    m *= std::conj(lead) / std::abs(lead);
    m(br, bc) = cdouble(std::abs(m(br, bc)), 0.0);
    return m;
}

namespace detail {

inline DensityMatrix maximally_mixed_state(int m, const Tolerances& tol = {}) {
    ComplexMatrix iota = ComplexMatrix::identity(m);
    iota *= cdouble(1.0 / m, 0.0);
    return DensityMatrix::from_matrix(iota, tol);
}

// Best interpolation weight for c ~ s a + (1-s) b in Frobenius geometry.
inline double affine_fit(const ComplexMatrix& a, const ComplexMatrix& b,
                         const ComplexMatrix& c, double* residual = nullptr) {
    const ComplexMatrix d = a - b;
    const double denom = hs_inner(d, d).real();
    const double s = hs_inner(d, c - b).real() / denom;
    if (residual) {
        const ComplexMatrix fit = cdouble(s, 0.0) * a + cdouble(1.0 - s, 0.0) * b;
        *residual = distance_frobenius(c, fit);
    }
    return s;
}

inline std::vector<double> vec_real(const ComplexMatrix& m) {
    std::vector<double> out;
    out.reserve(2 * m.data().size());
    for (const auto& z : m.data()) {
        out.push_back(z.real());
        out.push_back(z.imag());
    }
    return out;
}

// Real coordinates of a Hermitian m x m matrix (dimension m^2).
inline std::vector<double> hermitian_coords(const ComplexMatrix& m) {
    std::vector<double> out;
    const int n = m.rows();
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i) out.push_back(m(i, i).real());
    const double rt2 = 1.4142135623730951;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            out.push_back(rt2 * m(i, j).real());
            out.push_back(rt2 * m(i, j).imag());
        }
    return out;
}

inline std::string describe_state(const DensityMatrix& rho) {
    return "state " + canonical_key(rho.mat());
}

}  // namespace detail

// Evaluates the map on random pure states plus the full probe set; passes
// iff every output is a pure state.
inline std::pair<bool, std::string> check_pure_preserving(const StateMapOracle& psi, int n,
                                                          std::uint64_t seed,
                                                          const Tolerances& tol = {}) {
    if (n < 1) throw ArgumentError("check_pure_preserving: need at least one sample");
    Rng rng(seed);
    const int m = psi.in_shape().total();
    std::vector<DensityMatrix> inputs;
    for (int i = 0; i < n; ++i) inputs.push_back(random_pure(m, rng, tol).base());
    for (const auto& p : ProbeSet::standard(m, tol).pure_probes()) inputs.push_back(p);

    for (const auto& p : inputs) {
        const DensityMatrix out = psi(p);
        const double second = second_eigenvalue(out.mat(), tol);
        if (second > kPurityTol ||
            distance_frobenius(out.mat() * out.mat(), out.mat()) > 1e-9) {
            return {false, "pure input " + detail::describe_state(p) +
                               " mapped to output with second eigenvalue " +
                               std::to_string(second)};
        }
    }
    return {true, ""};
}

// Draws random full-rank triples (rho, sigma, t) and demands the mixture
// image lie strictly inside the segment between the endpoint images; equal
// endpoint images must be reproduced exactly.
inline std::pair<bool, std::string> check_strict_convex_preserving(const StateMapOracle& psi,
                                                                   int n, std::uint64_t seed,
                                                                   const Tolerances& tol = {}) {
    if (n < 1) throw ArgumentError("check_strict_convex_preserving: need at least one sample");
    Rng rng(seed);
    const int m = psi.in_shape().total();
    for (int trial = 0; trial < n; ++trial) {
        const DensityMatrix rho = random_state(m, m, rng, tol);
        const DensityMatrix sigma = random_state(m, m, rng, tol);
        const double t = rng.uniform_in(0.05, 0.95);
        const DensityMatrix mixture = mix(t, rho, sigma, tol);

        const ComplexMatrix a = psi(rho).mat();
        const ComplexMatrix b = psi(sigma).mat();
        const ComplexMatrix c = psi(mixture).mat();

        if (distance_frobenius(a, b) <= 1e-9) {
            if (distance_frobenius(c, a) > 1e-8)
                return {false, "equal endpoint images but mixture image differs at t=" +
                                   std::to_string(t) + " for " + detail::describe_state(rho)};
            continue;
        }
        double resid = 0.0;
        const double s = detail::affine_fit(a, b, c, &resid);
        if (resid >= 1e-8 || s <= 1e-9 || s >= 1.0 - 1e-9)
            return {false, "mixture image leaves the open segment (s=" + std::to_string(s) +
                               ", fit residual " + std::to_string(resid) + ") for inputs " +
                               detail::describe_state(rho) + " and " +
                               detail::describe_state(sigma) + " at t=" + std::to_string(t)};
    }
    return {true, ""};
}

// Orthogonality propagation along rotation paths, on the companion map
// normalized by the generalized inverse of the square root of psi(I/m):
// images of orthogonal pure pairs must be equal or orthogonal, with constant
// status along each continuous rotation path.
inline std::pair<bool, std::string> check_orthogonality_propagation(const StateMapOracle& psi,
                                                                    std::uint64_t seed,
                                                                    const Tolerances& tol = {},
                                                                    int paths = 10,
                                                                    int path_points = 20) {
    Rng rng(seed);
    const int m = psi.in_shape().total();
    const DensityMatrix sigma0 = psi(detail::maximally_mixed_state(m, tol));

    // Square root of the image of the maximally mixed state, pseudoinverted.
    const EigResult eig = hermitian_eig(sigma0.mat(), tol);
    ComplexMatrix root(sigma0.dim(), sigma0.dim());
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
        const double w = std::sqrt(std::max(eig.values[i], 0.0));
        if (w == 0.0) continue;
        for (int r = 0; r < sigma0.dim(); ++r)
            for (int c = 0; c < sigma0.dim(); ++c)
                root(r, c) += w * eig.vectors(r, static_cast<int>(i)) *
                              std::conj(eig.vectors(c, static_cast<int>(i)));
    }
    const ComplexMatrix rp = pseudoinverse(root, tol);

    auto normalized = [&](const DensityMatrix& rho) -> ComplexMatrix {
        ComplexMatrix img = rp * psi(rho).mat() * rp.adjoint();
        const double tr = img.trace().real();
        if (tr <= 1e-12)
            throw OracleError("image escapes the range of the maximally mixed image");
        img *= cdouble(1.0 / tr, 0.0);
        return img;
    };

    for (int path = 0; path < paths; ++path) {
        // Random orthonormal pair (x, y) and a fixed relative phase.
        const PureState px = random_pure(m, rng, tol);
        std::vector<cdouble> y(static_cast<std::size_t>(m));
        for (auto& z : y) z = rng.cgauss();
        cdouble overlap = 0.0;
        for (int r = 0; r < m; ++r) overlap += std::conj(px.vector()[static_cast<std::size_t>(r)]) *
                                               y[static_cast<std::size_t>(r)];
        for (int r = 0; r < m; ++r) y[static_cast<std::size_t>(r)] -=
            overlap * px.vector()[static_cast<std::size_t>(r)];
        double norm2 = 0.0;
        for (const auto& z : y) norm2 += std::norm(z);
        if (norm2 < 1e-12) continue;
        for (auto& z : y) z /= std::sqrt(norm2);
        const double chi = rng.uniform_in(0.0, 6.283185307179586);
        const cdouble phase(std::cos(chi), std::sin(chi));

        int status = 0;  // +1 equal, -1 orthogonal
        for (int kpt = 0; kpt < path_points; ++kpt) {
            const double theta =
                (1.5707963267948966 * kpt) / static_cast<double>(path_points - 1);
            const cdouble alpha(std::cos(theta), 0.0);
            const cdouble beta = phase * std::sin(theta);
            std::vector<cdouble> u(static_cast<std::size_t>(m)), v(static_cast<std::size_t>(m));
            for (int r = 0; r < m; ++r) {
                const cdouble xr = px.vector()[static_cast<std::size_t>(r)];
                const cdouble yr = y[static_cast<std::size_t>(r)];
                u[static_cast<std::size_t>(r)] = alpha * xr + beta * yr;
                v[static_cast<std::size_t>(r)] = std::conj(beta) * xr - std::conj(alpha) * yr;
            }
            const ComplexMatrix f = normalized(PureState::from_vector(u, tol).base());
            const ComplexMatrix g = normalized(PureState::from_vector(v, tol).base());

            int point_status;
            if (distance_frobenius(f, g) <= 1e-6)
                point_status = +1;
            else if (std::abs(hs_inner(f, g).real()) <= 1e-6)
                point_status = -1;
            else
                return {false, "images neither equal nor orthogonal at path " +
                                   std::to_string(path) + " point " + std::to_string(kpt)};

            if (kpt == 0)
                status = point_status;
            else if (status != point_status)
                return {false, "equal/orthogonal status flipped along path " +
                                   std::to_string(path) + " at point " + std::to_string(kpt)};
        }
    }
    return {true, ""};
}

namespace detail {

struct Linearization {
    // Images of the m^2 pure probes, scaled to the linear action.
    std::vector<ComplexMatrix> scaled_images;
    // Pseudoinverse of the basis coordinate matrix (m^2 x m^2, real).
    std::vector<std::vector<double>> basis_pinv;  // rows of the inverse
    int m = 0;
    bool ok = false;
    std::string why;
};

// Recover the projectively-linear action L with L(I/m) = psi(I/m): solve for
// the positive scalars c(probe) through mixtures whose components are
// themselves probes, then store L(probe) = c(probe) psi(probe).
inline Linearization linearize(const StateMapOracle& psi, const ProbeSet& probes,
                               const DensityMatrix& sigma0, const Tolerances& tol) {
    Linearization lin;
    const int m = psi.in_shape().total();
    lin.m = m;
    const auto pure = probes.pure_probes();
    const DensityMatrix& iota = probes.maximally_mixed();

    std::vector<ComplexMatrix> images;
    images.reserve(pure.size());
    for (const auto& p : pure) images.push_back(psi(p).mat());

    std::vector<double> scale(pure.size(), 0.0);

    // Diagonal probes: I/m is their uniform mixture.
    {
        std::vector<std::vector<double>> rows;
        std::vector<double> rhs = vec_real(sigma0.mat());
        const std::size_t rowdim = rhs.size();
        rows.resize(rowdim, std::vector<double>(static_cast<std::size_t>(m), 0.0));
        for (int i = 0; i < m; ++i) {
            const auto col = vec_real(images[static_cast<std::size_t>(i)]);
            for (std::size_t r = 0; r < rowdim; ++r)
                rows[r][static_cast<std::size_t>(i)] = col[r] / m;
        }
        const auto c = lstsq_real(rows, rhs);
        for (int i = 0; i < m; ++i) {
            if (!(c[static_cast<std::size_t>(i)] > 1e-9)) {
                lin.why = "nonpositive scale recovered for a diagonal probe";
                return lin;
            }
            scale[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i)];
        }
        double resid = 0.0;
        for (std::size_t r = 0; r < rowdim; ++r) {
            double acc = -rhs[r];
            for (int i = 0; i < m; ++i)
                acc += rows[r][static_cast<std::size_t>(i)] * c[static_cast<std::size_t>(i)];
            resid += acc * acc;
        }
        if (std::sqrt(resid) > 1e-6) {
            lin.why = "diagonal scale recovery left residual " + std::to_string(std::sqrt(resid));
            return lin;
        }
    }

    // Remaining pure probes: relate through the half-and-half mixture with I/m.
    for (std::size_t q = static_cast<std::size_t>(m); q < pure.size(); ++q) {
        const DensityMatrix mixed = mix(0.5, pure[q], iota, tol);
        const ComplexMatrix img_mix = psi(mixed).mat();
        const auto vm = vec_real(img_mix);
        const auto vq = vec_real(images[q]);
        const auto v0 = vec_real(sigma0.mat());
        std::vector<std::vector<double>> rows(vm.size(), std::vector<double>(2, 0.0));
        std::vector<double> rhs(vm.size(), 0.0);
        for (std::size_t r = 0; r < vm.size(); ++r) {
            rows[r][0] = vm[r];
            rows[r][1] = -0.5 * vq[r];
            rhs[r] = 0.5 * v0[r];
        }
        const auto x = lstsq_real(rows, rhs);
        if (!(x[0] > 1e-9) || !(x[1] > 1e-9)) {
            lin.why = "nonpositive scale recovered for a pair probe";
            return lin;
        }
        double resid = 0.0;
        for (std::size_t r = 0; r < vm.size(); ++r) {
            const double acc = rows[r][0] * x[0] + rows[r][1] * x[1] - rhs[r];
            resid += acc * acc;
        }
        if (std::sqrt(resid) > 1e-6) {
            lin.why = "pair scale recovery left residual " + std::to_string(std::sqrt(resid));
            return lin;
        }
        scale[q] = x[1];
    }

    lin.scaled_images.reserve(pure.size());
    for (std::size_t q = 0; q < pure.size(); ++q)
        lin.scaled_images.push_back(cdouble(scale[q], 0.0) * images[q]);

    // Invert the basis coordinate matrix once.
    const int count = m * m;
    ComplexMatrix g(count, count);
    for (int col = 0; col < count; ++col) {
        const auto coords = hermitian_coords(pure[static_cast<std::size_t>(col)].mat());
        for (int row = 0; row < count; ++row)
            g(row, col) = coords[static_cast<std::size_t>(row)];
    }
    const ComplexMatrix ginv = pseudoinverse(g, tol);
    lin.basis_pinv.assign(static_cast<std::size_t>(count),
                          std::vector<double>(static_cast<std::size_t>(count), 0.0));
    for (int r = 0; r < count; ++r)
        for (int c = 0; c < count; ++c)
            lin.basis_pinv[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                ginv(r, c).real();
    lin.ok = true;
    return lin;
}

// L applied to an arbitrary Hermitian matrix through the probe expansion.
inline ComplexMatrix apply_linearization(const Linearization& lin, const ComplexMatrix& x,
                                         int out_dim) {
    const auto coords = hermitian_coords(x);
    ComplexMatrix out(out_dim, out_dim);
    const int count = lin.m * lin.m;
    for (int q = 0; q < count; ++q) {
        double alpha = 0.0;
        for (int r = 0; r < count; ++r)
            alpha += lin.basis_pinv[static_cast<std::size_t>(q)][static_cast<std::size_t>(r)] *
                     coords[static_cast<std::size_t>(r)];
        if (alpha == 0.0) continue;
        out += cdouble(alpha, 0.0) * lin.scaled_images[static_cast<std::size_t>(q)];
    }
    return out;
}

// Matrix of the linear action applied to one tensor leg of the unnormalized
// maximally entangled projector; rank one exactly for conjugation maps.
inline ComplexMatrix choi_matrix(const Linearization& lin, int out_dim, bool pre_transpose) {
    const int m = lin.m, k = out_dim;
    ComplexMatrix choi(m * k, m * k);
    for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b) {
            ComplexMatrix x(m, m), y(m, m);
            if (a == b) {
                x(a, a) = 1.0;
            } else {
                x(a, b) = 0.5;
                x(b, a) = 0.5;
                y(a, b) = cdouble(0.0, -0.5);
                y(b, a) = cdouble(0.0, 0.5);
            }
            const ComplexMatrix lx = apply_linearization(lin, x, k);
            const ComplexMatrix ly = a == b ? ComplexMatrix(k, k) : apply_linearization(lin, y, k);
            // L(E_ab) = L(x) + i L(y); L(E_ba) = L(x) - i L(y).
            ComplexMatrix block_ab = lx + cdouble(0.0, 1.0) * ly;
            ComplexMatrix block_ba = lx - cdouble(0.0, 1.0) * ly;
            const int ra = pre_transpose ? b : a;
            const int rb = pre_transpose ? a : b;
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) {
                    choi(ra * k + i, rb * k + j) = block_ab(i, j);
                    if (a != b) choi(rb * k + i, ra * k + j) = block_ba(i, j);
                }
        }
    return choi;
}

}  // namespace detail

// Decide the canonical form of a single-system oracle and reconstruct its
// parameters. Hypothesis checks run first; their failure yields an
// out-of-scope report instead of a form.
inline ClassifierReport classify_single(const StateMapOracle& psi, const Tolerances& tol,
                                        std::uint64_t seed, const ClassifyOptions& opt = {}) {
    ClassifierReport report;
    Rng root(seed);
    const std::uint64_t pure_seed = root.next();
    const std::uint64_t convex_seed = root.next();
    const std::uint64_t tail_seed = root.next();
    const int m = psi.in_shape().total();
    const int k = psi.out_shape().total();

    const auto [pure_ok, pure_witness] =
        check_pure_preserving(psi, opt.pure_samples, pure_seed, tol);
    report.checks.push_back({"pure_preservation", pure_ok, pure_witness});
    report.samples_used += opt.pure_samples + m * m;

    const auto [convex_ok, convex_witness] =
        check_strict_convex_preserving(psi, opt.convex_samples, convex_seed, tol);
    report.checks.push_back({"strict_convexity", convex_ok, convex_witness});
    report.samples_used += 3 * opt.convex_samples;

    if (!pure_ok || !convex_ok) {
        report.status = ClassifyStatus::HypothesisViolation;
        report.detail = "hypothesis checks failed; the oracle is outside the classified family";
        return report;
    }

    Rng rng(tail_seed);
    const DensityMatrix iota = detail::maximally_mixed_state(m, tol);
    const DensityMatrix sigma0 = psi(iota);
    ++report.samples_used;

    // Rank-one image of the maximally mixed state forces a constant map.
    if (numerical_rank(sigma0.mat(), tol) == 1) {
        for (int i = 0; i < opt.constancy_samples; ++i) {
            const int rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
            const DensityMatrix probe = random_state(m, rank, rng, tol);
            ++report.samples_used;
            if (distance_frobenius(psi(probe).mat(), sigma0.mat()) > 1e-9) {
                report.status = ClassifyStatus::Failure;
                report.detail = "rank-one image of the maximally mixed state but the map is "
                                "not constant; inconsistent with every form";
                return report;
            }
        }
        report.status = ClassifyStatus::Classified;
        report.form = ConstantForm{PureState::from_state(sigma0, tol)};
        return report;
    }

    // Affine rank of the probe images decides the segment form.
    const ProbeSet probes = ProbeSet::standard(m, tol);
    std::vector<ComplexMatrix> probe_images;
    probe_images.reserve(probes.probes.size());
    for (const auto& p : probes.probes) {
        probe_images.push_back(psi(p).mat());
        ++report.samples_used;
    }
    {
        ComplexMatrix mean(k, k);
        for (const auto& img : probe_images) mean += img;
        mean *= cdouble(1.0 / static_cast<double>(probe_images.size()), 0.0);
        ComplexMatrix stacked(static_cast<int>(probe_images.size()), k * k);
        for (std::size_t i = 0; i < probe_images.size(); ++i) {
            const ComplexMatrix diff = probe_images[i] - mean;
            for (int r = 0; r < k; ++r)
                for (int c = 0; c < k; ++c)
                    stacked(static_cast<int>(i), r * k + c) = diff(r, c);
        }
        const auto sing = svd(stacked).sigma;
        const double smax = sing.empty() ? 0.0 : sing.front();
        int affine_rank = 0;
        for (double s : sing)
            if (s > std::max(1e-8, 1e-6 * smax)) ++affine_rank;

        if (affine_rank <= 1) {
            // Segment form: endpoints are the two most distant pure images.
            const std::size_t pure_count = probe_images.size() - 1;
            std::size_t bi = 0, bj = 1;
            double best = -1.0;
            for (std::size_t i = 0; i < pure_count; ++i)
                for (std::size_t j = i + 1; j < pure_count; ++j) {
                    const double d = distance_frobenius(probe_images[i], probe_images[j]);
                    if (d > best) {
                        best = d;
                        bi = i;
                        bj = j;
                    }
                }
            if (best <= 1e-6) {
                report.status = ClassifyStatus::Failure;
                report.detail = "collinear probe images without distinct pure endpoints";
                return report;
            }
            ComplexMatrix q1m = probe_images[bi];
            ComplexMatrix q2m = probe_images[bj];
            if (canonical_key(q2m) < canonical_key(q1m)) std::swap(q1m, q2m);

            SegmentForm seg{PureState::from_state(DensityMatrix::from_matrix(q1m, tol), tol),
                            PureState::from_state(DensityMatrix::from_matrix(q2m, tol), tol),
                            {}};
            for (std::size_t i = 0; i < probe_images.size(); ++i) {
                double resid = 0.0;
                const double h = detail::affine_fit(q1m, q2m, probe_images[i], &resid);
                if (resid > 1e-7) {
                    report.status = ClassifyStatus::Failure;
                    report.detail = "a probe image leaves the recovered segment";
                    return report;
                }
                seg.h_samples.emplace_back(canonical_key(probes.probes[i].mat()), h);
            }
            report.status = ClassifyStatus::Classified;
            report.form = std::move(seg);
            return report;
        }
    }

    // Measurement form: recover the linear action and test its Choi rank.
    detail::Linearization lin = detail::linearize(psi, probes, sigma0, tol);
    report.samples_used += m * m - m;  // the pair-probe mixtures
    if (!lin.ok) {
        report.status = ClassifyStatus::Failure;
        report.detail = "linearization failed: " + lin.why;
        return report;
    }

    ComplexMatrix recovered;
    bool transpose_flag = false;
    bool found = false;
    for (const bool pre_transpose : {false, true}) {
        const ComplexMatrix choi = detail::choi_matrix(lin, k, pre_transpose);
        const EigResult eig = hermitian_eig(choi, tol);
        std::vector<double> abs_sorted;
        for (double v : eig.values) abs_sorted.push_back(std::abs(v));
        std::sort(abs_sorted.rbegin(), abs_sorted.rend());
        auto& spectrum =
            pre_transpose ? report.choi_spectrum_transposed : report.choi_spectrum_plain;
        spectrum = eig.values;

        const bool rank_one = abs_sorted[0] > 0.0 &&
                              eig.values.front() >= 0.999 * abs_sorted[0] &&
                              abs_sorted[1] <= 1e-7 * abs_sorted[0];
        if (!rank_one) continue;

        const double scale = std::sqrt(eig.values.front());
        ComplexMatrix mrec(k, m);
        for (int a = 0; a < m; ++a)
            for (int j = 0; j < k; ++j) mrec(j, a) = scale * eig.vectors(a * k + j, 0);
        recovered = gauge_fix_operator(mrec);
        transpose_flag = pre_transpose;
        found = true;
        break;
    }

    if (!found) {
        report.status = ClassifyStatus::Failure;
        report.detail = "neither the plain nor the transpose-composed action has rank-one "
                        "structure; hypothesis violation or numerical breakdown";
        return report;
    }
    if (numerical_rank(recovered, tol) != m) {
        report.status = ClassifyStatus::Failure;
        report.detail = "recovered operator is not injective";
        return report;
    }

    const StateMapOracle rebuilt =
        measurement_map(MeasurementOp(recovered, transpose_flag, tol), psi.in_shape(),
                        psi.out_shape(), tol);
    double residual = 0.0;
    for (int i = 0; i < opt.residual_samples; ++i) {
        const int rank = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(m)));
        const DensityMatrix probe = random_state(m, rank, rng, tol);
        ++report.samples_used;
        residual = std::max(residual, trace_distance(psi(probe).mat(), rebuilt(probe).mat()));
    }
    if (residual > tol.recovery_tol) {
        report.status = ClassifyStatus::Failure;
        report.detail = "reconstruction residual " + std::to_string(residual) +
                        " exceeds the recovery tolerance";
        return report;
    }

    report.status = ClassifyStatus::Classified;
    report.form = MeasurementForm{recovered, transpose_flag, residual};
    return report;
}

}  // namespace canonmap
