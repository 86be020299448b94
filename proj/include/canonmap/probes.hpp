#pragma once

#include <vector>

#include "canonmap/states.hpp"

namespace canonmap {

// Informationally complete probe family for dimension m: the m^2 pure states
// e_i e_i*, (e_i+e_j)(e_i+e_j)*/2 and (e_i+i e_j)(e_i+i e_j)*/2 for i<j,
// followed by the maximally mixed state I/m. The pure states span the real
// space of Hermitian matrices.
struct ProbeSet {
    std::vector<DensityMatrix> probes;

    static ProbeSet standard(int m, const Tolerances& tol = {}) {
        if (m < 2) throw ArgumentError("probe set needs dimension at least 2");
        ProbeSet set;
        auto basis_vector = [m](int i) {
            std::vector<cdouble> x(static_cast<std::size_t>(m));
            x[static_cast<std::size_t>(i)] = 1.0;
            return x;
        };
        for (int i = 0; i < m; ++i)
            set.probes.push_back(PureState::from_vector(basis_vector(i), tol).base());
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                std::vector<cdouble> x(static_cast<std::size_t>(m));
                x[static_cast<std::size_t>(i)] = 1.0;
                x[static_cast<std::size_t>(j)] = 1.0;
                set.probes.push_back(PureState::from_vector(x, tol).base());
            }
        for (int i = 0; i < m; ++i)
            for (int j = i + 1; j < m; ++j) {
                std::vector<cdouble> x(static_cast<std::size_t>(m));
                x[static_cast<std::size_t>(i)] = 1.0;
                x[static_cast<std::size_t>(j)] = cdouble(0.0, 1.0);
                set.probes.push_back(PureState::from_vector(x, tol).base());
            }
        ComplexMatrix iota = ComplexMatrix::identity(m);
        iota *= cdouble(1.0 / m, 0.0);
        set.probes.push_back(DensityMatrix::from_matrix(iota, tol));

        // Spanning invariant: the Gram matrix of the pure probes is full rank.
        const int count = m * m;
        ComplexMatrix gram(count, count);
        for (int a = 0; a < count; ++a)
            for (int b = 0; b < count; ++b)
                gram(a, b) = hs_inner(set.probes[static_cast<std::size_t>(a)].mat(),
                                      set.probes[static_cast<std::size_t>(b)].mat());
        if (numerical_rank(gram, tol) != count)
            throw ContractViolation("probe set does not span the Hermitian space");
        return set;
    }

    // The m^2 pure members (excludes the trailing maximally mixed state).
    std::vector<DensityMatrix> pure_probes() const {
        return {probes.begin(), probes.end() - 1};
    }
    const DensityMatrix& maximally_mixed() const { return probes.back(); }
};

}  // namespace canonmap
