#pragma once
// Small matrix builders and comparisons shared by the unit tests.
#include <algorithm>
#include <complex>
#include <initializer_list>
#include <vector>

#include "vnagen/numkernel.hpp"

namespace testing {

using vnagen::Complex;
using vnagen::ComplexMatrix;

inline ComplexMatrix mat(std::initializer_list<std::initializer_list<Complex>> rows) {
    const auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix m(n, static_cast<Eigen::Index>(rows.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (Complex z : row) {
            m(i, j++) = z;
        }
        ++i;
    }
    return m;
}

inline ComplexMatrix diag(std::initializer_list<Complex> d) {
    const auto n = static_cast<Eigen::Index>(d.size());
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    Eigen::Index i = 0;
    for (Complex z : d) {
        m(i, i) = z;
        ++i;
    }
    return m;
}

inline ComplexMatrix eye(Eigen::Index n) { return ComplexMatrix::Identity(n, n); }

inline ComplexMatrix unit(Eigen::Index n, Eigen::Index i, Eigen::Index j) {
    ComplexMatrix m = ComplexMatrix::Zero(n, n);
    m(i, j) = 1.0;
    return m;
}

inline const ComplexMatrix sigma_x = mat({{0, 1}, {1, 0}});
inline const ComplexMatrix sigma_z = mat({{1, 0}, {0, -1}});

// Frobenius distance, used where the tests only need "equal up to rounding".
inline double dist(const ComplexMatrix& a, const ComplexMatrix& b) { return (a - b).norm(); }

// |<u, v>| for unit vectors: 1 when they agree up to phase.
inline double overlap(const vnagen::ComplexVector& u, const vnagen::ComplexVector& v) {
    return std::abs(u.dot(v)) / (u.norm() * v.norm());
}

// Dimension of {R : R T = T R for all T} from an Eigen LU on the real form
// of the Kronecker system. Shares no code with the library's commutant.
inline std::size_t commutant_dim_oracle(const std::vector<ComplexMatrix>& ops, Eigen::Index n) {
    if (ops.empty()) {
        return static_cast<std::size_t>(n * n);
    }
    const Eigen::Index nn = n * n;
    Eigen::MatrixXd real(2 * nn * static_cast<Eigen::Index>(ops.size()), 2 * nn);
    for (std::size_t b = 0; b < ops.size(); ++b) {
        // vec(RT - TR) = (T^T (x) I - I (x) T) vec(R)
        ComplexMatrix block = ComplexMatrix::Zero(nn, nn);
        for (Eigen::Index p = 0; p < n; ++p) {
            for (Eigen::Index q = 0; q < n; ++q) {
                block.block(p * n, q * n, n, n) += ops[b](q, p) * ComplexMatrix::Identity(n, n);
                if (p == q) {
                    block.block(p * n, q * n, n, n) -= ops[b];
                }
            }
        }
        const Eigen::Index r0 = 2 * nn * static_cast<Eigen::Index>(b);
        real.block(r0, 0, nn, nn) = block.real();
        real.block(r0, nn, nn, nn) = -block.imag();
        real.block(r0 + nn, 0, nn, nn) = block.imag();
        real.block(r0 + nn, nn, nn, nn) = block.real();
    }
    // absolute pivot cutoff: a relative one counts rounding noise as rank
    // when every constraint is (numerically) zero
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(real);
    const double cutoff = 1e-10 * std::max(1.0, real.cwiseAbs().maxCoeff());
    const auto pivots = lu.matrixLU().diagonal().cwiseAbs();
    const auto rank = (pivots.array() > cutoff).count();
    return static_cast<std::size_t>(2 * nn - rank) / 2;
}

} // namespace testing
