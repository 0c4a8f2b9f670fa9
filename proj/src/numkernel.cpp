#include "vnagen/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <lapacke.h>

namespace vnagen {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotNormal: return "NotNormal";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::UnknownAtom: return "UnknownAtom";
    case ErrorKind::UndefinedOnSupport: return "UndefinedOnSupport";
    case ErrorKind::OutOfDisc: return "OutOfDisc";
    case ErrorKind::InvalidMeasure: return "InvalidMeasure";
    case ErrorKind::InvalidAlgebra: return "InvalidAlgebra";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorKind::Schema: return "Schema";
    }
    return "Unknown";
}

void Tolerances::validate() const {
    for (double t : {rank_tol, residual_tol, value_tol}) {
        if (!(t > 0.0 && t < 1.0)) {
            throw Error(ErrorKind::InvalidArgument, "tolerances must lie in (0, 1)");
        }
    }
}

namespace {

constexpr int kMaxSweeps = 30;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Unitary U (2x2) with U* [[a, h], [conj(h), b]] U diagonal, a and b real.
// U = diag(1, e^{-i phi}) * [[c, s], [-s, c]] where h = |h| e^{i phi}.
struct Rotation {
    Complex upp, upq, uqp, uqq;
};

Rotation jacobi_rotation(double a, double b, Complex h) {
    const double mag = std::abs(h);
    const Complex phase = h / mag;
    const double zeta = (b - a) / (2.0 * mag);
    const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const Complex conj_phase = std::conj(phase);
    return {c, s, -s * conj_phase, c * conj_phase};
}

double off_diagonal_norm(const ComplexMatrix& a) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (i != j) {
                sum += std::norm(a(i, j));
            }
        }
    }
    return std::sqrt(sum);
}

// Cyclic Jacobi on a matrix already known to be Hermitian.
HermitianEigen jacobi_eig(ComplexMatrix a, const Tolerances& tol) {
    const Eigen::Index n = a.rows();
    ComplexMatrix v = ComplexMatrix::Identity(n, n);
    const double scale = hs_norm(a);
    const double target = 1e-14 * scale;

    for (Eigen::Index i = 0; i < n; ++i) {
        a(i, i) = a(i, i).real();
    }

    double off = off_diagonal_norm(a);
    for (int sweep = 0; sweep < kMaxSweeps && off > target; ++sweep) {
        bool rotated = false;
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const Complex h = a(p, q);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                if (std::abs(h) <= kEps * std::sqrt(std::abs(app * aqq)) || std::abs(h) == 0.0) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                rotated = true;
                const Rotation r = jacobi_rotation(app, aqq, h);
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex akp = a(k, p);
                    const Complex akq = a(k, q);
                    a(k, p) = akp * r.upp + akq * r.uqp;
                    a(k, q) = akp * r.upq + akq * r.uqq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex apk = a(p, k);
                    const Complex aqk = a(q, k);
                    a(p, k) = std::conj(r.upp) * apk + std::conj(r.uqp) * aqk;
                    a(q, k) = std::conj(r.upq) * apk + std::conj(r.uqq) * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (Eigen::Index k = 0; k < n; ++k) {
                    const Complex vkp = v(k, p);
                    const Complex vkq = v(k, q);
                    v(k, p) = vkp * r.upp + vkq * r.uqp;
                    v(k, q) = vkp * r.upq + vkq * r.uqq;
                }
            }
        }
        off = off_diagonal_norm(a);
        if (!rotated) {
            break;
        }
    }
    if (off > tol.residual_tol * scale) {
        throw Error(ErrorKind::NoConvergence,
                    "Jacobi sweeps left off-diagonal mass " + std::to_string(off));
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
        return a(x, x).real() < a(y, y).real();
    });
    HermitianEigen out{RealVector(n), ComplexMatrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.eigenvalues(k) = a(order[k], order[k]).real();
        out.eigenvectors.col(k) = v.col(order[k]);
    }
    return out;
}

// Singular values of L (descending, padded with zeros up to cols) and, when
// asked for, the full right singular basis. LAPACK's QR-iteration SVD resolves
// small singular values to about eps * sigma_max, which is what the rank
// cutoff needs; the Gram matrix L*L would square that error.
struct Svd {
    RealVector sigma;
    ComplexMatrix v;
};

Svd svd_of(const ComplexMatrix& l, bool want_v) {
    const auto rows = static_cast<lapack_int>(l.rows());
    const auto cols = static_cast<lapack_int>(l.cols());
    ComplexMatrix work = l;
    RealVector sigma(std::min(rows, cols));
    RealVector superb(std::max<lapack_int>(1, std::min(rows, cols)));
    ComplexMatrix vt(want_v ? cols : 1, want_v ? cols : 1);
    const lapack_int info = LAPACKE_zgesvd(
        LAPACK_COL_MAJOR, 'N', want_v ? 'A' : 'N', rows, cols,
        reinterpret_cast<lapack_complex_double*>(work.data()), rows, sigma.data(), nullptr, 1,
        reinterpret_cast<lapack_complex_double*>(vt.data()), static_cast<lapack_int>(vt.rows()),
        superb.data());
    if (info != 0) {
        throw Error(ErrorKind::NoConvergence, "zgesvd failed (info " + std::to_string(info) + ")");
    }
    Svd out{RealVector::Zero(cols), {}};
    out.sigma.head(sigma.size()) = sigma;
    if (want_v) {
        out.v = vt.adjoint();
    }
    return out;
}

double rank_cutoff(const RealVector& sigma, const Tolerances& tol) {
    const double sigma_max = sigma.size() == 0 ? 0.0 : sigma.maxCoeff();
    return tol.rank_tol * (1.0 + sigma_max);
}

} // namespace

double hs_norm(const ComplexMatrix& a) { return a.norm(); }

Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    // sum conj(a_ij) b_ij
    return (a.conjugate().cwiseProduct(b)).sum();
}

void require_square_finite(const ComplexMatrix& a, const char* what) {
    if (a.rows() < 1 || a.rows() != a.cols()) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be square with dim >= 1");
    }
    if (!a.allFinite()) {
        throw Error(ErrorKind::InvalidArgument, std::string(what) + " has non-finite entries");
    }
}

bool is_hermitian(const ComplexMatrix& a, const Tolerances& tol) {
    return a.rows() == a.cols() &&
           hs_norm(a - a.adjoint()) <= tol.residual_tol * (1.0 + hs_norm(a));
}

HermitianEigen herm_eig(const ComplexMatrix& a, const Tolerances& tol) {
    require_square_finite(a, "herm_eig input");
    if (!is_hermitian(a, tol)) {
        throw Error(ErrorKind::NotHermitian, "herm_eig input is not Hermitian");
    }
    const ComplexMatrix sym = 0.5 * (a + a.adjoint());
    return jacobi_eig(sym, tol);
}

RealVector singular_values(const ComplexMatrix& l) {
    if (l.cols() == 0) {
        return RealVector(0);
    }
    return svd_of(l, false).sigma;
}

ComplexMatrix nullspace(const ComplexMatrix& l, const Tolerances& tol) {
    const Eigen::Index cols = l.cols();
    if (cols == 0) {
        return ComplexMatrix(0, 0);
    }
    if (l.rows() == 0) {
        return ComplexMatrix::Identity(cols, cols);
    }
    const Svd svd = svd_of(l, true);
    const double cutoff = rank_cutoff(svd.sigma, tol);
    std::vector<Eigen::Index> keep;
    for (Eigen::Index j = 0; j < cols; ++j) {
        if (svd.sigma(j) <= cutoff) {
            keep.push_back(j);
        }
    }
    ComplexMatrix out(cols, static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        out.col(static_cast<Eigen::Index>(k)) = svd.v.col(keep[k]);
    }
    return out;
}

std::size_t numerical_rank(const ComplexMatrix& l, const Tolerances& tol) {
    if (l.cols() == 0 || l.rows() == 0) {
        return 0;
    }
    const RealVector sigma = svd_of(l, false).sigma;
    const double cutoff = rank_cutoff(sigma, tol);
    return static_cast<std::size_t>((sigma.array() > cutoff).count());
}

std::vector<ComplexMatrix> orthonormalize_hs(std::span<const ComplexMatrix> ms, const Tolerances& tol) {
    std::vector<ComplexMatrix> out;
    for (const ComplexMatrix& m : ms) {
        if (!out.empty() && (m.rows() != out.front().rows() || m.cols() != out.front().cols())) {
            throw Error(ErrorKind::DimensionMismatch, "orthonormalize_hs inputs differ in shape");
        }
        ComplexMatrix r = m;
        // Two passes of classical Gram-Schmidt.
        for (int pass = 0; pass < 2; ++pass) {
            for (const ComplexMatrix& q : out) {
                r -= hs_inner(q, r) * q;
            }
        }
        const double norm = hs_norm(r);
        if (norm <= tol.rank_tol * (1.0 + hs_norm(m))) {
            continue;
        }
        out.push_back(r / norm);
    }
    return out;
}

double operator_norm(const ComplexMatrix& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    return svd_of(a, false).sigma(0);
}

namespace {

void split_eigenspaces(std::span<const ComplexMatrix> family, std::size_t index,
                       const ComplexMatrix& basis, const std::vector<double>& scales,
                       const Tolerances& tol, std::vector<ComplexVector>& out) {
    if (index == family.size() || basis.cols() == 1) {
        for (Eigen::Index c = 0; c < basis.cols(); ++c) {
            out.emplace_back(basis.col(c));
        }
        return;
    }
    const ComplexMatrix restricted = basis.adjoint() * family[index] * basis;
    const HermitianEigen eig = jacobi_eig(0.5 * (restricted + restricted.adjoint()), tol);
    const ComplexMatrix rotated = basis * eig.eigenvectors;
    const double gap = tol.residual_tol * scales[index];

    Eigen::Index start = 0;
    const Eigen::Index k = rotated.cols();
    for (Eigen::Index j = 1; j <= k; ++j) {
        if (j == k || eig.eigenvalues(j) - eig.eigenvalues(j - 1) >= gap) {
            split_eigenspaces(family, index + 1, rotated.middleCols(start, j - start), scales, tol, out);
            start = j;
        }
    }
}

} // namespace

ComplexMatrix joint_diagonalize(std::span<const ComplexMatrix> family, std::size_t dim,
                                const Tolerances& tol) {
    std::vector<double> scales;
    for (const ComplexMatrix& a : family) {
        require_square_finite(a, "joint_diagonalize member");
        if (static_cast<std::size_t>(a.rows()) != dim) {
            throw Error(ErrorKind::DimensionMismatch, "joint_diagonalize member has wrong dim");
        }
        if (!is_hermitian(a, tol)) {
            throw Error(ErrorKind::NotHermitian, "joint_diagonalize member is not Hermitian");
        }
        scales.push_back(1.0 + hs_norm(a));
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
        for (std::size_t j = i + 1; j < family.size(); ++j) {
            const double comm = hs_norm(family[i] * family[j] - family[j] * family[i]);
            if (comm > tol.residual_tol * (1.0 + hs_norm(family[i]) * hs_norm(family[j]))) {
                throw Error(ErrorKind::NotCommuting, "joint_diagonalize members do not commute");
            }
        }
    }
    const auto n = static_cast<Eigen::Index>(dim);
    std::vector<ComplexVector> columns;
    split_eigenspaces(family, 0, ComplexMatrix::Identity(n, n), scales, tol, columns);
    ComplexMatrix v(n, n);
    for (Eigen::Index c = 0; c < n; ++c) {
        v.col(c) = columns[static_cast<std::size_t>(c)];
    }
    return v;
}

ComplexVector vec(const ComplexMatrix& a) {
    return Eigen::Map<const ComplexVector>(a.data(), a.size());
}

ComplexMatrix unvec(const ComplexVector& v, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    if (v.size() != dim * dim) {
        throw Error(ErrorKind::DimensionMismatch, "unvec length is not n^2");
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), dim, dim);
}

} // namespace vnagen
