#pragma once

// Dense complex-matrix primitives. Everything here is a pure function of its
// arguments; no state is shared between calls.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vnagen/errors.hpp"
#include "vnagen/tolerances.hpp"

namespace vnagen {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

struct HermitianEigen {
    RealVector eigenvalues;    // ascending
    ComplexMatrix eigenvectors; // columns, unitary
};

// Frobenius (Hilbert-Schmidt) norm. Residual checks throughout the library are
// taken in this norm; it dominates the operator norm, so checks are conservative.
double hs_norm(const ComplexMatrix& a);

// tr(A* B)
Complex hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

// Throws DimensionMismatch unless `a` is square with dim >= 1, and
// InvalidArgument if any entry is NaN or infinite.
void require_square_finite(const ComplexMatrix& a, const char* what);

bool is_hermitian(const ComplexMatrix& a, const Tolerances& tol = {});

// Cyclic Jacobi eigensolver for Hermitian matrices.
// Throws NotHermitian, NoConvergence (30 sweep budget).
HermitianEigen herm_eig(const ComplexMatrix& a, const Tolerances& tol = {});

// Orthonormal basis of ker(L) under the cutoff sigma <= rank_tol * (1 + sigma_max),
// returned as the columns of a (cols x nullity) matrix.
ComplexMatrix nullspace(const ComplexMatrix& l, const Tolerances& tol = {});

// Number of singular values of L above the same cutoff nullspace() uses.
std::size_t numerical_rank(const ComplexMatrix& l, const Tolerances& tol = {});

// Singular values of L in descending order, padded with zeros to L.cols().
RealVector singular_values(const ComplexMatrix& l);

// Gram-Schmidt in the Hilbert-Schmidt inner product. Inputs whose residual
// after projection is at most rank_tol * (1 + ||M||) are dropped.
std::vector<ComplexMatrix> orthonormalize_hs(std::span<const ComplexMatrix> ms,
                                             const Tolerances& tol = {});

// Largest singular value.
double operator_norm(const ComplexMatrix& a);

// Unitary V with V* A V diagonal for every A in the family.
// Throws NotHermitian, NotCommuting; an empty family needs `dim` and returns I.
ComplexMatrix joint_diagonalize(std::span<const ComplexMatrix> family, std::size_t dim,
                                const Tolerances& tol = {});

// Column-major vectorisation and its inverse (n*n <-> n x n).
ComplexVector vec(const ComplexMatrix& a);
ComplexMatrix unvec(const ComplexVector& v, std::size_t n);

} // namespace vnagen
