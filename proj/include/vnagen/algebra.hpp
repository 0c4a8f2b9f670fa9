#pragma once

// Commutants, bicommutants and the algebras they span.
//
// An algebra is represented by an HS-orthonormal basis of its linear span. In
// finite dimension every strong closure is trivial, so a von Neumann algebra is
// exactly a unital *-closed matrix algebra and the bicommutant of an
// adjoint-closed set is the algebra it generates.

#include <vector>

#include "vnagen/numkernel.hpp"

namespace vnagen {

struct OperatorSet {
    std::size_t dim = 0;
    std::vector<ComplexMatrix> members;

    // Throws DimensionMismatch / InvalidArgument for non-square, wrong-size or
    // non-finite members, or dim == 0.
    void validate() const;
};

class AlgebraBasis {
public:
    // Checks orthonormality, that the span contains I, and multiplicative
    // closure; *-closure is checked when `require_involutive` is set and
    // recorded either way. Throws InvalidAlgebra naming the violated invariant.
    static AlgebraBasis make(std::size_t dim, std::vector<ComplexMatrix> basis,
                             const Tolerances& tol = {}, bool require_involutive = true);

    std::size_t dim() const { return dim_; }
    // Dimension of the span.
    std::size_t size() const { return basis_.size(); }
    const std::vector<ComplexMatrix>& elements() const { return basis_; }
    bool involutive() const { return involutive_; }

    // Orthogonal (HS) projection onto the span.
    ComplexMatrix project(const ComplexMatrix& t) const;
    // ||T - project(T)||_HS
    double residual(const ComplexMatrix& t) const;
    // Basis vectors as columns of an n^2 x k matrix.
    const ComplexMatrix& stacked() const { return stacked_; }

private:
    AlgebraBasis() = default;

    std::size_t dim_ = 0;
    std::vector<ComplexMatrix> basis_;
    ComplexMatrix stacked_;
    bool involutive_ = false;
};

// X together with the adjoints of its members; adjoints already present
// (within residual_tol) are not duplicated.
OperatorSet adjoint_closure(const OperatorSet& x, const Tolerances& tol = {});

bool is_adjoint_closed(const OperatorSet& x, const Tolerances& tol = {});

// {R : RT = TR for every T in X}, for exactly the listed members.
AlgebraBasis commutant(const OperatorSet& x, const Tolerances& tol = {});

// Same, using the serial reference kernels; for tests and benchmarks.
AlgebraBasis commutant_serial(const OperatorSet& x, const Tolerances& tol = {});

// commutant(commutant(X)) without adjoint closure.
AlgebraBasis bicommutant(const OperatorSet& x, const Tolerances& tol = {});

// A(X) = (X u X*)''
AlgebraBasis generated_algebra(const OperatorSet& x, const Tolerances& tol = {});

// Same dimension and each basis lies in the other's span. Throws DimensionMismatch.
bool algebra_equal(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol = {});

// span(a) is contained in span(b).
bool span_subset(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol = {});

// ||T - P T|| <= residual_tol * (1 + ||T||). Throws DimensionMismatch.
bool contains(const AlgebraBasis& a, const ComplexMatrix& t, const Tolerances& tol = {});

bool is_abelian(const AlgebraBasis& a, const Tolerances& tol = {});

// T commutes with every element of the commutant of M.
bool is_affiliated(const ComplexMatrix& t, const AlgebraBasis& m, const Tolerances& tol = {});

// T commutes with every basis element of `comm`; is_affiliated with M' precomputed.
bool commutes_with(const ComplexMatrix& t, const AlgebraBasis& comm, const Tolerances& tol = {});

// span(a) ∩ span(b) as the kernel of the stacked complementary projectors.
AlgebraBasis span_intersection(const AlgebraBasis& a, const AlgebraBasis& b,
                               const Tolerances& tol = {});

// The algebra as an operator set (its basis elements).
OperatorSet as_operator_set(const AlgebraBasis& a);

} // namespace vnagen
