#include "vnagen/algebra.hpp"

#include <algorithm>
#include <string>

#include "vnagen/kernels.hpp"

namespace vnagen {

void OperatorSet::validate() const {
    if (dim == 0) {
        throw Error(ErrorKind::DimensionMismatch, "operator set needs dim >= 1");
    }
    for (const ComplexMatrix& t : members) {
        require_square_finite(t, "operator set member");
        if (static_cast<std::size_t>(t.rows()) != dim) {
            throw Error(ErrorKind::DimensionMismatch, "operator set member has wrong dim");
        }
    }
}

namespace {

ComplexMatrix stack_vecs(const std::vector<ComplexMatrix>& basis, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    ComplexMatrix stacked(dim * dim, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) {
        stacked.col(static_cast<Eigen::Index>(k)) = vec(basis[k]);
    }
    return stacked;
}

// Canonical orthonormal basis of the column span of `k` (orthonormal columns):
// pivoted Gram-Schmidt over the projections of the matrix units, always taking
// the unit with the largest remaining projection (earliest index on ties).
std::vector<ComplexMatrix> canonical_basis(const ComplexMatrix& k, std::size_t n) {
    const Eigen::Index rank = k.cols();
    ComplexMatrix residual = k * k.adjoint(); // column j = projection of e_j
    std::vector<ComplexVector> chosen;
    for (Eigen::Index step = 0; step < rank; ++step) {
        const RealVector norms = residual.colwise().norm();
        const double best = norms.maxCoeff();
        if (best <= 0.0) {
            break;
        }
        Eigen::Index pivot = 0;
        while (norms(pivot) < (1.0 - 1e-8) * best) {
            ++pivot;
        }
        ComplexVector q = residual.col(pivot);
        for (const ComplexVector& prev : chosen) {
            q -= prev.dot(q) * prev;
        }
        q.normalize();
        residual -= q * (q.adjoint() * residual);
        chosen.push_back(std::move(q));
    }
    std::vector<ComplexMatrix> out;
    out.reserve(chosen.size());
    for (const ComplexVector& q : chosen) {
        out.push_back(unvec(q, n));
    }
    return out;
}

std::vector<ComplexMatrix> matrix_units(std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    std::vector<ComplexMatrix> out;
    out.reserve(n * n);
    for (Eigen::Index j = 0; j < dim; ++j) {
        for (Eigen::Index i = 0; i < dim; ++i) {
            ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
            e(i, j) = 1.0;
            out.push_back(std::move(e));
        }
    }
    return out;
}

bool has_member_near(const std::vector<ComplexMatrix>& members, const ComplexMatrix& t,
                     const Tolerances& tol) {
    const double bound = tol.residual_tol * (1.0 + hs_norm(t));
    return std::any_of(members.begin(), members.end(),
                       [&](const ComplexMatrix& m) { return hs_norm(m - t) <= bound; });
}

enum class Assembly { Parallel, Serial };

AlgebraBasis commutant_impl(const OperatorSet& x, const Tolerances& tol, bool require_involutive,
                            Assembly assembly) {
    x.validate();
    if (x.members.empty()) {
        return AlgebraBasis::make(x.dim, matrix_units(x.dim), tol, true);
    }
    const ComplexMatrix system = assembly == Assembly::Parallel
                                     ? kernels::commutator_system(x.members, x.dim)
                                     : kernels::serial::commutator_system(x.members, x.dim);
    const ComplexMatrix kernel = nullspace(system, tol);
    return AlgebraBasis::make(x.dim, canonical_basis(kernel, x.dim), tol, require_involutive);
}

} // namespace

AlgebraBasis AlgebraBasis::make(std::size_t dim, std::vector<ComplexMatrix> basis,
                                const Tolerances& tol, bool require_involutive) {
    if (dim == 0) {
        throw Error(ErrorKind::InvalidAlgebra, "algebra needs dim >= 1");
    }
    if (basis.empty()) {
        throw Error(ErrorKind::InvalidAlgebra, "span does not contain the identity (empty basis)");
    }
    for (const ComplexMatrix& b : basis) {
        if (static_cast<std::size_t>(b.rows()) != dim || b.rows() != b.cols()) {
            throw Error(ErrorKind::InvalidAlgebra, "basis element has wrong shape");
        }
    }
    AlgebraBasis out;
    out.dim_ = dim;
    out.stacked_ = stack_vecs(basis, dim);
    out.basis_ = std::move(basis);

    const auto k = static_cast<Eigen::Index>(out.basis_.size());
    const ComplexMatrix gram = out.stacked_.adjoint() * out.stacked_;
    if ((gram - ComplexMatrix::Identity(k, k)).norm() > tol.residual_tol) {
        throw Error(ErrorKind::InvalidAlgebra, "basis is not HS-orthonormal");
    }
    const auto n = static_cast<Eigen::Index>(dim);
    const ComplexMatrix identity = ComplexMatrix::Identity(n, n);
    if (out.residual(identity) > tol.residual_tol * (1.0 + hs_norm(identity))) {
        throw Error(ErrorKind::InvalidAlgebra, "span does not contain the identity");
    }
    // n^2 orthonormal elements span all of M_n, closed under everything
    if (k == n * n) {
        out.involutive_ = true;
        return out;
    }
    if (kernels::max_product_residual(out.stacked_, dim) > tol.residual_tol) {
        throw Error(ErrorKind::InvalidAlgebra, "span is not closed under multiplication");
    }
    std::vector<ComplexMatrix> adjoints;
    adjoints.reserve(out.basis_.size());
    for (const ComplexMatrix& b : out.basis_) {
        adjoints.push_back(b.adjoint());
    }
    const std::vector<double> star = kernels::projection_residuals(out.stacked_, adjoints);
    out.involutive_ = std::all_of(star.begin(), star.end(),
                                  [&](double r) { return r <= tol.residual_tol; });
    if (require_involutive && !out.involutive_) {
        throw Error(ErrorKind::InvalidAlgebra, "span is not closed under adjoints");
    }
    return out;
}

ComplexMatrix AlgebraBasis::project(const ComplexMatrix& t) const {
    if (static_cast<std::size_t>(t.rows()) != dim_ || t.rows() != t.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "matrix and algebra differ in dim");
    }
    return unvec(stacked_ * (stacked_.adjoint() * vec(t)), dim_);
}

double AlgebraBasis::residual(const ComplexMatrix& t) const { return hs_norm(t - project(t)); }

OperatorSet adjoint_closure(const OperatorSet& x, const Tolerances& tol) {
    x.validate();
    OperatorSet out = x;
    for (const ComplexMatrix& t : x.members) {
        ComplexMatrix adj = t.adjoint();
        if (!has_member_near(out.members, adj, tol)) {
            out.members.push_back(std::move(adj));
        }
    }
    return out;
}

bool is_adjoint_closed(const OperatorSet& x, const Tolerances& tol) {
    return std::all_of(x.members.begin(), x.members.end(), [&](const ComplexMatrix& t) {
        return has_member_near(x.members, t.adjoint(), tol);
    });
}

AlgebraBasis commutant(const OperatorSet& x, const Tolerances& tol) {
    return commutant_impl(x, tol, is_adjoint_closed(x, tol), Assembly::Parallel);
}

AlgebraBasis commutant_serial(const OperatorSet& x, const Tolerances& tol) {
    return commutant_impl(x, tol, is_adjoint_closed(x, tol), Assembly::Serial);
}

OperatorSet as_operator_set(const AlgebraBasis& a) { return {a.dim(), a.elements()}; }

AlgebraBasis bicommutant(const OperatorSet& x, const Tolerances& tol) {
    const AlgebraBasis first = commutant(x, tol);
    return commutant_impl(as_operator_set(first), tol, first.involutive(), Assembly::Parallel);
}

AlgebraBasis generated_algebra(const OperatorSet& x, const Tolerances& tol) {
    const AlgebraBasis first = commutant(adjoint_closure(x, tol), tol);
    return commutant_impl(as_operator_set(first), tol, true, Assembly::Parallel);
}

bool contains(const AlgebraBasis& a, const ComplexMatrix& t, const Tolerances& tol) {
    return a.residual(t) <= tol.residual_tol * (1.0 + hs_norm(t));
}

bool span_subset(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "algebras act on different dims");
    }
    return std::all_of(a.elements().begin(), a.elements().end(),
                       [&](const ComplexMatrix& t) { return contains(b, t, tol); });
}

bool algebra_equal(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "algebras act on different dims");
    }
    return a.size() == b.size() && span_subset(a, b, tol) && span_subset(b, a, tol);
}

bool is_abelian(const AlgebraBasis& a, const Tolerances& tol) {
    return kernels::max_pairwise_commutator(a.elements()) <= tol.residual_tol;
}

bool is_affiliated(const ComplexMatrix& t, const AlgebraBasis& m, const Tolerances& tol) {
    if (static_cast<std::size_t>(t.rows()) != m.dim() || t.rows() != t.cols()) {
        throw Error(ErrorKind::DimensionMismatch, "matrix and algebra differ in dim");
    }
    return commutes_with(t, commutant(as_operator_set(m), tol), tol);
}

bool commutes_with(const ComplexMatrix& t, const AlgebraBasis& comm, const Tolerances& tol) {
    const double bound = tol.residual_tol * (1.0 + hs_norm(t));
    return std::all_of(comm.elements().begin(), comm.elements().end(), [&](const ComplexMatrix& c) {
        return hs_norm(t * c - c * t) <= bound;
    });
}

AlgebraBasis span_intersection(const AlgebraBasis& a, const AlgebraBasis& b, const Tolerances& tol) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "algebras act on different dims");
    }
    const Eigen::Index len = a.stacked().rows();
    const ComplexMatrix identity = ComplexMatrix::Identity(len, len);
    ComplexMatrix system(2 * len, len);
    system.topRows(len) = identity - a.stacked() * a.stacked().adjoint();
    system.bottomRows(len) = identity - b.stacked() * b.stacked().adjoint();
    const ComplexMatrix kernel = nullspace(system, tol);
    return AlgebraBasis::make(a.dim(), canonical_basis(kernel, a.dim()), tol,
                              a.involutive() && b.involutive());
}

} // namespace vnagen
