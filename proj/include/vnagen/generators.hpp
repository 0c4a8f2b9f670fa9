#pragma once

// Deciding whether a set of operators generates the algebra A(P_E) of a
// spectral measure.
//
// Two independent routes are computed for every query:
//   * the criterion: every operator is a spectral integral J^E_f, and the
//     recovered symbols separate the non-null atoms;
//   * the oracle: compare the bicommutant A(X) with A(P_E) directly.
// They must agree on every valid input; a disagreement is reported, never hidden.

#include <optional>
#include <utility>
#include <vector>

#include "vnagen/algebra.hpp"
#include "vnagen/spectral.hpp"

namespace vnagen {

struct SymbolRecovery {
    bool expressible = false;
    std::optional<MeasurableFunction> symbol;
    double residual = 0.0; // ||T - J^E_f|| for the trace-ratio candidate f
};

struct SeparationReport {
    bool separating = true;
    std::vector<std::size_t> null_atoms_used;
    std::optional<std::pair<std::size_t, std::size_t>> witness_pair;
    // Atoms treated as non-null whose projection norm is within 10x of rank_tol.
    std::vector<std::size_t> borderline_atoms;
};

struct GenerationVerdict {
    std::vector<SymbolRecovery> cond1;
    SeparationReport cond2;
    bool criterion_generates = false;
    bool oracle_generates = false;
    std::size_t generated_dim = 0; // dim A(X)
    std::size_t target_dim = 0;    // dim A(P_E)

    bool agree() const { return criterion_generates == oracle_generates; }
};

// Candidate f_i = tr(P_i T) / tr(P_i) on non-null atoms, accepted when
// ||T - J^E_f|| <= residual_tol * (1 + ||T||). Throws DimensionMismatch.
SymbolRecovery recover_symbol(const SpectralMeasure& e, const ComplexMatrix& t,
                              const Tolerances& tol = {});

// Pairwise check over non-null atoms; witness is the lexicographically first
// unseparated pair. Throws UndefinedOnSupport.
SeparationReport is_separating(const SpectralMeasure& e, const std::vector<MeasurableFunction>& fs,
                               const Tolerances& tol = {});

// algebra_equal(A(X), A(P_E))
bool oracle_generates(const SpectralMeasure& e, const OperatorSet& x, const Tolerances& tol = {});

GenerationVerdict check_generates(const SpectralMeasure& e, const OperatorSet& x,
                                  const Tolerances& tol = {});

// The atoms of E as an operator set.
OperatorSet atom_projections(const SpectralMeasure& e);

struct JointEvaluation {
    SpectralMeasure measure;                      // over classes of support atoms
    std::vector<std::optional<std::size_t>> map;  // atom -> class; empty for null atoms
    std::vector<std::vector<Complex>> class_values; // representative value tuple per class
    bool injective_on_support = false;
};

// Quotient of the support by "every function agrees within value_tol" (closed
// transitively), pushed forward from E. Single-function quotients are labelled
// by the value itself; otherwise by the formatted value tuple.
JointEvaluation joint_evaluation_pushforward(const SpectralMeasure& e,
                                             const std::vector<MeasurableFunction>& fs,
                                             const Tolerances& tol = {});

// Real symbol taking values 0, 1/(k-1), ..., 1 on the k support atoms in atom
// order; undefined on null atoms.
MeasurableFunction single_selfadjoint_generator(const SpectralMeasure& e, const Tolerances& tol = {});

// { exp(lambda T) : lambda in lambdas }. Throws NotNormal, InvalidArgument for
// an empty lambda list.
OperatorSet exponential_family(const ComplexMatrix& t, const std::vector<Complex>& lambdas,
                               const Tolerances& tol = {});

} // namespace vnagen
