#pragma once

// Data-parallel inner loops. The functions in `vnagen::kernels` are the OpenMP
// versions used by the library; `vnagen::kernels::serial` holds plain loop
// reference versions with identical results, kept for tests and benchmarks.
//
// Each parallel loop writes disjoint output slots or reduces with max, so
// results do not depend on the thread count.

#include <span>

#include "vnagen/numkernel.hpp"

namespace vnagen::kernels {

// Stacks the maps R -> R T - T R (one n^2 x n^2 block per operator) acting on
// vec(R). Row block b holds operator ops[b].
ComplexMatrix commutator_system(std::span<const ComplexMatrix> ops, std::size_t n);

// max_{i<j} ||A_i A_j - A_j A_i||_HS
double max_pairwise_commutator(std::span<const ComplexMatrix> ops);

// Given an HS-orthonormal basis stored as the columns of `stacked` (n^2 x k),
// returns max over (i, j) of the relative distance of basis_i * basis_j from
// the span: ||x - P x|| / (1 + ||x||).
double max_product_residual(const ComplexMatrix& stacked, std::size_t n);

// Relative projection residual for each matrix in `ms` against the span of
// `stacked`: ||M - P M||_HS / (1 + ||M||_HS).
std::vector<double> projection_residuals(const ComplexMatrix& stacked,
                                         std::span<const ComplexMatrix> ms);

int max_threads();

namespace serial {

ComplexMatrix commutator_system(std::span<const ComplexMatrix> ops, std::size_t n);
double max_pairwise_commutator(std::span<const ComplexMatrix> ops);
double max_product_residual(const ComplexMatrix& stacked, std::size_t n);
std::vector<double> projection_residuals(const ComplexMatrix& stacked,
                                         std::span<const ComplexMatrix> ms);

} // namespace serial
} // namespace vnagen::kernels
