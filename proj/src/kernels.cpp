#include "vnagen/kernels.hpp"

#include <algorithm>

#include <omp.h>

namespace vnagen::kernels {

int max_threads() { return omp_get_max_threads(); }

ComplexMatrix commutator_system(std::span<const ComplexMatrix> ops, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::Index block = dim * dim;
    const auto blocks = static_cast<Eigen::Index>(ops.size());
    ComplexMatrix l = ComplexMatrix::Zero(block * blocks, block);

    // One task per (operator, output column j); every task owns rows
    // row0 + [0, n) of its block.
    const Eigen::Index tasks = blocks * dim;
#pragma omp parallel for schedule(static)
    for (Eigen::Index task = 0; task < tasks; ++task) {
        const Eigen::Index b = task / dim;
        const Eigen::Index j = task % dim;
        const ComplexMatrix& t = ops[static_cast<std::size_t>(b)];
        const Eigen::Index row0 = b * block + dim * j;
        for (Eigen::Index k = 0; k < dim; ++k) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                l(row0 + i, i + dim * k) += t(k, j);
            }
        }
        l.block(row0, dim * j, dim, dim) -= t;
    }
    return l;
}

double max_pairwise_commutator(std::span<const ComplexMatrix> ops) {
    const auto count = static_cast<long>(ops.size());
    double worst = 0.0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (long i = 0; i < count; ++i) {
        for (long j = i + 1; j < count; ++j) {
            const ComplexMatrix& a = ops[static_cast<std::size_t>(i)];
            const ComplexMatrix& b = ops[static_cast<std::size_t>(j)];
            worst = std::max(worst, (a * b - b * a).norm());
        }
    }
    return worst;
}

double max_product_residual(const ComplexMatrix& stacked, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::Index k = stacked.cols();
    double worst = 0.0;
    // Row i: all products b_i b_j as columns, projected with one GEMM.
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Map<const ComplexMatrix> bi(stacked.col(i).data(), dim, dim);
        ComplexMatrix products(dim * dim, k);
        for (Eigen::Index j = 0; j < k; ++j) {
            const Eigen::Map<const ComplexMatrix> bj(stacked.col(j).data(), dim, dim);
            Eigen::Map<ComplexMatrix>(products.col(j).data(), dim, dim).noalias() = bi * bj;
        }
        const ComplexMatrix coeffs = stacked.adjoint() * products;
        const ComplexMatrix residual = products - stacked * coeffs;
        for (Eigen::Index j = 0; j < k; ++j) {
            worst = std::max(worst, residual.col(j).norm() / (1.0 + products.col(j).norm()));
        }
    }
    return worst;
}

std::vector<double> projection_residuals(const ComplexMatrix& stacked,
                                         std::span<const ComplexMatrix> ms) {
    const auto count = static_cast<long>(ms.size());
    std::vector<double> out(ms.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < count; ++i) {
        const ComplexMatrix& m = ms[static_cast<std::size_t>(i)];
        const ComplexVector x = Eigen::Map<const ComplexVector>(m.data(), m.size());
        const ComplexVector r = x - stacked * (stacked.adjoint() * x);
        out[static_cast<std::size_t>(i)] = r.norm() / (1.0 + x.norm());
    }
    return out;
}

} // namespace vnagen::kernels
