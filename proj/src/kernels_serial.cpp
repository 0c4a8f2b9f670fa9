#include "vnagen/kernels.hpp"

#include <algorithm>

namespace vnagen::kernels::serial {

ComplexMatrix commutator_system(std::span<const ComplexMatrix> ops, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::Index block = dim * dim;
    ComplexMatrix l = ComplexMatrix::Zero(block * static_cast<Eigen::Index>(ops.size()), block);
    for (std::size_t b = 0; b < ops.size(); ++b) {
        const ComplexMatrix& t = ops[b];
        const Eigen::Index row0 = static_cast<Eigen::Index>(b) * block;
        // (RT - TR)_{ij}: +T_{lj} on R_{il}, -T_{ik} on R_{kj}; vec index i + n j.
        for (Eigen::Index j = 0; j < dim; ++j) {
            for (Eigen::Index i = 0; i < dim; ++i) {
                const Eigen::Index row = row0 + i + dim * j;
                for (Eigen::Index k = 0; k < dim; ++k) {
                    l(row, i + dim * k) += t(k, j);
                    l(row, k + dim * j) -= t(i, k);
                }
            }
        }
    }
    return l;
}

double max_pairwise_commutator(std::span<const ComplexMatrix> ops) {
    double worst = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (std::size_t j = i + 1; j < ops.size(); ++j) {
            worst = std::max(worst, (ops[i] * ops[j] - ops[j] * ops[i]).norm());
        }
    }
    return worst;
}

double max_product_residual(const ComplexMatrix& stacked, std::size_t n) {
    const auto dim = static_cast<Eigen::Index>(n);
    const Eigen::Index k = stacked.cols();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) {
        const Eigen::Map<const ComplexMatrix> bi(stacked.col(i).data(), dim, dim);
        for (Eigen::Index j = 0; j < k; ++j) {
            const Eigen::Map<const ComplexMatrix> bj(stacked.col(j).data(), dim, dim);
            const ComplexMatrix prod = bi * bj;
            const ComplexVector x = Eigen::Map<const ComplexVector>(prod.data(), prod.size());
            const ComplexVector r = x - stacked * (stacked.adjoint() * x);
            worst = std::max(worst, r.norm() / (1.0 + x.norm()));
        }
    }
    return worst;
}

std::vector<double> projection_residuals(const ComplexMatrix& stacked,
                                         std::span<const ComplexMatrix> ms) {
    std::vector<double> out(ms.size());
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const ComplexVector x = Eigen::Map<const ComplexVector>(ms[i].data(), ms[i].size());
        const ComplexVector r = x - stacked * (stacked.adjoint() * x);
        out[i] = r.norm() / (1.0 + x.norm());
    }
    return out;
}

} // namespace vnagen::kernels::serial
