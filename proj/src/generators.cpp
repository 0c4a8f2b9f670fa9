#include "vnagen/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace vnagen {

namespace {

void require_same_dim(const SpectralMeasure& e, std::size_t dim) {
    if (e.dim() != dim) {
        throw Error(ErrorKind::DimensionMismatch,
                    "measure acts on C^" + std::to_string(e.dim()) + ", operators on C^" +
                        std::to_string(dim));
    }
}

void require_defined_on_support(const SpectralMeasure& e, const std::vector<MeasurableFunction>& fs,
                                const std::vector<std::size_t>& support) {
    for (const MeasurableFunction& f : fs) {
        if (!(f.space() == e.space())) {
            throw Error(ErrorKind::DimensionMismatch, "function and measure live on different spaces");
        }
        for (std::size_t i : support) {
            if (!f.defined(i)) {
                throw Error(ErrorKind::UndefinedOnSupport,
                            "function undefined at non-null atom '" +
                                label_to_string(e.space().atom(i)) + "'");
            }
        }
    }
}

// Per-function scale for the separation cutoff: 1 + max |f| over the support.
std::vector<double> separation_scales(const std::vector<MeasurableFunction>& fs,
                                      const std::vector<std::size_t>& support) {
    std::vector<double> scales;
    scales.reserve(fs.size());
    for (const MeasurableFunction& f : fs) {
        double top = 0.0;
        for (std::size_t i : support) {
            top = std::max(top, std::abs(f.value(i)));
        }
        scales.push_back(1.0 + top);
    }
    return scales;
}

bool separated(const std::vector<MeasurableFunction>& fs, const std::vector<double>& scales,
               std::size_t a, std::size_t b, const Tolerances& tol) {
    for (std::size_t k = 0; k < fs.size(); ++k) {
        if (std::abs(fs[k].value(a) - fs[k].value(b)) > tol.value_tol * scales[k]) {
            return true;
        }
    }
    return false;
}

std::string format_tuple(const std::vector<Complex>& values) {
    std::string out = "(";
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (k > 0) {
            out += ", ";
        }
        out += label_to_string(Label(values[k]));
    }
    return out + ")";
}

} // namespace

OperatorSet atom_projections(const SpectralMeasure& e) { return {e.dim(), e.projections()}; }

SymbolRecovery recover_symbol(const SpectralMeasure& e, const ComplexMatrix& t, const Tolerances& tol) {
    require_square_finite(t, "operator");
    require_same_dim(e, static_cast<std::size_t>(t.rows()));
    const std::vector<std::size_t> support = support_atoms(e, tol);

    std::vector<Complex> values(e.atom_count());
    std::vector<bool> defined(e.atom_count(), false);
    for (std::size_t i : support) {
        const ComplexMatrix& p = e.projection(i);
        values[i] = (p * t).trace() / p.trace().real();
        defined[i] = true;
    }
    MeasurableFunction f(e.space(), std::move(values), std::move(defined));

    SymbolRecovery out;
    out.residual = operator_norm(t - spectral_integral(e, f, tol));
    out.expressible = out.residual <= tol.residual_tol * (1.0 + operator_norm(t));
    if (out.expressible) {
        out.symbol = std::move(f);
    }
    return out;
}

SeparationReport is_separating(const SpectralMeasure& e, const std::vector<MeasurableFunction>& fs,
                               const Tolerances& tol) {
    SeparationReport report;
    report.null_atoms_used = null_atoms(e, tol);
    const std::vector<std::size_t> support = support_atoms(e, tol);
    require_defined_on_support(e, fs, support);

    for (std::size_t i : support) {
        if (operator_norm(e.projection(i)) <= 10.0 * tol.rank_tol) {
            report.borderline_atoms.push_back(i);
        }
    }

    const std::vector<double> scales = separation_scales(fs, support);
    for (std::size_t a = 0; a < support.size() && report.separating; ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            if (!separated(fs, scales, support[a], support[b], tol)) {
                report.separating = false;
                report.witness_pair = std::make_pair(support[a], support[b]);
                break;
            }
        }
    }
    return report;
}

bool oracle_generates(const SpectralMeasure& e, const OperatorSet& x, const Tolerances& tol) {
    require_same_dim(e, x.dim);
    return algebra_equal(generated_algebra(x, tol), generated_algebra(atom_projections(e), tol), tol);
}

GenerationVerdict check_generates(const SpectralMeasure& e, const OperatorSet& x, const Tolerances& tol) {
    x.validate();
    require_same_dim(e, x.dim);

    GenerationVerdict verdict;
    verdict.cond1.reserve(x.members.size());
    std::vector<MeasurableFunction> symbols;
    bool all_expressible = true;
    for (const ComplexMatrix& t : x.members) {
        SymbolRecovery r = recover_symbol(e, t, tol);
        all_expressible = all_expressible && r.expressible;
        if (r.symbol) {
            symbols.push_back(*r.symbol);
        }
        verdict.cond1.push_back(std::move(r));
    }
    verdict.cond2 = is_separating(e, symbols, tol);
    verdict.criterion_generates = all_expressible && verdict.cond2.separating;

    const AlgebraBasis generated = generated_algebra(x, tol);
    const AlgebraBasis target = generated_algebra(atom_projections(e), tol);
    verdict.generated_dim = generated.size();
    verdict.target_dim = target.size();
    verdict.oracle_generates = algebra_equal(generated, target, tol);
    return verdict;
}

JointEvaluation joint_evaluation_pushforward(const SpectralMeasure& e,
                                             const std::vector<MeasurableFunction>& fs,
                                             const Tolerances& tol) {
    const std::vector<std::size_t> support = support_atoms(e, tol);
    require_defined_on_support(e, fs, support);
    const std::vector<double> scales = separation_scales(fs, support);

    // Transitive closure of "not separated" over support atoms.
    std::vector<std::size_t> parent(support.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    bool injective = true;
    for (std::size_t a = 0; a < support.size(); ++a) {
        for (std::size_t b = a + 1; b < support.size(); ++b) {
            if (!separated(fs, scales, support[a], support[b], tol)) {
                injective = false;
                const std::size_t ra = find(a);
                const std::size_t rb = find(b);
                parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }

    std::vector<std::optional<std::size_t>> map(e.atom_count());
    std::vector<std::size_t> class_of_root(support.size(), support.size());
    std::vector<std::vector<Complex>> class_values;
    std::vector<std::size_t> image;
    for (std::size_t a = 0; a < support.size(); ++a) {
        const std::size_t root = find(a);
        if (class_of_root[root] == support.size()) {
            class_of_root[root] = class_values.size();
            std::vector<Complex> tuple;
            for (const MeasurableFunction& f : fs) {
                tuple.push_back(f.value(support[root]));
            }
            class_values.push_back(std::move(tuple));
        }
        map[support[a]] = class_of_root[root];
        image.push_back(class_of_root[root]);
    }

    std::vector<Label> labels;
    for (std::size_t c = 0; c < class_values.size(); ++c) {
        if (fs.size() == 1) {
            labels.emplace_back(class_values[c].front());
        } else {
            labels.emplace_back(format_tuple(class_values[c]));
        }
    }
    const auto n = static_cast<Eigen::Index>(e.dim());
    std::vector<ComplexMatrix> projections(class_values.size(), ComplexMatrix::Zero(n, n));
    for (std::size_t a = 0; a < support.size(); ++a) {
        projections[image[a]] += e.projection(support[a]);
    }
    return {SpectralMeasure::make(SampleSpace(std::move(labels)), std::move(projections), tol),
            std::move(map), std::move(class_values), injective};
}

MeasurableFunction single_selfadjoint_generator(const SpectralMeasure& e, const Tolerances& tol) {
    const std::vector<std::size_t> support = support_atoms(e, tol);
    std::vector<Complex> values(e.atom_count());
    std::vector<bool> defined(e.atom_count(), false);
    const std::size_t k = support.size();
    for (std::size_t j = 0; j < k; ++j) {
        values[support[j]] = k == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(k - 1);
        defined[support[j]] = true;
    }
    return MeasurableFunction(e.space(), std::move(values), std::move(defined));
}

OperatorSet exponential_family(const ComplexMatrix& t, const std::vector<Complex>& lambdas,
                               const Tolerances& tol) {
    if (lambdas.empty()) {
        throw Error(ErrorKind::InvalidArgument, "exponential family needs at least one lambda");
    }
    require_square_finite(t, "operator");
    const SpectralMeasure spectrum = spectral_measure_of_normal(t, tol);
    OperatorSet out{static_cast<std::size_t>(t.rows()), {}};
    for (Complex lambda : lambdas) {
        std::vector<Complex> values;
        for (const Label& label : spectrum.space().atoms()) {
            values.push_back(std::exp(lambda * std::get<Complex>(label)));
        }
        out.members.push_back(
            spectral_integral(spectrum, MeasurableFunction(spectrum.space(), std::move(values)), tol));
    }
    return out;
}

} // namespace vnagen
