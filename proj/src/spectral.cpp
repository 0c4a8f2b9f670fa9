#include "vnagen/spectral.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <set>

namespace vnagen {

std::string format_real(double x) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string label_to_string(const Label& label) {
    if (const auto* s = std::get_if<std::string>(&label)) {
        return *s;
    }
    const Complex z = std::get<Complex>(label);
    std::string out = format_real(z.real());
    if (z.imag() != 0.0) {
        out += (std::signbit(z.imag()) ? "-" : "+") + format_real(std::abs(z.imag())) + "i";
    }
    return out;
}

// ---------------------------------------------------------------------------
// SampleSpace

SampleSpace::SampleSpace(std::vector<Label> atoms) : atoms_(std::move(atoms)) {
    if (atoms_.empty()) {
        throw Error(ErrorKind::InvalidArgument, "sample space needs at least one atom");
    }
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        for (std::size_t j = i + 1; j < atoms_.size(); ++j) {
            if (atoms_[i] == atoms_[j]) {
                throw Error(ErrorKind::InvalidArgument,
                            "repeated atom label '" + label_to_string(atoms_[i]) + "'");
            }
        }
    }
}

SampleSpace SampleSpace::named(std::size_t m, const std::string& prefix) {
    std::vector<Label> atoms;
    atoms.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        atoms.emplace_back(prefix + std::to_string(i));
    }
    return SampleSpace(std::move(atoms));
}

std::size_t SampleSpace::index_of(const Label& label) const {
    const auto it = std::find(atoms_.begin(), atoms_.end(), label);
    if (it == atoms_.end()) {
        throw Error(ErrorKind::UnknownAtom, "no atom labelled '" + label_to_string(label) + "'");
    }
    return static_cast<std::size_t>(it - atoms_.begin());
}

// ---------------------------------------------------------------------------
// SpectralMeasure

SpectralMeasure SpectralMeasure::make(SampleSpace space, std::vector<ComplexMatrix> projections,
                                      const Tolerances& tol) {
    if (projections.size() != space.size()) {
        throw Error(ErrorKind::InvalidMeasure, "one projection per atom required");
    }
    if (projections.empty()) {
        throw Error(ErrorKind::InvalidMeasure, "measure has no atoms");
    }
    const Eigen::Index n = projections.front().rows();
    for (std::size_t i = 0; i < projections.size(); ++i) {
        const ComplexMatrix& p = projections[i];
        if (p.rows() != n || p.cols() != n || n < 1) {
            throw Error(ErrorKind::InvalidMeasure, "projections must be square of equal dim");
        }
        if (!p.allFinite()) {
            throw Error(ErrorKind::InvalidMeasure, "projection has non-finite entries");
        }
        const std::string who = " (atom '" + label_to_string(space.atom(i)) + "')";
        if (hs_norm(p - p.adjoint()) > tol.residual_tol) {
            throw Error(ErrorKind::InvalidMeasure, "projection not Hermitian" + who);
        }
        if (hs_norm(p * p - p) > tol.residual_tol) {
            throw Error(ErrorKind::InvalidMeasure, "projection not idempotent" + who);
        }
    }
    for (std::size_t i = 0; i < projections.size(); ++i) {
        for (std::size_t j = i + 1; j < projections.size(); ++j) {
            if (hs_norm(projections[i] * projections[j]) > tol.residual_tol) {
                throw Error(ErrorKind::InvalidMeasure,
                            "projections not mutually orthogonal (atoms '" +
                                label_to_string(space.atom(i)) + "', '" +
                                label_to_string(space.atom(j)) + "')");
            }
        }
    }
    ComplexMatrix total = ComplexMatrix::Zero(n, n);
    for (const ComplexMatrix& p : projections) {
        total += p;
    }
    if (hs_norm(total - ComplexMatrix::Identity(n, n)) > tol.residual_tol) {
        throw Error(ErrorKind::InvalidMeasure, "projections do not sum to the identity");
    }
    return SpectralMeasure(std::move(space), std::move(projections), static_cast<std::size_t>(n));
}

// ---------------------------------------------------------------------------
// MeasurableFunction

MeasurableFunction::MeasurableFunction(SampleSpace space, std::vector<Complex> values)
    : MeasurableFunction(std::move(space), values, std::vector<bool>(values.size(), true)) {}

MeasurableFunction::MeasurableFunction(SampleSpace space, std::vector<Complex> values,
                                       std::vector<bool> defined)
    : space_(std::move(space)), values_(std::move(values)), defined_(std::move(defined)) {
    if (values_.size() != space_.size() || defined_.size() != space_.size()) {
        throw Error(ErrorKind::InvalidArgument, "function needs one value per atom");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!defined_[i]) {
            values_[i] = 0.0;
        } else if (!std::isfinite(values_[i].real()) || !std::isfinite(values_[i].imag())) {
            throw Error(ErrorKind::InvalidArgument, "function value is not finite");
        }
    }
}

namespace {

void require_same_space(const MeasurableFunction& f, const MeasurableFunction& g) {
    if (!(f.space() == g.space())) {
        throw Error(ErrorKind::DimensionMismatch, "functions live on different sample spaces");
    }
}

template <typename Op>
MeasurableFunction combine(const MeasurableFunction& f, const MeasurableFunction& g, Op op) {
    require_same_space(f, g);
    std::vector<Complex> values(f.size());
    std::vector<bool> defined(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        defined[i] = f.defined(i) && g.defined(i);
        values[i] = defined[i] ? op(f.value(i), g.value(i)) : Complex{};
    }
    return MeasurableFunction(f.space(), std::move(values), std::move(defined));
}

} // namespace

MeasurableFunction pointwise_product(const MeasurableFunction& f, const MeasurableFunction& g) {
    return combine(f, g, std::multiplies<>());
}

MeasurableFunction pointwise_sum(const MeasurableFunction& f, const MeasurableFunction& g) {
    return combine(f, g, std::plus<>());
}

MeasurableFunction conjugate(const MeasurableFunction& f) {
    return map_values(f, [](Complex z) { return std::conj(z); });
}

MeasurableFunction map_values(const MeasurableFunction& f, const std::function<Complex(Complex)>& h) {
    std::vector<Complex> values(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) {
        values[i] = f.defined(i) ? h(f.value(i)) : Complex{};
    }
    return MeasurableFunction(f.space(), std::move(values), f.defined_mask());
}

MeasurableFunction pull_back(const MeasurableFunction& f, const AtomMap& phi,
                             const SampleSpace& source) {
    if (!(f.space() == phi.target)) {
        throw Error(ErrorKind::DimensionMismatch, "function is not defined on the map's target");
    }
    if (phi.image.size() != source.size()) {
        throw Error(ErrorKind::DimensionMismatch, "map must be total on its source");
    }
    std::vector<Complex> values(source.size());
    std::vector<bool> defined(source.size());
    for (std::size_t i = 0; i < source.size(); ++i) {
        const std::size_t t = phi.image[i];
        if (t >= f.size()) {
            throw Error(ErrorKind::UnknownAtom, "map image index out of range");
        }
        defined[i] = f.defined(t);
        values[i] = f.value(t);
    }
    return MeasurableFunction(source, std::move(values), std::move(defined));
}

AtomMap compose(const AtomMap& psi, const AtomMap& phi) {
    if (psi.image.size() != phi.target.size()) {
        throw Error(ErrorKind::DimensionMismatch, "maps are not composable");
    }
    AtomMap out{psi.target, {}};
    out.image.reserve(phi.image.size());
    for (std::size_t t : phi.image) {
        if (t >= psi.image.size()) {
            throw Error(ErrorKind::UnknownAtom, "map image index out of range");
        }
        out.image.push_back(psi.image[t]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Measures and integrals

ComplexMatrix measure_of_indices(const SpectralMeasure& e, const std::vector<std::size_t>& subset) {
    const auto n = static_cast<Eigen::Index>(e.dim());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    std::set<std::size_t> seen;
    for (std::size_t i : subset) {
        if (i >= e.atom_count()) {
            throw Error(ErrorKind::UnknownAtom, "atom index " + std::to_string(i) + " out of range");
        }
        if (seen.insert(i).second) {
            out += e.projection(i);
        }
    }
    return out;
}

ComplexMatrix measure_of_set(const SpectralMeasure& e, const std::vector<Label>& subset) {
    std::vector<std::size_t> indices;
    indices.reserve(subset.size());
    for (const Label& label : subset) {
        indices.push_back(e.space().index_of(label));
    }
    return measure_of_indices(e, indices);
}

ScalarMeasure scalar_measure(const SpectralMeasure& e, const ComplexVector& psi, const Tolerances& tol) {
    if (static_cast<std::size_t>(psi.size()) != e.dim()) {
        throw Error(ErrorKind::DimensionMismatch, "vector length differs from measure dim");
    }
    const double slack = tol.value_tol * (1.0 + psi.squaredNorm());
    ScalarMeasure out{e.space(), std::vector<double>(e.atom_count())};
    for (std::size_t i = 0; i < e.atom_count(); ++i) {
        double mass = psi.dot(e.projection(i) * psi).real();
        if (mass < 0.0) {
            if (mass < -slack) {
                throw Error(ErrorKind::InvalidMeasure, "negative scalar mass");
            }
            mass = 0.0;
        }
        out.masses[i] = mass;
    }
    return out;
}

std::vector<std::size_t> null_atoms(const SpectralMeasure& e, const Tolerances& tol) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < e.atom_count(); ++i) {
        if (operator_norm(e.projection(i)) <= tol.rank_tol) {
            out.push_back(i);
        }
    }
    return out;
}

std::vector<std::size_t> support_atoms(const SpectralMeasure& e, const Tolerances& tol) {
    const std::vector<std::size_t> nulls = null_atoms(e, tol);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < e.atom_count(); ++i) {
        if (!std::binary_search(nulls.begin(), nulls.end(), i)) {
            out.push_back(i);
        }
    }
    return out;
}

ComplexMatrix spectral_integral(const SpectralMeasure& e, const MeasurableFunction& f,
                                const Tolerances& tol) {
    if (!(f.space() == e.space())) {
        throw Error(ErrorKind::DimensionMismatch, "function and measure live on different spaces");
    }
    const auto n = static_cast<Eigen::Index>(e.dim());
    ComplexMatrix out = ComplexMatrix::Zero(n, n);
    for (std::size_t i : support_atoms(e, tol)) {
        if (!f.defined(i)) {
            throw Error(ErrorKind::UndefinedOnSupport,
                        "function undefined at non-null atom '" + label_to_string(e.space().atom(i)) + "'");
        }
        out += f.value(i) * e.projection(i);
    }
    return out;
}

SpectralMeasure push_forward(const SpectralMeasure& e, const AtomMap& phi, const Tolerances& tol) {
    if (phi.image.size() != e.atom_count()) {
        throw Error(ErrorKind::DimensionMismatch, "map must be total on the measure's atoms");
    }
    const auto n = static_cast<Eigen::Index>(e.dim());
    std::vector<ComplexMatrix> projections(phi.target.size(), ComplexMatrix::Zero(n, n));
    for (std::size_t i = 0; i < phi.image.size(); ++i) {
        if (phi.image[i] >= projections.size()) {
            throw Error(ErrorKind::UnknownAtom, "map image index out of range");
        }
        projections[phi.image[i]] += e.projection(i);
    }
    return SpectralMeasure::make(phi.target, std::move(projections), tol);
}

// ---------------------------------------------------------------------------
// Normal matrices

bool is_normal(const ComplexMatrix& t, const Tolerances& tol) {
    const double norm = operator_norm(t);
    return operator_norm(t * t.adjoint() - t.adjoint() * t) <= tol.residual_tol * (1.0 + norm * norm);
}

SpectralMeasure spectral_measure_of_normal(const ComplexMatrix& t, const Tolerances& tol) {
    require_square_finite(t, "normal matrix");
    if (!is_normal(t, tol)) {
        throw Error(ErrorKind::NotNormal, "matrix is not normal (TT* != T*T)");
    }
    const Eigen::Index n = t.rows();
    const ComplexMatrix re = 0.5 * (t + t.adjoint());
    const ComplexMatrix im = (t - t.adjoint()) / Complex(0.0, 2.0);
    const std::vector<ComplexMatrix> pair{re, im};
    const ComplexMatrix v = joint_diagonalize(pair, static_cast<std::size_t>(n), tol);
    const ComplexMatrix d = v.adjoint() * t * v;

    // Greedy union of eigenvalues closer than the cluster gap.
    const double cluster_tol = 1e-7 * (1.0 + operator_norm(t));
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](Eigen::Index x) {
        while (parent[x] != x) {
            x = parent[x] = parent[parent[x]];
        }
        return x;
    };
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a + 1; b < n; ++b) {
            if (std::abs(d(a, a) - d(b, b)) <= cluster_tol) {
                parent[find(b)] = find(a);
            }
        }
    }

    struct Cluster {
        Complex label;
        std::vector<Eigen::Index> members;
    };
    std::vector<Cluster> clusters;
    std::vector<Eigen::Index> root_slot(static_cast<std::size_t>(n), -1);
    for (Eigen::Index a = 0; a < n; ++a) {
        const Eigen::Index r = find(a);
        if (root_slot[r] < 0) {
            root_slot[r] = static_cast<Eigen::Index>(clusters.size());
            clusters.push_back({});
        }
        clusters[static_cast<std::size_t>(root_slot[r])].members.push_back(a);
    }
    for (Cluster& c : clusters) {
        Complex sum = 0.0;
        for (Eigen::Index a : c.members) {
            sum += d(a, a);
        }
        c.label = sum / static_cast<double>(c.members.size());
    }
    std::sort(clusters.begin(), clusters.end(), [](const Cluster& x, const Cluster& y) {
        if (x.label.real() != y.label.real()) {
            return x.label.real() < y.label.real();
        }
        return x.label.imag() < y.label.imag();
    });

    std::vector<Label> labels;
    std::vector<ComplexMatrix> projections;
    for (const Cluster& c : clusters) {
        ComplexMatrix p = ComplexMatrix::Zero(n, n);
        for (Eigen::Index a : c.members) {
            p += v.col(a) * v.col(a).adjoint();
        }
        labels.emplace_back(c.label);
        projections.push_back(0.5 * (p + p.adjoint()));
    }
    return SpectralMeasure::make(SampleSpace(std::move(labels)), std::move(projections), tol);
}

ComplexMatrix function_calculus(const ComplexMatrix& t, const MeasurableFunction& f,
                                const Tolerances& tol) {
    return spectral_integral(spectral_measure_of_normal(t, tol), f, tol);
}

ComplexMatrix function_calculus(const ComplexMatrix& t, const std::function<Complex(Complex)>& f,
                                const Tolerances& tol) {
    const SpectralMeasure e = spectral_measure_of_normal(t, tol);
    std::vector<Complex> values;
    values.reserve(e.atom_count());
    for (const Label& label : e.space().atoms()) {
        values.push_back(f(std::get<Complex>(label)));
    }
    return spectral_integral(e, MeasurableFunction(e.space(), std::move(values)), tol);
}

Complex chi(Complex z) { return z / (std::abs(z) + 1.0); }

Complex chi_inv(Complex z, const Tolerances& tol) {
    const double r = std::abs(z);
    if (!(r < 1.0 - tol.value_tol)) {
        throw Error(ErrorKind::OutOfDisc, "chi_inv needs |z| < 1");
    }
    return z / (1.0 - r);
}

} // namespace vnagen
