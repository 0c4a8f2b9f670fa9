#pragma once

// Spectral measures on finite sample spaces and the integrals they define.
//
// A finite sample space carries the power-set sigma-algebra, so a spectral
// measure is fully described by one orthogonal projection per atom. Functions
// may be left undefined on null atoms; every equality below is read modulo
// null atoms.

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vnagen/numkernel.hpp"

namespace vnagen {

// Atom label: an opaque name, or a point of the complex plane for spectra.
using Label = std::variant<std::string, Complex>;

// Shortest text that reads back to the same double.
std::string format_real(double x);
// Strings as-is; complex labels as "re", "re+imi" or "re-imi" in round-trip precision.
std::string label_to_string(const Label& label);

class SampleSpace {
public:
    SampleSpace() = default;
    // Throws InvalidArgument when empty or when labels repeat.
    explicit SampleSpace(std::vector<Label> atoms);

    // Atoms named prefix0, prefix1, ...
    static SampleSpace named(std::size_t m, const std::string& prefix = "s");

    std::size_t size() const { return atoms_.size(); }
    const Label& atom(std::size_t i) const { return atoms_.at(i); }
    const std::vector<Label>& atoms() const { return atoms_; }
    // Throws UnknownAtom.
    std::size_t index_of(const Label& label) const;

    friend bool operator==(const SampleSpace&, const SampleSpace&) = default;

private:
    std::vector<Label> atoms_;
};

class SpectralMeasure {
public:
    // Validates: each projection Hermitian and idempotent, mutually orthogonal,
    // and summing to the identity, all within residual_tol. Throws
    // InvalidMeasure naming the violated invariant.
    static SpectralMeasure make(SampleSpace space, std::vector<ComplexMatrix> projections,
                                const Tolerances& tol = {});

    const SampleSpace& space() const { return space_; }
    std::size_t dim() const { return dim_; }
    std::size_t atom_count() const { return projections_.size(); }
    const ComplexMatrix& projection(std::size_t i) const { return projections_.at(i); }
    const std::vector<ComplexMatrix>& projections() const { return projections_; }

private:
    SpectralMeasure(SampleSpace space, std::vector<ComplexMatrix> projections, std::size_t dim)
        : space_(std::move(space)), projections_(std::move(projections)), dim_(dim) {}

    SampleSpace space_;
    std::vector<ComplexMatrix> projections_;
    std::size_t dim_ = 0;
};

class MeasurableFunction {
public:
    MeasurableFunction() = default;
    // Defined everywhere.
    MeasurableFunction(SampleSpace space, std::vector<Complex> values);
    // Throws InvalidArgument on size mismatch or non-finite defined values.
    MeasurableFunction(SampleSpace space, std::vector<Complex> values, std::vector<bool> defined);

    const SampleSpace& space() const { return space_; }
    std::size_t size() const { return values_.size(); }
    bool defined(std::size_t i) const { return defined_.at(i); }
    // Value at atom i; 0 where undefined.
    Complex value(std::size_t i) const { return defined_.at(i) ? values_.at(i) : Complex{}; }
    const std::vector<Complex>& values() const { return values_; }
    const std::vector<bool>& defined_mask() const { return defined_; }

private:
    SampleSpace space_;
    std::vector<Complex> values_;
    std::vector<bool> defined_;
};

struct ScalarMeasure {
    SampleSpace space;
    std::vector<double> masses;
};

// Pointwise operations; the result is undefined wherever an operand is.
MeasurableFunction pointwise_product(const MeasurableFunction& f, const MeasurableFunction& g);
MeasurableFunction pointwise_sum(const MeasurableFunction& f, const MeasurableFunction& g);
MeasurableFunction conjugate(const MeasurableFunction& f);
// Apply h to every defined value.
MeasurableFunction map_values(const MeasurableFunction& f, const std::function<Complex(Complex)>& h);

// Map between finite sample spaces, stored as target indices.
struct AtomMap {
    SampleSpace target;
    std::vector<std::size_t> image; // image[i] = index in target of phi(atom i)
};

// f o phi, a function on phi's source space with `source` atoms.
MeasurableFunction pull_back(const MeasurableFunction& f, const AtomMap& phi,
                             const SampleSpace& source);
// psi o phi
AtomMap compose(const AtomMap& psi, const AtomMap& phi);

// E(A) = sum of the atom projections in A. Throws UnknownAtom.
ComplexMatrix measure_of_set(const SpectralMeasure& e, const std::vector<Label>& subset);
ComplexMatrix measure_of_indices(const SpectralMeasure& e, const std::vector<std::size_t>& subset);

// E_psi(atom i) = <P_i psi, psi>. Throws DimensionMismatch.
ScalarMeasure scalar_measure(const SpectralMeasure& e, const ComplexVector& psi,
                             const Tolerances& tol = {});

// Atoms whose projection has operator norm <= rank_tol.
std::vector<std::size_t> null_atoms(const SpectralMeasure& e, const Tolerances& tol = {});
// Complement of null_atoms, ascending.
std::vector<std::size_t> support_atoms(const SpectralMeasure& e, const Tolerances& tol = {});

// J^E_f = sum_i f(i) P_i over defined atoms. Throws DimensionMismatch when the
// spaces differ and UndefinedOnSupport when f is undefined on a non-null atom.
ComplexMatrix spectral_integral(const SpectralMeasure& e, const MeasurableFunction& f,
                                const Tolerances& tol = {});

// phi_* E. Target atoms outside the image receive the zero projection.
// Throws UnknownAtom when an image index is out of range.
SpectralMeasure push_forward(const SpectralMeasure& e, const AtomMap& phi,
                             const Tolerances& tol = {});

// Spectral measure of a normal matrix on its eigenvalue clusters, labelled by
// the cluster means and ordered by (real, imaginary). Throws NotNormal.
SpectralMeasure spectral_measure_of_normal(const ComplexMatrix& t, const Tolerances& tol = {});

bool is_normal(const ComplexMatrix& t, const Tolerances& tol = {});

// f(T) for a symbol given on the spectrum labels of T.
ComplexMatrix function_calculus(const ComplexMatrix& t, const MeasurableFunction& f,
                                const Tolerances& tol = {});
// f(T) for a symbol evaluated at each eigenvalue cluster label.
ComplexMatrix function_calculus(const ComplexMatrix& t, const std::function<Complex(Complex)>& f,
                                const Tolerances& tol = {});

// z / (|z| + 1), a bijection of C onto the open unit disc.
Complex chi(Complex z);
// z / (1 - |z|). Throws OutOfDisc for |z| >= 1 - value_tol.
Complex chi_inv(Complex z, const Tolerances& tol = {});

} // namespace vnagen
