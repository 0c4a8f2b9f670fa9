#include <doctest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "vnagen/harness.hpp"
#include "vnagen/spectral.hpp"

using namespace vnagen;
using namespace testing;

namespace {

SpectralMeasure diagonal_model(std::size_t m) {
    std::vector<ComplexMatrix> ps;
    for (std::size_t i = 0; i < m; ++i) {
        ps.push_back(unit(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i),
                          static_cast<Eigen::Index>(i)));
    }
    return SpectralMeasure::make(SampleSpace::named(m), ps);
}

// atom 0 = (I + sigma_x)/2, atom 1 = (I - sigma_x)/2
SpectralMeasure sigma_x_model() {
    return SpectralMeasure::make(SampleSpace::named(2),
                                 {(eye(2) + sigma_x) / 2.0, (eye(2) - sigma_x) / 2.0});
}

ErrorKind kind_of(const std::function<void()>& body) {
    try {
        body();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no throw");
    return ErrorKind::Schema;
}

} // namespace

TEST_SUITE("spectral") {

TEST_CASE("measure_of_set examples") {
    const SpectralMeasure e = diagonal_model(3);
    CHECK(dist(measure_of_set(e, {}), ComplexMatrix::Zero(3, 3)) == 0.0);
    CHECK(dist(measure_of_set(e, {"s0", "s1", "s2"}), eye(3)) == 0.0);
    CHECK(dist(measure_of_set(e, {"s1", "s2"}), diag({0, 1, 1})) == 0.0);
    CHECK(kind_of([&] { measure_of_set(e, {"nope"}); }) == ErrorKind::UnknownAtom);
}

TEST_CASE("measure_of_set is multiplicative") {
    const SpectralMeasure e = random_pvm(5, 6, 4, 1);
    const ComplexMatrix a = measure_of_indices(e, {0, 1, 2});
    const ComplexMatrix b = measure_of_indices(e, {1, 2, 3});
    CHECK(dist(a * b, measure_of_indices(e, {1, 2})) <= 1e-10);
}

TEST_CASE("scalar_measure examples") {
    const SpectralMeasure d = diagonal_model(2);
    const ScalarMeasure zero = scalar_measure(d, vnagen::ComplexVector::Zero(2));
    CHECK(zero.masses == std::vector<double>{0.0, 0.0});

    vnagen::ComplexVector e0(2);
    e0 << 1, 0;
    const ScalarMeasure basis = scalar_measure(d, e0);
    CHECK(basis.masses[0] == doctest::Approx(1.0));
    CHECK(basis.masses[1] == doctest::Approx(0.0));

    const ScalarMeasure half = scalar_measure(sigma_x_model(), e0);
    CHECK(half.masses[0] == doctest::Approx(0.5));
    CHECK(half.masses[1] == doctest::Approx(0.5));

    CHECK(kind_of([&] { scalar_measure(d, vnagen::ComplexVector::Zero(3)); }) ==
          ErrorKind::DimensionMismatch);
}

TEST_CASE("scalar_measure total mass is the squared norm") {
    const SpectralMeasure e = random_pvm(11, 5, 3, 0);
    vnagen::ComplexVector psi = random_unitary(12, 5).col(0) * 3.0;
    const ScalarMeasure s = scalar_measure(e, psi);
    double total = 0.0;
    for (double m : s.masses) {
        CHECK(m >= 0.0);
        total += m;
    }
    CHECK(total == doctest::Approx(psi.squaredNorm()));
}

TEST_CASE("spectral_integral examples") {
    const SpectralMeasure d = diagonal_model(3);
    CHECK(dist(spectral_integral(d, MeasurableFunction(d.space(), {1, 1, 1})), eye(3)) <= 1e-15);
    CHECK(dist(spectral_integral(d, MeasurableFunction(d.space(), {5, 5, 7})), diag({5, 5, 7})) == 0.0);
    const SpectralMeasure x = sigma_x_model();
    CHECK(dist(spectral_integral(x, MeasurableFunction(x.space(), {1, -1})), sigma_x) <= 1e-15);
}

TEST_CASE("spectral_integral treats undefined values") {
    const SpectralMeasure e = SpectralMeasure::make(
        SampleSpace::named(3), {diag({1, 0}), diag({0, 1}), ComplexMatrix::Zero(2, 2)});
    const MeasurableFunction on_null(e.space(), {2, 3, 0}, {true, true, false});
    CHECK(dist(spectral_integral(e, on_null), diag({2, 3})) == 0.0);
    const MeasurableFunction on_support(e.space(), {2, 0, 0}, {true, false, true});
    CHECK(kind_of([&] { spectral_integral(e, on_support); }) == ErrorKind::UndefinedOnSupport);
    const MeasurableFunction other(SampleSpace::named(3, "t"), {1, 1, 1});
    CHECK(kind_of([&] { spectral_integral(e, other); }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("push_forward examples") {
    const SpectralMeasure d = diagonal_model(3);
    const AtomMap identity{d.space(), {0, 1, 2}};
    const SpectralMeasure same = push_forward(d, identity);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(dist(same.projection(i), d.projection(i)) == 0.0);
    }

    const AtomMap coarse{SampleSpace({Label{"a"}, Label{"b"}}), {0, 1, 1}};
    const SpectralMeasure p = push_forward(d, coarse);
    CHECK(dist(p.projection(0), diag({1, 0, 0})) == 0.0);
    CHECK(dist(p.projection(1), diag({0, 1, 1})) == 0.0);

    const AtomMap bad{SampleSpace::named(2), {0, 1, 5}};
    CHECK(kind_of([&] { push_forward(d, bad); }) == ErrorKind::UnknownAtom);
}

TEST_CASE("push_forward gives unused target atoms the zero projection") {
    const SpectralMeasure d = diagonal_model(2);
    const AtomMap into{SampleSpace::named(3), {2, 2}};
    const SpectralMeasure p = push_forward(d, into);
    CHECK(p.projection(0).norm() == 0.0);
    CHECK(dist(p.projection(2), eye(2)) == 0.0);
    CHECK(null_atoms(p) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("composition law J of pushed measure equals J of pulled-back symbol") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const SpectralMeasure e = random_pvm(20 + s, 5, 4, s % 2);
        const SampleSpace target = SampleSpace::named(3, "t");
        const AtomMap phi{target, {s % 3, (s + 1) % 3, 0, 2}};
        const MeasurableFunction f(target, {Complex(1, 2), Complex(-3, 0), Complex(0.5, -1)});
        const ComplexMatrix lhs = spectral_integral(push_forward(e, phi), f);
        const ComplexMatrix rhs = spectral_integral(e, pull_back(f, phi, e.space()));
        CHECK(dist(lhs, rhs) <= 1e-10);
    }
}

TEST_CASE("spectral_measure_of_normal examples") {
    const SpectralMeasure a = spectral_measure_of_normal(diag({1, 1, 3}));
    REQUIRE(a.atom_count() == 2);
    CHECK(std::abs(std::get<Complex>(a.space().atom(0)) - 1.0) <= 1e-12);
    CHECK(std::abs(std::get<Complex>(a.space().atom(1)) - 3.0) <= 1e-12);
    CHECK(dist(a.projection(0), diag({1, 1, 0})) <= 1e-12);
    CHECK(dist(a.projection(1), diag({0, 0, 1})) <= 1e-12);

    const SpectralMeasure b = spectral_measure_of_normal(sigma_x);
    REQUIRE(b.atom_count() == 2);
    CHECK(std::abs(std::get<Complex>(b.space().atom(0)) + 1.0) <= 1e-12);
    CHECK(dist(b.projection(0), (eye(2) - sigma_x) / 2.0) <= 1e-12);
    CHECK(dist(b.projection(1), (eye(2) + sigma_x) / 2.0) <= 1e-12);

    const SpectralMeasure c = spectral_measure_of_normal(Complex(0, 1) * eye(2));
    REQUIRE(c.atom_count() == 1);
    CHECK(std::abs(std::get<Complex>(c.space().atom(0)) - Complex(0, 1)) <= 1e-12);
    CHECK(dist(c.projection(0), eye(2)) <= 1e-12);
}

TEST_CASE("spectral_measure_of_normal rejects non-normal input") {
    CHECK(kind_of([&] { spectral_measure_of_normal(mat({{0, 1}, {0, 0}})); }) == ErrorKind::NotNormal);
    CHECK_FALSE(is_normal(mat({{0, 1}, {0, 0}})));
    CHECK(is_normal(mat({{0, -1}, {1, 0}})));
}

TEST_CASE("spectral measure of a random normal matrix reproduces it") {
    for (std::uint64_t s = 0; s < 10; ++s) {
        const std::size_t n = 1 + s % 8;
        const ComplexMatrix u = random_unitary(40 + s, n);
        ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        std::set<std::pair<double, double>> distinct;
        for (std::size_t i = 0; i < n; ++i) {
            // repeated eigenvalues on purpose
            const Complex z(static_cast<double>(i / 2), -static_cast<double>(i % 3 == 0));
            d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = z;
            distinct.insert({z.real(), z.imag()});
        }
        const ComplexMatrix t = u * d * u.adjoint();
        const SpectralMeasure e = spectral_measure_of_normal(t);
        CHECK(e.atom_count() == distinct.size());
        std::vector<Complex> labels;
        for (const Label& l : e.space().atoms()) {
            labels.push_back(std::get<Complex>(l));
        }
        const ComplexMatrix back = spectral_integral(e, MeasurableFunction(e.space(), labels));
        CHECK(dist(back, t) <= 1e-8 * (1.0 + operator_norm(t)));
    }
}

TEST_CASE("function_calculus examples") {
    const ComplexMatrix t = diag({0, std::log(2.0)});
    const ComplexMatrix expd =
        function_calculus(t, std::function<Complex(Complex)>([](Complex z) { return std::exp(z); }));
    CHECK(dist(expd, diag({1, 2})) <= 1e-12);

    const ComplexMatrix identity =
        function_calculus(sigma_x, std::function<Complex(Complex)>([](Complex z) { return z; }));
    CHECK(dist(identity, sigma_x) <= 1e-12);

    const ComplexMatrix constant = function_calculus(
        sigma_x, std::function<Complex(Complex)>([](Complex) { return Complex(2, 1); }));
    CHECK(dist(constant, Complex(2, 1) * eye(2)) <= 1e-12);

    // symbol given on the spectrum labels
    const SpectralMeasure e = spectral_measure_of_normal(sigma_x);
    const ComplexMatrix sq = function_calculus(sigma_x, MeasurableFunction(e.space(), {1, 1}));
    CHECK(dist(sq, eye(2)) <= 1e-12);
}

TEST_CASE("chi examples") {
    CHECK(chi(0.0) == Complex(0.0));
    CHECK(std::abs(chi(3.0) - 0.75) <= 1e-15);
    CHECK(std::abs(chi_inv(0.75) - 3.0) <= 1e-12);
    CHECK(std::abs(chi(Complex(-1, 0)) + 0.5) <= 1e-15);
    CHECK(kind_of([] { chi_inv(1.0); }) == ErrorKind::OutOfDisc);
    CHECK(kind_of([] { chi_inv(Complex(0, -2)); }) == ErrorKind::OutOfDisc);
}

TEST_CASE("chi round trip on scalars") {
    for (Complex z : {Complex(0.1, -7), Complex(100, 0), Complex(-3, 4)}) {
        CHECK(std::abs(chi(z)) < 1.0);
        CHECK(std::abs(chi_inv(chi(z)) - z) <= 1e-9 * (1.0 + std::abs(z)));
    }
}

TEST_CASE("null_atoms examples") {
    CHECK(null_atoms(diagonal_model(3)).empty());
    const std::vector<ComplexMatrix> ps{diag({1, 0}), diag({0, 1}), ComplexMatrix::Zero(2, 2)};
    const SpectralMeasure e = SpectralMeasure::make(SampleSpace::named(3), ps);
    CHECK(null_atoms(e) == std::vector<std::size_t>{2});
    CHECK(support_atoms(e) == std::vector<std::size_t>{0, 1});

    const ComplexMatrix u = random_unitary(77, 2);
    std::vector<ComplexMatrix> conj;
    for (const auto& p : ps) {
        conj.push_back(u * p * u.adjoint());
    }
    CHECK(null_atoms(SpectralMeasure::make(SampleSpace::named(3), conj)) == std::vector<std::size_t>{2});
}

TEST_CASE("invalid measures are rejected") {
    const SampleSpace two = SampleSpace::named(2);
    CHECK(kind_of([&] { SpectralMeasure::make(two, {diag({1, 0}), diag({1, 0})}); }) ==
          ErrorKind::InvalidMeasure);
    CHECK(kind_of([&] { SpectralMeasure::make(two, {diag({1, 0}), diag({0, 0})}); }) ==
          ErrorKind::InvalidMeasure);
    CHECK(kind_of([&] { SpectralMeasure::make(two, {mat({{1, 1}, {0, 0}}), diag({0, 1})}); }) ==
          ErrorKind::InvalidMeasure);
    CHECK(kind_of([&] { SpectralMeasure::make(two, {diag({2, 0}), diag({-1, 1})}); }) ==
          ErrorKind::InvalidMeasure);
}

TEST_CASE("sample spaces reject repeats") {
    CHECK(kind_of([] { SampleSpace({Label{"a"}, Label{"a"}}); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { SampleSpace(std::vector<Label>{}); }) == ErrorKind::InvalidArgument);
    const SampleSpace s({Label{"a"}, Label{Complex(1, 2)}});
    CHECK(s.index_of(Label{Complex(1, 2)}) == 1);
    CHECK(kind_of([&] { s.index_of(Label{"b"}); }) == ErrorKind::UnknownAtom);
}

TEST_CASE("functions reject non-finite defined values") {
    const SampleSpace s = SampleSpace::named(2);
    CHECK(kind_of([&] { MeasurableFunction(s, {1, std::nan("")}); }) == ErrorKind::InvalidArgument);
    CHECK_NOTHROW(MeasurableFunction(s, {1, std::nan("")}, {true, false}));
    CHECK(kind_of([&] { MeasurableFunction(s, {1}); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("pointwise operations propagate undefined atoms") {
    const SampleSpace s = SampleSpace::named(3);
    const MeasurableFunction f(s, {1, 2, 3}, {true, false, true});
    const MeasurableFunction g(s, {4, 5, 6});
    const MeasurableFunction p = pointwise_product(f, g);
    CHECK(p.value(0) == Complex(4));
    CHECK_FALSE(p.defined(1));
    CHECK(pointwise_sum(f, g).value(2) == Complex(9));
    CHECK(conjugate(MeasurableFunction(s, {Complex(0, 1), 0, 0})).value(0) == Complex(0, -1));
}

TEST_CASE("compose and pull_back") {
    const AtomMap phi{SampleSpace::named(2, "t"), {1, 0, 1}};
    const AtomMap psi{SampleSpace::named(1, "u"), {0, 0}};
    const AtomMap both = compose(psi, phi);
    CHECK(both.image == std::vector<std::size_t>{0, 0, 0});
    const MeasurableFunction f(phi.target, {7, 8});
    const MeasurableFunction back = pull_back(f, phi, SampleSpace::named(3));
    CHECK(back.values() == std::vector<Complex>{8, 7, 8});
}

TEST_CASE("labels format with round-trip precision") {
    CHECK(label_to_string(Label{"abc"}) == "abc");
    CHECK(label_to_string(Label{Complex(1, 0)}) == "1");
    CHECK(label_to_string(Label{Complex(0.1, -2)}) == "0.1-2i");
    CHECK(label_to_string(Label{Complex(-1, 0.5)}) == "-1+0.5i");
    CHECK(format_real(1e-9) == "1e-09");
    CHECK(std::stod(format_real(0.1 + 0.2)) == 0.1 + 0.2);
}

} // TEST_SUITE
