#include "vnagen/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "vnagen/kernels.hpp"

namespace vnagen {

std::string_view to_string(Scenario s) {
    switch (s) {
    case Scenario::GeneratingIntegrals: return "generating-integrals";
    case Scenario::NonSeparatingIntegrals: return "non-separating-integrals";
    case Scenario::NonIntegralMember: return "non-integral-member";
    case Scenario::Mixed: return "mixed";
    case Scenario::ExponentialFamily: return "exponential-family";
    case Scenario::SingleGenerator: return "single-generator";
    }
    return "unknown";
}

Scenario scenario_from_string(std::string_view name) {
    for (Scenario s : kAllScenarios) {
        if (to_string(s) == name) {
            return s;
        }
    }
    throw Error(ErrorKind::InvalidArgument, "unknown scenario '" + std::string(name) + "'");
}

void InstanceSpec::validate() const {
    auto fail = [](const std::string& why) { throw Error(ErrorKind::InfeasibleSpec, why); };
    if (dim < 1 || dim > 8) {
        fail("dim must lie in [1, 8]");
    }
    if (atom_count < 1 || atom_count > 6) {
        fail("atom_count must lie in [1, 6]");
    }
    if (null_atom_count >= atom_count) {
        fail("null_atom_count must be below atom_count");
    }
    if (dim < atom_count - null_atom_count) {
        fail("dim is smaller than the number of non-null atoms");
    }
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(seed ^ mix(index));
}

namespace {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
    bool coin(double p) { return uniform(0.0, 1.0) < p; }
    Complex cnormal() { return {normal(), normal()}; }
    std::uint64_t next() { return engine_(); }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[index(i)]);
        }
    }

    ComplexMatrix gaussian(std::size_t rows, std::size_t cols) {
        ComplexMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                m(i, j) = cnormal();
            }
        }
        return m;
    }

    ComplexMatrix hermitian(std::size_t n) {
        const ComplexMatrix g = gaussian(n, n);
        return 0.5 * (g + g.adjoint());
    }

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_;
};

double min_gap(const std::vector<Complex>& values) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i) {
        for (std::size_t j = i + 1; j < values.size(); ++j) {
            gap = std::min(gap, std::abs(values[i] - values[j]));
        }
    }
    return gap;
}

std::vector<Complex> distinct_values(Rng& rng, std::size_t k) {
    for (;;) {
        std::vector<Complex> values(k);
        for (Complex& v : values) {
            v = rng.cnormal();
        }
        if (min_gap(values) >= 0.05) {
            return values;
        }
    }
}

// Values on the support atoms (in support order) extended to a function on E.
// Null atoms are left undefined or filled with junk at random; neither may
// change any result.
MeasurableFunction extend_from_support(const SpectralMeasure& e, const std::vector<std::size_t>& support,
                                       const std::vector<Complex>& values, Rng& rng) {
    std::vector<Complex> all(e.atom_count());
    std::vector<bool> defined(e.atom_count(), false);
    for (std::size_t j = 0; j < support.size(); ++j) {
        all[support[j]] = values[j];
        defined[support[j]] = true;
    }
    for (std::size_t i = 0; i < e.atom_count(); ++i) {
        if (!defined[i] && rng.coin(0.5)) {
            all[i] = 10.0 * rng.cnormal();
            defined[i] = true;
        }
    }
    return MeasurableFunction(e.space(), std::move(all), std::move(defined));
}

// Values drawn from a small palette, so coincidences are common.
std::vector<Complex> palette_values(Rng& rng, std::size_t k) {
    const std::size_t colours = 1 + rng.index(3);
    const std::vector<Complex> palette = distinct_values(rng, colours);
    std::vector<Complex> values(k);
    for (Complex& v : values) {
        v = palette[rng.index(colours)];
    }
    return values;
}

MeasurableFunction random_function(const SpectralMeasure& e, const std::vector<std::size_t>& support,
                                   Rng& rng) {
    std::vector<Complex> values(support.size());
    for (Complex& v : values) {
        v = rng.cnormal();
    }
    return extend_from_support(e, support, values, rng);
}

// Nonzero matrix HS-orthogonal to every atom projection, scaled to `norm`.
ComplexMatrix off_algebra_perturbation(const SpectralMeasure& e, double norm, Rng& rng) {
    const std::vector<ComplexMatrix> atoms = orthonormalize_hs(e.projections());
    for (;;) {
        ComplexMatrix k = rng.gaussian(e.dim(), e.dim());
        for (const ComplexMatrix& q : atoms) {
            k -= hs_inner(q, k) * q;
        }
        const double size = hs_norm(k);
        if (size > 1e-3) {
            return k * (norm / size);
        }
    }
}

ComplexMatrix random_normal(Rng& rng, std::size_t n, double radius, bool allow_repeats) {
    const ComplexMatrix u = random_unitary(rng.next(), n);
    std::vector<Complex> eig = distinct_values(rng, n);
    for (Complex& z : eig) {
        z *= radius / 4.0;
        if (std::abs(z) > radius) {
            z *= radius / std::abs(z);
        }
    }
    if (allow_repeats && n > 1 && rng.coin(0.5)) {
        eig[n - 1] = eig[0];
    }
    ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = eig[i];
    }
    return u * d * u.adjoint();
}

void add_integrals(const SpectralMeasure& e, const std::vector<MeasurableFunction>& fs, OperatorSet& x,
                   const Tolerances& tol) {
    for (const MeasurableFunction& f : fs) {
        x.members.push_back(spectral_integral(e, f, tol));
    }
}

} // namespace

ComplexMatrix random_unitary(std::uint64_t seed, std::size_t n) {
    if (n == 0) {
        throw Error(ErrorKind::InvalidArgument, "random_unitary needs n >= 1");
    }
    Rng rng(seed);
    const ComplexMatrix g = rng.gaussian(n, n);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    ComplexMatrix q = qr.householderQ();
    const ComplexMatrix& r = qr.matrixQR();
    for (Eigen::Index j = 0; j < q.cols(); ++j) {
        const Complex d = r(j, j);
        if (std::abs(d) > 0.0) {
            q.col(j) *= d / std::abs(d);
        }
    }
    return q;
}

SpectralMeasure random_pvm(std::uint64_t seed, std::size_t n, std::size_t atom_count,
                           std::size_t null_count, const Tolerances& tol) {
    if (atom_count == 0 || null_count >= atom_count) {
        throw Error(ErrorKind::InfeasibleSpec, "need at least one non-null atom");
    }
    const std::size_t k = atom_count - null_count;
    if (n < k) {
        throw Error(ErrorKind::InfeasibleSpec, "dim is smaller than the number of non-null atoms");
    }
    Rng rng(seed);
    const ComplexMatrix u = random_unitary(rng.next(), n);

    std::vector<std::size_t> columns(n);
    std::iota(columns.begin(), columns.end(), std::size_t{0});
    rng.shuffle(columns);
    std::vector<std::size_t> group(n);
    for (std::size_t c = 0; c < n; ++c) {
        group[columns[c]] = c < k ? c : rng.index(k);
    }

    std::vector<std::size_t> slots(atom_count);
    std::iota(slots.begin(), slots.end(), std::size_t{0});
    rng.shuffle(slots);
    std::vector<std::size_t> support_slots(slots.begin(), slots.begin() + static_cast<std::ptrdiff_t>(k));
    std::sort(support_slots.begin(), support_slots.end());

    const auto dim = static_cast<Eigen::Index>(n);
    std::vector<ComplexMatrix> projections(atom_count, ComplexMatrix::Zero(dim, dim));
    for (std::size_t c = 0; c < n; ++c) {
        const auto col = static_cast<Eigen::Index>(c);
        projections[support_slots[group[c]]] += u.col(col) * u.col(col).adjoint();
    }
    for (ComplexMatrix& p : projections) {
        p = 0.5 * (p + p.adjoint());
    }
    return SpectralMeasure::make(SampleSpace::named(atom_count), std::move(projections), tol);
}

Instance make_scenario(const InstanceSpec& spec, const Tolerances& tol) {
    spec.validate();
    const std::size_t support_count = spec.atom_count - spec.null_atom_count;
    if (spec.scenario == Scenario::NonSeparatingIntegrals && support_count < 2) {
        throw Error(ErrorKind::InfeasibleSpec, "non-separating scenario needs two non-null atoms");
    }
    if (spec.scenario == Scenario::NonIntegralMember && spec.dim < 2) {
        throw Error(ErrorKind::InfeasibleSpec, "every operator on C^1 is a spectral integral");
    }

    Rng rng(child_seed(spec.seed, 1));
    SpectralMeasure e = random_pvm(child_seed(spec.seed, 0), spec.dim, spec.atom_count,
                                   spec.null_atom_count, tol);
    const std::vector<std::size_t> support = support_atoms(e, tol);
    const std::size_t k = support.size();
    OperatorSet x{spec.dim, {}};
    std::optional<bool> expected;

    auto generating_family = [&]() {
        std::vector<MeasurableFunction> fs;
        fs.push_back(extend_from_support(e, support, distinct_values(rng, k), rng));
        const std::size_t extra = rng.index(3);
        for (std::size_t j = 0; j < extra; ++j) {
            fs.push_back(extend_from_support(e, support, palette_values(rng, k), rng));
        }
        rng.shuffle(fs);
        return fs;
    };

    switch (spec.scenario) {
    case Scenario::GeneratingIntegrals:
        add_integrals(e, generating_family(), x, tol);
        expected = true;
        break;
    case Scenario::NonSeparatingIntegrals: {
        const std::size_t a = rng.index(k);
        std::size_t b = rng.index(k - 1);
        b += b >= a ? 1 : 0;
        const std::size_t count = 1 + rng.index(3);
        std::vector<MeasurableFunction> fs;
        for (std::size_t j = 0; j < count; ++j) {
            std::vector<Complex> values =
                rng.coin(0.5) ? distinct_values(rng, k) : palette_values(rng, k);
            values[b] = values[a];
            fs.push_back(extend_from_support(e, support, values, rng));
        }
        add_integrals(e, fs, x, tol);
        expected = false;
        break;
    }
    case Scenario::NonIntegralMember: {
        add_integrals(e, generating_family(), x, tol);
        const MeasurableFunction g = random_function(e, support, rng);
        const ComplexMatrix jg = spectral_integral(e, g, tol);
        const double size = std::pow(10.0, rng.uniform(-5.0, 0.0)) * (1.0 + hs_norm(jg));
        x.members.insert(x.members.begin() + static_cast<std::ptrdiff_t>(rng.index(x.members.size() + 1)),
                         jg + off_algebra_perturbation(e, size, rng));
        expected = false;
        break;
    }
    case Scenario::Mixed: {
        const std::size_t count = rng.index(4);
        std::vector<MeasurableFunction> fs;
        for (std::size_t j = 0; j < count; ++j) {
            fs.push_back(extend_from_support(e, support, palette_values(rng, k), rng));
        }
        add_integrals(e, fs, x, tol);
        if (spec.dim >= 2 && rng.coin(0.3)) {
            x.members.push_back(rng.coin(0.5) ? ComplexMatrix(rng.gaussian(spec.dim, spec.dim))
                                              : ComplexMatrix(rng.hermitian(spec.dim)));
        }
        break;
    }
    case Scenario::ExponentialFamily: {
        const double lambda = rng.uniform(0.5, 1.5);
        std::vector<Complex> phi;
        const bool collide = k >= 2 && rng.coin(0.3);
        for (;;) {
            phi = distinct_values(rng, k);
            for (Complex& z : phi) {
                z = {z.real(), 0.5 * z.imag()};
            }
            if (collide) {
                phi[k - 1] = phi[0] + Complex(0.0, 2.0 * std::numbers::pi / lambda);
            }
            std::vector<Complex> images;
            for (Complex z : phi) {
                images.push_back(std::exp(lambda * z));
            }
            if (collide) {
                images.pop_back();
            }
            if (min_gap(phi) >= 0.05 && min_gap(images) >= 1e-3) {
                break;
            }
        }
        const ComplexMatrix t = spectral_integral(e, extend_from_support(e, support, phi, rng), tol);
        x = exponential_family(t, {Complex(lambda, 0.0)}, tol);
        expected = !collide;
        break;
    }
    case Scenario::SingleGenerator:
        x.members.push_back(spectral_integral(e, single_selfadjoint_generator(e, tol), tol));
        expected = true;
        break;
    }
    return {std::move(e), std::move(x), expected};
}

std::vector<InstanceSpec> default_campaign_specs(std::uint64_t seed, std::size_t count,
                                                 const std::vector<Scenario>& scenarios) {
    const std::vector<Scenario> pool =
        scenarios.empty() ? std::vector<Scenario>(std::begin(kAllScenarios), std::end(kAllScenarios))
                          : scenarios;
    std::vector<InstanceSpec> specs;
    specs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        InstanceSpec s;
        s.seed = child_seed(seed, i);
        s.scenario = pool[i % pool.size()];
        Rng rng(child_seed(s.seed, 7));
        const std::size_t round = i / pool.size();
        if (round == 0) {
            // smallest cases: C^1 with one atom where the scenario allows it
            s.dim = 1;
            s.atom_count = 1;
        } else if (round == 1) {
            // one atom of full rank
            s.dim = 2 + rng.index(4);
            s.atom_count = 1;
        } else if (round == 2) {
            // null atoms next to rank >= 2 atoms
            s.atom_count = 3 + rng.index(4);
            s.null_atom_count = 1 + rng.index(s.atom_count - 2);
            s.dim = s.atom_count - s.null_atom_count + 1 + rng.index(3);
        } else {
            s.atom_count = 1 + rng.index(6);
            s.null_atom_count = rng.coin(0.5) ? 0 : rng.index(s.atom_count);
            const std::size_t k = s.atom_count - s.null_atom_count;
            s.dim = k + rng.index(8 - k + 1);
        }
        if (s.scenario == Scenario::NonSeparatingIntegrals && s.atom_count - s.null_atom_count < 2) {
            s.atom_count = std::max<std::size_t>(s.atom_count, 2);
            s.null_atom_count = std::min(s.null_atom_count, s.atom_count - 2);
            s.dim = std::max(s.dim, s.atom_count - s.null_atom_count);
        }
        if (s.scenario == Scenario::NonIntegralMember) {
            s.dim = std::max<std::size_t>(s.dim, 2);
        }
        s.dim = std::min<std::size_t>(s.dim, 8);
        specs.push_back(s);
    }
    return specs;
}

// ---------------------------------------------------------------------------
// Property suite

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

class PropertyRun {
public:
    PropertyRun(const InstanceSpec& spec, const Tolerances& tol, std::vector<CampaignFailure>& out,
                std::set<std::string>& names)
        : spec_(spec), tol_(tol), out_(out), names_(names) {}

    // `body` returns an empty string on success, a diagnostic otherwise.
    template <typename Body>
    void check(const std::string& name, Body&& body) {
        names_.insert(name);
        std::string diagnostic;
        try {
            diagnostic = body();
        } catch (const std::exception& ex) {
            diagnostic = std::string("exception: ") + ex.what();
        }
        if (!diagnostic.empty()) {
            out_.push_back({spec_, name, diagnostic});
        }
    }

    const Tolerances& tol() const { return tol_; }

private:
    const InstanceSpec& spec_;
    const Tolerances& tol_;
    std::vector<CampaignFailure>& out_;
    std::set<std::string>& names_;
};

std::string bound_check(const char* what, double value, double bound) {
    if (value <= bound) {
        return {};
    }
    return std::string(what) + " = " + fmt(value) + " exceeds " + fmt(bound);
}

void numkernel_properties(PropertyRun& run, std::size_t n, Rng& rng) {
    const Tolerances& tol = run.tol();
    run.check("numkernel.herm_eig", [&]() -> std::string {
        const ComplexMatrix a = rng.hermitian(n);
        const HermitianEigen eig = herm_eig(a, tol);
        const ComplexMatrix& v = eig.eigenvectors;
        const ComplexMatrix recon = v * eig.eigenvalues.cast<Complex>().asDiagonal() * v.adjoint();
        const auto dim = static_cast<Eigen::Index>(n);
        std::string d = bound_check("reconstruction", operator_norm(a - recon),
                                    tol.residual_tol * (1.0 + operator_norm(a)));
        if (d.empty()) {
            d = bound_check("unitarity", operator_norm(v.adjoint() * v - ComplexMatrix::Identity(dim, dim)),
                            tol.residual_tol);
        }
        for (Eigen::Index i = 1; d.empty() && i < eig.eigenvalues.size(); ++i) {
            if (eig.eigenvalues(i) < eig.eigenvalues(i - 1)) {
                d = "eigenvalues not ascending";
            }
        }
        return d;
    });
    run.check("numkernel.rank_nullity", [&]() -> std::string {
        const std::size_t rows = 1 + rng.index(2 * n);
        const std::size_t cols = 1 + rng.index(2 * n);
        const std::size_t inner = 1 + rng.index(std::min(rows, cols));
        const ComplexMatrix l = rng.gaussian(rows, inner) * rng.gaussian(inner, cols);
        const ComplexMatrix kernel = nullspace(l, tol);
        const std::size_t rank = numerical_rank(l, tol);
        if (static_cast<std::size_t>(kernel.cols()) + rank != cols) {
            return "nullity " + std::to_string(kernel.cols()) + " + rank " + std::to_string(rank) +
                   " != " + std::to_string(cols);
        }
        if (rank != inner) {
            return "rank " + std::to_string(rank) + " != constructed rank " + std::to_string(inner);
        }
        const double norm = operator_norm(l);
        for (Eigen::Index c = 0; c < kernel.cols(); ++c) {
            if (std::string d = bound_check("||Lv||", (l * kernel.col(c)).norm(), tol.rank_tol * (1.0 + norm));
                !d.empty()) {
                return d;
            }
        }
        const auto k = kernel.cols();
        return bound_check("kernel orthonormality",
                           (kernel.adjoint() * kernel - ComplexMatrix::Identity(k, k)).norm(),
                           tol.residual_tol);
    });
    run.check("numkernel.orthonormalize_idempotent", [&]() -> std::string {
        std::vector<ComplexMatrix> ms;
        const std::size_t count = 1 + rng.index(4);
        for (std::size_t j = 0; j < count; ++j) {
            ms.push_back(rng.gaussian(n, n));
        }
        ms.push_back(ms.front() * Complex(2.0, -1.0) + ms.back());
        const std::vector<ComplexMatrix> once = orthonormalize_hs(ms, tol);
        const std::vector<ComplexMatrix> twice = orthonormalize_hs(once, tol);
        if (once.size() != twice.size()) {
            return "cardinality changed on second pass";
        }
        if (once.size() != std::min(count, n * n)) {
            return "dependent input not dropped";
        }
        for (const ComplexMatrix& a : once) {
            ComplexMatrix r = a;
            for (const ComplexMatrix& q : twice) {
                r -= hs_inner(q, r) * q;
            }
            if (std::string d = bound_check("span residual", hs_norm(r), tol.residual_tol); !d.empty()) {
                return d;
            }
        }
        return {};
    });
    run.check("numkernel.operator_norm_unitary_invariance", [&]() -> std::string {
        const ComplexMatrix a = rng.gaussian(n, n);
        const ComplexMatrix u = random_unitary(rng.next(), n);
        const ComplexMatrix v = random_unitary(rng.next(), n);
        const double base = operator_norm(a);
        return bound_check("|norm(UAV) - norm(A)|", std::abs(operator_norm(u * a * v) - base),
                           tol.residual_tol * (1.0 + base));
    });
    run.check("numkernel.joint_diagonalize", [&]() -> std::string {
        const ComplexMatrix u = random_unitary(rng.next(), n);
        std::vector<ComplexMatrix> family;
        const std::size_t count = 1 + rng.index(3);
        for (std::size_t j = 0; j < count; ++j) {
            ComplexMatrix d = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
            for (Eigen::Index i = 0; i < d.rows(); ++i) {
                d(i, i) = static_cast<double>(rng.index(3)); // repeats on purpose
            }
            family.push_back(u * d * u.adjoint());
        }
        const ComplexMatrix v = joint_diagonalize(family, n, tol);
        for (const ComplexMatrix& a : family) {
            ComplexMatrix off = v.adjoint() * a * v;
            off.diagonal().setZero();
            if (std::string d = bound_check("off-diagonal", operator_norm(off),
                                            tol.residual_tol * (1.0 + operator_norm(a)));
                !d.empty()) {
                return d;
            }
        }
        const auto dim = static_cast<Eigen::Index>(n);
        return bound_check("unitarity", operator_norm(v.adjoint() * v - ComplexMatrix::Identity(dim, dim)),
                           tol.residual_tol);
    });
}

AtomMap random_map(const SampleSpace& source, Rng& rng, const std::string& prefix) {
    const std::size_t target_size = 1 + rng.index(source.size() + 1);
    AtomMap phi{SampleSpace::named(target_size, prefix), {}};
    for (std::size_t i = 0; i < source.size(); ++i) {
        phi.image.push_back(rng.index(target_size));
    }
    return phi;
}

double max_on_support(const MeasurableFunction& f, const std::vector<std::size_t>& support) {
    double top = 0.0;
    for (std::size_t i : support) {
        top = std::max(top, std::abs(f.value(i)));
    }
    return top;
}

void spectral_properties(PropertyRun& run, const SpectralMeasure& e, Rng& rng) {
    const Tolerances& tol = run.tol();
    const std::vector<std::size_t> support = support_atoms(e, tol);
    const std::size_t n = e.dim();

    run.check("spectral.homomorphism", [&]() -> std::string {
        const MeasurableFunction f = random_function(e, support, rng);
        const MeasurableFunction g = random_function(e, support, rng);
        const ComplexMatrix jf = spectral_integral(e, f, tol);
        const ComplexMatrix jg = spectral_integral(e, g, tol);
        const double bound = tol.residual_tol * (1.0 + operator_norm(jf) * operator_norm(jg));
        std::string d = bound_check("||J_fg - J_f J_g||",
                                    operator_norm(spectral_integral(e, pointwise_product(f, g), tol) - jf * jg),
                                    bound);
        if (d.empty()) {
            d = bound_check("||J_f+g - (J_f + J_g)||",
                            operator_norm(spectral_integral(e, pointwise_sum(f, g), tol) - (jf + jg)), bound);
        }
        return d;
    });
    run.check("spectral.adjoint", [&]() -> std::string {
        const MeasurableFunction f = random_function(e, support, rng);
        const ComplexMatrix jf = spectral_integral(e, f, tol);
        return bound_check("||J_conj(f) - J_f*||",
                           operator_norm(spectral_integral(e, conjugate(f), tol) - jf.adjoint()),
                           tol.residual_tol * (1.0 + operator_norm(jf)));
    });
    run.check("spectral.norm_formula", [&]() -> std::string {
        const MeasurableFunction f = random_function(e, support, rng);
        const double top = max_on_support(f, support);
        return bound_check("|norm(J_f) - ess sup|f||",
                           std::abs(operator_norm(spectral_integral(e, f, tol)) - top),
                           tol.residual_tol * (1.0 + top));
    });
    run.check("spectral.pushforward_functoriality", [&]() -> std::string {
        const AtomMap phi = random_map(e.space(), rng, "t");
        const AtomMap psi = random_map(phi.target, rng, "u");
        const SpectralMeasure twice = push_forward(push_forward(e, phi, tol), psi, tol);
        const SpectralMeasure once = push_forward(e, compose(psi, phi), tol);
        double worst = 0.0;
        for (std::size_t i = 0; i < once.atom_count(); ++i) {
            worst = std::max(worst, operator_norm(twice.projection(i) - once.projection(i)));
        }
        return bound_check("atomwise difference", worst, tol.residual_tol);
    });
    run.check("spectral.pushforward_integral", [&]() -> std::string {
        const AtomMap phi = random_map(e.space(), rng, "t");
        const SpectralMeasure pushed = push_forward(e, phi, tol);
        std::vector<Complex> values(phi.target.size());
        for (Complex& v : values) {
            v = rng.cnormal();
        }
        const MeasurableFunction f(phi.target, values);
        const ComplexMatrix lhs = spectral_integral(pushed, f, tol);
        const ComplexMatrix rhs = spectral_integral(e, pull_back(f, phi, e.space()), tol);
        return bound_check("||J^{phi*E}_f - J^E_{f o phi}||", operator_norm(lhs - rhs),
                           tol.residual_tol * (1.0 + operator_norm(lhs)));
    });
    run.check("spectral.measure_of_integral", [&]() -> std::string {
        const std::vector<Complex> values = palette_values(rng, support.size());
        const MeasurableFunction phi = extend_from_support(e, support, values, rng);
        const SpectralMeasure et = spectral_measure_of_normal(spectral_integral(e, phi, tol), tol);
        // phi_* E, grouped by exact value
        std::vector<Complex> distinct;
        for (Complex v : values) {
            if (std::find(distinct.begin(), distinct.end(), v) == distinct.end()) {
                distinct.push_back(v);
            }
        }
        if (et.atom_count() != distinct.size()) {
            return "spectral measure has " + std::to_string(et.atom_count()) + " atoms, expected " +
                   std::to_string(distinct.size());
        }
        for (std::size_t a = 0; a < et.atom_count(); ++a) {
            const Complex label = std::get<Complex>(et.space().atom(a));
            ComplexMatrix expected = ComplexMatrix::Zero(et.projection(a).rows(), et.projection(a).cols());
            for (std::size_t j = 0; j < support.size(); ++j) {
                if (std::abs(values[j] - label) <= 1e-6) {
                    expected += e.projection(support[j]);
                }
            }
            if (std::string d = bound_check("projection mismatch", operator_norm(expected - et.projection(a)),
                                            tol.residual_tol);
                !d.empty()) {
                return d + " at label " + label_to_string(et.space().atom(a));
            }
        }
        return {};
    });
    run.check("spectral.composition", [&]() -> std::string {
        const MeasurableFunction phi = random_function(e, support, rng);
        const ComplexMatrix t = spectral_integral(e, phi, tol);
        const auto h = [](Complex z) { return z * z + std::exp(Complex(0.0, 1.0) * z); };
        const ComplexMatrix lhs = function_calculus(t, h, tol);
        const ComplexMatrix rhs = spectral_integral(e, map_values(phi, h), tol);
        return bound_check("||h(J_phi) - J_{h o phi}||", operator_norm(lhs - rhs),
                           tol.residual_tol * (1.0 + operator_norm(rhs)));
    });
    run.check("spectral.chi_round_trip", [&]() -> std::string {
        const ComplexMatrix t = random_normal(rng, n, 10.0, true);
        const ComplexMatrix bounded = function_calculus(t, [](Complex z) { return chi(z); }, tol);
        const ComplexMatrix back =
            function_calculus(bounded, [&](Complex z) { return chi_inv(z, tol); }, tol);
        return bound_check("||chi_inv(chi(T)) - T||", operator_norm(back - t), 1e-7 * (1.0 + operator_norm(t)));
    });
    run.check("spectral.symbol_uniqueness", [&]() -> std::string {
        const MeasurableFunction f = random_function(e, support, rng);
        // g differs from f only on null atoms
        std::vector<Complex> values = f.values();
        std::vector<bool> defined = f.defined_mask();
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!std::binary_search(support.begin(), support.end(), i)) {
                values[i] = rng.cnormal();
                defined[i] = rng.coin(0.5);
            }
        }
        const MeasurableFunction g(e.space(), values, defined);
        if (operator_norm(spectral_integral(e, f, tol) - spectral_integral(e, g, tol)) > tol.residual_tol) {
            return "symbols equal on the support give different integrals";
        }
        // h differs from f at one support atom
        const std::size_t at = support[rng.index(support.size())];
        values = f.values();
        values[at] += 1e-3;
        const MeasurableFunction h(e.space(), values, f.defined_mask());
        if (operator_norm(spectral_integral(e, f, tol) - spectral_integral(e, h, tol)) <= tol.residual_tol) {
            return "symbols differing on the support give equal integrals";
        }
        return {};
    });
    run.check("spectral.commutativity", [&]() -> std::string {
        std::string d = bound_check("atom commutator", kernels::max_pairwise_commutator(e.projections()),
                                    tol.residual_tol);
        if (!d.empty()) {
            return d;
        }
        const ComplexMatrix jf = spectral_integral(e, random_function(e, support, rng), tol);
        const ComplexMatrix jg = spectral_integral(e, random_function(e, support, rng), tol);
        return bound_check("integral commutator", operator_norm(jf * jg - jg * jf),
                           tol.residual_tol * (1.0 + operator_norm(jf) * operator_norm(jg)));
    });
    run.check("spectral.scalar_measure", [&]() -> std::string {
        const ComplexVector psi = rng.gaussian(n, 1).col(0);
        const ScalarMeasure mu = scalar_measure(e, psi, tol);
        double total = 0.0;
        for (double m : mu.masses) {
            if (m < 0.0) {
                return "negative mass";
            }
            total += m;
        }
        return bound_check("|total mass - ||psi||^2|", std::abs(total - psi.squaredNorm()),
                           tol.residual_tol * (1.0 + psi.squaredNorm()));
    });
    run.check("spectral.null_atoms_conjugation", [&]() -> std::string {
        const ComplexMatrix u = random_unitary(rng.next(), n);
        std::vector<ComplexMatrix> conjugated;
        for (const ComplexMatrix& p : e.projections()) {
            const ComplexMatrix q = u * p * u.adjoint();
            conjugated.push_back(0.5 * (q + q.adjoint()));
        }
        const SpectralMeasure rotated = SpectralMeasure::make(e.space(), conjugated, tol);
        return null_atoms(rotated, tol) == null_atoms(e, tol) ? std::string{} : "null atoms changed";
    });
}

// Random element of span(m).
ComplexMatrix random_element(const AlgebraBasis& m, Rng& rng) {
    ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(m.dim()), static_cast<Eigen::Index>(m.dim()));
    for (const ComplexMatrix& b : m.elements()) {
        out += rng.cnormal() * b;
    }
    return out;
}

void algebra_properties(PropertyRun& run, const Instance& inst, const AlgebraBasis& pvm_algebra,
                        const AlgebraBasis& generated, Rng& rng) {
    const Tolerances& tol = run.tol();
    const SpectralMeasure& e = inst.measure;
    const std::size_t n = e.dim();
    const OperatorSet& x = inst.operators;
    const std::vector<std::size_t> support = support_atoms(e, tol);

    run.check("algebra.double_commutant_idempotence", [&]() -> std::string {
        const OperatorSet y = x.members.empty() ? atom_projections(e) : adjoint_closure(x, tol);
        const AlgebraBasis c2 = commutant(as_operator_set(commutant(y, tol)), tol);
        const AlgebraBasis c4 = commutant(as_operator_set(commutant(as_operator_set(c2), tol)), tol);
        return algebra_equal(c2, c4, tol) ? std::string{} : "Y'' != Y''''";
    });
    run.check("algebra.order_reversal", [&]() -> std::string {
        OperatorSet y = x;
        y.members.push_back(rng.coin(0.5) ? ComplexMatrix(rng.gaussian(n, n))
                                          : spectral_integral(e, random_function(e, support, rng), tol));
        return span_subset(commutant(y, tol), commutant(x, tol), tol) ? std::string{}
                                                                       : "commutant(Y) not inside commutant(X)";
    });
    run.check("algebra.adjoint_symmetry", [&]() -> std::string {
        if (!commutant(adjoint_closure(x, tol), tol).involutive()) {
            return "commutant of an adjoint-closed set is not *-closed";
        }
        // (X')* = (X*)'
        OperatorSet x_star{x.dim, {}};
        for (const ComplexMatrix& t : x.members) {
            x_star.members.push_back(t.adjoint());
        }
        const AlgebraBasis c = commutant(x, tol);
        const AlgebraBasis c_star = commutant(x_star, tol);
        if (c.size() != c_star.size()) {
            return "dim (X')* != dim (X*)'";
        }
        for (const ComplexMatrix& b : c.elements()) {
            if (!contains(c_star, b.adjoint(), tol)) {
                return "(X')* not inside (X*)'";
            }
        }
        return {};
    });
    run.check("algebra.intersection_law", [&]() -> std::string {
        OperatorSet y{n, {}};
        if (rng.coin(0.5)) {
            y = atom_projections(e);
        } else {
            y.members.push_back(rng.hermitian(n));
        }
        OperatorSet both = x;
        both.members.insert(both.members.end(), y.members.begin(), y.members.end());
        const AlgebraBasis lhs = commutant(both, tol);
        const AlgebraBasis rhs = span_intersection(commutant(x, tol), commutant(y, tol), tol);
        return algebra_equal(lhs, rhs, tol) ? std::string{} : "(X u Y)' != X' n Y'";
    });
    run.check("algebra.generated_is_smallest", [&]() -> std::string {
        OperatorSet z = atom_projections(e);
        if (rng.coin(0.5)) {
            z.members.push_back(rng.gaussian(n, n));
        }
        const AlgebraBasis m = generated_algebra(z, tol);
        const OperatorSet inside{n, {random_element(m, rng), random_element(m, rng)}};
        return span_subset(generated_algebra(inside, tol), m, tol) ? std::string{}
                                                                   : "A(X) not inside M although X is";
    });
    run.check("algebra.pvm_dimension", [&]() -> std::string {
        if (pvm_algebra.size() != support.size()) {
            return "dim A(P_E) = " + std::to_string(pvm_algebra.size()) + ", non-null atoms = " +
                   std::to_string(support.size());
        }
        std::vector<ComplexMatrix> atoms;
        for (std::size_t i : support) {
            atoms.push_back(e.projection(i));
        }
        const AlgebraBasis direct = AlgebraBasis::make(n, orthonormalize_hs(atoms, tol), tol);
        return algebra_equal(direct, pvm_algebra, tol) ? std::string{}
                                                       : "A(P_E) != span of the non-null atoms";
    });
    run.check("algebra.pvm_abelian", [&]() -> std::string {
        return is_abelian(pvm_algebra, tol) ? std::string{} : "A(P_E) is not Abelian";
    });
    run.check("algebra.affiliation_is_membership", [&]() -> std::string {
        std::vector<ComplexMatrix> probes = x.members;
        probes.push_back(random_element(pvm_algebra, rng));
        probes.push_back(random_element(generated, rng));
        probes.push_back(rng.gaussian(n, n));
        for (const AlgebraBasis* m : {&pvm_algebra, &generated}) {
            const AlgebraBasis comm = commutant(as_operator_set(*m), tol);
            for (const ComplexMatrix& t : probes) {
                if (commutes_with(t, comm, tol) != contains(*m, t, tol)) {
                    return "affiliation and membership disagree (residual " + fmt(m->residual(t)) + ")";
                }
            }
        }
        return {};
    });
}

void generator_properties(PropertyRun& run, const Instance& inst, const AlgebraBasis& pvm_algebra,
                          const AlgebraBasis& generated, Rng& rng) {
    const Tolerances& tol = run.tol();
    const SpectralMeasure& e = inst.measure;
    const OperatorSet& x = inst.operators;
    const std::size_t n = e.dim();
    const std::vector<std::size_t> support = support_atoms(e, tol);
    const GenerationVerdict verdict = check_generates(e, x, tol);
    const bool all_expressible = std::all_of(verdict.cond1.begin(), verdict.cond1.end(),
                                             [](const SymbolRecovery& r) { return r.expressible; });

    run.check("generation.equivalence", [&]() -> std::string {
        if (verdict.agree()) {
            return {};
        }
        return "criterion " + std::to_string(verdict.criterion_generates) + " vs oracle " +
               std::to_string(verdict.oracle_generates) + " (dims " + std::to_string(verdict.generated_dim) +
               "/" + std::to_string(verdict.target_dim) + ")";
    });
    run.check("generation.expected_verdict", [&]() -> std::string {
        if (!inst.expected || (verdict.criterion_generates == *inst.expected &&
                               verdict.oracle_generates == *inst.expected)) {
            return {};
        }
        return "expected " + std::to_string(*inst.expected) + ", criterion " +
               std::to_string(verdict.criterion_generates) + ", oracle " + std::to_string(verdict.oracle_generates);
    });
    run.check("generation.sufficiency", [&]() -> std::string {
        if (!(all_expressible && verdict.cond2.separating)) {
            return {};
        }
        return span_subset(pvm_algebra, generated, tol) && span_subset(generated, pvm_algebra, tol)
                   ? std::string{}
                   : "conditions hold but A(X) != A(P_E)";
    });
    run.check("generation.necessity", [&]() -> std::string {
        if (!verdict.oracle_generates) {
            return {};
        }
        if (!all_expressible) {
            return "A(X) = A(P_E) but a member is not a spectral integral";
        }
        return verdict.cond2.separating ? std::string{} : "A(X) = A(P_E) but symbols do not separate";
    });
    run.check("generators.quotient_consistency", [&]() -> std::string {
        if (!all_expressible) {
            return {};
        }
        std::vector<MeasurableFunction> symbols;
        for (const SymbolRecovery& r : verdict.cond1) {
            symbols.push_back(*r.symbol);
        }
        const JointEvaluation q = joint_evaluation_pushforward(e, symbols, tol);
        if (q.injective_on_support != verdict.cond2.separating) {
            return "quotient injectivity disagrees with separation";
        }
        const AlgebraBasis quotient_algebra = generated_algebra(atom_projections(q.measure), tol);
        return algebra_equal(quotient_algebra, generated, tol) ? std::string{}
                                                               : "A(X) != A(P_{F*E})";
    });
    run.check("generators.monotonicity", [&]() -> std::string {
        if (all_expressible && verdict.cond2.separating) {
            std::vector<MeasurableFunction> symbols;
            for (const SymbolRecovery& r : verdict.cond1) {
                symbols.push_back(*r.symbol);
            }
            symbols.push_back(random_function(e, support, rng));
            if (!is_separating(e, symbols, tol).separating) {
                return "adding a function broke separation";
            }
        }
        if (verdict.oracle_generates) {
            OperatorSet more = x;
            more.members.push_back(spectral_integral(e, random_function(e, support, rng), tol));
            if (!oracle_generates(e, more, tol)) {
                return "adding a spectral integral broke generation";
            }
            if (n >= 2) {
                more.members.push_back(spectral_integral(e, random_function(e, support, rng), tol) +
                                       off_algebra_perturbation(e, 0.1, rng));
                const GenerationVerdict v = check_generates(e, more, tol);
                if (v.oracle_generates || v.criterion_generates) {
                    return "adding a non-integral member kept generation";
                }
                const AlgebraBasis bigger = generated_algebra(more, tol);
                if (algebra_equal(bigger, pvm_algebra, tol)) {
                    return "A(X u {T}) not detected as different from A(P_E)";
                }
            }
        }
        return {};
    });
    run.check("generators.single_generator", [&]() -> std::string {
        const MeasurableFunction f = single_selfadjoint_generator(e, tol);
        std::vector<double> support_values;
        for (std::size_t i : support) {
            const Complex v = f.value(i);
            if (v.imag() != 0.0 || v.real() < 0.0 || v.real() > 1.0) {
                return "generator value outside [0, 1]";
            }
            support_values.push_back(v.real());
        }
        for (std::size_t j = 1; j < support_values.size(); ++j) {
            if (support_values[j] - support_values[j - 1] <= 10.0 * tol.value_tol) {
                return "generator values not separated";
            }
        }
        const ComplexMatrix j = spectral_integral(e, f, tol);
        if (!is_hermitian(j, tol)) {
            return "generator is not self-adjoint";
        }
        const GenerationVerdict v = check_generates(e, OperatorSet{n, {j}}, tol);
        return v.criterion_generates && v.oracle_generates ? std::string{}
                                                            : "single self-adjoint generator does not generate";
    });
}

void run_instance(const InstanceSpec& spec, const Tolerances& tol, const InstanceFactory& factory,
                  std::vector<CampaignFailure>& failures, std::set<std::string>& names) {
    PropertyRun run(spec, tol, failures, names);
    std::optional<Instance> inst;
    run.check("instance.construction", [&]() -> std::string {
        inst = factory ? factory(spec, tol) : make_scenario(spec, tol);
        inst->operators.validate();
        return {};
    });
    if (!inst) {
        return;
    }
    Rng rng(child_seed(spec.seed, 99));
    numkernel_properties(run, inst->measure.dim(), rng);
    spectral_properties(run, inst->measure, rng);

    std::optional<AlgebraBasis> pvm_algebra;
    std::optional<AlgebraBasis> generated;
    run.check("algebra.construction", [&]() -> std::string {
        pvm_algebra = generated_algebra(atom_projections(inst->measure), tol);
        generated = generated_algebra(inst->operators, tol);
        return {};
    });
    if (!pvm_algebra || !generated) {
        return;
    }
    algebra_properties(run, *inst, *pvm_algebra, *generated, rng);
    generator_properties(run, *inst, *pvm_algebra, *generated, rng);
}

} // namespace

CampaignReport run_campaign(const std::vector<InstanceSpec>& specs, const Tolerances& tol,
                            const InstanceFactory& factory) {
    tol.validate();
    const auto start = std::chrono::steady_clock::now();
    std::vector<std::vector<CampaignFailure>> per_instance(specs.size());
    std::vector<std::set<std::string>> per_names(specs.size());
    const auto count = static_cast<long>(specs.size());

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        run_instance(specs[idx], tol, factory, per_instance[idx], per_names[idx]);
    }

    CampaignReport report;
    report.instances_run = specs.size();
    report.tolerances = tol;
    std::set<std::string> names;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        report.failures.insert(report.failures.end(), per_instance[i].begin(), per_instance[i].end());
        names.insert(per_names[i].begin(), per_names[i].end());
    }
    report.properties_checked.assign(names.begin(), names.end());
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace vnagen
