// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "vnagen/document.hpp"
#include "vnagen/generators.hpp"
#include "vnagen/harness.hpp"

using namespace vnagen;

namespace {

constexpr std::uint64_t kSeed = 1;
constexpr std::size_t kCampaign = 240;

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Outcome& o) {
    std::printf("%s %2d %s: %s\n", o.ok ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
}

std::string fmt(double x) { return format_real(x); }

class Draw {
public:
    explicit Draw(std::uint64_t seed) : gen_(seed) {}
    std::size_t between(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(gen_);
    }
    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
    Complex cnormal() {
        std::normal_distribution<double> n;
        return {n(gen_), n(gen_)};
    }
    std::uint64_t seed() { return gen_(); }

    SpectralMeasure measure(std::size_t max_dim = 8, std::size_t max_atoms = 6) {
        const std::size_t n = between(1, max_dim);
        const std::size_t m = between(1, max_atoms);
        const std::size_t nulls = between(0, m - 1);
        const std::size_t k = std::min(n, m - nulls);
        return random_pvm(seed(), n, k + nulls, nulls);
    }

    // values on every atom; null atoms get junk, which must not matter
    MeasurableFunction function(const SpectralMeasure& e) {
        std::vector<Complex> v;
        for (std::size_t i = 0; i < e.atom_count(); ++i) {
            v.push_back(uniform(0.1, 5.0) * cnormal());
        }
        return MeasurableFunction(e.space(), std::move(v));
    }

private:
    std::mt19937_64 gen_;
};

double norm(const ComplexMatrix& a) { return operator_norm(a); }

ComplexMatrix normal_matrix(Draw& d, std::size_t n, const std::vector<Complex>& eigenvalues) {
    const ComplexMatrix u = random_unitary(d.seed(), n);
    ComplexMatrix diag = ComplexMatrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        diag(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = eigenvalues[i];
    }
    return u * diag * u.adjoint();
}

// Criterion 1, recomputed outside the harness from the same specs.
Outcome criterion_equivalence(const std::vector<InstanceSpec>& specs, const CampaignReport& campaign) {
    Outcome o;
    std::set<Scenario> scenarios;
    std::size_t disagree = 0, wrong = 0, expected = 0, nulls = 0, wide = 0;
    for (const InstanceSpec& spec : specs) {
        scenarios.insert(spec.scenario);
        const Instance inst = make_scenario(spec);
        const GenerationVerdict v = check_generates(inst.measure, inst.operators);
        disagree += v.agree() ? 0 : 1;
        if (inst.expected) {
            ++expected;
            wrong += (v.criterion_generates == *inst.expected && v.oracle_generates == *inst.expected) ? 0 : 1;
        }
        nulls += spec.null_atom_count > 0 ? 1 : 0;
        for (const ComplexMatrix& p : inst.measure.projections()) {
            if (p.trace().real() > 1.5) {
                ++wide;
                break;
            }
        }
    }
    std::size_t harness_failures = 0;
    for (const CampaignFailure& f : campaign.failures) {
        if (f.property.rfind("generation.", 0) == 0 || f.property == "instance.construction") {
            ++harness_failures;
        }
    }
    o.ok = specs.size() >= 200 && scenarios.size() == 6 && nulls > 0 && wide > 0 && disagree == 0 && wrong == 0 &&
           harness_failures == 0 && campaign.elapsed_seconds < 60.0;
    o.detail = std::to_string(specs.size()) + " instances, " + std::to_string(scenarios.size()) +
               " scenarios, " + std::to_string(nulls) + " with null atoms, " + std::to_string(wide) +
               " with rank>=2 atoms; disagreements " + std::to_string(disagree) + ", expected-verdict misses " +
               std::to_string(wrong) + "/" + std::to_string(expected) + ", harness generation failures " +
               std::to_string(harness_failures) + ", campaign " + fmt(campaign.elapsed_seconds) + " s";
    return o;
}

Outcome algebra_laws(Draw& d) {
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const SpectralMeasure e = d.measure();
        const MeasurableFunction f = d.function(e), g = d.function(e);
        const ComplexMatrix jf = spectral_integral(e, f), jg = spectral_integral(e, g);
        const double scale = 1.0 + norm(jf) * norm(jg);
        worst = std::max(worst, norm(spectral_integral(e, pointwise_product(f, g)) - jf * jg) / scale);
        worst = std::max(worst, norm(spectral_integral(e, pointwise_sum(f, g)) - (jf + jg)) / scale);
    }
    return {worst <= 1e-8, "100 cases, worst relative residual " + fmt(worst)};
}

Outcome norm_formula(Draw& d) {
    double worst = 0.0;
    for (int c = 0; c < 100; ++c) {
        const SpectralMeasure e = d.measure();
        const MeasurableFunction f = d.function(e);
        double sup = 0.0;
        for (std::size_t i : support_atoms(e)) {
            sup = std::max(sup, std::abs(f.value(i)));
        }
        worst = std::max(worst, std::abs(norm(spectral_integral(e, f)) - sup) / (1.0 + sup));
    }
    return {worst <= 1e-8, "100 cases, worst relative gap " + fmt(worst)};
}

// phi: atoms -> a palette of complex points (collisions on purpose);
// h: any function of the palette point.
Outcome pushforward_laws(Draw& d) {
    double worst_push = 0.0, worst_measure = 0.0, worst_comp = 0.0;
    const auto h = [](Complex z) { return z * z - std::conj(z) + Complex(0.5, -1.0); };
    for (int c = 0; c < 100; ++c) {
        const SpectralMeasure e = d.measure();
        const std::size_t palette_size = d.between(1, e.atom_count());
        std::vector<Complex> palette;
        std::vector<Label> labels;
        while (palette.size() < palette_size) {
            const Complex z(static_cast<double>(d.between(0, 6)) - 3.0, static_cast<double>(d.between(0, 4)) - 2.0);
            if (std::find(palette.begin(), palette.end(), z) == palette.end()) {
                palette.push_back(z);
                labels.emplace_back(z);
            }
        }
        AtomMap phi{SampleSpace(labels), {}};
        std::vector<Complex> phi_values;
        for (std::size_t i = 0; i < e.atom_count(); ++i) {
            phi.image.push_back(d.between(0, palette_size - 1));
            phi_values.push_back(palette[phi.image.back()]);
        }
        const SpectralMeasure pushed = push_forward(e, phi);
        std::vector<Complex> h_on_palette;
        for (Complex z : palette) {
            h_on_palette.push_back(h(z));
        }
        const MeasurableFunction hf(phi.target, h_on_palette);

        // J^{phi*E}_h = J^E_{h o phi}
        const ComplexMatrix lhs = spectral_integral(pushed, hf);
        const ComplexMatrix rhs = spectral_integral(e, pull_back(hf, phi, e.space()));
        worst_push = std::max(worst_push, norm(lhs - rhs) / (1.0 + norm(rhs)));

        // spectral measure of J^E_phi is phi*E (on the atoms phi*E charges)
        const ComplexMatrix t = spectral_integral(e, MeasurableFunction(e.space(), phi_values));
        const SpectralMeasure et = spectral_measure_of_normal(t);
        const std::vector<std::size_t> charged = support_atoms(pushed);
        double gap = charged.size() == et.atom_count() ? 0.0 : 1.0;
        for (std::size_t k = 0; k < et.atom_count(); ++k) {
            const Complex label = std::get<Complex>(et.space().atom(k));
            double best = 1.0;
            for (std::size_t j : charged) {
                if (std::abs(label - palette[j]) <= 1e-8 * (1.0 + norm(t))) {
                    best = norm(et.projection(k) - pushed.projection(j));
                }
            }
            gap = std::max(gap, best);
        }
        worst_measure = std::max(worst_measure, gap);

        // h(J^E_phi) = J^{phi*E}_h
        const ComplexMatrix calc = function_calculus(t, std::function<Complex(Complex)>(h));
        worst_comp = std::max(worst_comp, norm(calc - lhs) / (1.0 + norm(lhs)));
    }
    const double worst = std::max({worst_push, worst_measure, worst_comp});
    return {worst <= 1e-8, "100 cases, worst push-forward " + fmt(worst_push) + ", spectral measure of J_phi " +
                               fmt(worst_measure) + ", composition " + fmt(worst_comp)};
}

Outcome chi_round_trip(Draw& d) {
    double worst = 0.0;
    const std::function<Complex(Complex)> to_disc = [](Complex z) { return chi(z); };
    const std::function<Complex(Complex)> back = [](Complex z) { return chi_inv(z); };
    for (int c = 0; c < 50; ++c) {
        const std::size_t n = d.between(1, 8);
        std::vector<Complex> eig;
        for (std::size_t i = 0; i < n; ++i) {
            Complex z = d.cnormal();
            eig.push_back(z / std::abs(z) * d.uniform(0.0, 10.0));
        }
        if (n > 2) {
            eig[1] = eig[0]; // a repeated eigenvalue
        }
        const ComplexMatrix t = normal_matrix(d, n, eig);
        const ComplexMatrix r = function_calculus(function_calculus(t, to_disc), back);
        worst = std::max(worst, norm(r - t) / (1.0 + norm(t)));
    }
    return {worst <= 1e-7, "50 normal matrices with ||T|| <= 10, worst relative error " + fmt(worst)};
}

Outcome single_generator(const std::vector<InstanceSpec>& specs) {
    std::size_t bad = 0;
    for (const InstanceSpec& spec : specs) {
        const SpectralMeasure e = make_scenario(spec).measure;
        const ComplexMatrix t = spectral_integral(e, single_selfadjoint_generator(e));
        const GenerationVerdict v = check_generates(e, OperatorSet{e.dim(), {t}});
        bad += (v.criterion_generates && v.oracle_generates && is_hermitian(t)) ? 0 : 1;
    }
    return {bad == 0, std::to_string(specs.size()) + " campaign measures, " + std::to_string(bad) + " failures"};
}

Outcome exponential(Draw& d) {
    std::size_t bad = 0, cases = 0;
    while (cases < 20) {
        const std::size_t n = d.between(1, 6);
        std::vector<Complex> eig;
        for (std::size_t i = 0; i < n; ++i) {
            eig.push_back(d.between(0, 2) == 0 && i > 0 ? eig[i - 1] : Complex(d.uniform(-2, 2), d.uniform(-2, 2)));
        }
        const Complex dir = d.cnormal();
        const Complex lambda = d.uniform(0.3, 1.5) * dir / std::abs(dir);
        bool usable = true;
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < a; ++b) {
                if (eig[a] == eig[b]) {
                    continue;
                }
                usable = usable && std::abs(eig[a] - eig[b]) > 1e-3 &&
                         std::abs(std::exp(lambda * eig[a]) - std::exp(lambda * eig[b])) > 1e-3;
            }
        }
        if (!usable) {
            continue;
        }
        ++cases;
        const ComplexMatrix t = normal_matrix(d, n, eig);
        const AlgebraBasis family = generated_algebra(exponential_family(t, {lambda}));
        const AlgebraBasis of_t = generated_algebra(OperatorSet{n, {t}});
        bad += algebra_equal(family, of_t) ? 0 : 1;
    }
    return {bad == 0, "20 normal matrices, " + std::to_string(bad) + " with A(exp(lambda T)) != A(T)"};
}

Outcome binary_functions() {
    std::vector<ComplexMatrix> ps;
    for (Eigen::Index i = 0; i < 3; ++i) {
        ComplexMatrix p = ComplexMatrix::Zero(3, 3);
        p(i, i) = 1.0;
        ps.push_back(p);
    }
    const SpectralMeasure e = SpectralMeasure::make(SampleSpace::named(3), ps);
    std::size_t bad = 0;
    for (unsigned subset = 0; subset < 256; ++subset) {
        OperatorSet x{3, {}};
        bool separated[3][3] = {};
        unsigned tuple[3] = {}; // bit f set when function f is 1 on the atom
        for (unsigned f = 0; f < 8; ++f) {
            if (!(subset & (1u << f))) {
                continue;
            }
            const int v[3] = {int(f & 1u), int((f >> 1) & 1u), int((f >> 2) & 1u)};
            ComplexMatrix j = ComplexMatrix::Zero(3, 3);
            for (int i = 0; i < 3; ++i) {
                j(i, i) = v[i];
                tuple[i] |= static_cast<unsigned>(v[i]) << f;
                for (int k = 0; k < 3; ++k) {
                    separated[i][k] = separated[i][k] || v[i] != v[k];
                }
            }
            x.members.push_back(j);
        }
        const bool brute = separated[0][1] && separated[0][2] && separated[1][2];
        // the generated diagonal algebra has one dimension per distinct value tuple
        const std::size_t classes = std::set<unsigned>(tuple, tuple + 3).size();
        const GenerationVerdict v = check_generates(e, x);
        bad += (v.criterion_generates == brute && v.oracle_generates == brute && v.generated_dim == classes)
                   ? 0
                   : 1;
    }
    return {bad == 0, "256 subsets of the 8 binary functions, " + std::to_string(bad) + " mismatches"};
}

Outcome structural(const CampaignReport& campaign) {
    const std::vector<std::string> names{"algebra.double_commutant_idempotence", "algebra.pvm_dimension",
                                         "algebra.pvm_abelian", "algebra.affiliation_is_membership"};
    std::size_t bad = 0, missing = 0;
    for (const std::string& name : names) {
        if (std::find(campaign.properties_checked.begin(), campaign.properties_checked.end(), name) ==
            campaign.properties_checked.end()) {
            ++missing;
        }
        for (const CampaignFailure& f : campaign.failures) {
            bad += f.property == name ? 1 : 0;
        }
    }
    return {bad == 0 && missing == 0, std::to_string(names.size()) + " properties over " +
                                          std::to_string(campaign.instances_run) + " instances, " +
                                          std::to_string(bad) + " failures"};
}

} // namespace

int main() {
    const auto start = std::chrono::steady_clock::now();
    const std::vector<InstanceSpec> specs = default_campaign_specs(kSeed, kCampaign);
    const CampaignReport first = run_campaign(specs);
    Draw d(20240601);

    report(1, "generation criterion equals bicommutant oracle", criterion_equivalence(specs, first));
    report(2, "spectral integral is a homomorphism", algebra_laws(d));
    report(3, "norm of J_f is the essential sup", norm_formula(d));
    report(4, "push-forward and composition laws", pushforward_laws(d));
    report(5, "chi round trip", chi_round_trip(d));
    report(6, "single self-adjoint generator", single_generator(specs));
    report(7, "exponential family generates A(T)", exponential(d));
    report(8, "binary functions on three atoms", binary_functions());
    report(9, "structural invariants across the campaign", structural(first));

    const CampaignReport second = run_campaign(specs);
    const bool same = report_to_json(first).dump() == report_to_json(second).dump();
    report(10, "campaign determinism", {same, same ? "two runs, identical reports" : "reports differ"});

    const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%d of 10 criteria failed, %s s\n", failures, fmt(total).c_str());
    return failures == 0 ? 0 : 1;
}
