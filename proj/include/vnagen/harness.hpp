#pragma once

// Seeded random instances and the property campaign run over them.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vnagen/algebra.hpp"
#include "vnagen/generators.hpp"
#include "vnagen/spectral.hpp"

namespace vnagen {

enum class Scenario {
    GeneratingIntegrals,
    NonSeparatingIntegrals,
    NonIntegralMember,
    Mixed,
    ExponentialFamily,
    SingleGenerator,
};

inline constexpr Scenario kAllScenarios[] = {
    Scenario::GeneratingIntegrals, Scenario::NonSeparatingIntegrals, Scenario::NonIntegralMember,
    Scenario::Mixed,               Scenario::ExponentialFamily,      Scenario::SingleGenerator,
};

std::string_view to_string(Scenario s);
// Throws InvalidArgument for unknown names.
Scenario scenario_from_string(std::string_view name);

struct InstanceSpec {
    std::uint64_t seed = 0;
    std::size_t dim = 1;
    std::size_t atom_count = 1;
    std::size_t null_atom_count = 0;
    Scenario scenario = Scenario::GeneratingIntegrals;

    // Throws InfeasibleSpec.
    void validate() const;
};

struct Instance {
    SpectralMeasure measure;
    OperatorSet operators;
    std::optional<bool> expected;
};

struct CampaignFailure {
    InstanceSpec spec;
    std::string property;
    std::string diagnostic;
};

struct CampaignReport {
    std::size_t instances_run = 0;
    std::vector<CampaignFailure> failures;
    std::vector<std::string> properties_checked; // sorted, distinct
    Tolerances tolerances;
    double elapsed_seconds = 0.0;

    bool passed() const { return failures.empty(); }
};

// splitmix64 finaliser of (seed, index); used for every child stream.
std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index);

// Haar-like unitary from the QR factorisation of a complex Gaussian matrix.
ComplexMatrix random_unitary(std::uint64_t seed, std::size_t n);

// Partitions the columns of a random unitary into atom_count - null_count
// nonempty groups; null atoms (at random positions) get the zero projection.
// Throws InfeasibleSpec.
SpectralMeasure random_pvm(std::uint64_t seed, std::size_t n, std::size_t atom_count,
                           std::size_t null_count, const Tolerances& tol = {});

// Throws InfeasibleSpec.
Instance make_scenario(const InstanceSpec& spec, const Tolerances& tol = {});

// Deterministic spec list covering every requested scenario, null atoms,
// rank >= 2 atoms, and the n = 1 and m = 1 edge cases.
std::vector<InstanceSpec> default_campaign_specs(std::uint64_t seed, std::size_t count,
                                                 const std::vector<Scenario>& scenarios = {});

using InstanceFactory = std::function<Instance(const InstanceSpec&, const Tolerances&)>;

// Runs every property on every instance. Failures are collected, not thrown;
// an instance that cannot be built is reported under "instance.construction".
CampaignReport run_campaign(const std::vector<InstanceSpec>& specs, const Tolerances& tol = {},
                            const InstanceFactory& factory = {});

} // namespace vnagen
