#pragma once
// JSON input/output documents.
//
//   {"version": "1",
//    "objects": {
//      "T":  {"type": "matrix", "data": [[[re, im], ...], ...]},
//      "E":  {"type": "spectral_measure",
//             "atoms": [{"label": "a" | [re, im], "projection": <matrix>}, ...]},
//      "f":  {"type": "function", "labels": [...], "values": [[re, im] | "undefined", ...]},
//      "X":  {"type": "operator_set", "dim": n, "members": [<matrix> | "T", ...]}}}
//
// A bare number is accepted wherever a complex scalar is expected.
#include <map>
#include <string>

#include <json.hpp>

#include "vnagen/algebra.hpp"
#include "vnagen/generators.hpp"
#include "vnagen/harness.hpp"
#include "vnagen/spectral.hpp"

namespace vnagen {

using Json = nlohmann::json;

// Per-atom values keyed by label, bound to a measure's space on use.
struct FunctionSpec {
    std::vector<Label> labels;
    std::vector<Complex> values;
    std::vector<bool> defined;
};

class Document {
public:
    // Throws Error(Schema) on malformed input and the library's own errors
    // (e.g. InvalidMeasure) when a payload breaks an invariant.
    static Document parse(const Json& j, const Tolerances& tol = {});
    static Document load(const std::string& path, const Tolerances& tol = {});

    // Throw Schema when the name is missing or has another type.
    const ComplexMatrix& matrix(const std::string& name) const;
    const SpectralMeasure& measure(const std::string& name) const;
    const FunctionSpec& function(const std::string& name) const;
    const OperatorSet& operator_set(const std::string& name) const;

    void add(const std::string& name, ComplexMatrix m);
    void add(const std::string& name, SpectralMeasure e);
    void add(const std::string& name, FunctionSpec f);
    void add(const std::string& name, OperatorSet x);

    // Canonical form: sorted keys, round-trip doubles.
    Json to_json() const;

private:
    void claim(const std::string& name);

    std::map<std::string, ComplexMatrix> matrices_;
    std::map<std::string, SpectralMeasure> measures_;
    std::map<std::string, FunctionSpec> functions_;
    std::map<std::string, OperatorSet> sets_;
};

// Reorders f onto `space`. Throws UnknownAtom when the label sets differ.
MeasurableFunction bind(const FunctionSpec& f, const SampleSpace& space);

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);
Json label_to_json(const Label& label);
Label label_from_json(const Json& j);
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j);

Json measure_to_json(const SpectralMeasure& e);
Json function_to_json(const FunctionSpec& f);
Json tolerances_to_json(const Tolerances& tol);
Json algebra_to_json(const AlgebraBasis& a);
Json verdict_to_json(const GenerationVerdict& v, const SpectralMeasure& e);
Json separation_to_json(const SeparationReport& r, const SpectralMeasure& e);
// elapsed_seconds is left out unless asked for, so reports compare byte for byte.
Json report_to_json(const CampaignReport& r, bool include_elapsed = false);

} // namespace vnagen
