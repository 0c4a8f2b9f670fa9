#include "vnagen/document.hpp"

#include <cmath>
#include <fstream>
#include <iostream>

namespace vnagen {

namespace {

[[noreturn]] void schema(const std::string& what) { throw Error(ErrorKind::Schema, what); }

void expect(bool ok, const std::string& what) {
    if (!ok) {
        schema(what);
    }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    expect(obj.is_object(), where + ": expected an object");
    const auto it = obj.find(key);
    expect(it != obj.end(), where + ": missing field '" + key + "'");
    return *it;
}

FunctionSpec function_from_json(const Json& j, const std::string& where) {
    const Json& labels = field(j, "labels", where);
    const Json& values = field(j, "values", where);
    expect(labels.is_array() && values.is_array(), where + ": labels and values must be arrays");
    expect(labels.size() == values.size(), where + ": labels and values differ in length");
    FunctionSpec f;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        f.labels.push_back(label_from_json(labels[i]));
        if (values[i].is_string()) {
            expect(values[i] == "undefined", where + ": unknown value marker");
            f.values.emplace_back();
            f.defined.push_back(false);
        } else {
            f.values.push_back(complex_from_json(values[i]));
            f.defined.push_back(true);
        }
    }
    // validates labels and values
    (void)MeasurableFunction(SampleSpace(f.labels), f.values, f.defined);
    return f;
}

} // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex complex_from_json(const Json& j) {
    if (j.is_number()) {
        return {j.get<double>(), 0.0};
    }
    expect(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
           "complex scalar must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

Json label_to_json(const Label& label) {
    if (const auto* s = std::get_if<std::string>(&label)) {
        return *s;
    }
    return complex_to_json(std::get<Complex>(label));
}

Label label_from_json(const Json& j) {
    if (j.is_string()) {
        return j.get<std::string>();
    }
    return complex_from_json(j);
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            row.push_back(complex_to_json(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const Json& j) {
    expect(j.is_array() && !j.empty(), "matrix must be a non-empty array of rows");
    const auto n = static_cast<Eigen::Index>(j.size());
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        expect(row.is_array() && static_cast<Eigen::Index>(row.size()) == n,
               "matrix row " + std::to_string(i) + " has the wrong length");
        for (Eigen::Index c = 0; c < n; ++c) {
            m(i, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
        }
    }
    for (Eigen::Index c = 0; c < n; ++c) {
        for (Eigen::Index i = 0; i < n; ++i) {
            expect(std::isfinite(m(i, c).real()) && std::isfinite(m(i, c).imag()), "matrix entry not finite");
        }
    }
    return m;
}

Document Document::parse(const Json& j, const Tolerances& tol) {
    expect(j.is_object(), "document must be an object");
    const Json& version = field(j, "version", "document");
    expect(version == "1", "unsupported document version");
    const Json& objects = field(j, "objects", "document");
    expect(objects.is_object(), "'objects' must be an object");

    Document doc;
    // Matrices first so operator sets can refer to them by name.
    for (const auto& [name, obj] : objects.items()) {
        const Json& type = field(obj, "type", name);
        expect(type.is_string(), name + ": 'type' must be a string");
        if (type == "matrix") {
            doc.add(name, matrix_from_json(field(obj, "data", name)));
        }
    }
    for (const auto& [name, obj] : objects.items()) {
        const std::string type = obj["type"].get<std::string>();
        if (type == "matrix") {
            continue;
        }
        if (type == "spectral_measure") {
            const Json& atoms = field(obj, "atoms", name);
            expect(atoms.is_array() && !atoms.empty(), name + ": 'atoms' must be a non-empty array");
            std::vector<Label> labels;
            std::vector<ComplexMatrix> projections;
            for (const Json& atom : atoms) {
                labels.push_back(label_from_json(field(atom, "label", name)));
                projections.push_back(matrix_from_json(field(atom, "projection", name)));
                expect(projections.back().rows() == projections.front().rows(),
                       name + ": projections differ in size");
            }
            doc.add(name, SpectralMeasure::make(SampleSpace(std::move(labels)), std::move(projections), tol));
        } else if (type == "function") {
            doc.add(name, function_from_json(obj, name));
        } else if (type == "operator_set") {
            const Json& dim = field(obj, "dim", name);
            expect(dim.is_number_unsigned() && dim.get<std::size_t>() >= 1, name + ": 'dim' must be >= 1");
            const Json& members = field(obj, "members", name);
            expect(members.is_array(), name + ": 'members' must be an array");
            OperatorSet x{dim.get<std::size_t>(), {}};
            for (const Json& m : members) {
                x.members.push_back(m.is_string() ? doc.matrix(m.get<std::string>()) : matrix_from_json(m));
                expect(static_cast<std::size_t>(x.members.back().rows()) == x.dim,
                       name + ": member does not match 'dim'");
            }
            doc.add(name, std::move(x));
        } else {
            schema(name + ": unknown object type '" + type + "'");
        }
    }
    return doc;
}

Document Document::load(const std::string& path, const Tolerances& tol) {
    Json j;
    try {
        if (path == "-") {
            j = Json::parse(std::cin);
        } else {
            std::ifstream in(path);
            expect(in.good(), "cannot open '" + path + "'");
            j = Json::parse(in);
        }
    } catch (const Json::exception& ex) {
        schema(std::string("invalid JSON: ") + ex.what());
    }
    return parse(j, tol);
}

void Document::claim(const std::string& name) {
    expect(!matrices_.contains(name) && !measures_.contains(name) && !functions_.contains(name) &&
               !sets_.contains(name),
           "duplicate object name '" + name + "'");
}

void Document::add(const std::string& name, ComplexMatrix m) {
    claim(name);
    matrices_.emplace(name, std::move(m));
}
void Document::add(const std::string& name, SpectralMeasure e) {
    claim(name);
    measures_.emplace(name, std::move(e));
}
void Document::add(const std::string& name, FunctionSpec f) {
    claim(name);
    functions_.emplace(name, std::move(f));
}
void Document::add(const std::string& name, OperatorSet x) {
    claim(name);
    sets_.emplace(name, std::move(x));
}

namespace {

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, const std::string& name, const char* type) {
    const auto it = map.find(name);
    expect(it != map.end(), "no " + std::string(type) + " named '" + name + "'");
    return it->second;
}

} // namespace

const ComplexMatrix& Document::matrix(const std::string& name) const { return lookup(matrices_, name, "matrix"); }
const SpectralMeasure& Document::measure(const std::string& name) const {
    return lookup(measures_, name, "spectral_measure");
}
const FunctionSpec& Document::function(const std::string& name) const {
    return lookup(functions_, name, "function");
}
const OperatorSet& Document::operator_set(const std::string& name) const {
    return lookup(sets_, name, "operator_set");
}

Json Document::to_json() const {
    Json objects = Json::object();
    for (const auto& [name, m] : matrices_) {
        objects[name] = {{"type", "matrix"}, {"data", matrix_to_json(m)}};
    }
    for (const auto& [name, e] : measures_) {
        objects[name] = measure_to_json(e);
    }
    for (const auto& [name, f] : functions_) {
        objects[name] = function_to_json(f);
    }
    for (const auto& [name, x] : sets_) {
        Json members = Json::array();
        for (const ComplexMatrix& t : x.members) {
            members.push_back(matrix_to_json(t));
        }
        objects[name] = {{"type", "operator_set"}, {"dim", x.dim}, {"members", std::move(members)}};
    }
    return {{"version", "1"}, {"objects", std::move(objects)}};
}

MeasurableFunction bind(const FunctionSpec& f, const SampleSpace& space) {
    if (f.labels.size() != space.size()) {
        throw Error(ErrorKind::UnknownAtom, "function and measure have different atom sets");
    }
    std::vector<Complex> values(space.size());
    std::vector<bool> defined(space.size(), false);
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
        const std::size_t at = space.index_of(f.labels[i]);
        values[at] = f.values[i];
        defined[at] = f.defined[i];
    }
    return MeasurableFunction(space, std::move(values), std::move(defined));
}

Json measure_to_json(const SpectralMeasure& e) {
    Json atoms = Json::array();
    for (std::size_t i = 0; i < e.atom_count(); ++i) {
        atoms.push_back({{"label", label_to_json(e.space().atom(i))}, {"projection", matrix_to_json(e.projection(i))}});
    }
    return {{"type", "spectral_measure"}, {"atoms", std::move(atoms)}};
}

Json function_to_json(const FunctionSpec& f) {
    Json labels = Json::array();
    Json values = Json::array();
    for (std::size_t i = 0; i < f.labels.size(); ++i) {
        labels.push_back(label_to_json(f.labels[i]));
        values.push_back(f.defined[i] ? complex_to_json(f.values[i]) : Json("undefined"));
    }
    return {{"type", "function"}, {"labels", std::move(labels)}, {"values", std::move(values)}};
}

Json tolerances_to_json(const Tolerances& tol) {
    return {{"rank_tol", tol.rank_tol}, {"residual_tol", tol.residual_tol}, {"value_tol", tol.value_tol}};
}

Json algebra_to_json(const AlgebraBasis& a) {
    Json basis = Json::array();
    for (const ComplexMatrix& b : a.elements()) {
        basis.push_back(matrix_to_json(b));
    }
    return {{"n", a.dim()}, {"dimension", a.size()}, {"involutive", a.involutive()}, {"basis", std::move(basis)}};
}

Json separation_to_json(const SeparationReport& r, const SpectralMeasure& e) {
    auto labels = [&](const std::vector<std::size_t>& idx) {
        Json out = Json::array();
        for (std::size_t i : idx) {
            out.push_back(label_to_json(e.space().atom(i)));
        }
        return out;
    };
    Json out = {{"separating", r.separating},
                {"null_atoms", labels(r.null_atoms_used)},
                {"borderline_atoms", labels(r.borderline_atoms)},
                {"witness_pair", nullptr}};
    if (r.witness_pair) {
        out["witness_pair"] = labels({r.witness_pair->first, r.witness_pair->second});
    }
    return out;
}

Json verdict_to_json(const GenerationVerdict& v, const SpectralMeasure& e) {
    Json cond1 = Json::array();
    for (const SymbolRecovery& r : v.cond1) {
        Json row = {{"expressible", r.expressible}, {"residual", r.residual}, {"symbol", nullptr}};
        if (r.symbol) {
            FunctionSpec spec{e.space().atoms(), r.symbol->values(), r.symbol->defined_mask()};
            row["symbol"] = function_to_json(spec)["values"];
        }
        cond1.push_back(std::move(row));
    }
    return {{"cond1", std::move(cond1)},
            {"cond2", separation_to_json(v.cond2, e)},
            {"criterion_generates", v.criterion_generates},
            {"oracle_generates", v.oracle_generates},
            {"agree", v.agree()},
            {"generated_dim", v.generated_dim},
            {"target_dim", v.target_dim}};
}

Json report_to_json(const CampaignReport& r, bool include_elapsed) {
    Json failures = Json::array();
    for (const CampaignFailure& f : r.failures) {
        failures.push_back({{"property", f.property},
                            {"diagnostic", f.diagnostic},
                            {"spec",
                             {{"seed", f.spec.seed},
                              {"dim", f.spec.dim},
                              {"atom_count", f.spec.atom_count},
                              {"null_atom_count", f.spec.null_atom_count},
                              {"scenario", std::string(to_string(f.spec.scenario))}}}});
    }
    Json out = {{"instances_run", r.instances_run},
                {"passed", r.passed()},
                {"failures", std::move(failures)},
                {"properties_checked", r.properties_checked},
                {"tolerances", tolerances_to_json(r.tolerances)}};
    if (include_elapsed) {
        out["elapsed_seconds"] = r.elapsed_seconds;
    }
    return out;
}

} // namespace vnagen
