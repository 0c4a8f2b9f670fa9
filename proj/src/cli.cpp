#include "vnagen/cli.hpp"

#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include "vnagen/document.hpp"

namespace vnagen::cli {

namespace {

std::string num(Complex z) { return label_to_string(Label(z)); }

std::string real(double x) { return format_real(x); }

void print_matrix(std::ostream& out, const ComplexMatrix& m, const std::string& indent) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        out << indent << "[";
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            out << (j ? ", " : "") << num(m(i, j));
        }
        out << "]\n";
    }
}

void print_tolerances(std::ostream& out, const Tolerances& tol) {
    out << "tolerances: rank_tol=" << real(tol.rank_tol) << " residual_tol=" << real(tol.residual_tol)
        << " value_tol=" << real(tol.value_tol) << "\n";
}

struct Options {
    Tolerances tol;
    std::string format = "text";
    std::string input;
    std::string set;
    std::string measure;
    std::string matrix;
    std::vector<std::string> functions;
    bool adjoint_close = false;
    std::uint64_t seed = 1;
    std::size_t count = 200;
    std::vector<std::string> scenarios;
    std::string out_path;
};

int emit_algebra(const AlgebraBasis& a, const Options& o, std::ostream& out) {
    if (o.format == "json") {
        Json j = algebra_to_json(a);
        j["tolerances"] = tolerances_to_json(o.tol);
        out << j.dump(2) << "\n";
        return kOk;
    }
    out << "dimension " << a.size() << "\n";
    for (std::size_t k = 0; k < a.size(); ++k) {
        out << "basis " << k << ":\n";
        print_matrix(out, a.elements()[k], "  ");
    }
    print_tolerances(out, o.tol);
    return kOk;
}

std::vector<MeasurableFunction> bound_functions(const Document& doc, const SpectralMeasure& e,
                                                const Options& o) {
    std::vector<MeasurableFunction> fs;
    for (const std::string& name : o.functions) {
        fs.push_back(bind(doc.function(name), e.space()));
    }
    return fs;
}

int cmd_commutant(const Options& o, bool bicomm, std::ostream& out) {
    const Document doc = Document::load(o.input, o.tol);
    OperatorSet x = doc.operator_set(o.set);
    if (o.adjoint_close) {
        x = adjoint_closure(x, o.tol);
    }
    return emit_algebra(bicomm ? bicommutant(x, o.tol) : commutant(x, o.tol), o, out);
}

int cmd_check_generates(const Options& o, std::ostream& out) {
    const Document doc = Document::load(o.input, o.tol);
    const SpectralMeasure& e = doc.measure(o.measure);
    const GenerationVerdict v = check_generates(e, doc.operator_set(o.set), o.tol);
    if (o.format == "json") {
        Json j = verdict_to_json(v, e);
        j["tolerances"] = tolerances_to_json(o.tol);
        out << j.dump(2) << "\n";
    } else {
        out << "cond1 (member: expressible, residual)\n";
        for (std::size_t k = 0; k < v.cond1.size(); ++k) {
            out << "  " << k << ": " << (v.cond1[k].expressible ? "yes" : "no") << ", "
                << real(v.cond1[k].residual) << "\n";
        }
        out << "cond2: " << (v.cond2.separating ? "separating" : "not separating");
        if (v.cond2.witness_pair) {
            out << ", witness pair (" << label_to_string(e.space().atom(v.cond2.witness_pair->first)) << ", "
                << label_to_string(e.space().atom(v.cond2.witness_pair->second)) << ")";
        }
        out << "\ncriterion: " << (v.criterion_generates ? "generates" : "does not generate")
            << "\noracle: " << (v.oracle_generates ? "generates" : "does not generate")
            << "\ndim A(X) = " << v.generated_dim << ", dim A(P_E) = " << v.target_dim << "\n";
        print_tolerances(out, o.tol);
    }
    if (!v.agree()) {
        return kDisagreement;
    }
    return v.oracle_generates ? kOk : kNegative;
}

int cmd_separate(const Options& o, std::ostream& out) {
    const Document doc = Document::load(o.input, o.tol);
    const SpectralMeasure& e = doc.measure(o.measure);
    const SeparationReport r = is_separating(e, bound_functions(doc, e, o), o.tol);
    if (o.format == "json") {
        Json j = separation_to_json(r, e);
        j["tolerances"] = tolerances_to_json(o.tol);
        out << j.dump(2) << "\n";
    } else {
        out << (r.separating ? "separating" : "not separating");
        if (r.witness_pair) {
            out << ", witness pair (" << label_to_string(e.space().atom(r.witness_pair->first)) << ", "
                << label_to_string(e.space().atom(r.witness_pair->second)) << ")";
        }
        out << "\n";
        print_tolerances(out, o.tol);
    }
    return r.separating ? kOk : kNegative;
}

int cmd_spectral_measure(const Options& o, std::ostream& out) {
    const Document doc = Document::load(o.input, o.tol);
    const ComplexMatrix& t = doc.matrix(o.matrix);
    const SpectralMeasure e = spectral_measure_of_normal(t, o.tol);
    ComplexMatrix recon = ComplexMatrix::Zero(t.rows(), t.cols());
    for (std::size_t k = 0; k < e.atom_count(); ++k) {
        recon += std::get<Complex>(e.space().atom(k)) * e.projection(k);
    }
    const double residual = operator_norm(t - recon);
    if (o.format == "json") {
        Json j = measure_to_json(e);
        Json mult = Json::array();
        for (const ComplexMatrix& p : e.projections()) {
            mult.push_back(static_cast<long>(std::lround(p.trace().real())));
        }
        j["multiplicities"] = std::move(mult);
        j["residual"] = residual;
        j["tolerances"] = tolerances_to_json(o.tol);
        out << j.dump(2) << "\n";
        return kOk;
    }
    for (std::size_t k = 0; k < e.atom_count(); ++k) {
        out << "eigenvalue " << label_to_string(e.space().atom(k)) << " multiplicity "
            << std::lround(e.projection(k).trace().real()) << "\n";
        print_matrix(out, e.projection(k), "  ");
    }
    out << "residual " << real(residual) << "\n";
    print_tolerances(out, o.tol);
    return kOk;
}

int cmd_pushforward(const Options& o, std::ostream& out) {
    const Document doc = Document::load(o.input, o.tol);
    const SpectralMeasure& e = doc.measure(o.measure);
    const JointEvaluation q = joint_evaluation_pushforward(e, bound_functions(doc, e, o), o.tol);
    if (o.format == "json") {
        Json map = Json::object();
        for (std::size_t i = 0; i < q.map.size(); ++i) {
            const Json target = q.map[i] ? label_to_json(q.measure.space().atom(*q.map[i])) : Json(nullptr);
            map[label_to_string(e.space().atom(i))] = target;
        }
        Json j = {{"measure", measure_to_json(q.measure)},
                  {"map", std::move(map)},
                  {"injective_on_support", q.injective_on_support},
                  {"tolerances", tolerances_to_json(o.tol)}};
        out << j.dump(2) << "\n";
        return kOk;
    }
    for (std::size_t i = 0; i < q.map.size(); ++i) {
        out << label_to_string(e.space().atom(i)) << " -> "
            << (q.map[i] ? label_to_string(q.measure.space().atom(*q.map[i])) : std::string("(null atom)"))
            << "\n";
    }
    out << "injective on support: " << (q.injective_on_support ? "yes" : "no") << "\n";
    for (std::size_t k = 0; k < q.measure.atom_count(); ++k) {
        out << "atom " << label_to_string(q.measure.space().atom(k)) << ":\n";
        print_matrix(out, q.measure.projection(k), "  ");
    }
    print_tolerances(out, o.tol);
    return kOk;
}

int cmd_campaign(const Options& o, std::ostream& out) {
    std::vector<Scenario> scenarios;
    for (const std::string& s : o.scenarios) {
        scenarios.push_back(scenario_from_string(s));
    }
    const CampaignReport report = run_campaign(default_campaign_specs(o.seed, o.count, scenarios), o.tol);
    const Json j = report_to_json(report);
    if (!o.out_path.empty()) {
        std::ofstream file(o.out_path);
        if (!file) {
            throw Error(ErrorKind::Schema, "cannot write '" + o.out_path + "'");
        }
        file << j.dump(2) << "\n";
    }
    if (o.format == "json") {
        out << j.dump(2) << "\n";
    } else {
        out << "instances " << report.instances_run << ", properties " << report.properties_checked.size()
            << ", failures " << report.failures.size() << ", elapsed " << report.elapsed_seconds << " s\n";
        for (const CampaignFailure& f : report.failures) {
            out << "  FAIL " << f.property << " [" << to_string(f.spec.scenario) << " seed=" << f.spec.seed
                << " n=" << f.spec.dim << " m=" << f.spec.atom_count << "]: " << f.diagnostic << "\n";
        }
        print_tolerances(out, o.tol);
    }
    return report.passed() ? kOk : kNegative;
}

} // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-dimensional von Neumann algebras of spectral measures"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand
    Options o;
    app.add_option("--rank-tol", o.tol.rank_tol, "numerical rank cutoff")->capture_default_str();
    app.add_option("--residual-tol", o.tol.residual_tol, "residual tolerance")->capture_default_str();
    app.add_option("--value-tol", o.tol.value_tol, "value separation tolerance")->capture_default_str();
    app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();

    auto input = [&](CLI::App* sub) {
        sub->add_option("--input,-i", o.input, "input document ('-' for stdin)")->required();
    };
    CLI::App* comm = app.add_subcommand("commutant", "commutant of an operator set");
    CLI::App* bicomm = app.add_subcommand("bicommutant", "bicommutant of an operator set");
    for (CLI::App* sub : {comm, bicomm}) {
        input(sub);
        sub->add_option("--set", o.set, "operator_set name")->required();
        sub->add_flag("--adjoint-close", o.adjoint_close, "add adjoints before computing");
    }
    CLI::App* check = app.add_subcommand("check-generates", "does the set generate A(P_E)?");
    input(check);
    check->add_option("--measure", o.measure, "spectral_measure name")->required();
    check->add_option("--set", o.set, "operator_set name")->required();

    CLI::App* separate = app.add_subcommand("separate", "do the functions separate the non-null atoms?");
    CLI::App* push = app.add_subcommand("pushforward", "push E forward under the joint evaluation of functions");
    for (CLI::App* sub : {separate, push}) {
        input(sub);
        sub->add_option("--measure", o.measure, "spectral_measure name")->required();
        sub->add_option("--functions", o.functions, "function names")->required()->delimiter(',');
    }
    CLI::App* spectral = app.add_subcommand("spectral-measure", "spectral measure of a normal matrix");
    input(spectral);
    spectral->add_option("--matrix", o.matrix, "matrix name")->required();

    CLI::App* campaign = app.add_subcommand("campaign", "seeded property campaign");
    campaign->add_option("--seed", o.seed, "campaign seed")->capture_default_str();
    campaign->add_option("--count", o.count, "number of instances")->capture_default_str();
    campaign->add_option("--scenarios", o.scenarios, "scenario names (default: all)")->delimiter(',');
    campaign->add_option("--out", o.out_path, "write the JSON report here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kSchema;
    }

    try {
        o.tol.validate();
        if (comm->parsed()) {
            return cmd_commutant(o, false, out);
        }
        if (bicomm->parsed()) {
            return cmd_commutant(o, true, out);
        }
        if (check->parsed()) {
            return cmd_check_generates(o, out);
        }
        if (separate->parsed()) {
            return cmd_separate(o, out);
        }
        if (push->parsed()) {
            return cmd_pushforward(o, out);
        }
        if (spectral->parsed()) {
            return cmd_spectral_measure(o, out);
        }
        return cmd_campaign(o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        switch (e.kind()) {
        case ErrorKind::Schema:
        case ErrorKind::InvalidArgument:
            return kSchema;
        case ErrorKind::NotNormal:
            return kNotNormal;
        default:
            return kInvariant;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kInvariant;
    }
}

} // namespace vnagen::cli
