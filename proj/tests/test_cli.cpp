#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "vnagen/cli.hpp"
#include "vnagen/document.hpp"

namespace fs = std::filesystem;
using vnagen::Json;

namespace {

const char* const kDoc = R"({
  "version": "1",
  "objects": {
    "E": {"type": "spectral_measure", "atoms": [
      {"label": "s0", "projection": [[1, 0, 0], [0, 0, 0], [0, 0, 0]]},
      {"label": "s1", "projection": [[0, 0, 0], [0, 1, 0], [0, 0, 0]]},
      {"label": "s2", "projection": [[0, 0, 0], [0, 0, 0], [0, 0, 1]]}]},
    "F": {"type": "matrix", "data": [[0, 0, 0], [0, 1, 0], [0, 0, 1]]},
    "G": {"type": "matrix", "data": [[0, 0, 0], [0, 1, 0], [0, 0, 2]]},
    "Xf": {"type": "operator_set", "dim": 3, "members": ["F"]},
    "Xg": {"type": "operator_set", "dim": 3, "members": ["G"]},
    "Xd": {"type": "operator_set", "dim": 2, "members": [[[1, 0], [0, 2]]]},
    "X0": {"type": "operator_set", "dim": 3, "members": []},
    "f": {"type": "function", "labels": ["s0", "s1", "s2"], "values": [0, 1, 1]},
    "g": {"type": "function", "labels": ["s2", "s1", "s0"], "values": [2, 1, 0]},
    "sx": {"type": "matrix", "data": [[0, 1], [1, 0]]},
    "N": {"type": "matrix", "data": [[0, 1], [0, 0]]}
  }
})";

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "vnagen");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = vnagen::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("vnagen_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p) << text;
    return p.string();
}

std::string doc_path() {
    static const std::string p = write("doc.json", kDoc);
    return p;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("commutant prints dimension and basis") {
    const Run r = cli({"commutant", "-i", doc_path(), "--set", "Xd"});
    CHECK(r.code == 0);
    CHECK(r.out.find("dimension 2") != std::string::npos);
    CHECK(r.out.find("basis 1:") != std::string::npos);
    CHECK(r.out.find("tolerances: rank_tol=1e-09 residual_tol=1e-08 value_tol=1e-09") != std::string::npos);

    const Run empty = cli({"commutant", "-i", doc_path(), "--set", "X0"});
    CHECK(empty.code == 0);
    CHECK(empty.out.find("dimension 9") != std::string::npos);
}

TEST_CASE("commutant json output") {
    const Run r = cli({"commutant", "-i", doc_path(), "--set", "Xd", "--format", "json"});
    REQUIRE(r.code == 0);
    const Json j = Json::parse(r.out);
    CHECK(j["dimension"] == 2);
    CHECK(j["basis"].size() == 2);
    CHECK(j["tolerances"]["residual_tol"] == 1e-8);
}

TEST_CASE("bicommutant with and without adjoint closure") {
    const std::string path = write("nil.json", R"({"version": "1", "objects": {
        "X": {"type": "operator_set", "dim": 2, "members": [[[0, 1], [0, 0]]]}}})");
    CHECK(cli({"bicommutant", "-i", path, "--set", "X"}).out.find("dimension 2") != std::string::npos);
    CHECK(cli({"bicommutant", "-i", path, "--set", "X", "--adjoint-close"}).out.find("dimension 4") !=
          std::string::npos);
}

TEST_CASE("check-generates exit codes") {
    const Run no = cli({"check-generates", "-i", doc_path(), "--measure", "E", "--set", "Xf"});
    CHECK(no.code == 1);
    CHECK(no.out.find("witness pair (s1, s2)") != std::string::npos);
    CHECK(no.out.find("dim A(X) = 2, dim A(P_E) = 3") != std::string::npos);

    const Run yes = cli({"check-generates", "-i", doc_path(), "--measure", "E", "--set", "Xg"});
    CHECK(yes.code == 0);
    CHECK(yes.out.find("criterion: generates") != std::string::npos);
    CHECK(yes.out.find("oracle: generates") != std::string::npos);
}

TEST_CASE("check-generates flags disagreement with exit 4") {
    // A huge value tolerance makes the criterion call (0, 1, 2) non-separating;
    // the oracle only uses rank_tol and still sees the full diagonal algebra.
    const Run r = cli({"--value-tol", "0.5", "check-generates", "-i", doc_path(), "--measure", "E", "--set", "Xg"});
    CHECK(r.code == 4);
    CHECK(r.out.find("criterion: does not generate") != std::string::npos);
    CHECK(r.out.find("oracle: generates") != std::string::npos);
}

TEST_CASE("invalid measures exit 3") {
    const std::string path = write("bad.json", R"({"version": "1", "objects": {
        "E": {"type": "spectral_measure", "atoms": [
          {"label": "a", "projection": [[1, 0], [0, 1]]},
          {"label": "b", "projection": [[1, 0], [0, 0]]}]},
        "X": {"type": "operator_set", "dim": 2, "members": []}}})");
    const Run r = cli({"check-generates", "-i", path, "--measure", "E", "--set", "X"});
    CHECK(r.code == 3);
    CHECK(r.err.find("InvalidMeasure") != std::string::npos);
}

TEST_CASE("schema errors exit 2") {
    const std::string path = write("rows.json", R"({"version": "1", "objects": {
        "X": {"type": "operator_set", "dim": 2, "members": [[[1, 0], [0]]]}}})");
    CHECK(cli({"commutant", "-i", path, "--set", "X"}).code == 2);
    CHECK(cli({"commutant", "-i", doc_path(), "--set", "missing"}).code == 2);
    CHECK(cli({"commutant", "-i", (scratch() / "absent.json").string(), "--set", "X"}).code == 2);
    CHECK(cli({"commutant", "-i", write("junk.json", "{not json"), "--set", "X"}).code == 2);
    CHECK(cli({"frobnicate"}).code == 2);
    CHECK(cli({}).code == 2);
    CHECK(cli({"--rank-tol", "2", "commutant", "-i", doc_path(), "--set", "Xd"}).code == 2);
    CHECK(cli({"campaign", "--scenarios", "bogus", "--count", "1"}).code == 2);
}

TEST_CASE("spectral-measure") {
    const Run sx = cli({"spectral-measure", "-i", doc_path(), "--matrix", "sx"});
    CHECK(sx.code == 0);
    // labels print in round-trip precision, so compare them as numbers
    std::istringstream lines(sx.out);
    std::vector<double> eigenvalues;
    for (std::string word; lines >> word;) {
        if (word == "eigenvalue") {
            std::string value, mult_word, mult;
            lines >> value >> mult_word >> mult;
            eigenvalues.push_back(std::stod(value));
            CHECK(mult == "1");
        }
    }
    REQUIRE(eigenvalues.size() == 2);
    CHECK(eigenvalues[0] == doctest::Approx(-1.0));
    CHECK(eigenvalues[1] == doctest::Approx(1.0));

    const Run f = cli({"spectral-measure", "-i", doc_path(), "--matrix", "F", "--format", "json"});
    CHECK(f.code == 0);
    const Json j = Json::parse(f.out);
    CHECK(j["multiplicities"] == Json::parse("[1, 2]"));

    CHECK(cli({"spectral-measure", "-i", doc_path(), "--matrix", "N"}).code == 5);
}

TEST_CASE("separate and pushforward") {
    const Run no = cli({"separate", "-i", doc_path(), "--measure", "E", "--functions", "f"});
    CHECK(no.code == 1);
    CHECK(no.out.find("witness pair (s1, s2)") != std::string::npos);
    CHECK(cli({"separate", "-i", doc_path(), "--measure", "E", "--functions", "f,g"}).code == 0);

    const Run push = cli({"pushforward", "-i", doc_path(), "--measure", "E", "--functions", "f", "--format", "json"});
    REQUIRE(push.code == 0);
    const Json j = Json::parse(push.out);
    CHECK(j["injective_on_support"] == false);
    CHECK(j["measure"]["atoms"].size() == 2);
    CHECK(j["map"]["s1"] == j["map"]["s2"]);
}

TEST_CASE("campaign with zero instances passes") {
    const std::string out = (scratch() / "empty.json").string();
    const Run r = cli({"campaign", "--count", "0", "--out", out});
    CHECK(r.code == 0);
    const Json j = Json::parse(slurp(out));
    CHECK(j["instances_run"] == 0);
    CHECK(j["passed"] == true);
}

TEST_CASE("campaign reports are reproducible") {
    const std::string a = (scratch() / "a.json").string();
    const std::string b = (scratch() / "b.json").string();
    CHECK(cli({"campaign", "--seed", "11", "--count", "6", "--out", a}).code == 0);
    CHECK(cli({"campaign", "--seed", "11", "--count", "6", "--out", b}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK_FALSE(slurp(a).empty());
}

TEST_CASE("global flags may follow the subcommand") {
    const Run r = cli({"commutant", "-i", doc_path(), "--set", "Xd", "--rank-tol", "1e-10"});
    CHECK(r.code == 0);
    CHECK(r.out.find("rank_tol=1e-10") != std::string::npos);
}

} // TEST_SUITE
