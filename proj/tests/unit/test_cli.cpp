#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include "cli.hpp"
#include "dyson/io.hpp"

using namespace dyson;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    fs::path d = fs::temp_directory_path() / ("dyson_cli_" + std::to_string(::getpid())) / name;
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

int lab(const std::string& args, const fs::path& log) {
    std::string cmd = std::string("\"") + DYSON_LAB + "\" " + args + " > \"" + log.string() + "\" 2>&1";
    int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string first_line(const fs::path& p) {
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> row;
        size_t start = 0;
        for (size_t k = line.find(','); k != std::string::npos; k = line.find(',', start)) {
            row.push_back(line.substr(start, k - start));
            start = k + 1;
        }
        row.push_back(line.substr(start));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

TEST_CASE("config merging and validation") {
    cli::Config c;
    c.command = "spectrum";
    CHECK(cli::validate(c).empty());
    cli::merge_json(c, {{"a", 1.4}, {"grid", {{"N", 1024}}}, {"spectrum", {{"k", 3}}}});
    CHECK(c.a == 1.4);
    CHECK(c.grid_n == 1024);
    CHECK(c.grid_l == 10.0);
    CHECK(c.spectrum.k == 3);
    CHECK_THROWS_AS(cli::merge_json(c, {{"alpha", 1.4}}), std::invalid_argument);
    CHECK_THROWS_AS(cli::merge_json(c, {{"a", "x"}}), std::invalid_argument);
    CHECK_THROWS_AS(cli::merge_json(c, {{"grid", 3}}), std::invalid_argument);

    cli::Config d = c;
    cli::merge_json(d, cli::to_json(c));
    CHECK(cli::to_json(d) == cli::to_json(c));

    c.a = 2.5;
    CHECK_FALSE(cli::validate(c).empty());
    c.a = 1.4;
    c.grid_n = 1023;
    CHECK_FALSE(cli::validate(c).empty());
    c.grid_n = 1024;
    c.spectrum.k = 11;
    CHECK_FALSE(cli::validate(c).empty());
    c.spectrum.k = 5;
    c.command = "fixed-point";
    c.fixed_point.non_gaussian = true;
    CHECK_FALSE(cli::validate(c).empty());
    c.a = 1.55;
    CHECK(cli::validate(c).empty());
}

TEST_CASE("gaussian fixed point command") {
    fs::path d = scratch("fp");
    CHECK(lab("fixed-point --a 1.5 --output-dir \"" + d.string() + "\"", d / "log.txt") == 0);
    io::Json j = io::read_json(d / "fixed_point.json");
    CHECK(j["variance"].get<double>() == doctest::Approx(0.2928932188).epsilon(1e-9));
    CHECK(j["residual"].get<double>() < 1e-8);
    CHECK(first_line(d / "fixed_point_density.csv") == "s,p");
    CHECK(fs::exists(d / "fixed_point_density.json"));
}

TEST_CASE("bad arguments") {
    fs::path d = scratch("bad");
    CHECK(lab("fixed-point --a 2.5 --output-dir \"" + d.string() + "\"", d / "log.txt") == 64);
    CHECK(lab("fixed-point --bogus", d / "log.txt") == 64);
    CHECK(lab("", d / "log.txt") == 64);
    CHECK(lab("spectrum --config \"" + (d / "nope.json").string() + "\"", d / "log.txt") == 64);
    {
        std::ofstream cfg(d / "unknown.json");
        cfg << R"({"a": 1.3, "colour": "blue"})";
    }
    CHECK(lab("spectrum --config \"" + (d / "unknown.json").string() + "\"", d / "log.txt") == 64);
    CHECK(lab("--help", d / "log.txt") == 0);
}

TEST_CASE("missing non-gaussian artifact") {
    fs::path d = scratch("missing");
    CHECK(lab("spectrum --a 1.55 --at non-gaussian --output-dir \"" + d.string() + "\"", d / "log.txt") == 66);
}

TEST_CASE("gaussian spectrum command") {
    fs::path d = scratch("spec");
    CHECK(lab("spectrum --a 1.25 --k 5 --grid-n 1024 --output-dir \"" + d.string() + "\"", d / "log.txt") ==
          0);
    auto rows = read_csv(d / "eigenvalues.csv");
    REQUIRE(rows.size() == 6);
    CHECK(rows[0] == std::vector<std::string>{"j", "eigenvalue", "residual"});
    for (int j = 0; j < 5; ++j) {
        double lam = std::stod(rows[j + 1][1]);
        CHECK(lam == doctest::Approx(std::pow(2.0, 1.0 - 0.75 * j)).epsilon(1e-3));
    }
    io::Json s = io::read_json(d / "spectrum.json");
    CHECK(s["eigenvalues"].size() == 5);
    CHECK(s.contains("residuals"));
    CHECK(first_line(d / "eigenfunction_1.csv") == "s,e");
}

TEST_CASE("config file and overrides") {
    fs::path d = scratch("cfg");
    {
        std::ofstream cfg(d / "c.json");
        cfg << R"({"a": 1.3, "grid": {"N": 512}, "oracle": {"n": 2, "beta": 0.4}})";
    }
    CHECK(lab("oracle --config \"" + (d / "c.json").string() + "\" --a 1.6 --print-config", d / "log.txt") ==
          0);
    io::Json eff = io::read_json(d / "log.txt");
    CHECK(eff["a"] == 1.6);
    CHECK(eff["grid"]["N"] == 512);
    CHECK(eff["oracle"]["n"] == 2);
    CHECK(eff["oracle"]["beta"] == 0.4);
}

TEST_CASE("oracle command") {
    fs::path d = scratch("oracle");
    CHECK(lab("oracle --a 1.5 --n 4 --beta 0.3 --output-dir \"" + d.string() + "\"", d / "log.txt") == 0);
    io::Json j = io::read_json(d / "oracle.json");
    CHECK(j["max_atom_error"].get<double>() < 1e-10);
    CHECK(j["n"] == 4);
}

TEST_CASE("flow command") {
    fs::path d = scratch("flow");
    CHECK(lab("flow --a 1.25 --variance 0.1 --output-dir \"" + d.string() + "\"", d / "log.txt") == 0);
    CHECK(first_line(d / "flow.csv") == "m,variance,kurtosis,l1_to_fp,classification");
    io::Json j = io::read_json(d / "flow.json");
    CHECK(j["classification"] == "CollapsedHighT");
}

TEST_CASE("observables with a known critical point") {
    fs::path d = scratch("obs");
    CHECK(lab("observables --a 1.25 --side high --points 4 --t-c -0.103626115450425 --output-dir \"" +
                  d.string() + "\"",
              d / "log.txt") == 0);
    CHECK(first_line(d / "susceptibility.csv") == "t,tau");
    io::Json j = io::read_json(d / "summary.json");
    CHECK(j["t_c"].get<double>() == -0.103626115450425);
    CHECK(std::fabs(j["gamma_fit"].get<double>() - 1.0) < 0.1);
    CHECK(j["points"].size() == 4);
}

TEST_CASE("non-gaussian fixed point and its spectrum") {
    fs::path d = scratch("ng");
    std::string dir = " --output-dir \"" + d.string() + "\"";
    CHECK(lab("fixed-point --a 1.55 --non-gaussian" + dir, d / "log.txt") == 0);
    io::Json fp = io::read_json(d / "fixed_point.json");
    CHECK(fp["residual"].get<double>() < 1e-8);
    CHECK(fp["kind"] == "non-gaussian");
    CHECK(lab("spectrum --a 1.55 --at non-gaussian --k 3" + dir, d / "log2.txt") == 0);
    io::Json s = io::read_json(d / "spectrum.json");
    CHECK(s["eigenvalues"][0].get<double>() == doctest::Approx(2.0).epsilon(1e-3));
    CHECK(std::fabs(s["eigenvalues"][1].get<double>() - std::sqrt(2.0)) < 0.1);
    // A Gaussian artifact cannot stand in for the non-Gaussian one.
    fs::path g = scratch("ng_wrong");
    std::string gdir = " --output-dir \"" + g.string() + "\"";
    CHECK(lab("fixed-point --a 1.55" + gdir, g / "log.txt") == 0);
    CHECK(lab("spectrum --a 1.55 --at non-gaussian" + gdir, g / "log2.txt") == 64);
    fs::remove_all(d.parent_path());
}
