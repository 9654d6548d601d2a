#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kFixture = std::string(CWM_DATA_DIR) + "/steel_synthetic_2008-10-22.csv";

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "cwmarket");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cwm::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("cwmarket_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("dist writes the table to stdout and files") {
    const auto dir = scratch_dir("dist");
    const auto r = run({"dist", "--n", "10", "--out", dir.string()});
    REQUIRE(r.code == cwm::cli::kOk);
    CHECK(r.out.rfind("T,H,abs_spin_sum,count,probability\n", 0) == 0);
    CHECK(r.out.find("-5,1/2,0,252,0.24609375\n") != std::string::npos);
    CHECK(r.out.find("45,-9/2,10,2,0.001953125\n") != std::string::npos);
    std::ifstream csv(dir / "energy_distribution_n10.csv");
    std::stringstream body;
    body << csv.rdbuf();
    CHECK(body.str() == r.out);
    std::ifstream svg(dir / "energy_distribution_n10.svg");
    std::stringstream image;
    image << svg.rdbuf();
    CHECK(image.str().find("<svg") != std::string::npos);
    CHECK(image.str().find("</svg>") != std::string::npos);
    CHECK(run({"dist", "--n", "10", "--out", dir.string()}).out == r.out);
    fs::remove_all(dir);
}

TEST_CASE("test on the synthetic fixture fails to reject") {
    const auto r = run({"test", "--input", kFixture, "--n-top", "10", "--window", "10m", "--alpha", "0.05"});
    REQUIRE(r.code == cwm::cli::kOk);
    CHECK(r.out.find("windows=20\n") != std::string::npos);
    CHECK(r.out.find("decision=fail to reject independence\n") != std::string::npos);

    const auto j = run({"test", "--input", kFixture, "--json"});
    REQUIRE(j.code == cwm::cli::kOk);
    const auto report = nlohmann::json::parse(j.out);
    CHECK(report["windows"] == 20);
    CHECK(report["df"] == 3);
    CHECK(std::abs(report["statistic"].get<double>() - 5.29) <= 0.01);
    CHECK(std::abs(report["p_value"].get<double>() - 0.15175) <= 5e-4);
    CHECK(report["reject"] == false);
    CHECK(report["classes"][3]["class"] == "13..45");

    const auto explicit_classes = run({"test", "--input", kFixture, "--classes", "-5|-3|3|13..45", "--json"});
    CHECK(nlohmann::json::parse(explicit_classes.out)["statistic"] == report["statistic"]);
}

TEST_CASE("series emits a CSV spin series") {
    const auto r = run({"series", "--input", kFixture, "--inactive-rule", "drop-window"});
    REQUIRE(r.code == cwm::cli::kOk);
    std::istringstream lines(r.out);
    std::string line;
    int rows = 0;
    while (std::getline(lines, line))
        if (!line.empty() && line[0] != '#') ++rows;
    CHECK(rows == 21);
}

TEST_CASE("meanfield above the critical temperature has three roots") {
    const auto r = run({"meanfield", "--beta", "4", "--m-prev", "1", "--json"});
    REQUIRE(r.code == cwm::cli::kOk);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["roots"].size() == 3);
    const double m = j["roots"][2]["root"].get<double>();
    CHECK(std::abs(m - std::tanh(2.0 * m)) < 1e-12);
    CHECK(j["roots"][0]["root"].get<double>() == -m);
    CHECK(j["roots"][1]["root"].get<double>() == 0.0);
    CHECK(j["critical_beta"] == 2.0);

    const auto text = run({"meanfield", "--beta", "1", "--m-prev", "1"});
    CHECK(text.out.rfind("root,stable\n0,true\n", 0) == 0);
}

TEST_CASE("other subcommands run") {
    CHECK(run({"kernel", "--n", "6", "--beta", "1"}).code == cwm::cli::kOk);
    const auto st = run({"stationary", "--n", "6", "--beta", "2"});
    CHECK(st.code == cwm::cli::kOk);
    CHECK(st.out.find("# detailed_balance_residual=") != std::string::npos);
    CHECK(run({"moments", "--n", "10", "--beta", "1"}).code == cwm::cli::kOk);
    CHECK(run({"reconcile", "--n", "6", "--beta", "1"}).code == cwm::cli::kOk);
    const auto sim = run({"simulate", "--n", "6", "--beta", "1", "--steps", "2000", "--seed", "9"});
    CHECK(sim.code == cwm::cli::kOk);
    CHECK(sim.out == run({"simulate", "--n", "6", "--beta", "1", "--steps", "2000", "--seed", "9"}).out);
    const auto asym = run({"asymptotics", "--n", "10,100"});
    CHECK(asym.code == cwm::cli::kOk);
    CHECK(asym.out.rfind("kind,N,beta,condition_T,approx,exact,ratio\n", 0) == 0);
}

TEST_CASE("exit codes") {
    CHECK(run({}).code == cwm::cli::kUsage);
    CHECK(run({"frobnicate"}).code == cwm::cli::kUsage);
    CHECK(run({"dist", "--n", "10", "--bogus"}).code == cwm::cli::kUsage);
    CHECK(run({"dist"}).code == cwm::cli::kUsage);
    CHECK(run({"test", "--input", kFixture, "--tie-rule", "coin-flip"}).code == cwm::cli::kUsage);
    CHECK(run({"--help"}).code == cwm::cli::kOk);

    CHECK(run({"test", "--input", "/nonexistent/trades.csv"}).code == cwm::cli::kDataError);
    CHECK(run({"test", "--input", kFixture, "--window", "ten minutes"}).code == cwm::cli::kDataError);

    CHECK(run({"dist", "--n", "1"}).code == cwm::cli::kNumericalError);
    CHECK(run({"meanfield", "--beta", "-1", "--m-prev", "1"}).code == cwm::cli::kNumericalError);
    CHECK(run({"test", "--input", kFixture, "--classes", "-5|-3"}).code == cwm::cli::kNumericalError);
    CHECK(run({"test", "--input", kFixture, "--n-top", "50"}).code == cwm::cli::kNumericalError);
}
