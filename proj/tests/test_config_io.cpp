// Configuration parsing, JSON round-tripping, the regime report, and file
// emission formats.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "synladder/config.hpp"
#include "synladder/io.hpp"
#include "synladder/svg.hpp"

using namespace synladder;
using namespace synladder::config;
using nlohmann::json;

namespace {

json reference_config() {
    return json::parse(R"({
      "F": "3/2",
      "N": 10,
      "chiN": 1.0,
      "drives": {"Omega_A": 0.05, "Omega_B": 0.05, "Delta_A": -3.0, "Delta_B": 4.1},
      "initial_state": {"upper": {"mode": "3/2"}, "lower": {"mode": "-3/2"}},
      "time_grid": {"tau_max": 10.0, "samples": 101},
      "output": {"dir": "out", "plot": false}
    })");
}

}  // namespace

TEST_CASE("config parsing and round trip") {
    auto c = parse_config(reference_config());
    REQUIRE(c.f == HalfInt{3});
    REQUIRE(c.n_atoms == 10);
    REQUIRE(c.drives.delta_b == 4.1);
    REQUIRE(c.upper.m1 == HalfInt{3});

    // the sidecar form reparses to an identical canonical dump
    json j1 = to_json(c);
    json j2 = to_json(parse_config(j1));
    REQUIRE(j1.dump() == j2.dump());
}

TEST_CASE("config errors carry field paths") {
    json bad = reference_config();
    bad["initial_state"]["upper"] = {{"superposition", {{"m1", "3/2"}, {"m2", "-1/2"}, {"p1", 1.7}}}};
    try {
        parse_config(bad);
        FAIL("expected a domain error");
    } catch (const DomainError& e) {
        REQUIRE(std::string(e.what()).find("initial_state.upper.superposition.p1") != std::string::npos);
    }
    json bad2 = reference_config();
    bad2["numerics"] = {{"deg_tol", -1.0}};
    REQUIRE_THROWS_AS(parse_config(bad2), DomainError);
}

TEST_CASE("zeeman conversion follows the Sr-87 factors") {
    ZeemanSpec z;
    z.b_gauss = 0.12;
    REQUIRE(z.delta_e() == Catch::Approx(0.01).margin(2e-4));
    z.b_gauss = 1.77;
    REQUIRE(z.delta_e() == Catch::Approx(0.15).margin(2e-3));
    REQUIRE(z.delta_g() / z.delta_e() == Catch::Approx(-1.3e-4 / (2.0 / 33.0)).epsilon(1e-12));
}

TEST_CASE("validation report rows") {
    SECTION("reference parameters pass the adiabaticity rows") {
        auto c = parse_config(reference_config());
        auto rep = validate(c);
        for (const auto& r : rep.rows)
            if (r.name.find("adiabatic") != std::string::npos) REQUIRE(r.pass);
    }
    SECTION("strong drive violates adiabatic elimination") {
        auto c = parse_config(reference_config());
        c.drives.omega_a = c.drives.omega_b = 0.5;
        auto rep = validate(c);
        bool warned = false;
        for (const auto& r : rep.rows)
            if (r.name.find("adiabatic") != std::string::npos && !r.pass) warned = true;
        REQUIRE(warned);
    }
    SECTION("large Zeeman shift violates the weak-field row") {
        auto c = parse_config(reference_config());
        ZeemanSpec z;
        z.b_gauss = 1.77;  // delta_e = 0.15 chiN
        c.zeeman = z;
        auto rep = validate(c);
        bool warned = false;
        for (const auto& r : rep.rows)
            if (r.name.find("weak magnetic") != std::string::npos && !r.pass) warned = true;
        REQUIRE(warned);
    }
    SECTION("same-sign detunings are flagged") {
        auto c = parse_config(reference_config());
        c.drives.delta_a = 3.0;
        auto rep = validate(c);
        bool warned = false;
        for (const auto& r : rep.rows)
            if (r.name.find("opposite-sign") != std::string::npos && !r.pass) warned = true;
        REQUIRE(warned);
    }
}

TEST_CASE("file emission") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "synladder_io_test";
    fs::create_directories(dir);

    SECTION("time series CSV has the stable column layout") {
        dynamics::TimeSeries ts;
        ts.tau = {0.0, 1.0};
        ts.t = {0.0, 2513.3};
        ts.channels = {"n(-1/2)", "n(1/2)"};
        ts.values.resize(2, 2);
        ts.values << 0.0, 0.0, 0.25, 0.25;
        ts.norms = Eigen::VectorXd::Ones(2);
        ts.energies = Eigen::VectorXd::Zero(2);
        io::write_csv(dir / "series.csv", ts);
        std::ifstream in(dir / "series.csv");
        std::string header;
        std::getline(in, header);
        REQUIRE(header == "tau,t,norm,energy,n(-1/2),n(1/2)");
        std::string row;
        std::getline(in, row);
        REQUIRE(row.substr(0, 2) == "0,");
    }
    SECTION("sweep CSV tags masked cells") {
        dynamics::SweepResult sw;
        sw.ax1_name = "Delta_A";
        sw.ax2_name = "Delta_B";
        sw.ax1 = Eigen::VectorXd::LinSpaced(2, -4, -3);
        sw.ax2 = Eigen::VectorXd::LinSpaced(2, 4, 5);
        sw.value.resize(2, 2);
        sw.value << 0.125, 0.25, std::numeric_limits<double>::quiet_NaN(), 0.5;
        sw.status = Eigen::MatrixXi::Zero(2, 2);
        sw.status(1, 0) = dynamics::kMaskedResonance;
        io::write_csv(dir / "sweep.csv", sw);
        std::ifstream in(dir / "sweep.csv");
        std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        REQUIRE(all.find("masked_resonance") != std::string::npos);
        REQUIRE(all.find("0.25,ok") != std::string::npos);
    }
    SECTION("parameter hash is deterministic and spelling-sensitive") {
        const auto h1 = io::param_hash(reference_config());
        const auto h2 = io::param_hash(reference_config());
        json other = reference_config();
        other["N"] = 12;
        REQUIRE(h1 == h2);
        REQUIRE(h1 != io::param_hash(other));
        REQUIRE(h1.size() == 8);
    }
    SECTION("svg writers produce well-formed files") {
        svg::write_line_chart((dir / "line.svg").string(),
                              {{"a", {0, 1, 2}, {0.0, 0.5, 0.2}}, {"b", {0, 1, 2}, {0.1, 0.0, 0.3}}}, "tau", "n");
        Eigen::MatrixXd v(2, 3);
        v << 1, 2, 3, 4, 5, std::numeric_limits<double>::quiet_NaN();
        svg::write_heatmap((dir / "heat.svg").string(), Eigen::VectorXd::LinSpaced(2, 0, 1),
                           Eigen::VectorXd::LinSpaced(3, 0, 2), v, "x", "y");
        for (const char* f : {"line.svg", "heat.svg"}) {
            std::ifstream in(dir / f);
            std::string all((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
            REQUIRE(all.find("<svg") == 0);
            REQUIRE(all.rfind("</svg>") != std::string::npos);
        }
    }
    fs::remove_all(dir);
}
