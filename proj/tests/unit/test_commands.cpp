#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mbhom/commands.hpp"
#include "mbhom/errors.hpp"

using namespace mbh;

namespace {
std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    out.push_back(cells);
  }
  return out;
}
}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("dispersion of a uniform cell is the light line") {
    RunConfig c = parse_config(json::parse(R"({"cell": {"uniform": {"modulus": 4.0, "density": 1.0}},
      "normalization_cell": "CELL_A", "Kh": {"start": 0, "stop": 3, "count": 7}})"));
    const Table t = cmd_dispersion(c);
    REQUIRE(t.rows.size() == 7);
    for (const auto& r : t.rows) CHECK(std::stod(r[1]) == 2.0 * std::stod(r[0]));
  }

  TEST_CASE("zero contrast gives unit transmission in every column") {
    RunConfig c = parse_config(json::parse(R"({"cell": {"uniform": {"modulus": 2.0, "density": 1.0}},
      "normalization_cell": "CELL_A", "hom": {"modulus": 2.0}, "approximation": {"order": 66},
      "omega_over_omega0": {"start": 0.05, "stop": 1.5, "count": 12}})"));
    for (const char* g : {"single_boundary", "double_boundary"}) {
      c.geometry = g;
      for (const auto& r : cmd_scatter1d(c).rows)
        for (int col : {1, 2, 3}) CHECK(std::stod(r[col]) == doctest::Approx(1.0).epsilon(1e-10));
    }
  }

  TEST_CASE("output is independent of the thread count") {
    const json j = json::parse(R"({"hom": {"modulus": 0.25}, "approximation": {"order": 66},
      "omega_over_omega0": {"start": 0.01, "stop": 1.2, "count": 60}})");
    const RunConfig c = parse_config(j);
    CHECK(run_command("scatter1d", c, 1) == run_command("scatter1d", c, 7));
  }

  TEST_CASE("CSV layout") {
    const RunConfig c = parse_config(json::parse(R"({"k": {"values": [0.0, 1.0]}, "nonlocal": {"omega_max": 10}})"));
    const std::string csv = run_command("nonlocal", c);
    CHECK(csv.find('\r') == std::string::npos);
    CHECK(csv.substr(0, csv.find('\n')) == "k,band,omega,multiplicity");
    CHECK(csv.back() == '\n');
  }

  TEST_CASE("fit returns the RF22 coefficient set") {
    const RunConfig c = parse_config(json::parse(R"({"approximation": {"order": 22}})"));
    const json j = cmd_fit(c);
    CHECK(j["coefficients"]["N1"].get<double>() == doctest::Approx(1.19047619));
    const double D1 = j["coefficients"]["D1"].get<double>();
    CHECK(std::abs(D1 - 1.100814e-2) / 1.100814e-2 < 0.2);
    // The fitted set feeds back in as an explicit approximation.
    json cfg = json::object();
    cfg["approximation"] = j["approximation"];
    cfg["approximation"]["order"] = 22;
    const RunConfig back = parse_config(json::parse(dump_json(cfg)));
    CHECK(std::get<RationalBranch1D>(approximation_1d(back, cell_a()).model).den[1] == D1);
  }

  TEST_CASE("scatter2d rows carry an energy defect and flag") {
    const RunConfig c = parse_config(json::parse(R"({"hom": {"modulus": 2.0}, "geometry": "2d",
      "omega_over_omega0": {"values": [0.41]}, "theta_deg": {"values": [30, 60, 90]}})"));
    const auto rows = rows_of(cmd_scatter2d(c).to_csv());
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][6] == "energy_defect");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      CHECK(std::stod(rows[i][6]) < 1e-9);
      CHECK(rows[i].back() == "ok");
    }
  }

  TEST_CASE("two-band point sweep") {
    const RunConfig c = parse_config(json::parse(R"({"hom": {"modulus": 2.0}, "geometry": "2d", "model": "two_band",
      "approximation": {"source": "published"}, "omega_over_omega0": {"values": [1.218]}, "k1h": 2.9})"));
    const auto rows = rows_of(cmd_scatter2d(c).to_csv());
    REQUIRE(rows.size() == 2);
    CHECK(std::stod(rows[1][4]) > 0.7);
  }

  TEST_CASE("field grids are row-major with explicit coordinates") {
    const RunConfig c = parse_config(json::parse(R"({"hom": {"modulus": 2.0}, "geometry": "2d",
      "omega_over_omega0": {"values": [0.3624]}, "theta_deg": {"values": [30]},
      "x": {"values": [0, 0.5, 1]}, "y": {"values": [-1, 1]}})"));
    const Table t = cmd_field(c);
    REQUIRE(t.rows.size() == 6);
    CHECK(t.rows[1][0] == "0.5");
    CHECK(t.rows[1][1] == "-1");
    CHECK(t.rows[3][1] == "1");
  }

  TEST_CASE("command mismatch and missing grids are config errors") {
    RunConfig c = parse_config(json::parse(R"({"command": "fit"})"));
    CHECK_THROWS_AS(run_command("scatter1d", c), ConfigError);
    c.command.reset();
    CHECK_THROWS_AS(run_command("scatter1d", c), ConfigError);
  }
}
