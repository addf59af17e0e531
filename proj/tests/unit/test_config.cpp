#include <doctest.h>

#include <cstdlib>
#include <string>

#include "mbhom/config.hpp"
#include "mbhom/errors.hpp"

using namespace mbh;

namespace {
std::string error_of(const std::string& text) {
  try {
    parse_config(json::parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const RunConfig c = parse_config(json::object());
    CHECK(c.cell.preset == "CELL_A");
    CHECK(c.geometry == "single_boundary");
    CHECK(c.approximation.order == 22);
    CHECK(c.lift_classical);
  }

  TEST_CASE("path-addressed errors") {
    CHECK(error_of(R"({"bogus": 1})").find("$.bogus") == 0);
    CHECK(error_of(R"({"omega_over_omega0": {"start": 1, "stop": 0.5, "count": 3}})").find("$.omega_over_omega0") == 0);
    CHECK(error_of(R"({"Kh": {"values": [0.1, 0.1]}})").find("strictly increasing") != std::string::npos);
    CHECK(error_of(R"({"approximation": {"order": 33}})").find("$.approximation.order") == 0);
    CHECK(error_of(R"({"cell": {"layer_a": {"modulus": 1, "density": 1, "thickness": 1}}})").find("$.cell") == 0);
    CHECK(error_of(R"({"hom": {"modulus": "x"}})").find("$.hom.modulus") == 0);
    CHECK(error_of(R"({"theta_deg": {"values": [0.0, 30]}})").find("$.theta_deg") == 0);
    CHECK(error_of(R"({"nonlocal": {"T0": -1}})").find("$.nonlocal") == 0);
  }

  TEST_CASE("grids") {
    GridSpec g;
    g.start = 0.0;
    g.stop = 1.0;
    g.count = 5;
    const auto p = g.points();
    REQUIRE(p.size() == 5);
    CHECK(p[4] == 1.0);
    CHECK(p[1] == 0.25);
  }

  TEST_CASE("parse, serialize, parse is the identity") {
    const std::string text = R"({
      "command": "scatter2d", "cell": {"layer_a": {"modulus": 1, "density": 1, "thickness": 0.8},
                                       "layer_b": {"modulus": 5, "density": 1, "thickness": 0.2}},
      "normalization_cell": "CELL_B",
      "hom": {"modulus": 2.0, "density": 1.0}, "geometry": "2d", "model": "two_band",
      "approximation": {"source": "explicit", "N0": [1.3, 1.8], "D1": [0.01, 0.02], "omega_b": 6.4,
                        "P": [22.5, 0], "Q": [0.8, 1.5], "mask": {"num_free": [2], "den_free": [2]}},
      "omega_over_omega0": {"values": [1.218]}, "k1h": 2.9,
      "truncation": {"initial": 4, "max": 32, "defect_tol": 1e-4, "panels_per_harmonic": 6},
      "outgoing": "flux", "lift_classical": false,
      "nonlocal": {"preset": "literal", "T0": 0.9, "c1": 0.1}
    })";
    const RunConfig a = parse_config(json::parse(text));
    const json ja = to_json(a);
    const RunConfig b = parse_config(json::parse(dump_json(ja)));
    CHECK(dump_json(to_json(b)) == dump_json(ja));
    CHECK(b.truncation.max == 32);
    CHECK(b.approximation.Q.value()[1] == 1.5);
    CHECK(b.cell.build().layer(1).modulus == 5.0);
  }

  TEST_CASE("17 significant digits round-trip") {
    for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300, 1.19047619047619047}) {
      const std::string s = format_number(v);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_number(0.1) == "0.10000000000000001");
    CHECK(format_number(2.0) == "2");
  }

  TEST_CASE("nonlocal presets") {
    NonlocalSpec s;
    CHECK(s.params().time_weight == doctest::Approx(25.0 / 32.0));
    s.preset = "literal";
    s.T0 = 0.6;
    const NonlocalParams p = s.params();
    CHECK(p.time_weight == 1.0);
    CHECK(p.tau_extent == 0.6);
  }
}
