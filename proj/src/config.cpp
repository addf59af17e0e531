#include "mbhom/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mbhom/errors.hpp"

namespace mbh {

namespace {

// Strict object reader: every key must be consumed, errors carry the path.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "must be an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) && !j_.at(key).is_null();
  }
  std::string sub(const std::string& key) const { return path_ + "." + key; }
  const json& at(const std::string& key) { seen_.insert(key); return j_.at(key); }

  double num(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number()) fail(sub(key), "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(sub(key), "must be finite");
    return d;
  }
  int integer(const std::string& key) {
    const json& v = at(key);
    if (!v.is_number_integer()) fail(sub(key), "must be an integer");
    return v.get<int>();
  }
  bool boolean(const std::string& key) {
    const json& v = at(key);
    if (!v.is_boolean()) fail(sub(key), "must be true or false");
    return v.get<bool>();
  }
  std::string str(const std::string& key, const std::set<std::string>& allowed = {}) {
    const json& v = at(key);
    if (!v.is_string()) fail(sub(key), "must be a string");
    const std::string s = v.get<std::string>();
    if (!allowed.empty() && !allowed.count(s)) {
      std::string list;
      for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
      fail(sub(key), "unknown value '" + s + "' (expected one of: " + list + ")");
    }
    return s;
  }
  std::vector<double> nums(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail(sub(key), "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(sub(key) + "[" + std::to_string(i) + "]", "must be a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<int> ints(const std::string& key) {
    const json& v = at(key);
    if (!v.is_array()) fail(sub(key), "must be an array of integers");
    std::vector<int> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(sub(key) + "[" + std::to_string(i) + "]", "must be an integer");
      out.push_back(v[i].get<int>());
    }
    return out;
  }
  std::array<double, 2> pair(const std::string& key) {
    const auto v = nums(key);
    if (v.size() != 2) fail(sub(key), "must hold exactly two numbers (tensor diagonal)");
    return {v[0], v[1]};
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(path_ + "." + it.key(), "unknown key");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

GridSpec parse_grid(const json& j, const std::string& path) {
  Obj o(j, path);
  GridSpec g;
  if (o.has("values")) {
    g.values = o.nums("values");
    if (g.values.empty()) Obj::fail(o.sub("values"), "must not be empty");
    if (o.has("start") || o.has("stop") || o.has("count"))
      Obj::fail(path, "give either values or start/stop/count");
  } else {
    if (!o.has("start") || !o.has("stop") || !o.has("count")) Obj::fail(path, "needs start, stop and count");
    g.start = o.num("start");
    g.stop = o.num("stop");
    g.count = o.integer("count");
    if (*g.count < 1) Obj::fail(o.sub("count"), "must be >= 1");
    if (*g.count > 1 && !(*g.stop > *g.start)) Obj::fail(o.sub("stop"), "must exceed start");
  }
  o.finish();
  const auto pts = g.points();
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (!(pts[i] > pts[i - 1])) Obj::fail(path, "grid must be strictly increasing");
  return g;
}

Layer parse_layer(const json& j, const std::string& path) {
  Obj o(j, path);
  Layer l{o.num("modulus"), o.num("density"), o.num("thickness")};
  o.finish();
  for (double v : {l.modulus, l.density, l.thickness})
    if (!(v > 0.0)) Obj::fail(path, "modulus, density and thickness must be positive");
  return l;
}

CellSpec parse_cell(const json& j, const std::string& path) {
  CellSpec c;
  if (j.is_string()) {
    c.preset = j.get<std::string>();
    if (c.preset != "CELL_A" && c.preset != "CELL_B")
      Obj::fail(path, "unknown cell preset '" + c.preset + "' (expected CELL_A or CELL_B)");
    return c;
  }
  Obj o(j, path);
  if (o.has("uniform")) {
    Obj u(o.at("uniform"), o.sub("uniform"));
    c.uniform_modulus = u.num("modulus");
    c.uniform_density = u.num("density");
    c.uniform_period = u.has("period") ? u.num("period") : 1.0;
    u.finish();
    if (!(*c.uniform_modulus > 0.0) || !(*c.uniform_density > 0.0) || !(*c.uniform_period > 0.0))
      Obj::fail(o.sub("uniform"), "modulus, density and period must be positive");
  } else {
    if (!o.has("layer_a") || !o.has("layer_b")) Obj::fail(path, "needs layer_a and layer_b, or uniform");
    c.layer_a = parse_layer(o.at("layer_a"), o.sub("layer_a"));
    c.layer_b = parse_layer(o.at("layer_b"), o.sub("layer_b"));
  }
  o.finish();
  return c;
}

json cell_json(const CellSpec& c) {
  if (!c.preset.empty()) return c.preset;
  json j = json::object();
  if (c.uniform_modulus) {
    j["uniform"] = {{"modulus", *c.uniform_modulus}, {"density", *c.uniform_density}, {"period", *c.uniform_period}};
  } else {
    auto layer = [](const Layer& l) {
      return json{{"modulus", l.modulus}, {"density", l.density}, {"thickness", l.thickness}};
    };
    j["layer_a"] = layer(*c.layer_a);
    j["layer_b"] = layer(*c.layer_b);
  }
  return j;
}

json grid_json(const GridSpec& g) {
  if (!g.values.empty()) return json{{"values", g.values}};
  return json{{"start", *g.start}, {"stop", *g.stop}, {"count", *g.count}};
}

void dump_into(const json& j, std::ostringstream& out, int indent, int level) {
  const std::string pad(static_cast<std::size_t>(indent * (level + 1)), ' ');
  const std::string pad_end(static_cast<std::size_t>(indent * level), ' ');
  if (j.is_object()) {
    if (j.empty()) { out << "{}"; return; }
    out << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ",\n";
      first = false;
      out << pad << json(it.key()).dump() << ": ";
      dump_into(it.value(), out, indent, level + 1);
    }
    out << "\n" << pad_end << "}";
  } else if (j.is_array()) {
    if (j.empty()) { out << "[]"; return; }
    out << "[";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) out << ", ";
      dump_into(j[i], out, indent, level + 1);
    }
    out << "]";
  } else if (j.is_number_float()) {
    out << format_number(j.get<double>());
  } else {
    out << j.dump();
  }
}

}  // namespace

std::vector<double> GridSpec::points() const {
  if (!values.empty()) return values;
  std::vector<double> out;
  const int n = *count;
  for (int i = 0; i < n; ++i)
    out.push_back(n == 1 ? *start : *start + (*stop - *start) * static_cast<double>(i) / (n - 1));
  return out;
}

UnitCell CellSpec::build() const {
  if (preset == "CELL_A") return cell_a();
  if (preset == "CELL_B") return cell_b();
  if (uniform_modulus) return UnitCell::uniform(*uniform_modulus, *uniform_density, *uniform_period);
  return UnitCell(*layer_a, *layer_b);
}

NonlocalParams NonlocalSpec::params() const {
  NonlocalParams p = NonlocalParams::reference();
  if (preset == "literal") p = NonlocalParams::literal(T0.value_or(0.8), c1.value_or(0.01), c2.value_or(2.0));
  if (T0) p.T0 = *T0;
  if (time_weight) p.time_weight = *time_weight;
  if (tau_extent) p.tau_extent = *tau_extent;
  else if (preset == "literal") p.tau_extent = p.T0;
  if (c1) p.c1 = *c1;
  if (c2) p.c2 = *c2;
  return p;
}

Pairing parse_pairing(const std::string& s) {
  if (s == "natural_one_sided") return Pairing::natural_one_sided;
  if (s == "essential") return Pairing::essential;
  throw ConfigError("unknown pairing '" + s + "'");
}

OutgoingRule parse_outgoing(const std::string& s) {
  if (s == "group_velocity") return OutgoingRule::group_velocity;
  if (s == "flux") return OutgoingRule::flux;
  throw ConfigError("unknown outgoing rule '" + s + "'");
}

RunConfig parse_config(const json& j) {
  Obj o(j, "$");
  RunConfig c;
  if (o.has("command"))
    c.command = o.str("command", {"dispersion", "fit", "scatter1d", "scatter2d", "field", "multiband", "nonlocal"});
  if (o.has("cell")) c.cell = parse_cell(o.at("cell"), o.sub("cell"));
  if (o.has("normalization_cell")) c.normalization_cell = parse_cell(o.at("normalization_cell"), o.sub("normalization_cell"));
  if (o.has("hom")) {
    Obj h(o.at("hom"), o.sub("hom"));
    c.hom.modulus = h.num("modulus");
    c.hom.density = h.has("density") ? h.num("density") : 1.0;
    if (h.has("treatment")) c.hom.treatment = h.str("treatment", {"classical", "artificial_laminate"});
    h.finish();
    if (!(c.hom.modulus > 0.0) || !(c.hom.density > 0.0)) Obj::fail(o.sub("hom"), "modulus and density must be positive");
  }
  if (o.has("geometry")) c.geometry = o.str("geometry", {"single_boundary", "double_boundary", "2d"});
  if (o.has("slab_cells")) {
    c.slab_cells = o.integer("slab_cells");
    if (c.slab_cells < 1) Obj::fail(o.sub("slab_cells"), "must be >= 1");
  }
  if (o.has("ordering")) c.ordering = o.str("ordering", {"a_first", "b_first"});
  if (o.has("model")) c.model = o.str("model", {"single_band", "two_band"});
  if (o.has("approximation")) {
    const std::string path = o.sub("approximation");
    Obj a(o.at("approximation"), path);
    ApproxSpec& s = c.approximation;
    if (a.has("source")) s.source = a.str("source", {"fit", "published", "explicit"});
    if (a.has("order")) {
      s.order = a.integer("order");
      if (s.order != 22 && s.order != 44 && s.order != 66 && s.order != 88)
        Obj::fail(a.sub("order"), "must be 22, 44, 66 or 88");
    }
    if (a.has("points")) {
      s.points = a.integer("points");
      if (s.points < 2) Obj::fail(a.sub("points"), "must be >= 2");
    }
    if (a.has("mask")) {
      Obj m(a.at("mask"), a.sub("mask"));
      CoefficientMask mask;
      if (m.has("num_free")) mask.num_free = m.ints("num_free");
      if (m.has("den_free")) mask.den_free = m.ints("den_free");
      m.finish();
      s.mask = mask;
    }
    if (a.has("num")) s.num = a.nums("num");
    if (a.has("den")) s.den = a.nums("den");
    if (a.has("N0")) s.N0 = a.pair("N0");
    if (a.has("D1")) s.D1 = a.pair("D1");
    if (a.has("P")) s.P = a.pair("P");
    if (a.has("Q")) s.Q = a.pair("Q");
    if (a.has("D0")) s.D0 = a.num("D0");
    if (a.has("omega_b")) s.omega_b = a.num("omega_b");
    if (a.has("n")) s.n = a.num("n");
    if (a.has("d")) s.d = a.num("d");
    if (a.has("p")) s.p = a.num("p");
    if (a.has("q")) s.q = a.num("q");
    if (a.has("polynomial")) s.polynomial = a.boolean("polynomial");
    if (a.has("pin_gap")) s.pin_gap = a.boolean("pin_gap");
    if (a.has("grid_n1")) s.grid_n1 = a.integer("grid_n1");
    if (a.has("grid_n2")) s.grid_n2 = a.integer("grid_n2");
    if (s.grid_n1 < 2 || s.grid_n2 < 2) Obj::fail(path, "grid_n1 and grid_n2 must be >= 2");
    a.finish();
  }
  auto grid = [&](const char* key, std::optional<GridSpec>& g) {
    if (o.has(key)) g = parse_grid(o.at(key), o.sub(key));
  };
  grid("omega_over_omega0", c.omega_over_omega0);
  grid("theta_deg", c.theta_deg);
  grid("Kh", c.Kh);
  grid("k", c.k);
  grid("x", c.x);
  grid("y", c.y);
  if (c.theta_deg)
    for (double t : c.theta_deg->points())
      if (!(t > 0.0 && t <= 90.0)) Obj::fail(o.sub("theta_deg"), "angles must lie in (0, 90]");
  if (o.has("k1h")) c.k1h = o.num("k1h");
  if (o.has("truncation")) {
    Obj t(o.at("truncation"), o.sub("truncation"));
    if (t.has("initial")) c.truncation.initial = t.integer("initial");
    if (t.has("max")) c.truncation.max = t.integer("max");
    if (t.has("defect_tol")) c.truncation.defect_tol = t.num("defect_tol");
    if (t.has("panels_per_harmonic")) c.truncation.panels_per_harmonic = t.integer("panels_per_harmonic");
    t.finish();
    if (c.truncation.initial < 0 || c.truncation.max < c.truncation.initial)
      Obj::fail(o.sub("truncation"), "need 0 <= initial <= max");
    if (!(c.truncation.defect_tol > 0.0)) Obj::fail(o.sub("truncation.defect_tol"), "must be positive");
    if (c.truncation.panels_per_harmonic < 1) Obj::fail(o.sub("truncation.panels_per_harmonic"), "must be >= 1");
  }
  if (o.has("pairing")) c.pairing = o.str("pairing", {"natural_one_sided", "essential"});
  if (o.has("outgoing")) c.outgoing = o.str("outgoing", {"group_velocity", "flux"});
  if (o.has("lift_classical")) c.lift_classical = o.boolean("lift_classical");
  if (o.has("literal_naturals")) c.literal_naturals = o.boolean("literal_naturals");
  if (o.has("nonlocal")) {
    Obj n(o.at("nonlocal"), o.sub("nonlocal"));
    if (n.has("preset")) c.nonlocal.preset = n.str("preset", {"reference", "literal", "custom"});
    if (n.has("T0")) c.nonlocal.T0 = n.num("T0");
    if (n.has("time_weight")) c.nonlocal.time_weight = n.num("time_weight");
    if (n.has("tau_extent")) c.nonlocal.tau_extent = n.num("tau_extent");
    if (n.has("c1")) c.nonlocal.c1 = n.num("c1");
    if (n.has("c2")) c.nonlocal.c2 = n.num("c2");
    if (n.has("omega_max")) c.nonlocal.omega_max = n.num("omega_max");
    if (n.has("step")) c.nonlocal.step = n.num("step");
    n.finish();
    if (!(c.nonlocal.omega_max > 0.0)) Obj::fail(o.sub("nonlocal.omega_max"), "must be positive");
    try {
      c.nonlocal.params().validate();
    } catch (const std::invalid_argument& e) {
      Obj::fail(o.sub("nonlocal"), e.what());
    }
  }
  o.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j = json::object();
  if (c.command) j["command"] = *c.command;
  j["cell"] = cell_json(c.cell);
  if (c.normalization_cell) j["normalization_cell"] = cell_json(*c.normalization_cell);
  j["hom"] = {{"modulus", c.hom.modulus}, {"density", c.hom.density}, {"treatment", c.hom.treatment}};
  j["geometry"] = c.geometry;
  j["slab_cells"] = c.slab_cells;
  j["ordering"] = c.ordering;
  j["model"] = c.model;
  const ApproxSpec& s = c.approximation;
  json a = {{"source", s.source}, {"order", s.order}, {"points", s.points}};
  if (s.mask) a["mask"] = {{"num_free", s.mask->num_free}, {"den_free", s.mask->den_free}};
  if (!s.num.empty()) a["num"] = s.num;
  if (!s.den.empty()) a["den"] = s.den;
  auto put_pair = [&](const char* key, const std::optional<std::array<double, 2>>& v) {
    if (v) a[key] = json::array({(*v)[0], (*v)[1]});
  };
  put_pair("N0", s.N0);
  put_pair("D1", s.D1);
  put_pair("P", s.P);
  put_pair("Q", s.Q);
  a["D0"] = s.D0;
  auto put_opt = [&](const char* key, const std::optional<double>& v) {
    if (v) a[key] = *v;
  };
  put_opt("omega_b", s.omega_b);
  put_opt("n", s.n);
  put_opt("d", s.d);
  put_opt("p", s.p);
  put_opt("q", s.q);
  a["polynomial"] = s.polynomial;
  a["pin_gap"] = s.pin_gap;
  a["grid_n1"] = s.grid_n1;
  a["grid_n2"] = s.grid_n2;
  j["approximation"] = a;
  auto put_grid = [&](const char* key, const std::optional<GridSpec>& g) {
    if (g) j[key] = grid_json(*g);
  };
  put_grid("omega_over_omega0", c.omega_over_omega0);
  put_grid("theta_deg", c.theta_deg);
  put_grid("Kh", c.Kh);
  put_grid("k", c.k);
  put_grid("x", c.x);
  put_grid("y", c.y);
  if (c.k1h) j["k1h"] = *c.k1h;
  j["truncation"] = {{"initial", c.truncation.initial},
                     {"max", c.truncation.max},
                     {"defect_tol", c.truncation.defect_tol},
                     {"panels_per_harmonic", c.truncation.panels_per_harmonic}};
  j["pairing"] = c.pairing;
  j["outgoing"] = c.outgoing;
  j["lift_classical"] = c.lift_classical;
  j["literal_naturals"] = c.literal_naturals;
  json n = {{"preset", c.nonlocal.preset}};
  auto put_nl = [&](const char* key, const std::optional<double>& v) {
    if (v) n[key] = *v;
  };
  put_nl("T0", c.nonlocal.T0);
  put_nl("time_weight", c.nonlocal.time_weight);
  put_nl("tau_extent", c.nonlocal.tau_extent);
  put_nl("c1", c.nonlocal.c1);
  put_nl("c2", c.nonlocal.c2);
  n["omega_max"] = c.nonlocal.omega_max;
  n["step"] = c.nonlocal.step;
  j["nonlocal"] = n;
  return j;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s = buf;
  return s;
}

std::string dump_json(const json& j) {
  std::ostringstream out;
  dump_into(j, out, 2, 0);
  out << "\n";
  return out.str();
}

}  // namespace mbh
