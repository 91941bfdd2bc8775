#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "vibronic/errors.hpp"

namespace vibronic::cli {

ConfigError::ConfigError(const std::string& source, int line, const std::string& path, const std::string& message)
    : std::runtime_error(source + ":" + std::to_string(line) + ": " + (path.empty() ? "" : path + ": ") + message),
      line_(line) {}

std::map<std::string, int> json_line_map(const std::string& text) {
  struct Frame {
    bool object;
    std::string path;
    std::string key;
    int index = 0;
    bool expect_key = true;
    bool element_seen = false;
  };
  std::map<std::string, int> lines;
  std::vector<Frame> stack;
  int line = 1;

  auto value_path = [&]() -> std::string {
    if (stack.empty()) return "";
    const Frame& f = stack.back();
    return f.object ? f.path + "/" + f.key : f.path + "/" + std::to_string(f.index);
  };
  auto mark_element = [&] {
    if (!stack.empty() && !stack.back().object && !stack.back().element_seen) {
      lines.emplace(value_path(), line);
      stack.back().element_seen = true;
    }
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
    } else if (c == '"') {
      std::string s;
      for (++i; i < text.size() && text[i] != '"'; ++i) {
        if (text[i] == '\\' && i + 1 < text.size()) ++i;
        s += text[i];
      }
      if (!stack.empty() && stack.back().object && stack.back().expect_key) {
        stack.back().key = s;
        stack.back().expect_key = false;
        lines.emplace(stack.back().path + "/" + s, line);
      } else {
        mark_element();
      }
    } else if (c == '{' || c == '[') {
      mark_element();
      Frame f;
      f.object = c == '{';
      f.path = value_path();
      stack.push_back(f);
    } else if (c == '}' || c == ']') {
      if (!stack.empty()) stack.pop_back();
    } else if (c == ',') {
      if (!stack.empty()) {
        if (stack.back().object) {
          stack.back().expect_key = true;
        } else {
          ++stack.back().index;
          stack.back().element_seen = false;
        }
      }
    } else if (!std::isspace(static_cast<unsigned char>(c)) && c != ':') {
      mark_element();
    }
  }
  return lines;
}

namespace {

class Reader {
 public:
  Reader(const Json& node, std::string path, const std::map<std::string, int>& lines, const std::string& source)
      : node_(node), path_(std::move(path)), lines_(lines), source_(source) {}

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    const std::string ptr = key.empty() ? path_ : path_ + "/" + key;
    std::string probe = ptr;
    int line = 1;
    for (;;) {
      auto it = lines_.find(probe);
      if (it != lines_.end()) {
        line = it->second;
        break;
      }
      const auto cut = probe.rfind('/');
      if (cut == std::string::npos) break;
      probe.erase(cut);
    }
    std::string dotted = ptr;
    if (!dotted.empty() && dotted.front() == '/') dotted.erase(0, 1);
    std::replace(dotted.begin(), dotted.end(), '/', '.');
    throw ConfigError(source_, line, dotted, message);
  }

  void expect_object() const {
    if (!node_.is_object()) fail("", "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!ok.count(it.key())) fail(it.key(), "unknown key");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  Reader child(const std::string& key) const {
    Reader r(node_.at(key), path_ + "/" + key, lines_, source_);
    r.expect_object();
    return r;
  }

  const Json& raw(const std::string& key) const { return node_.at(key); }
  std::string path() const { return path_; }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required number is missing");
      return *fallback;
    }
    const Json& v = node_.at(key);
    if (!v.is_number()) fail(key, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(key, "must be finite");
    return x;
  }

  double positive(const std::string& key, std::optional<double> fallback = std::nullopt) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) fail(key, "must be positive");
    return x;
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required integer is missing");
      return *fallback;
    }
    const Json& v = node_.at(key);
    if (!v.is_number_integer()) fail(key, "expected an integer");
    return v.get<int>();
  }

  bool boolean(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    if (!node_.at(key).is_boolean()) fail(key, "expected true or false");
    return node_.at(key).get<bool>();
  }

  std::string string(const std::string& key, std::optional<std::string> fallback = std::nullopt) const {
    if (!has(key)) {
      if (!fallback) fail(key, "required string is missing");
      return *fallback;
    }
    if (!node_.at(key).is_string()) fail(key, "expected a string");
    return node_.at(key).get<std::string>();
  }

  std::string choice(const std::string& key, std::initializer_list<const char*> options, const std::string& fallback) const {
    const std::string v = string(key, fallback);
    for (const char* o : options) {
      if (v == o) return v;
    }
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    fail(key, "must be one of " + list);
  }

 private:
  const Json& node_;
  std::string path_;
  const std::map<std::string, int>& lines_;
  const std::string& source_;
};

Json vec3(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }

}  // namespace

std::vector<double> ScanRange::values() const {
  std::vector<double> out;
  if (samples == 1) return {start};
  for (int i = 0; i < samples; ++i) out.push_back(start + (stop - start) * i / (samples - 1));
  return out;
}

int default_max_cutoff(int modes) {
  switch (modes) {
    case 0:
    case 1:
      return 256;
    case 2:
      return 128;
    case 3:
      return 64;
    case 4:
      return 24;
    default:
      return 12;
  }
}

PhysicalParams RunConfig::params() const { return PhysicalParams(omega, x0, d, rabi, 0.0); }

Geometry RunConfig::geometry() const {
  if (preset == Preset::Custom) return Geometry(positions, motion.value_or(MotionPolicy::Full), Preset::Custom);
  return Geometry::preset(preset, d).with_motion(motion.value_or(default_motion(preset)));
}

RunConfig parse_config(const std::string& text, const std::string& source) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const std::size_t upto = std::min(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    throw ConfigError(source, line, "", "invalid JSON");
  }
  const auto lines = json_line_map(text);
  const Reader top(root, "", lines, source);
  top.expect_object();
  top.allow({"task", "geometry", "potential", "params", "seed", "scan", "solver", "wigner", "bopes", "output", "threads"});

  RunConfig cfg;
  cfg.source = source;
  if (top.has("task")) {
    cfg.task = top.string("task");
    if (std::find(kTasks.begin(), kTasks.end(), cfg.task) == kTasks.end()) top.fail("task", "unknown task '" + cfg.task + "'");
  }

  // geometry
  if (!top.has("geometry")) top.fail("geometry", "required object is missing");
  const Reader geo = top.child("geometry");
  geo.allow({"preset", "positions", "motion"});
  const std::string preset = geo.choice("preset", {"dumbbell", "triangle", "tetrahedron", "custom"}, "custom");
  cfg.preset = parse_preset(preset);
  if (geo.has("motion")) cfg.motion = parse_motion(geo.choice("motion", {"axial", "planar", "full"}, "full"));
  if (cfg.preset == Preset::Custom) {
    if (!geo.has("positions")) geo.fail("positions", "custom geometry needs positions");
    const Json& pos = geo.raw("positions");
    if (!pos.is_array() || pos.empty()) geo.fail("positions", "expected a non-empty array of [x, y, z]");
    for (std::size_t i = 0; i < pos.size(); ++i) {
      const Json& p = pos[i];
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number()) {
        geo.fail("positions/" + std::to_string(i), "expected [x, y, z]");
      }
      cfg.positions.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
    }
    if (cfg.positions.size() > static_cast<std::size_t>(ElectronicConfig::kMaxAtoms)) {
      geo.fail("positions", "at most 16 atoms are supported");
    }
  } else if (geo.has("positions")) {
    geo.fail("positions", "positions are only allowed with preset \"custom\"");
  }

  // potential
  if (!top.has("potential")) top.fail("potential", "required object is missing");
  const Reader pot = top.child("potential");
  const std::string type = pot.choice("type", {"explicit", "power_law"}, "explicit");
  std::optional<double> explicit_nu;
  if (type == "explicit") {
    pot.allow({"type", "kappa", "xi", "nu", "V_d"});
    ExplicitCouplings ec;
    ec.kappa = pot.number("kappa", 0.0);
    ec.xi = pot.number("xi", 0.0);
    if (pot.has("nu")) explicit_nu = pot.positive("nu");
    ec.V_d = pot.number("V_d", 1.0);
    cfg.potential = ec;
  } else {
    pot.allow({"type", "terms"});
    if (!pot.has("terms") || !pot.raw("terms").is_array() || pot.raw("terms").empty()) {
      pot.fail("terms", "expected a non-empty array of {\"C\": ..., \"p\": ...}");
    }
    PowerLaw pl;
    const Json& terms = pot.raw("terms");
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Reader t(terms[i], pot.path() + "/terms/" + std::to_string(i), lines, source);
      t.expect_object();
      t.allow({"C", "p"});
      const int p = t.integer("p");
      if (p < 1) t.fail("p", "exponent must be at least 1");
      pl.terms.push_back(PowerLawTerm{t.number("C"), p});
    }
    cfg.potential = pl;
  }

  // params
  if (!top.has("params")) top.fail("params", "required object is missing");
  const Reader par = top.child("params");
  par.allow({"omega", "x0", "d", "nu", "rabi", "detuning"});
  cfg.omega = par.positive("omega", 1.0);
  cfg.x0 = par.positive("x0", 1.0);
  if (par.has("d") && par.has("nu")) par.fail("nu", "give either d or nu, not both");
  if (par.has("d")) {
    cfg.d = par.positive("d");
  } else if (par.has("nu")) {
    cfg.d = cfg.x0 / par.positive("nu");
  } else if (explicit_nu) {
    cfg.d = cfg.x0 / *explicit_nu;
  } else {
    par.fail("d", "need d or nu");
  }
  if (explicit_nu && std::abs(cfg.x0 / cfg.d - *explicit_nu) > 1e-12 * *explicit_nu) {
    pot.fail("nu", "disagrees with params (x0/d)");
  }
  if (auto* ec = std::get_if<ExplicitCouplings>(&cfg.potential)) ec->nu = cfg.x0 / cfg.d;
  cfg.rabi = par.number("rabi", 0.0);
  if (par.has("detuning")) {
    const Json& dj = par.raw("detuning");
    if (dj.is_number()) {
      cfg.detuning = DetuningRule::fixed(dj.get<double>());
    } else if (dj.is_string()) {
      try {
        cfg.detuning = DetuningRule::parse(dj.get<std::string>());
      } catch (const std::exception&) {
        par.fail("detuning", "expected \"-V\", \"-3V\" or a number");
      }
    } else {
      par.fail("detuning", "expected \"-V\", \"-3V\" or a number");
    }
  }

  if (top.has("seed")) {
    cfg.seed = top.string("seed");
    try {
      const auto c = ElectronicConfig::parse(*cfg.seed);
      if (cfg.preset == Preset::Custom ? c.size() != static_cast<int>(cfg.positions.size())
                                       : c.size() != cfg.geometry().size()) {
        top.fail("seed", "length does not match the atom count");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      top.fail("seed", "expected a bitstring such as \"0110\"");
    }
  }

  if (top.has("scan")) {
    const Reader sc = top.child("scan");
    sc.allow({"start", "stop", "samples", "units"});
    ScanRange r;
    r.start = sc.number("start");
    r.stop = sc.number("stop");
    r.samples = sc.integer("samples");
    if (r.samples < 1) sc.fail("samples", "must be a positive count");
    r.critical_units = sc.choice("units", {"critical", "absolute"}, "critical") == "critical";
    cfg.scan = r;
  }

  if (top.has("solver")) {
    const Reader so = top.child("solver");
    so.allow({"e_tol", "max_cutoff", "start_cutoff", "eig_tol", "memory_budget_mb", "block", "modes"});
    cfg.solver.e_tol = so.positive("e_tol", cfg.solver.e_tol);
    cfg.solver.eig_tol = so.positive("eig_tol", cfg.solver.eig_tol);
    cfg.solver.start_cutoff = so.integer("start_cutoff", cfg.solver.start_cutoff);
    if (cfg.solver.start_cutoff < 2) so.fail("start_cutoff", "must be at least 2");
    if (so.has("max_cutoff")) {
      cfg.solver.max_cutoff = so.integer("max_cutoff");
      if (cfg.solver.max_cutoff < cfg.solver.start_cutoff) so.fail("max_cutoff", "must be at least start_cutoff");
      cfg.max_cutoff_set = true;
    }
    if (so.has("memory_budget_mb")) {
      cfg.solver.budget_bytes = static_cast<std::size_t>(so.positive("memory_budget_mb") * 1024.0 * 1024.0);
    }
    cfg.block = so.choice("block", {"manifold", "pair"}, "manifold");
    cfg.modes = so.choice("modes", {"reduced", "full"}, "reduced") == "full" ? ModeSpace::Full : ModeSpace::Reduced;
  }

  if (top.has("wigner")) {
    const Reader w = top.child("wigner");
    w.allow({"mode", "extent", "samples"});
    cfg.wigner.mode = w.choice("mode", {"perpendicular", "parallel"}, "perpendicular");
    cfg.wigner.extent = w.positive("extent", cfg.wigner.extent);
    cfg.wigner.samples = w.integer("samples", cfg.wigner.samples);
    if (cfg.wigner.samples < 3) w.fail("samples", "must be at least 3");
  }

  if (top.has("bopes")) {
    const Reader b = top.child("bopes");
    b.allow({"box", "tol_q", "degeneracy_tol", "quantum", "refine_samples", "surface_samples"});
    cfg.bopes.minimize.box = b.positive("box", cfg.bopes.minimize.box);
    cfg.bopes.minimize.tol_q = b.positive("tol_q", cfg.bopes.minimize.tol_q);
    cfg.bopes.minimize.degeneracy_tol = b.positive("degeneracy_tol", cfg.bopes.minimize.degeneracy_tol);
    cfg.bopes.quantum = b.boolean("quantum", cfg.bopes.quantum);
    cfg.bopes.refine_samples = b.integer("refine_samples", cfg.bopes.refine_samples);
    if (cfg.bopes.refine_samples < 4) b.fail("refine_samples", "must be at least 4");
    cfg.bopes.surface_samples = b.integer("surface_samples", cfg.bopes.surface_samples);
    if (cfg.bopes.surface_samples < 2) b.fail("surface_samples", "must be at least 2");
  }

  if (top.has("output")) cfg.out_dir = top.string("output");
  cfg.threads = top.integer("threads", 1);
  if (cfg.threads < 1) top.fail("threads", "must be at least 1");

  // Geometry validity is part of the schema: report it against the geometry block.
  try {
    (void)cfg.geometry();
  } catch (const std::exception& e) {
    geo.fail("", e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path, 0, "", "cannot read config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

Json RunConfig::resolved() const {
  Json j;
  j["task"] = task;
  const Geometry g = geometry();
  Json geo;
  geo["preset"] = to_string(preset);
  geo["motion"] = to_string(g.motion());
  geo["positions"] = Json::array();
  for (const auto& p : g.positions()) geo["positions"].push_back(vec3(p));
  j["geometry"] = geo;

  Json pot;
  if (const auto* ec = std::get_if<ExplicitCouplings>(&potential)) {
    pot["type"] = "explicit";
    pot["kappa"] = ec->kappa;
    pot["xi"] = ec->xi;
    pot["nu"] = ec->nu;
    pot["V_d"] = ec->V_d;
  } else {
    pot["type"] = "power_law";
    pot["terms"] = Json::array();
    for (const auto& t : std::get<PowerLaw>(potential).terms) pot["terms"].push_back(Json{{"C", t.C}, {"p", t.p}});
  }
  j["potential"] = pot;

  Json par;
  par["omega"] = omega;
  par["x0"] = x0;
  par["d"] = d;
  par["nu"] = x0 / d;
  par["rabi"] = rabi;
  if (detuning.explicit_value) {
    par["detuning"] = detuning.value;
  } else {
    par["detuning"] = "-" + (detuning.multiple == 1.0 ? std::string() : Json(detuning.multiple).dump()) + "V";
  }
  j["params"] = par;
  j["seed"] = seed ? Json(*seed) : Json(nullptr);

  if (scan) {
    j["scan"] = Json{{"start", scan->start},
                     {"stop", scan->stop},
                     {"samples", scan->samples},
                     {"units", scan->critical_units ? "critical" : "absolute"}};
  }
  Json so;
  so["e_tol"] = solver.e_tol;
  so["start_cutoff"] = solver.start_cutoff;
  so["max_cutoff"] = max_cutoff_set ? Json(solver.max_cutoff) : Json("auto");
  so["eig_tol"] = solver.eig_tol;
  so["memory_budget_bytes"] = solver.budget_bytes;
  so["block"] = block;
  so["modes"] = modes == ModeSpace::Full ? "full" : "reduced";
  j["solver"] = so;
  j["wigner"] = Json{{"mode", wigner.mode}, {"extent", wigner.extent}, {"samples", wigner.samples}};
  j["bopes"] = Json{{"box", bopes.minimize.box},
                    {"tol_q", bopes.minimize.tol_q},
                    {"degeneracy_tol", bopes.minimize.degeneracy_tol},
                    {"quantum", bopes.quantum},
                    {"refine_samples", bopes.refine_samples},
                    {"surface_samples", bopes.surface_samples}};
  return j;
}

}  // namespace vibronic::cli
