#include "run_config.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include "pdirac/coker_gauge.hpp"
#include "pdirac/errors.hpp"
#include "pdirac/field_io.hpp"
#include "pdirac/wiener.hpp"

namespace pdirac::cli {
namespace fs = std::filesystem;

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& msg) {
  throw FormatError("config " + where + ": " + msg);
}

void allow_keys(const json& obj, const std::string& where, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) schema(where, "expected an object");
  std::set<std::string> ok(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!ok.count(it.key())) schema(where, "unknown key '" + it.key() + "'");
}

const json& section(const json& doc, const char* name) {
  static const json empty = json::object();
  auto it = doc.find(name);
  return it == doc.end() ? empty : *it;
}

double get_number(const json& obj, const std::string& where, const char* key, double def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_number()) schema(where + "." + key, "expected a number");
  return it->get<double>();
}

long long get_int(const json& obj, const std::string& where, const char* key, long long def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_number_integer() && !it->is_number_unsigned())
    schema(where + "." + key, "expected an integer");
  return it->get<long long>();
}

bool get_bool(const json& obj, const std::string& where, const char* key, bool def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_boolean()) schema(where + "." + key, "expected true or false");
  return it->get<bool>();
}

std::string get_string(const json& obj, const std::string& where, const char* key,
                       const std::string& def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_string()) schema(where + "." + key, "expected a string");
  return it->get<std::string>();
}

// A list of numbers, or {"from": a, "to": b, "count": n} (inclusive), or a
// single number.
std::vector<double> get_grid(const json& obj, const std::string& where, const char* key,
                             std::vector<double> def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  const std::string w = where + "." + key;
  if (it->is_number()) return {it->get<double>()};
  if (it->is_array()) {
    std::vector<double> v;
    for (const auto& x : *it) {
      if (!x.is_number()) schema(w, "expected numbers");
      v.push_back(x.get<double>());
    }
    return v;
  }
  if (it->is_object()) {
    allow_keys(*it, w, {"from", "to", "count"});
    const double lo = get_number(*it, w, "from", 0.0), hi = get_number(*it, w, "to", 0.0);
    const long long n = get_int(*it, w, "count", 0);
    if (n < 1) schema(w, "count must be positive");
    std::vector<double> v(std::size_t(n), lo);
    for (long long i = 0; i < n; ++i) v[std::size_t(i)] = n == 1 ? lo : lo + (hi - lo) * double(i) / double(n - 1);
    return v;
  }
  schema(w, "expected a number, a list or {from, to, count}");
}

Eigen::Vector2d get_vec2(const json& obj, const std::string& where, const char* key,
                         Eigen::Vector2d def) {
  auto it = obj.find(key);
  if (it == obj.end()) return def;
  if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number())
    schema(where + "." + key, "expected [x, y]");
  return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

json vec_json(const Eigen::Vector2d& v) { return json::array({v[0], v[1]}); }

void check_field_spec(const json& spec, const std::string& where) {
  if (spec.is_null() || spec.is_number() || spec.is_string()) {
    if (spec.is_string() && spec.get<std::string>() != "canonical")
      schema(where, "the only string value is \"canonical\"");
    return;
  }
  if (!spec.is_object() || spec.size() != 1)
    schema(where, "expected a number or one of {constant, coefficients, file}");
  if (spec.contains("constant")) {
    const auto& c = spec["constant"];
    if (!(c.is_number() || (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number())))
      schema(where + ".constant", "expected x or [re, im]");
  } else if (spec.contains("coefficients")) {
    const auto& c = spec["coefficients"];
    if (!c.is_array()) schema(where + ".coefficients", "expected a list of [n1, n2, re, im]");
    for (const auto& r : c)
      if (!r.is_array() || r.size() < 3 || r.size() > 4 || !r[0].is_number_integer() ||
          !r[1].is_number_integer() || !r[2].is_number() || (r.size() == 4 && !r[3].is_number()))
        schema(where + ".coefficients", "expected entries [n1, n2, re] or [n1, n2, re, im]");
  } else if (spec.contains("file")) {
    if (!spec["file"].is_string()) schema(where + ".file", "expected a path");
  } else {
    schema(where, "unknown field source '" + spec.begin().key() + "'");
  }
}

json field_section(const json& doc, const char* name, std::initializer_list<const char*> keys) {
  const json& s = section(doc, name);
  allow_keys(s, name, keys);
  json out = json::object();
  for (auto it = s.begin(); it != s.end(); ++it) {
    check_field_spec(it.value(), std::string(name) + "." + it.key());
    out[it.key()] = it.value();
  }
  return out;
}

std::string resolve(const std::string& base, const std::string& p) {
  fs::path path(p);
  if (path.is_relative() && !base.empty()) path = fs::path(base) / path;
  return path.lexically_normal().string();
}

}  // namespace

json read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config '" + path + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw FormatError("config '" + path + "': " + e.what());
  }
}

RunConfig parse_config(const json& doc, const std::string& source_path, const Overrides& ov) {
  allow_keys(doc, "root",
             {"grid", "run", "coefficients", "potential", "reduced_potential", "gauge_data", "bands",
              "sweep", "gauge", "verify", "wiener", "profile", "description"});
  RunConfig c;
  c.source_path = source_path;
  c.base_dir = source_path.empty() ? "" : fs::path(source_path).parent_path().string();

  const json& grid = section(doc, "grid");
  allow_keys(grid, "grid", {"M", "S"});
  c.M = int(ov.M >= 0 ? ov.M : get_int(grid, "grid", "M", 8));
  c.S = int(ov.S >= 0 ? ov.S : get_int(grid, "grid", "S", 0));
  if (c.M < 0 || c.M > 64) schema("grid.M", "must lie in [0, 64]");
  if (c.S < 0) schema("grid.S", "must be nonnegative (0 selects automatic resolutions)");

  const json& run = section(doc, "run");
  allow_keys(run, "run", {"seed", "workers", "out"});
  const long long seed = ov.seed >= 0 ? ov.seed : get_int(run, "run", "seed", 1);
  if (seed < 0) schema("run.seed", "must be nonnegative");
  c.seed = std::uint64_t(seed);
  c.workers = int(ov.workers >= 0 ? ov.workers : get_int(run, "run", "workers", 1));
  if (c.workers < 1) schema("run.workers", "must be at least 1");
  c.out_dir = !ov.out_dir.empty() ? ov.out_dir : get_string(run, "run", "out", "out");

  const json& co = section(doc, "coefficients");
  allow_keys(co, "coefficients", {"F", "G", "H", "p", "q", "F_bound"});
  for (const char* k : {"F", "G", "H"}) {
    json spec = co.contains(k) ? co[k] : json(std::string(k) == "F" ? 0.0 : 1.0);
    check_field_spec(spec, std::string("coefficients.") + k);
    if (spec.is_string()) schema(std::string("coefficients.") + k, "must not be \"canonical\"");
    c.coeff_specs[k] = spec;
  }
  c.bounds.p = get_number(co, "coefficients", "p", 1.0);
  c.bounds.q = get_number(co, "coefficients", "q", 1.0);
  c.bounds.F_bound = get_number(co, "coefficients", "F_bound", 0.0);
  if (!(c.bounds.q > 0.0 && c.bounds.q <= c.bounds.p))
    schema("coefficients", "need 0 < q <= p");
  if (c.bounds.F_bound < 0.0) schema("coefficients.F_bound", "must be nonnegative");

  c.potential_specs = field_section(doc, "potential", {"V0", "V1", "V2", "V3"});
  c.reduced_specs = field_section(doc, "reduced_potential", {"Vt0", "Vt3", "Psi"});
  c.gauge_specs = field_section(doc, "gauge_data", {"C1", "C2"});
  for (auto it = c.potential_specs.begin(); it != c.potential_specs.end(); ++it)
    if (it->is_string()) schema("potential." + it.key(), "must not be \"canonical\"");
  for (const char* k : {"Vt0", "Vt3"})
    if (c.reduced_specs.contains(k) && c.reduced_specs[k].is_string())
      schema(std::string("reduced_potential.") + k, "must not be \"canonical\"");
  if (!c.reduced_specs.contains("Psi")) c.reduced_specs["Psi"] = "canonical";

  const json& b = section(doc, "bands");
  allow_keys(b, "bands", {"k_grid", "kpoints", "count", "mode", "dump_operator"});
  if (b.contains("k_grid")) {
    const auto& g = b["k_grid"];
    if (!g.is_array() || g.size() != 2 || !g[0].is_number_integer() || !g[1].is_number_integer() ||
        g[0].get<int>() < 1 || g[1].get<int>() < 1)
      schema("bands.k_grid", "expected [n1, n2] with positive entries");
    c.bands.n1 = g[0].get<int>();
    c.bands.n2 = g[1].get<int>();
  }
  if (b.contains("kpoints")) {
    if (!b["kpoints"].is_array()) schema("bands.kpoints", "expected a list of [k1, k2]");
    for (const auto& k : b["kpoints"]) {
      if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
        schema("bands.kpoints", "expected a list of [k1, k2]");
      c.bands.kpoints.emplace_back(k[0].get<double>(), k[1].get<double>());
    }
  }
  c.bands.count = int(get_int(b, "bands", "count", 0));
  if (c.bands.count < 0) schema("bands.count", "must be nonnegative");
  c.bands.mode = get_string(b, "bands", "mode", "automatic");
  if (c.bands.mode != "automatic" && c.bands.mode != "self_adjoint" &&
      c.bands.mode != "singular_values")
    schema("bands.mode", "expected automatic, self_adjoint or singular_values");
  c.bands.dump_operator = get_bool(b, "bands", "dump_operator", false);

  const json& s = section(doc, "sweep");
  allow_keys(s, "sweep", {"e", "k_shift", "kappa_shift", "k1", "k2", "mu_tilde", "method"});
  c.sweep.e = get_vec2(s, "sweep", "e", c.sweep.e);
  c.sweep.k_shift = get_vec2(s, "sweep", "k_shift", c.sweep.k_shift);
  c.sweep.kappa_shift = get_vec2(s, "sweep", "kappa_shift", c.sweep.kappa_shift);
  c.sweep.k1 = get_number(s, "sweep", "k1", kPi);
  c.sweep.k2 = get_grid(s, "sweep", "k2", {0.0});
  c.sweep.mu_tilde = get_grid(s, "sweep", "mu_tilde", [] {
    std::vector<double> v(21);
    for (int i = 0; i < 21; ++i) v[std::size_t(i)] = kPi * i;
    return v;
  }());
  c.sweep.method = get_string(s, "sweep", "method", "automatic");
  if (c.sweep.method != "automatic" && c.sweep.method != "dense" && c.sweep.method != "iterative")
    schema("sweep.method", "expected automatic, dense or iterative");

  const json& g = section(doc, "gauge");
  allow_keys(g, "gauge", {"mu", "lambdas", "delta"});
  c.gauge.general = !c.gauge_specs.empty();
  c.gauge.mu = get_number(g, "gauge", "mu", 1.0);
  c.gauge.lambdas = get_grid(g, "gauge", "lambdas", {0.0});
  c.gauge.delta = get_number(g, "gauge", "delta", 1e-3);
  if (!(c.gauge.delta > 0.0)) schema("gauge.delta", "must be positive");

  const json& v = section(doc, "verify");
  allow_keys(v, "verify", {"mu_over_pi", "a", "a0", "k2", "window", "trials", "theta",
                           "check_admissibility", "c1", "c8", "eps_grid", "a_prime"});
  c.verify.mu_over_pi = int(get_int(v, "verify", "mu_over_pi", 16));
  if (c.verify.mu_over_pi < 1) schema("verify.mu_over_pi", "must be a positive integer");
  c.verify.a = get_number(v, "verify", "a", 4.0 * kPi);
  c.verify.a0 = get_number(v, "verify", "a0", 4.0 * kPi);
  c.verify.k2 = get_number(v, "verify", "k2", 0.0);
  c.verify.window = int(get_int(v, "verify", "window", 0));
  c.verify.trials = int(get_int(v, "verify", "trials", 100));
  if (c.verify.trials < 1) schema("verify.trials", "must be positive");
  c.verify.theta = get_number(v, "verify", "theta", 0.0);
  c.verify.check_admissibility = get_bool(v, "verify", "check_admissibility", true);
  c.verify.c1 = get_number(v, "verify", "c1", 0.0);
  c.verify.c8 = get_number(v, "verify", "c8", 0.0);
  c.verify.eps_grid = get_grid(v, "verify", "eps_grid", {0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0});
  c.verify.a_prime = get_number(v, "verify", "a_prime", 0.0);

  const json& w = section(doc, "wiener");
  allow_keys(w, "wiener", {"N_max", "theta", "taylor_terms", "samples_per_oscillation", "W"});
  c.wiener.N_max = int(get_int(w, "wiener", "N_max", 1024));
  if (c.wiener.N_max < 1) schema("wiener.N_max", "must be positive");
  c.wiener.theta = get_number(w, "wiener", "theta", 0.5);
  if (!(c.wiener.theta > 0.0)) schema("wiener.theta", "must be positive");
  c.wiener.taylor_terms = int(get_int(w, "wiener", "taylor_terms", 12));
  if (c.wiener.taylor_terms < 1) schema("wiener.taylor_terms", "must be positive");
  c.wiener.samples_per_oscillation = get_number(w, "wiener", "samples_per_oscillation", 8.0);
  c.wiener_W = w.contains("W") ? w["W"] : json(nullptr);
  check_field_spec(c.wiener_W, "wiener.W");

  const json& p = section(doc, "profile");
  allow_keys(p, "profile", {"b_grid", "eps_grid", "t_grid", "counts", "W"});
  c.profile.b_grid = get_grid(p, "profile", "b_grid", {});
  c.profile.eps_grid = get_grid(p, "profile", "eps_grid", {});
  c.profile.t_grid = get_grid(p, "profile", "t_grid", {});
  if (p.contains("counts")) {
    if (!p["counts"].is_array()) schema("profile.counts", "expected a list of integers");
    for (const auto& n : p["counts"]) {
      if (!n.is_number_integer() || n.get<int>() < 0)
        schema("profile.counts", "expected nonnegative integers");
      c.profile.counts.push_back(n.get<int>());
    }
  }
  c.profile_W = p.contains("W") ? p["W"] : json(nullptr);
  check_field_spec(c.profile_W, "profile.W");

  // effective document: every default spelled out
  json e;
  e["grid"] = {{"M", c.M}, {"S", c.S}};
  e["run"] = {{"seed", c.seed}, {"workers", c.workers}, {"out", c.out_dir}};
  e["coefficients"] = c.coeff_specs;
  e["coefficients"]["p"] = c.bounds.p;
  e["coefficients"]["q"] = c.bounds.q;
  e["coefficients"]["F_bound"] = c.bounds.F_bound;
  e["potential"] = c.potential_specs;
  e["reduced_potential"] = c.reduced_specs;
  e["gauge_data"] = c.gauge_specs;
  json kp = json::array();
  for (const auto& k : c.bands.kpoints) kp.push_back(vec_json(k));
  e["bands"] = {{"k_grid", {c.bands.n1, c.bands.n2}}, {"kpoints", kp}, {"count", c.bands.count},
                {"mode", c.bands.mode}, {"dump_operator", c.bands.dump_operator}};
  e["sweep"] = {{"e", vec_json(c.sweep.e)}, {"k_shift", vec_json(c.sweep.k_shift)},
                {"kappa_shift", vec_json(c.sweep.kappa_shift)}, {"k1", c.sweep.k1},
                {"k2", c.sweep.k2}, {"mu_tilde", c.sweep.mu_tilde}, {"method", c.sweep.method}};
  e["gauge"] = {{"mu", c.gauge.mu}, {"lambdas", c.gauge.lambdas}, {"delta", c.gauge.delta}};
  e["verify"] = {{"mu_over_pi", c.verify.mu_over_pi}, {"a", c.verify.a}, {"a0", c.verify.a0},
                 {"k2", c.verify.k2}, {"window", c.verify.window}, {"trials", c.verify.trials},
                 {"theta", c.verify.theta}, {"check_admissibility", c.verify.check_admissibility},
                 {"c1", c.verify.c1}, {"c8", c.verify.c8}, {"eps_grid", c.verify.eps_grid},
                 {"a_prime", c.verify.a_prime}};
  e["wiener"] = {{"N_max", c.wiener.N_max}, {"theta", c.wiener.theta},
                 {"taylor_terms", c.wiener.taylor_terms},
                 {"samples_per_oscillation", c.wiener.samples_per_oscillation}, {"W", c.wiener_W}};
  e["profile"] = {{"b_grid", c.profile.b_grid}, {"eps_grid", c.profile.eps_grid},
                  {"t_grid", c.profile.t_grid}, {"counts", c.profile.counts}, {"W", c.profile_W}};
  c.effective = std::move(e);
  return c;
}

RunConfig load_config(const std::string& path, const Overrides& ov) {
  return parse_config(read_document(path), path, ov);
}

PeriodicScalarField build_field(const json& spec, const FourierGrid& grid, const std::string& base_dir,
                                bool real, const std::string& name, FieldSource* source) {
  FieldSource src;
  PeriodicScalarField f(grid);
  try {
    if (spec.is_null()) {
      src.kind = "zero";
    } else if (spec.is_number()) {
      src.kind = "constant";
      f = PeriodicScalarField::constant(grid, spec.get<double>());
    } else if (spec.is_string()) {
      throw FormatError(name + ": \"canonical\" is not allowed here");
    } else if (spec.contains("constant")) {
      src.kind = "constant";
      const auto& c = spec["constant"];
      f = PeriodicScalarField::constant(
          grid, c.is_number() ? cplx(c.get<double>()) : cplx(c[0].get<double>(), c[1].get<double>()));
    } else if (spec.contains("coefficients")) {
      src.kind = "coefficients";
      std::vector<CoefficientRecord> recs;
      for (const auto& r : spec["coefficients"])
        recs.push_back({r[0].get<int>(), r[1].get<int>(), r[2].get<double>(),
                        r.size() == 4 ? r[3].get<double>() : 0.0});
      f = field_from_records(recs, grid);
    } else {
      src.kind = "file";
      src.path = resolve(base_dir, spec["file"].get<std::string>());
      f = load_field(src.path, grid);
    }
  } catch (const GridMismatch& e) {
    throw FormatError(name + ": " + e.what());
  } catch (const FormatError& e) {
    throw FormatError(name + ": " + e.what());
  }
  if (real) {
    try {
      f = f.as_real(1e-12);
    } catch (const std::invalid_argument&) {
      throw FormatError(name + ": field must be real-valued (phi_{-N} = conj(phi_N))");
    }
  }
  if (source) *source = src;
  return f;
}

CoefficientSet build_coefficients(const RunConfig& cfg, std::vector<FieldSource>* sources) {
  const FourierGrid g = cfg.grid();
  FieldSource sf, sg, sh;
  auto F = build_field(cfg.coeff_specs["F"], g, cfg.base_dir, true, "coefficients.F", &sf);
  auto G = build_field(cfg.coeff_specs["G"], g, cfg.base_dir, true, "coefficients.G", &sg);
  auto H = build_field(cfg.coeff_specs["H"], g, cfg.base_dir, true, "coefficients.H", &sh);
  if (sources) sources->insert(sources->end(), {sf, sg, sh});
  return CoefficientSet(F, G, H, cfg.bounds);
}

MatrixPotential build_potential(const RunConfig& cfg, std::vector<FieldSource>* sources) {
  const FourierGrid g = cfg.grid();
  MatrixPotential V(g);
  const char* names[] = {"V0", "V1", "V2", "V3"};
  PeriodicScalarField* slots[] = {&V.V0, &V.V1, &V.V2, &V.V3};
  for (int l = 0; l < 4; ++l) {
    const json spec = cfg.potential_specs.contains(names[l]) ? cfg.potential_specs[names[l]] : json();
    FieldSource src;
    *slots[l] = build_field(spec, g, cfg.base_dir, false, std::string("potential.") + names[l], &src);
    // real components keep their flag so Hermitian potentials are recognized
    if (slots[l]->hermitian_defect() <= 1e-12) *slots[l] = slots[l]->as_real(1e-12);
    if (sources) sources->push_back(src);
  }
  return V;
}

std::vector<std::string> input_files(const RunConfig& cfg) {
  std::vector<std::string> out;
  if (!cfg.source_path.empty()) out.push_back(cfg.source_path);
  auto scan = [&](const json& specs) {
    if (specs.is_object() && specs.contains("file")) {
      out.push_back(resolve(cfg.base_dir, specs["file"].get<std::string>()));
      return;
    }
    if (!specs.is_object()) return;
    for (const auto& s : specs)
      if (s.is_object() && s.contains("file")) out.push_back(resolve(cfg.base_dir, s["file"].get<std::string>()));
  };
  scan(cfg.coeff_specs);
  scan(cfg.potential_specs);
  scan(cfg.reduced_specs);
  scan(cfg.gauge_specs);
  scan(cfg.wiener_W);
  scan(cfg.profile_W);
  return out;
}

std::vector<Diagnostic> validate_config(const RunConfig& cfg) {
  std::vector<Diagnostic> out;
  const int need = FourierGrid::min_resolution(cfg.M);
  if (cfg.S > 0 && cfg.S < need)
    out.push_back({"grid", "S = " + std::to_string(cfg.S) + " is below 2(2M + 1) = " +
                               std::to_string(need)});

  std::optional<CoefficientSet> coeffs;
  try {
    coeffs.emplace(build_coefficients(cfg));
  } catch (const FormatError& e) {
    out.push_back({"schema", e.what()});
    return out;
  }
  for (const auto& v : coeffs->check_membership()) {
    std::ostringstream m;
    m.precision(6);
    m << v.field << " = " << v.value << " violates bound " << v.bound << " at sample (" << v.i << ", "
      << v.j << "), x = (" << v.x1 << ", " << v.x2 << ")";
    out.push_back({"membership", m.str()});
  }
  try {
    build_potential(cfg);
  } catch (const FormatError& e) {
    out.push_back({"schema", e.what()});
  }

  // phase resolution for the Wiener averages at the requested N_max
  if (cfg.S > 0 && out.empty()) {
    try {
      PeriodicScalarField psi(cfg.grid());
      const json& spec = cfg.reduced_specs["Psi"];
      if (spec.is_string())
        psi = solve_canonical_gauge(*coeffs).Psi;
      else
        psi = build_field(spec, cfg.grid(), cfg.base_dir, true, "reduced_potential.Psi");
      const int req = required_resolution(psi, cfg.wiener.N_max, cfg.wiener.samples_per_oscillation);
      if (cfg.S < req)
        out.push_back({"phase_resolution", "S = " + std::to_string(cfg.S) + " is below the " +
                                               std::to_string(req) + " samples per side needed at N_max = " +
                                               std::to_string(cfg.wiener.N_max)});
    } catch (const FormatError& e) {
      out.push_back({"schema", e.what()});
    } catch (const Error& e) {
      out.push_back({"phase_resolution", std::string("cannot build Psi: ") + e.what()});
    }
  }
  return out;
}

}  // namespace pdirac::cli
