#include "run_config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include <chernoff/random.hpp>
#include <chernoff/reference.hpp>

namespace cli {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& path, const std::string& what) {
  throw usage_error(path + ": " + what);
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                const std::string& path) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* a : allowed)
      if (key == a) { known = true; break; }
    if (!known) bad(path.empty() ? key : path + "." + key, "unknown config field");
  }
}

const json& need(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(path + "." + key, "required field is missing");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) bad(path, "expected a number");
  return v.get<double>();
}

double as_positive(const json& v, const std::string& path) {
  const double x = as_number(v, path);
  if (!(x > 0.0)) bad(path, "expected a positive number");
  return x;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1)
    bad(path, "expected a positive integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) bad(path, "expected a string");
  return v.get<std::string>();
}

std::vector<std::size_t> as_count_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) bad(path, "expected a non-empty array of positive integers");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_count(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// Series truncation indices: j = 0 (zeroth partial sum) is meaningful.
std::size_t as_index(const json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 0)
    bad(path, "expected a non-negative integer");
  return static_cast<std::size_t>(v.get<long long>());
}

std::vector<std::size_t> as_index_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty())
    bad(path, "expected a non-empty array of non-negative integers");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_index(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<double> as_number_list(const json& v, const std::string& path) {
  if (!v.is_array()) bad(path, "expected an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    out.push_back(as_number(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

// ---- field descriptors ----------------------------------------------------
//
// A real coefficient/potential field is a number (constant), or one of
//   {"const": v}
//   {"poly_centered": [c0, c1, ...]}   sum_m c_m y^m, y = x - L/2 (1-d,
//                                      signed) or y = |x - center| (d >= 2)
//   {"smooth_random": {"seed", "max_mode", "amplitude", "base"}}
chernoff::SampledField parse_field(const json& v, const chernoff::GridPtr& grid,
                                   const std::string& path) {
  if (v.is_number()) {
    const double c = v.get<double>();
    return chernoff::sample_real(grid, [c](std::span<const double>) { return c; });
  }
  if (!v.is_object()) bad(path, "expected a number or a field object");
  check_keys(v, {"const", "poly_centered", "smooth_random"}, path);
  if (v.size() != 1) bad(path, "expected exactly one field form");

  if (auto it = v.find("const"); it != v.end()) {
    const double c = as_number(*it, path + ".const");
    return chernoff::sample_real(grid, [c](std::span<const double>) { return c; });
  }

  if (auto it = v.find("poly_centered"); it != v.end()) {
    const std::vector<double> coeffs = as_number_list(*it, path + ".poly_centered");
    if (coeffs.empty()) bad(path + ".poly_centered", "expected at least one coefficient");
    const chernoff::Grid& g = *grid;
    const bool oned = g.dim() == 1;
    return chernoff::sample_real(grid, [&, coeffs](std::span<const double> x) {
      double y;
      if (oned) {
        y = x[0] - 0.5 * g.length(0);
      } else {
        double r2 = 0.0;
        for (std::size_t m = 0; m < x.size(); ++m) {
          const double d = x[m] - 0.5 * g.length(m);
          r2 += d * d;
        }
        y = std::sqrt(r2);
      }
      double acc = 0.0;
      for (std::size_t m = coeffs.size(); m-- > 0;) acc = acc * y + coeffs[m];
      return acc;
    });
  }

  const json& sr = v.at("smooth_random");
  if (!sr.is_object()) bad(path + ".smooth_random", "expected an object");
  check_keys(sr, {"seed", "max_mode", "amplitude", "base"}, path + ".smooth_random");
  const json& seed_v = need(sr, "seed", path + ".smooth_random");
  if (!seed_v.is_number_integer() || seed_v.get<long long>() < 0)
    bad(path + ".smooth_random.seed", "expected an unsigned integer");
  const auto seed = seed_v.get<std::uint64_t>();
  const std::size_t max_mode =
      as_count(need(sr, "max_mode", path + ".smooth_random"), path + ".smooth_random.max_mode");
  const double amplitude = as_positive(need(sr, "amplitude", path + ".smooth_random"),
                                       path + ".smooth_random.amplitude");
  const double base =
      sr.contains("base") ? as_number(sr["base"], path + ".smooth_random.base") : 0.0;
  return chernoff::random_smooth_field(grid, seed, max_mode, amplitude, base);
}

chernoff::RegulatorFn parse_regulator(const json& v) {
  if (v.is_string()) {
    const std::string name = v.get<std::string>();
    if (name == "arctan") return chernoff::RegulatorFn::arctan();
    if (name == "sin" || name == "sine") return chernoff::RegulatorFn::sine();
    if (name == "tanh") return chernoff::RegulatorFn::tanh();
    bad("regulator", "unknown regulator '" + name + "' (arctan, sin, tanh, or a custom object)");
  }
  if (!v.is_object()) bad("regulator", "expected a name or a custom-regulator object");
  check_keys(v, {"kind", "form", "coeffs", "bound", "lambda"}, "regulator");
  if (as_string(need(v, "kind", "regulator"), "regulator.kind") != "custom")
    bad("regulator.kind", "only 'custom' objects are accepted here");
  const std::string form = as_string(need(v, "form", "regulator"), "regulator.form");

  try {
    if (form == "poly") {
      const std::vector<double> coeffs =
          as_number_list(need(v, "coeffs", "regulator"), "regulator.coeffs");
      if (coeffs.empty()) bad("regulator.coeffs", "expected at least one coefficient");
      const double bound = as_positive(need(v, "bound", "regulator"), "regulator.bound");
      return chernoff::RegulatorFn::custom(
          "poly",
          [coeffs](double z) {
            double acc = 0.0;
            for (std::size_t m = coeffs.size(); m-- > 0;) acc = acc * z + coeffs[m];
            return acc;
          },
          bound);
    }
    if (form == "scaled-sin") {
      const double lambda = as_positive(need(v, "lambda", "regulator"), "regulator.lambda");
      return chernoff::RegulatorFn::custom(
          "scaled-sin", [lambda](double z) { return lambda * std::sin(z / lambda); }, lambda);
    }
  } catch (const std::invalid_argument& e) {
    bad("regulator", e.what());
  }
  bad("regulator.form", "unknown custom form '" + form + "' (poly, scaled-sin)");
}

chernoff::HamiltonianSpec parse_model(const json& model, const chernoff::GridPtr& grid,
                                      const chernoff::RegulatorFn& w, double a,
                                      std::string& name_out) {
  if (!model.is_object()) bad("model", "expected an object");
  const bool has_preset = model.contains("preset");
  const bool has_type = model.contains("type");
  if (has_preset == has_type)
    bad("model", "exactly one of 'preset' or an inline 'type' is required");

  if (has_preset) {
    check_keys(model, {"preset"}, "model");
    name_out = as_string(model["preset"], "model.preset");
    try {
      return chernoff::make_preset(name_out, grid, w, a);
    } catch (const std::invalid_argument& e) {
      bad("model.preset", e.what());
    }
  }

  name_out = "inline";
  const std::string type = as_string(model["type"], "model.type");
  try {
    if (type == "multid") {
      check_keys(model, {"type", "potential", "nonneg_override"}, "model");
      bool override_flag = false;
      if (model.contains("nonneg_override")) {
        if (!model["nonneg_override"].is_boolean())
          bad("model.nonneg_override", "expected a boolean");
        override_flag = model["nonneg_override"].get<bool>();
      }
      chernoff::SampledField field =
          parse_field(need(model, "potential", "model"), grid, "model.potential");
      chernoff::Potential pot(std::move(field), /*claim_nonneg=*/!override_flag);
      return chernoff::HamiltonianSpec(
          chernoff::MultiDSpec{std::move(pot), w, a, override_flag});
    }
    if (type == "oned") {
      check_keys(model, {"type", "a0", "a"}, "model");
      chernoff::SampledField a0 = parse_field(need(model, "a0", "model"), grid, "model.a0");
      const json& higher = need(model, "a", "model");
      if (!higher.is_array() || higher.empty())
        bad("model.a", "expected a non-empty array of coefficient fields (k = 1..K)");
      std::vector<chernoff::SampledField> ak;
      ak.reserve(higher.size());
      for (std::size_t k = 0; k < higher.size(); ++k)
        ak.push_back(parse_field(higher[k], grid, "model.a[" + std::to_string(k) + "]"));
      return chernoff::HamiltonianSpec(
          chernoff::OneDSpec{chernoff::CoefficientSet(std::move(a0), std::move(ak)), w});
    }
  } catch (const std::invalid_argument& e) {
    bad("model", e.what());
  }
  bad("model.type", "unknown model type '" + type + "' (oned, multid)");
}

InitialStateDesc parse_state(const json& v, std::size_t dim) {
  InitialStateDesc out;
  if (v.is_null()) {
    out.x0.assign(dim, 0.0);
    out.k0.assign(dim, 0.0);
    return out;
  }
  if (!v.is_object()) bad("initial_state", "expected an object");
  out.type = as_string(need(v, "type", "initial_state"), "initial_state.type");

  if (out.type == "gaussian") {
    check_keys(v, {"type", "sigma0", "x0", "k0"}, "initial_state");
    out.sigma0 = v.contains("sigma0") ? as_positive(v["sigma0"], "initial_state.sigma0") : 1.0;
    out.x0 = v.contains("x0") ? as_number_list(v["x0"], "initial_state.x0")
                              : std::vector<double>(dim, 0.0);
    out.k0 = v.contains("k0") ? as_number_list(v["k0"], "initial_state.k0")
                              : std::vector<double>(dim, 0.0);
    if (out.x0.size() != dim) bad("initial_state.x0", "dimension mismatch with grid");
    if (out.k0.size() != dim) bad("initial_state.k0", "dimension mismatch with grid");
    return out;
  }
  if (out.type == "plane") {
    check_keys(v, {"type", "modes"}, "initial_state");
    const json& modes = need(v, "modes", "initial_state");
    if (!modes.is_array() || modes.size() != dim)
      bad("initial_state.modes", "expected one integer mode number per axis");
    for (std::size_t m = 0; m < modes.size(); ++m) {
      const std::string p = "initial_state.modes[" + std::to_string(m) + "]";
      if (!modes[m].is_number_integer()) bad(p, "expected an integer mode number");
      out.modes.push_back(modes[m].get<long>());
    }
    return out;
  }
  if (out.type == "eigenstate") {
    check_keys(v, {"type", "level"}, "initial_state");
    const json& lvl = need(v, "level", "initial_state");
    if (!lvl.is_number_integer() || lvl.get<long long>() < 0)
      bad("initial_state.level", "expected a non-negative integer");
    out.level = static_cast<std::size_t>(lvl.get<long long>());
    return out;
  }
  if (out.type == "file") {
    check_keys(v, {"type", "path"}, "initial_state");
    out.path = as_string(need(v, "path", "initial_state"), "initial_state.path");
    return out;
  }
  bad("initial_state.type", "unknown type '" + out.type +
                                "' (gaussian, plane, eigenstate, file)");
}

}  // namespace

nlohmann::json load_config_json(const std::filesystem::path& path,
                                const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw usage_error("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw usage_error("config parse error in " + path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw usage_error("config root must be a JSON object");

  if (const char* env = std::getenv("CHERNOFF_SEED"); env && *env) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0')
      throw usage_error("CHERNOFF_SEED: expected an unsigned integer, got '" +
                        std::string(env) + "'");
    j["seed"] = v;
  }

  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw usage_error("--set expects key=value, got '" + item + "'");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);

    json* cursor = &j;
    std::size_t pos = 0;
    while (true) {
      const auto dot = key.find('.', pos);
      const std::string token = key.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (token.empty()) throw usage_error("--set " + key + ": empty path segment");
      const bool last = dot == std::string::npos;

      if (cursor->is_array()) {
        char* end = nullptr;
        const unsigned long idx = std::strtoul(token.c_str(), &end, 10);
        if (end == token.c_str() || *end != '\0')
          throw usage_error("--set " + key + ": '" + token + "' is not an array index");
        if (idx >= cursor->size())
          throw usage_error("--set " + key + ": index " + token + " out of range");
        cursor = &(*cursor)[idx];
      } else if (cursor->is_object() || cursor->is_null()) {
        cursor = &(*cursor)[token];
      } else {
        throw usage_error("--set " + key + ": '" + token + "' descends into a scalar");
      }

      if (last) break;
      pos = dot + 1;
    }

    try {
      *cursor = json::parse(value);
    } catch (const json::parse_error&) {
      *cursor = value;  // plain string
    }
  }
  return j;
}

RunConfig parse_config(json j) {
  RunConfig cfg;
  check_keys(j, {"model", "grid", "regulator", "a", "t", "n", "n_list", "j", "j_list",
                 "initial_state", "seed", "oracle", "splitstep_steps", "propagator",
                 "compare", "verify"},
             "");

  const json& grid_obj = need(j, "grid", "");
  if (!grid_obj.is_object()) bad("grid", "expected an object with 'n' and 'length'");
  check_keys(grid_obj, {"n", "length"}, "grid");
  const std::vector<std::size_t> n_points =
      as_count_list(need(grid_obj, "n", "grid"), "grid.n");
  const std::vector<double> length_raw =
      as_number_list(need(grid_obj, "length", "grid"), "grid.length");
  try {
    cfg.grid = chernoff::make_grid(n_points, length_raw);
  } catch (const std::invalid_argument& e) {
    bad("grid", e.what());
  }

  chernoff::RegulatorFn w =
      j.contains("regulator") ? parse_regulator(j["regulator"]) : chernoff::RegulatorFn::arctan();

  cfg.equation_a = j.contains("a") ? as_number(j["a"], "a") : 1.0;

  cfg.spec = parse_model(need(j, "model", ""), cfg.grid, w, cfg.equation_a, cfg.model_name);
  if (cfg.spec->is_oned() && cfg.equation_a != 1.0)
    bad("a", "applies to multi-dimensional models only");

  if (j.contains("t")) {
    const double t = as_number(j["t"], "t");
    if (t < 0.0) bad("t", "expected t >= 0");
    cfg.t = t;
  }
  if (j.contains("n")) cfg.n = as_count(j["n"], "n");
  if (j.contains("n_list")) cfg.n_list = as_count_list(j["n_list"], "n_list");
  if (j.contains("j")) cfg.j_list = {as_index(j["j"], "j")};
  if (j.contains("j_list")) {
    auto more = as_index_list(j["j_list"], "j_list");
    cfg.j_list.insert(cfg.j_list.end(), more.begin(), more.end());
  }

  cfg.state = parse_state(j.contains("initial_state") ? j["initial_state"] : json(),
                          cfg.grid->dim());

  if (j.contains("seed")) {
    const json& s = j["seed"];
    if (!s.is_number_integer() || s.get<long long>() < 0)
      bad("seed", "expected an unsigned integer");
    cfg.seed = s.get<std::uint64_t>();
  }

  if (j.contains("oracle")) {
    cfg.oracle = as_string(j["oracle"], "oracle");
    if (cfg.oracle != "auto" && cfg.oracle != "analytic" && cfg.oracle != "dense" &&
        cfg.oracle != "splitstep")
      bad("oracle", "expected auto, analytic, dense, or splitstep");
  }
  if (j.contains("splitstep_steps"))
    cfg.splitstep_steps = as_count(j["splitstep_steps"], "splitstep_steps");

  if (j.contains("propagator")) {
    const json& p = j["propagator"];
    if (!p.is_object()) bad("propagator", "expected an object");
    check_keys(p, {"taylor_tol", "max_terms", "squaring_threshold"}, "propagator");
    if (p.contains("taylor_tol"))
      cfg.prop.taylor_tol = as_positive(p["taylor_tol"], "propagator.taylor_tol");
    if (p.contains("max_terms"))
      cfg.prop.max_terms = as_count(p["max_terms"], "propagator.max_terms");
    if (p.contains("squaring_threshold"))
      cfg.prop.squaring_threshold =
          as_positive(p["squaring_threshold"], "propagator.squaring_threshold");
  }

  if (j.contains("compare")) {
    const json& c = j["compare"];
    if (!c.is_object()) bad("compare", "expected an object");
    check_keys(c, {"steps_list"}, "compare");
    if (c.contains("steps_list"))
      cfg.compare_steps = as_count_list(c["steps_list"], "compare.steps_list");
  }

  if (j.contains("verify")) {
    const json& v = j["verify"];
    if (!v.is_object()) bad("verify", "expected an object");
    check_keys(v, {"trials", "tol"}, "verify");
    if (v.contains("trials")) cfg.verify_trials = as_count(v["trials"], "verify.trials");
    if (v.contains("tol")) cfg.verify_tol = as_positive(v["tol"], "verify.tol");
  }

  cfg.echo = std::move(j);
  return cfg;
}

chernoff::WaveFunction realize_initial_state(const RunConfig& cfg) {
  const chernoff::Grid& g = *cfg.grid;
  const InitialStateDesc& st = cfg.state;
  try {
    if (st.type == "gaussian")
      return chernoff::analytic_free_gaussian(st.sigma0, st.x0, st.k0, 0.0, cfg.grid);

    if (st.type == "plane") {
      std::vector<double> kappa(g.dim());
      for (std::size_t m = 0; m < g.dim(); ++m)
        kappa[m] = 2.0 * std::numbers::pi * double(st.modes[m]) / g.length(m);
      double vol = 1.0;
      for (std::size_t m = 0; m < g.dim(); ++m) vol *= g.length(m);
      const double amp = 1.0 / std::sqrt(vol);
      return chernoff::sample(cfg.grid, [&](std::span<const double> x) {
        double phase = 0.0;
        for (std::size_t m = 0; m < x.size(); ++m) phase += kappa[m] * x[m];
        return std::polar(amp, phase);
      });
    }

    if (st.type == "eigenstate")
      return chernoff::analytic_harmonic_state(st.level, 0.0, cfg.grid);

    // file
    chernoff::WaveFunction f = chernoff::read_wf(st.path);
    if (!(*f.grid() == g))
      throw usage_error("initial_state.path: wavefunction grid does not match config grid");
    return f;
  } catch (const std::invalid_argument& e) {
    throw usage_error(std::string("initial_state: ") + e.what());
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const usage_error*>(&e)) throw;
    throw usage_error(std::string("initial_state: ") + e.what());
  }
}

}  // namespace cli
