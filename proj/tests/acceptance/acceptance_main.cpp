// Acceptance gate: one line per criterion, PASS or FAIL, with the measured
// quantity and the pinned bound. Run all criteria (no arguments), a subset
// (--criterion N, repeatable), or refresh the frozen calibration values
// (--calibrate, criterion 6 only).
//
// Exit code 0 iff every criterion that ran passed.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <chernoff/operators.hpp>
#include <chernoff/propagator.hpp>
#include <chernoff/random.hpp>
#include <chernoff/reference.hpp>
#include <chernoff/verify.hpp>

#include "json.hpp"

using namespace chernoff;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string name;
  std::string detail;
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

double rel_l2(const WaveFunction& a, const WaveFunction& b) {
  std::vector<cxd> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
  return norm(WaveFunction(a.grid(), std::move(diff))) / norm(b);
}

double abs_l2(const WaveFunction& a, const WaveFunction& b) {
  std::vector<cxd> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
  return norm(WaveFunction(a.grid(), std::move(diff)));
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  const double ratio = std::pow(hi / lo, 1.0 / double(points - 1));
  double v = lo;
  for (std::size_t i = 0; i < points; ++i, v *= ratio) out[i] = v;
  out.back() = hi;
  return out;
}

WaveFunction packet(const GridPtr& grid) {
  const Grid& g = *grid;
  return sample(grid, [&g](std::span<const double> x) {
    double q = 0.0, phase = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double y = x[m] - 0.5 * g.length(m);
      q += y * y;
      phase += y;
    }
    return std::polar(std::exp(-0.5 * q), phase);
  });
}

const std::vector<std::string> oned_presets = {"free",       "harmonic",
                                               "quartic",    "anharmonic",
                                               "sturm-liouville", "momentum-poly"};

// Variable-coefficient order-2 model used alongside the presets wherever
// "every small spec" is exercised.
HamiltonianSpec k2_variable_spec(const GridPtr& grid) {
  const Grid& g = *grid;
  auto a0 = sample_real(grid, [&g](std::span<const double> x) {
    const double y = x[0] - 0.5 * g.length(0);
    return 0.5 * y * y;
  });
  auto a1 = random_smooth_field(grid, 0xC61, 2, 0.3, -1.0);
  auto a2 = random_smooth_field(grid, 0xC62, 2, 0.25, 1.0);
  return HamiltonianSpec(
      OneDSpec{CoefficientSet(std::move(a0), {std::move(a1), std::move(a2)}),
               RegulatorFn::arctan()});
}

// --- criterion 1: unitarity of the iterate ---------------------------------
// Every preset (d=1, N=256, L=32; free and harmonic additionally at d=2,
// 32x32, L=16), gaussian packet sigma0=1, k0=1 per axis, all (t, n) in
// {0.1, 0.5, 1.0} x {2^4, 2^8, 2^12}: | ||psi_t|| / ||psi_0|| - 1 | <= 1e-9.
Outcome criterion1() {
  constexpr double bound = 1e-9;
  const std::vector<double> ts{0.1, 0.5, 1.0};
  const std::vector<std::size_t> ns{16, 256, 4096};

  struct Case {
    std::string preset;
    GridPtr grid;
  };
  std::vector<Case> cases;
  for (const auto& p : oned_presets) cases.push_back({p, make_grid({256}, {32.0})});
  cases.push_back({"free", make_grid({32, 32}, {16.0, 16.0})});
  cases.push_back({"harmonic", make_grid({32, 32}, {16.0, 16.0})});

  double worst = 0.0;
  std::string worst_at;
  for (const auto& c : cases) {
    const HamiltonianSpec spec = make_preset(c.preset, c.grid);
    const std::vector<double> x0(c.grid->dim(), 0.0);
    const std::vector<double> k0(c.grid->dim(), 1.0);
    const WaveFunction psi0 = analytic_free_gaussian(1.0, x0, k0, 0.0, c.grid);
    const double n0 = norm(psi0);
    for (double t : ts)
      for (std::size_t n : ns) {
        PropagatorConfig cfg;
        cfg.n = n;
        const double defect = std::abs(norm(propagate(t, spec, cfg, psi0)) / n0 - 1.0);
        if (defect > worst) {
          worst = defect;
          worst_at = c.preset + (c.grid->dim() == 2 ? " d=2" : "") + " t=" +
                     sci(t) + " n=" + std::to_string(n);
        }
      }
  }
  return {worst <= bound, "unitarity of the iterate",
          "worst | ||psi_t||/||psi_0|| - 1 | = " + sci(worst) + " (" + worst_at +
              "), bound " + sci(bound)};
}

// --- criterion 2: self-adjointness of the step families --------------------
// 200 random pairs, tol 1e-11, t in {1e-4, 1e-2, 0.5}, every preset's family
// on d=1 N=128 L=32 plus the free family at d=2.
Outcome criterion2() {
  constexpr double tol = 1e-11;
  const std::vector<double> ts{1e-4, 1e-2, 0.5};
  double worst = 0.0;
  std::string worst_at;
  bool all_pass = true;

  auto run = [&](const std::string& label, const HamiltonianSpec& spec,
                 const GridPtr& grid) {
    const PropertyReport rep =
        verify_self_adjoint(step_family(spec), grid, ts, 200, tol, 0xACCE);
    all_pass = all_pass && rep.pass;
    if (rep.worst_violation > worst) {
      worst = rep.worst_violation;
      worst_at = label;
    }
  };

  const GridPtr g1 = make_grid({128}, {32.0});
  for (const auto& p : oned_presets) run(p, make_preset(p, g1), g1);
  const GridPtr g2 = make_grid({32, 32}, {16.0, 16.0});
  run("free d=2", make_preset("free", g2), g2);
  run("k2-variable", k2_variable_spec(g1), g1);

  return {all_pass, "self-adjointness of the step families",
          "worst symmetry defect " + sci(worst) + " (" + worst_at + "), 200 pairs, tol " +
              sci(tol)};
}

// --- criterion 3: norm bound of the regulated family -----------------------
// Harmonic preset, w in {arctan, sin, tanh}, t in {0.01, 0.1, 1}: power
// iteration certifies ||W(t)|| <= (2 + M)(1 + 1e-6).
Outcome criterion3() {
  const std::vector<double> ts{0.01, 0.1, 1.0};
  const GridPtr grid = make_grid({128}, {32.0});
  bool all_pass = true;
  std::string detail;
  for (const RegulatorFn& w :
       {RegulatorFn::arctan(), RegulatorFn::sine(), RegulatorFn::tanh()}) {
    const HamiltonianSpec spec = make_preset("harmonic", grid, w);
    const PropertyReport rep = verify_norm_bounds(spec, ts, 0xACCE);
    all_pass = all_pass && rep.pass;
    double estimate = 0.0;
    for (const auto& [key, value] : rep.details)
      if (key.rfind("norm_estimate", 0) == 0 && value > estimate) estimate = value;
    if (!detail.empty()) detail += ", ";
    detail += w.name() + ": max estimate " + sci(estimate) + " vs (2+M)=" +
              sci(2.0 + w.bound());
  }
  return {all_pass, "norm bound of the regulated family", detail};
}

// --- criterion 4: tangency slope + mutation control -------------------------
// Fitted log-log slope of e(t) >= 1.2 on t in [1e-5, 1e-2] for free,
// harmonic, sturm-liouville; the broken-root mutation must report slope < 1
// and fail.
Outcome criterion4() {
  const std::vector<double> t_grid = geometric_grid(1e-5, 1e-2, 8);
  const GridPtr grid = make_grid({128}, {32.0});
  const WaveFunction phi = packet(grid);
  bool all_pass = true;
  std::string detail;

  for (const char* name : {"free", "harmonic", "sturm-liouville"}) {
    const PropertyReport rep =
        verify_tangency(make_preset(name, grid), phi, t_grid, 1.2);
    all_pass = all_pass && rep.pass;
    if (!detail.empty()) detail += ", ";
    detail += std::string(name) + " slope " +
              (rep.fitted_order ? sci(*rep.fitted_order) : "n/a");
  }

  const PropertyReport broken = verify_tangency(
      make_preset("sturm-liouville", grid), phi, t_grid, 1.2, {true});
  const bool control_ok =
      !broken.pass && broken.fitted_order && *broken.fitted_order < 1.0;
  all_pass = all_pass && control_ok;
  detail += ", broken-root slope " +
            (broken.fitted_order ? sci(*broken.fitted_order) : "n/a") +
            (control_ok ? " (fails as required)" : " (mutation NOT caught)");
  return {all_pass, "tangency slope with mutation control", detail};
}

// --- criterion 5: convergence of the iterate --------------------------------
// Harmonic d=1, N=256, L=32, ground state, t=0.5: eps(n) against the phase
// e^{-it/2} psi0 is monotone non-increasing (10% slack) over n = 2^4..2^12
// and eps(2^12) < eps(2^4)/4.
Outcome criterion5() {
  const GridPtr grid = make_grid({256}, {32.0});
  const HamiltonianSpec spec = make_preset("harmonic", grid);
  const WaveFunction psi0 = analytic_harmonic_state(0, 0.0, grid);
  const WaveFunction oracle = analytic_harmonic_state(0, 0.5, grid);
  std::vector<std::size_t> ns;
  for (std::size_t n = 16; n <= 4096; n *= 2) ns.push_back(n);

  const PropertyReport rep = verify_convergence(spec, psi0, 0.5, ns, oracle);
  double eps_first = 0.0, eps_last = 0.0;
  for (const auto& [key, value] : rep.details) {
    if (key == "eps[0]") eps_first = value;
    if (key == "eps[" + std::to_string(ns.size() - 1) + "]") eps_last = value;
  }
  return {rep.pass, "convergence of the iterate",
          "eps(16) = " + sci(eps_first) + ", eps(4096) = " + sci(eps_last) +
              ", empirical order " +
              (rep.fitted_order ? sci(*rep.fitted_order) : "n/a")};
}

// --- criterion 6: dense-oracle equivalence at small scale --------------------
// Every preset on N=64, L=16 (d=1) plus the variable-coefficient order-2
// model: || propagate(t=0.2, n=2^12) - dense_oracle || <= 1e-7 (10x the
// dense oracle's cross-check tolerance of 1e-8). Achieved values are frozen
// in tests/expected/acceptance_expectations.json; --calibrate rewrites them.
Outcome criterion6(bool calibrate) {
  constexpr double bound = 1e-7;
  constexpr double t = 0.2;
  const GridPtr grid = make_grid({64}, {16.0});
  PropagatorConfig cfg;
  cfg.n = 4096;

  std::vector<std::pair<std::string, HamiltonianSpec>> specs;
  for (const auto& p : oned_presets) specs.emplace_back(p, make_preset(p, grid));
  specs.emplace_back("oned-k2-variable", k2_variable_spec(grid));

  const std::vector<double> x0{0.0}, k0{1.0};
  const WaveFunction psi0 = analytic_free_gaussian(1.0, x0, k0, 0.0, grid);
  nlohmann::json achieved;
  double worst = 0.0;
  std::string worst_at;
  for (const auto& [name, spec] : specs) {
    const WaveFunction iterate = propagate(t, spec, cfg, psi0);
    const WaveFunction dense = dense_oracle(spec, t, psi0).wavefunction;
    const double err = abs_l2(iterate, dense);
    achieved[name] = err;
    if (err > worst) {
      worst = err;
      worst_at = name;
    }
  }

  const fs::path expected_path = CHERNOFF_EXPECTATIONS_PATH;
  if (calibrate) {
    nlohmann::json doc;
    doc["criterion_6"] = {{"t", t},
                          {"n", cfg.n},
                          {"grid", "N=64 L=16 d=1"},
                          {"bound", bound},
                          {"achieved", achieved}};
    fs::create_directories(expected_path.parent_path());
    std::ofstream out(expected_path, std::ios::trunc);
    out << doc.dump(2) << "\n";
    std::fprintf(stderr, "calibration written to %s\n", expected_path.c_str());
  }

  std::string drift;
  if (!calibrate && fs::exists(expected_path)) {
    const nlohmann::json doc = nlohmann::json::parse(std::ifstream(expected_path));
    for (const auto& [name, value] : doc.at("criterion_6").at("achieved").items()) {
      const double frozen = value.get<double>();
      const double now = achieved.at(name).get<double>();
      if (!(now <= frozen * 1.5 && now >= frozen / 1.5)) {
        if (!drift.empty()) drift += ", ";
        drift += name + " " + sci(now) + " vs frozen " + sci(frozen);
      }
    }
  }

  std::string detail = "worst || iterate - dense || = " + sci(worst) + " (" + worst_at +
                       "), bound " + sci(bound);
  detail += drift.empty() ? "; matches frozen calibration"
                          : "; DRIFT from frozen calibration: " + drift;
  return {worst <= bound, "dense-oracle equivalence at small scale", detail};
}

// --- criterion 7: series/exponential identity --------------------------------
// Free preset, n=16: the truncated power series with converged tail equals
// the exponential route within 1e-10 relative.
Outcome criterion7() {
  constexpr double bound = 1e-10;
  const GridPtr grid = make_grid({64}, {16.0});
  const HamiltonianSpec spec = make_preset("free", grid);
  const WaveFunction psi0 = packet(grid);
  PropagatorConfig cfg;
  cfg.n = 16;

  const WaveFunction reference = propagate(0.5, spec, cfg, psi0);
  const auto [partial, trace] = series_partial(0.5, 200, spec, cfg, psi0);
  const double rel = rel_l2(partial, reference);
  const bool pass = trace.converged && rel <= bound;
  return {pass, "series/exponential identity",
          "relative distance " + sci(rel) + " after " + std::to_string(trace.terms_used) +
              " terms (tail converged: " + (trace.converged ? "yes" : "no") +
              "), bound " + sci(bound)};
}

// --- criterion 8: binomial/composed F_k identity -----------------------------
// k in {1, 2, 3}, N=128, 50 random coefficient/state/t trials each:
// relative difference <= 1e-11.
Outcome criterion8() {
  constexpr double bound = 1e-11;
  const GridPtr grid = make_grid({128}, {32.0});
  Rng rng(0xB1C0);
  double worst = 0.0;
  std::size_t worst_k = 0;
  for (std::size_t k = 1; k <= 3; ++k) {
    for (std::size_t trial = 0; trial < 50; ++trial) {
      const auto seed = Rng::derive(0xB1C0, k, trial);
      const SampledField ak = random_smooth_field(grid, seed, 3, 1.5, 0.5);
      const WaveFunction f = random_state(grid, seed ^ 0xF00D);
      const double t = std::pow(10.0, -4.0 + 3.5 * rng.uniform());
      const WaveFunction via_binomial = apply_Fk_binomial(t, k, ak, f);
      const WaveFunction via_composed = apply_Fk_composed(t, k, ak, f);
      const double rel = abs_l2(via_binomial, via_composed) / norm(f);
      if (rel > worst) {
        worst = rel;
        worst_k = k;
      }
    }
  }
  return {worst <= bound, "binomial/composed F_k identity",
          "worst relative difference " + sci(worst) + " (k=" + std::to_string(worst_k) +
              "), 50 trials per k, bound " + sci(bound)};
}

// --- criterion 9: CSV determinism --------------------------------------------
// Two `chernoff converge` runs with identical config and seed produce
// byte-identical CSV tables.
Outcome criterion9() {
  const fs::path dir = fs::temp_directory_path() / "chernoff_acceptance_c9";
  fs::remove_all(dir);
  fs::create_directories(dir);
  {
    std::ofstream cfg(dir / "config.json");
    cfg << R"({
  "model": {"preset": "free"},
  "grid": {"n": [64], "length": [16.0]},
  "t": 0.4,
  "n": 16,
  "n_list": [16, 64, 256],
  "j_list": [0, 4, 16, 64],
  "initial_state": {"type": "plane", "modes": [3]},
  "seed": 17
})";
  }
  auto run = [&](const std::string& out) {
    const std::string cmd = std::string(CHERNOFF_CLI_PATH) + " converge --config " +
                            (dir / "config.json").string() + " --out " +
                            (dir / out).string() + " >/dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
  };
  if (run("a") != 0 || run("b") != 0)
    return {false, "CSV determinism", "converge run failed"};

  auto slurp = [](const fs::path& p) {
    std::ostringstream os;
    os << std::ifstream(p, std::ios::binary).rdbuf();
    return os.str();
  };
  const bool same_n = slurp(dir / "a" / "error_vs_n.csv") == slurp(dir / "b" / "error_vs_n.csv");
  const bool same_j = slurp(dir / "a" / "error_vs_j.csv") == slurp(dir / "b" / "error_vs_j.csv");
  return {same_n && same_j, "CSV determinism",
          std::string("error_vs_n ") + (same_n ? "identical" : "DIFFERS") +
              ", error_vs_j " + (same_j ? "identical" : "DIFFERS")};
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  bool calibrate = false;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--calibrate") {
      calibrate = true;
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]... [--calibrate]\n", argv[0]);
      return 1;
    }
  }
  if (selected.empty())
    selected = {1, 2, 3, 4, 5, 6, 7, 8, 9};

  const std::function<Outcome()> criteria[9] = {
      criterion1, criterion2,
      criterion3, criterion4,
      criterion5, [&] { return criterion6(calibrate); },
      criterion7, criterion8,
      criterion9};

  bool all_pass = true;
  for (int id : selected) {
    if (id < 1 || id > 9) {
      std::fprintf(stderr, "no criterion %d (valid: 1..9)\n", id);
      return 1;
    }
    const auto start = std::chrono::steady_clock::now();
    const Outcome o = criteria[id - 1]();
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("criterion %d: %s — %s: %s [%.1fs]\n", id, o.pass ? "PASS" : "FAIL",
                o.name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
