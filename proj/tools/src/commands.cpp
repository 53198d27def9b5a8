#include "commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include <chernoff/propagator.hpp>
#include <chernoff/reference.hpp>
#include <chernoff/verify.hpp>

#include "outputs.hpp"
#include "pool.hpp"
#include "run_config.hpp"

namespace cli {

using chernoff::WaveFunction;
using nlohmann::json;

namespace {

RunConfig load(const CommonArgs& args) {
  return parse_config(load_config_json(args.config_path, args.overrides));
}

double l2_distance(const WaveFunction& a, const WaveFunction& b) {
  std::vector<chernoff::cxd> diff(a.size());
  for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = a[i] - b[i];
  return chernoff::norm(WaveFunction(a.grid(), std::move(diff)));
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  const double ratio = std::pow(hi / lo, 1.0 / double(points - 1));
  double v = lo;
  for (std::size_t i = 0; i < points; ++i, v *= ratio) out[i] = v;
  out.back() = hi;
  return out;
}

// Smooth box-centered packet used as the tangency probe; any state with a
// few active modes works, this one keeps both position and momentum content.
WaveFunction probe_packet(const chernoff::GridPtr& grid) {
  const chernoff::Grid& g = *grid;
  return chernoff::sample(grid, [&g](std::span<const double> x) {
    double q = 0.0, phase = 0.0;
    for (std::size_t m = 0; m < x.size(); ++m) {
      const double y = x[m] - 0.5 * g.length(m);
      q += y * y;
      phase += y;
    }
    return std::polar(std::exp(-0.5 * q), phase);
  });
}

// Least-squares slope of log eps vs log n, negated (empirical order).
// Zero errors are exact hits; they carry no slope information.
std::optional<double> fitted_order(const std::vector<std::size_t>& n,
                                   const std::vector<double>& eps) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (eps[i] > 0.0) {
      lx.push_back(std::log(double(n[i])));
      ly.push_back(std::log(eps[i]));
    }
  }
  if (lx.size() < 2) return std::nullopt;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) { mx += lx[i]; my += ly[i]; }
  mx /= double(lx.size());
  my /= double(lx.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    num += (lx[i] - mx) * (ly[i] - my);
    den += (lx[i] - mx) * (lx[i] - mx);
  }
  if (den == 0.0) return std::nullopt;
  return -num / den;
}

struct Oracle {
  std::string method;  // analytic | dense | splitstep
  std::size_t steps = 0;
  double est_error = 0.0;
  WaveFunction state;
};

// Closed forms exist for the free model (gaussian and plane states) and for
// harmonic eigenstates at a = 1. Throws invalid_argument when the state no
// longer fits the box (boundary-mass precondition).
std::optional<WaveFunction> analytic_state(const RunConfig& cfg, const WaveFunction& psi0,
                                           double t) {
  if (cfg.spec->is_oned()) return std::nullopt;
  if (cfg.model_name == "free") {
    if (cfg.state.type == "gaussian")
      return chernoff::analytic_free_gaussian(cfg.state.sigma0, cfg.state.x0, cfg.state.k0,
                                              t, cfg.grid, cfg.equation_a);
    if (cfg.state.type == "plane") {
      const chernoff::Grid& g = *cfg.grid;
      double k2 = 0.0;
      for (std::size_t m = 0; m < g.dim(); ++m) {
        const double kap = 2.0 * std::numbers::pi * double(cfg.state.modes[m]) / g.length(m);
        k2 += kap * kap;
      }
      const chernoff::cxd phase = std::polar(1.0, -0.5 * cfg.equation_a * k2 * t);
      std::vector<chernoff::cxd> v(psi0.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = phase * psi0[i];
      return WaveFunction(cfg.grid, std::move(v));
    }
  }
  if (cfg.model_name == "harmonic" && cfg.state.type == "eigenstate" &&
      cfg.equation_a == 1.0)
    return chernoff::analytic_harmonic_state(cfg.state.level, t, cfg.grid);
  return std::nullopt;
}

// Reference precedence under "auto": analytic > dense (grids up to the cap)
// > split-step (multi-dimensional only). A forced choice that cannot serve
// the spec is a usage error; exhausting "auto" names every reason.
Oracle run_oracle(const RunConfig& cfg, const WaveFunction& psi0, double t) {
  const bool forced = cfg.oracle != "auto";
  const std::size_t points = cfg.grid->size();

  if (cfg.oracle == "auto" || cfg.oracle == "analytic") {
    try {
      if (auto wf = analytic_state(cfg, psi0, t))
        return {"analytic", 0, 0.0, std::move(*wf)};
      if (forced)
        throw usage_error("oracle: no analytic form for model '" + cfg.model_name +
                          "' with initial_state type '" + cfg.state.type + "'");
    } catch (const std::invalid_argument& e) {
      if (forced) throw usage_error(std::string("oracle: ") + e.what());
      // state left the box: fall through to the discrete references
    }
  }

  if (cfg.oracle == "auto" || cfg.oracle == "dense") {
    if (points <= chernoff::dense_oracle_max_points) {
      chernoff::OracleResult r = chernoff::dense_oracle(*cfg.spec, t, psi0);
      return {"dense", r.steps, r.est_error, std::move(r.wavefunction)};
    }
    if (forced)
      throw usage_error("oracle: dense oracle is capped at " +
                        std::to_string(chernoff::dense_oracle_max_points) +
                        " grid points; this grid has " + std::to_string(points));
  }

  if (cfg.oracle == "auto" || cfg.oracle == "splitstep") {
    if (!cfg.spec->is_oned()) {
      chernoff::OracleResult r =
          chernoff::splitstep_evolve(*cfg.spec, t, cfg.splitstep_steps, psi0);
      return {"splitstep", r.steps, r.est_error, std::move(r.wavefunction)};
    }
    if (forced)
      throw usage_error("oracle: the split-step reference applies only to "
                        "multi-dimensional models");
  }

  throw usage_error(
      "oracle: no reference available: no closed form for model '" + cfg.model_name +
      "' with this initial state, the dense oracle is capped at " +
      std::to_string(chernoff::dense_oracle_max_points) + " grid points (this grid has " +
      std::to_string(points) + "), and the split-step reference applies only to "
      "multi-dimensional models");
}

json report_json(const chernoff::PropertyReport& rep) {
  json details = json::object();
  for (const auto& [key, value] : rep.details) details[key] = value;
  json out = {{"property", rep.property_id},
              {"pass", rep.pass},
              {"worst_violation", rep.worst_violation},
              {"samples", rep.samples},
              {"details", std::move(details)}};
  if (rep.fitted_order) out["fitted_order"] = *rep.fitted_order;
  return out;
}

}  // namespace

int cmd_evolve(const CommonArgs& args) {
  RunConfig cfg = load(args);
  if (!cfg.t) throw usage_error("t: required for evolve");
  const double t = *cfg.t;
  const std::size_t n = cfg.n.value_or(4096);
  const WaveFunction psi0 = realize_initial_state(cfg);

  Manifest man(args.out_dir, "evolve", cfg.echo, cfg.seed);
  man.write_wavefunction("psi0.wf", psi0);
  try {
    chernoff::PropagatorConfig pc = cfg.prop;
    pc.n = n;
    const WaveFunction psi_t = chernoff::propagate(t, *cfg.spec, pc, psi0);
    man.write_wavefunction("psi_t.wf", psi_t);

    const chernoff::Grid& g = *cfg.grid;
    std::vector<std::string> header;
    for (std::size_t m = 0; m < g.dim(); ++m) header.push_back("x" + std::to_string(m));
    header.push_back("density");
    Csv csv(std::move(header));
    std::vector<std::size_t> idx(g.dim());
    for (std::size_t i = 0; i < psi_t.size(); ++i) {
      g.decode(i, idx);
      std::vector<std::string> cells;
      for (std::size_t m = 0; m < g.dim(); ++m)
        cells.push_back(format_sci(g.coord(m, idx[m])));
      cells.push_back(format_sci(std::norm(psi_t[i])));
      csv.row(std::move(cells));
    }
    man.write_text("profile.csv", csv.bytes());

    const double n0 = chernoff::norm(psi0);
    const double n1 = chernoff::norm(psi_t);
    man.results()["evolve"] = {{"t", t},
                               {"n", n},
                               {"norm_initial", n0},
                               {"norm_final", n1},
                               {"unitarity_defect", std::abs(n1 / n0 - 1.0)}};
    man.finish();
    return exit_ok;
  } catch (const std::exception& e) {
    man.fail(e.what());
    man.finish();
    return exit_numerical;
  }
}

int cmd_verify(const CommonArgs& args) {
  RunConfig cfg = load(args);
  const chernoff::HamiltonianSpec& spec = *cfg.spec;
  const chernoff::FaultInjection fault{args.inject_broken_shift};
  const WaveFunction psi0 = realize_initial_state(cfg);

  // Pinned defaults of the suite; trials/tol come from the config.
  const std::vector<double> sa_t{1e-4, 1e-2, 0.5};
  const std::vector<double> nb_t{0.01, 0.1, 1.0};
  const std::vector<double> tan_grid = geometric_grid(1e-4, 1e-1, 8);
  const std::vector<double> cont_grid = chernoff::continuity_window(spec);
  const double conv_t = cfg.t.value_or(0.4);
  const std::vector<std::size_t> conv_n =
      cfg.n_list.empty() ? std::vector<std::size_t>{16, 256, 4096} : cfg.n_list;

  Manifest man(args.out_dir, "verify", cfg.echo, cfg.seed);
  try {
    const WaveFunction probe = probe_packet(cfg.grid);
    constexpr std::size_t n_props = 5;
    std::vector<std::optional<chernoff::PropertyReport>> reports(n_props);
    std::string conv_skip;

    parallel_for(args.jobs, n_props, [&](std::size_t i) {
      switch (i) {
        case 0:
          reports[0] = chernoff::verify_self_adjoint(
              chernoff::step_family(spec, fault), cfg.grid, sa_t, cfg.verify_trials,
              cfg.verify_tol, cfg.seed);
          break;
        case 1:
          reports[1] = chernoff::verify_tangency(spec, probe, tan_grid, 1.2, fault);
          break;
        case 2:
          reports[2] = chernoff::verify_norm_bounds(spec, nb_t, cfg.seed);
          break;
        case 3:
          reports[3] = chernoff::verify_strong_continuity(spec, cont_grid, 8, cfg.seed);
          break;
        case 4:
          try {
            Oracle oracle = run_oracle(cfg, psi0, conv_t);
            reports[4] = chernoff::verify_convergence(spec, psi0, conv_t, conv_n,
                                                      oracle.state, cfg.prop);
          } catch (const usage_error& e) {
            conv_skip = e.what();
          }
          break;
      }
    });

    Csv csv({"property", "pass", "worst_violation", "samples", "fitted_order"});
    json props = json::array();
    bool all_pass = true;
    for (std::size_t i = 0; i < n_props; ++i) {
      if (!reports[i]) continue;
      const auto& rep = *reports[i];
      all_pass = all_pass && rep.pass;
      csv.row({rep.property_id, rep.pass ? "1" : "0", format_sci(rep.worst_violation),
               std::to_string(rep.samples),
               rep.fitted_order ? format_sci(*rep.fitted_order) : ""});
      props.push_back(report_json(rep));
    }
    if (!conv_skip.empty()) csv.row({"convergence", "skipped", "", "", ""});
    man.write_text("properties.csv", csv.bytes());

    man.results()["verify"] = {{"properties", std::move(props)}, {"all_pass", all_pass}};
    if (!conv_skip.empty()) man.results()["verify"]["skipped"] = {conv_skip};
    if (args.inject_broken_shift)
      man.results()["verify"]["fault_injection"] = "broken-shift-root";
    man.finish();
    return all_pass ? exit_ok : exit_property;
  } catch (const std::exception& e) {
    man.fail(e.what());
    man.finish();
    return exit_numerical;
  }
}

int cmd_converge(const CommonArgs& args) {
  RunConfig cfg = load(args);
  if (cfg.n_list.empty() && cfg.j_list.empty())
    throw usage_error("n_list: converge requires n_list and/or j_list");
  if (!cfg.t) throw usage_error("t: required for converge");
  const double t = *cfg.t;
  const WaveFunction psi0 = realize_initial_state(cfg);
  const Oracle oracle = run_oracle(cfg, psi0, t);

  Manifest man(args.out_dir, "converge", cfg.echo, cfg.seed);
  try {
    json results = {{"oracle",
                     {{"method", oracle.method},
                      {"steps", oracle.steps},
                      {"est_error", oracle.est_error}}}};

    if (!cfg.n_list.empty()) {
      std::vector<double> eps(cfg.n_list.size());
      parallel_for(args.jobs, cfg.n_list.size(), [&](std::size_t i) {
        chernoff::PropagatorConfig pc = cfg.prop;
        pc.n = cfg.n_list[i];
        eps[i] = l2_distance(chernoff::propagate(t, *cfg.spec, pc, psi0), oracle.state);
      });

      Csv csv({"n", "l2_error"});
      for (std::size_t i = 0; i < eps.size(); ++i)
        csv.row({std::to_string(cfg.n_list[i]), format_sci(eps[i])});
      man.write_text("error_vs_n.csv", csv.bytes());

      bool monotone = true;
      for (std::size_t i = 0; i + 1 < eps.size(); ++i)
        monotone = monotone && eps[i + 1] <= eps[i] * 1.1;
      results["monotone"] = monotone;
      if (auto order = fitted_order(cfg.n_list, eps)) results["fitted_order_n"] = *order;
    }

    if (!cfg.j_list.empty()) {
      chernoff::PropagatorConfig pc = cfg.prop;
      pc.n = cfg.n.value_or(16);
      const WaveFunction reference = chernoff::propagate(t, *cfg.spec, pc, psi0);
      std::vector<double> eps(cfg.j_list.size());
      parallel_for(args.jobs, cfg.j_list.size(), [&](std::size_t i) {
        auto [partial, trace] =
            chernoff::series_partial(t, cfg.j_list[i], *cfg.spec, pc, psi0);
        eps[i] = l2_distance(partial, reference);
      });

      Csv csv({"j", "l2_error"});
      for (std::size_t i = 0; i < eps.size(); ++i)
        csv.row({std::to_string(cfg.j_list[i]), format_sci(eps[i])});
      man.write_text("error_vs_j.csv", csv.bytes());

      results["j_reference_n"] = pc.n;
      if (auto order = fitted_order(cfg.j_list, eps)) results["fitted_order_j"] = *order;
    }

    man.results()["converge"] = std::move(results);
    man.finish();
    return exit_ok;
  } catch (const std::exception& e) {
    man.fail(e.what());
    man.finish();
    return exit_numerical;
  }
}

int cmd_compare(const CommonArgs& args) {
  RunConfig cfg = load(args);
  if (cfg.spec->is_oned())
    throw usage_error("model: compare requires a multi-dimensional model");
  if (!cfg.t) throw usage_error("t: required for compare");
  const double t = *cfg.t;
  const WaveFunction psi0 = realize_initial_state(cfg);

  // Reference: best available. When nothing better exists the split-step
  // run at twice the finest step count serves as the self-converged anchor.
  const std::size_t points = cfg.grid->size();
  const std::size_t max_steps =
      *std::max_element(cfg.compare_steps.begin(), cfg.compare_steps.end());
  Oracle reference = [&] {
    try {
      if (auto wf = analytic_state(cfg, psi0, t)) return Oracle{"analytic", 0, 0.0, *wf};
    } catch (const std::invalid_argument&) {
    }
    if (points <= chernoff::dense_oracle_max_points) {
      chernoff::OracleResult r = chernoff::dense_oracle(*cfg.spec, t, psi0);
      return Oracle{"dense", r.steps, r.est_error, std::move(r.wavefunction)};
    }
    chernoff::OracleResult r =
        chernoff::splitstep_evolve(*cfg.spec, t, 2 * max_steps, psi0);
    return Oracle{"splitstep", r.steps, r.est_error, std::move(r.wavefunction)};
  }();

  Manifest man(args.out_dir, "compare", cfg.echo, cfg.seed);
  try {
    const std::vector<std::size_t> n_list =
        cfg.n_list.empty() ? std::vector<std::size_t>{16, 256, 4096} : cfg.n_list;

    struct Row {
      std::string method;
      std::size_t n_or_steps;
      double l2_error;
      double wall_seconds;
    };
    const bool with_dense = points <= chernoff::dense_oracle_max_points;
    std::vector<Row> rows(n_list.size() + cfg.compare_steps.size() + (with_dense ? 1 : 0));

    parallel_for(args.jobs, rows.size(), [&](std::size_t i) {
      const auto t0 = std::chrono::steady_clock::now();
      WaveFunction result = [&] {
        if (i < n_list.size()) {
          chernoff::PropagatorConfig pc = cfg.prop;
          pc.n = n_list[i];
          rows[i].method = "chernoff";
          rows[i].n_or_steps = n_list[i];
          return chernoff::propagate(t, *cfg.spec, pc, psi0);
        }
        if (i < n_list.size() + cfg.compare_steps.size()) {
          const std::size_t steps = cfg.compare_steps[i - n_list.size()];
          rows[i].method = "splitstep";
          rows[i].n_or_steps = steps;
          return chernoff::splitstep_evolve(*cfg.spec, t, steps, psi0).wavefunction;
        }
        rows[i].method = "dense";
        rows[i].n_or_steps = 0;
        return chernoff::dense_oracle(*cfg.spec, t, psi0).wavefunction;
      }();
      rows[i].wall_seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      rows[i].l2_error = l2_distance(result, reference.state);
    });

    // wall_seconds is measured time: the one column exempt from the
    // byte-determinism guarantee.
    Csv csv({"method", "n_or_steps", "l2_error", "wall_seconds"});
    for (const Row& r : rows)
      csv.row({r.method, std::to_string(r.n_or_steps), format_sci(r.l2_error),
               format_sci(r.wall_seconds)});
    man.write_text("compare.csv", csv.bytes());

    man.results()["compare"] = {{"reference",
                                 {{"method", reference.method},
                                  {"steps", reference.steps},
                                  {"est_error", reference.est_error}}},
                                {"rows", rows.size()}};
    man.finish();
    return exit_ok;
  } catch (const std::exception& e) {
    man.fail(e.what());
    man.finish();
    return exit_numerical;
  }
}

}  // namespace cli
