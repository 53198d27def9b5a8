#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "chernoff/grid.hpp"
#include "chernoff/operators.hpp"
#include "chernoff/random.hpp"
#include "chernoff/reference.hpp"
#include "chernoff/verify.hpp"

using namespace chernoff;

namespace {

double detail_of(const PropertyReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.details)
    if (k == key) return v;
  FAIL("missing detail key: " << key);
  return 0.0;
}

bool has_detail(const PropertyReport& rep, const std::string& key) {
  for (const auto& [k, v] : rep.details)
    if (k == key) return true;
  return false;
}

WaveFunction tangency_probe(const GridPtr& g) {
  // box-contained packet with a bit of momentum so all operator pieces act
  const double c = g->length(0) / 2.0;
  return sample(g, [&](std::span<const double> x) {
    const double y = x[0] - c;
    return std::polar(std::exp(-0.5 * y * y), 1.0 * y);
  });
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t points) {
  std::vector<double> out(points);
  const double r = std::pow(hi / lo, 1.0 / double(points - 1));
  double v = lo;
  for (std::size_t i = 0; i < points; ++i, v *= r) out[i] = v;
  return out;
}

}  // namespace

TEST_CASE("verify_self_adjoint: symmetric families pass, reports reproduce") {
  auto g = make_grid({64}, {16.0});
  const double ts[] = {1e-4, 1e-2, 0.5};

  SECTION("multiplication by a real field is exactly symmetric") {
    auto field = sample_real(g, [](std::span<const double> x) {
      return std::cos(2.0 * std::numbers::pi * x[0] / 16.0);
    });
    OpFamily fam = [field](double) -> LinearMap {
      return [field](const WaveFunction& f) { return apply_mult(field, f); };
    };
    auto rep = verify_self_adjoint(fam, g, ts, 50, 1e-14, 7);
    CHECK(rep.pass);
    CHECK(rep.worst_violation <= 1e-15);
    CHECK(rep.samples == 150);
    CHECK(rep.property_id == "self_adjoint");
  }

  SECTION("the step families of both operator classes are symmetric") {
    auto repF = verify_self_adjoint(step_family(make_preset("momentum-poly", g)), g, ts,
                                    200, 1e-11, 0xA1);
    CHECK(repF.pass);
    auto repW = verify_self_adjoint(step_family(make_preset("anharmonic", g)), g, ts,
                                    200, 1e-11, 0xA2);
    CHECK(repW.pass);
  }

  SECTION("the same seed reproduces the report bit for bit") {
    auto fam = step_family(make_preset("harmonic", g));
    auto r1 = verify_self_adjoint(fam, g, ts, 40, 1e-11, 0xA3);
    auto r2 = verify_self_adjoint(fam, g, ts, 40, 1e-11, 0xA3);
    CHECK(r1.worst_violation == r2.worst_violation);
    REQUIRE(r1.details.size() == r2.details.size());
    for (std::size_t i = 0; i < r1.details.size(); ++i) {
      CHECK(r1.details[i].first == r2.details[i].first);
      CHECK(r1.details[i].second == r2.details[i].second);
    }
  }

  SECTION("argument validation") {
    auto fam = step_family(make_preset("free", g));
    CHECK_THROWS_AS(verify_self_adjoint(fam, g, ts, 0, 1e-11, 1), std::invalid_argument);
    CHECK_THROWS_AS(verify_self_adjoint(fam, g, {}, 10, 1e-11, 1), std::invalid_argument);
  }
}

TEST_CASE("verify_tangency: slopes sit in the expected bands per model") {
  auto g = make_grid({256}, {32.0});
  auto phi = tangency_probe(g);
  const auto tg = geometric_grid(1e-4, 1e-1, 8);

  SECTION("free line: clean second-order remainder") {
    auto rep = verify_tangency(make_preset("free", g), phi, tg);
    CHECK(rep.pass);
    REQUIRE(rep.fitted_order.has_value());
    CHECK(*rep.fitted_order >= 1.8);
    CHECK(*rep.fitted_order <= 2.2);
    CHECK(detail_of(rep, "excluded_points") == 0.0);
  }

  SECTION("harmonic potential") {
    auto rep = verify_tangency(make_preset("harmonic", g), phi, tg);
    CHECK(rep.pass);
    CHECK(*rep.fitted_order >= 1.8);
    CHECK(*rep.fitted_order <= 2.2);
  }

  SECTION("Sturm-Liouville: slower but clearly above threshold") {
    auto rep = verify_tangency(make_preset("sturm-liouville", g), phi, tg);
    CHECK(rep.pass);
    CHECK(*rep.fitted_order >= 1.4);
    CHECK(*rep.fitted_order <= 1.7);
  }

  SECTION("momentum polynomial") {
    auto rep = verify_tangency(make_preset("momentum-poly", g), phi, tg);
    CHECK(rep.pass);
    CHECK(*rep.fitted_order >= 1.3);
    CHECK(*rep.fitted_order <= 1.7);
  }

  SECTION("broken shift root destroys tangency (mutation control)") {
    FaultInjection fault;
    fault.broken_shift_root = true;
    auto rep = verify_tangency(make_preset("sturm-liouville", g), phi, tg, 1.2, fault);
    CHECK_FALSE(rep.pass);
    CHECK(*rep.fitted_order < 1.0);
    CHECK(*rep.fitted_order > 0.8);
    CHECK(rep.worst_violation > 0.2);
  }

  SECTION("a state annihilated by the family is tangent by convention") {
    auto flat = sample(g, [](std::span<const double>) { return cxd(1.0, 0.0); });
    auto rep = verify_tangency(make_preset("free", g), flat, tg);
    CHECK(rep.pass);
    CHECK(rep.worst_violation == 0.0);
    CHECK(detail_of(rep, "excluded_points") == double(tg.size()));
    CHECK(has_detail(rep, "insufficient_points"));
    CHECK_FALSE(rep.fitted_order.has_value());
  }

  SECTION("degenerate t grids are rejected") {
    std::vector<double> one{0.1};
    CHECK_THROWS_AS(verify_tangency(make_preset("free", g), phi, one), std::invalid_argument);
    std::vector<double> bad{0.1, -0.2};
    CHECK_THROWS_AS(verify_tangency(make_preset("free", g), phi, bad), std::invalid_argument);
  }
}

TEST_CASE("verify_norm_bounds: certified envelopes per regulator and model") {
  auto g = make_grid({64}, {16.0});
  const double ts[] = {0.05, 0.5};

  SECTION("harmonic with arctan: |W| <= 2 + pi/2") {
    auto rep = verify_norm_bounds(make_preset("harmonic", g), ts, 0xB1);
    CHECK(rep.pass);
    CHECK(rep.worst_violation <= 0.0);
    CHECK(detail_of(rep, "bound") == 2.0 + std::numbers::pi / 2.0);
    CHECK(detail_of(rep, "power_iteration_converged") == 1.0);
    CHECK(detail_of(rep, "shift_isometry_defect") <= 1e-12);
  }

  SECTION("regulator choice moves the bound") {
    auto rep_t = verify_norm_bounds(make_preset("harmonic", g, RegulatorFn::tanh()), ts, 0xB2);
    CHECK(detail_of(rep_t, "bound") == 3.0);
    CHECK(rep_t.pass);
    auto rep_s = verify_norm_bounds(make_preset("quartic", g, RegulatorFn::sine()), ts, 0xB3);
    CHECK(detail_of(rep_s, "bound") == 3.0);
    CHECK(rep_s.pass);
  }

  SECTION("free line estimates stay below the kinetic ceiling 2") {
    auto rep = verify_norm_bounds(make_preset("free", g), ts, 0xB4);
    CHECK(rep.pass);
    for (std::size_t i = 0; i < 2; ++i) {
      const double est = detail_of(rep, "norm_estimate[" + std::to_string(i) + "]");
      CHECK(est <= 2.0 + 2e-6);
      CHECK(est >= 0.5);
    }
  }

  SECTION("one-dimensional envelope M + sum_k 4^k max|a_k|") {
    auto spec = make_preset("sturm-liouville", g);
    auto rep = verify_norm_bounds(spec, ts, 0xB5);
    CHECK(rep.pass);
    const double expected = std::numbers::pi / 2.0 + 4.0 * spec.oned().coeffs.max_abs(1);
    CHECK(detail_of(rep, "bound") == Catch::Approx(expected).margin(1e-15));
    auto rep2 = verify_norm_bounds(make_preset("momentum-poly", g), ts, 0xB6);
    CHECK(rep2.pass);
    CHECK(detail_of(rep2, "bound") ==
          Catch::Approx(std::numbers::pi / 2.0 + 4.0 + 16.0).margin(1e-15));
  }
}

TEST_CASE("verify_strong_continuity: residuals vanish like t") {
  auto g = make_grid({64}, {16.0});

  SECTION("every preset passes inside its linearity window") {
    for (const auto& name : preset_names()) {
      INFO(name);
      auto spec = make_preset(name, g);
      const auto tg = continuity_window(spec);
      auto rep = verify_strong_continuity(spec, tg, 5, 0xC1);
      CHECK(rep.pass);
      CHECK(detail_of(rep, "sampled_property") == 1.0);
      CHECK(detail_of(rep, "slope") >= 0.95);
      CHECK(detail_of(rep, "slope") <= 1.05);
      CHECK(detail_of(rep, "residual_at_t_min") <
            0.1 * detail_of(rep, "residual_at_t_max"));
    }
  }

  SECTION("a window deep in symbol saturation is flagged as a violation") {
    // quartic's potential tops out near 4e3, so t in [1e-4, 1e-1] drives the
    // regulator flat and the residual stops shrinking linearly
    const auto tg = geometric_grid(1e-4, 1e-1, 6);
    auto rep = verify_strong_continuity(make_preset("quartic", g), tg, 5, 0xC1);
    CHECK_FALSE(rep.pass);
    CHECK(detail_of(rep, "slope") < 0.9);
  }

  SECTION("window construction scales with the model") {
    auto w_free = continuity_window(make_preset("free", g));
    auto w_quartic = continuity_window(make_preset("quartic", g));
    REQUIRE(w_free.size() == 6);
    CHECK(w_free.back() > 10.0 * w_quartic.back());
    CHECK(w_quartic.front() == Catch::Approx(w_quartic.back() * 1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(continuity_window(make_preset("free", g), 1), std::invalid_argument);
  }
}

TEST_CASE("verify_convergence: iterates approach the oracle at the fitted rate") {
  SECTION("free plane wave against the exact phase, first order in n") {
    auto g = make_grid({128}, {16.0});
    auto spec = make_preset("free", g);
    const double kappa = 2.0 * std::numbers::pi * 4.0 / 16.0;
    auto pw = sample(g, [&](std::span<const double> x) { return std::polar(1.0, kappa * x[0]); });
    const double t = 0.4;
    const cxd phase = std::exp(cxd(0.0, -0.5 * kappa * kappa * t));
    std::vector<cxd> ov(pw.values().begin(), pw.values().end());
    for (auto& z : ov) z *= phase;
    WaveFunction oracle(g, std::move(ov));

    const std::size_t ns[] = {1, 16, 256, 4096};
    auto rep = verify_convergence(spec, pw, t, ns, oracle);
    CHECK(rep.pass);
    REQUIRE(rep.fitted_order.has_value());
    CHECK(*rep.fitted_order >= 0.9);
    CHECK(*rep.fitted_order <= 1.1);
    // the epsilon ladder is recorded in order
    CHECK(detail_of(rep, "n[0]") == 1.0);
    CHECK(detail_of(rep, "eps[3]") < detail_of(rep, "eps[0]") / 4.0);
  }

  SECTION("harmonic ground state against the analytic oracle") {
    auto g = make_grid({256}, {32.0});
    auto spec = make_preset("harmonic", g);
    auto psi0 = analytic_harmonic_state(0, 0.0, g);
    const double t = 0.5;
    auto oracle = analytic_harmonic_state(0, t, g);
    const std::size_t ns[] = {16, 256, 4096};
    auto rep = verify_convergence(spec, psi0, t, ns, oracle);
    CHECK(rep.pass);
    CHECK(*rep.fitted_order >= 0.9);
    CHECK(*rep.fitted_order <= 1.1);
  }

  SECTION("Sturm-Liouville against the dense reference") {
    auto g = make_grid({64}, {16.0});
    auto spec = make_preset("sturm-liouville", g);
    std::vector<double> x0{0.0}, k0{0.0};
    auto psi0 = analytic_free_gaussian(1.0, x0, k0, 0.0, g);
    const double t = 0.3;
    auto oracle = dense_oracle(spec, t, psi0);
    const std::size_t ns[] = {1, 64, 4096};
    auto rep = verify_convergence(spec, psi0, t, ns, oracle.wavefunction);
    CHECK(rep.pass);
    CHECK(*rep.fitted_order > 0.2);
  }

  SECTION("runs are bit-for-bit reproducible") {
    auto g = make_grid({64}, {16.0});
    auto spec = make_preset("harmonic", g);
    std::vector<double> x0{0.0}, k0{1.0};
    auto psi0 = analytic_free_gaussian(1.0, x0, k0, 0.0, g);
    auto oracle = splitstep_evolve(spec, 0.2, 2048, psi0);
    const std::size_t ns[] = {4, 64};
    auto r1 = verify_convergence(spec, psi0, 0.2, ns, oracle.wavefunction);
    auto r2 = verify_convergence(spec, psi0, 0.2, ns, oracle.wavefunction);
    CHECK(r1.worst_violation == r2.worst_violation);
    CHECK(detail_of(r1, "eps[0]") == detail_of(r2, "eps[0]"));
    CHECK(detail_of(r1, "eps[1]") == detail_of(r2, "eps[1]"));
  }

  SECTION("validation") {
    auto g = make_grid({64}, {16.0});
    auto g2 = make_grid({32}, {16.0});
    auto spec = make_preset("harmonic", g);
    std::vector<double> x0{0.0}, k0{0.0};
    auto psi0 = analytic_free_gaussian(1.0, x0, k0, 0.0, g);
    auto other = analytic_free_gaussian(1.0, x0, k0, 0.0, g2);
    const std::size_t ns[] = {1, 2};
    CHECK_THROWS_AS(verify_convergence(spec, psi0, 0.1, ns, other), std::invalid_argument);
    const std::size_t zero[] = {0, 2};
    CHECK_THROWS_AS(verify_convergence(spec, psi0, 0.1, zero, psi0), std::invalid_argument);
  }
}
