#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "pnss/error.hpp"
#include "pnss/photonics.hpp"
#include "pnss/receiver.hpp"

using namespace pnss;

namespace {

struct Modes {
  fixtures::Setup s;
  std::vector<double> Phi1;
  std::vector<double> Phi2;
  std::vector<double> n_out;
  std::vector<double> flux_total;

  explicit Modes(const SuperpositionState& c) {
    const auto th = theta(s.pulse, s.derived.alpha1, s.grid);
    auto m = fluxes_and_modes(th, s.pulse, s.derived.alpha1, c);
    Phi1 = std::move(m.Phi1);
    Phi2 = std::move(m.Phi2);
    flux_total = std::move(m.flux_total);
    n_out = mean_photon_number(th, c).values;
  }

  PulseSolveResult solve(PulseSolveOptions o = {}) const { return solve_pulse_shape(Phi1, Phi2, s.params, s.grid, o); }
};

double block_one(const GammaAmplitudes& g, std::size_t i) { return std::norm(g.z_0[i]) + std::norm(g.p1_1[i]); }
double block_two(const GammaAmplitudes& g, std::size_t i) {
  return std::norm(g.p1_2[i]) + std::norm(g.z_1[i]) + std::norm(g.m1_0[i]);
}

double max_gamma_diff(const GammaAmplitudes& a, const GammaAmplitudes& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.z_0.size(); ++i) {
    w = std::max({w, std::abs(a.z_0[i] - b.z_0[i]), std::abs(a.p1_1[i] - b.p1_1[i]),
                  std::abs(a.p1_2[i] - b.p1_2[i]), std::abs(a.z_1[i] - b.z_1[i]),
                  std::abs(a.m1_0[i] - b.m1_0[i]), std::abs(a.p1_0[i] - b.p1_0[i])});
  }
  return w;
}

}  // namespace

TEST_CASE("pulse areas scale linearly with the coupling") {
  Modes m(fixtures::baseline_qubit());
  const auto p2 = PulseShape::gaussian(1e-6, 0.0);
  const auto a = pulse_areas(p2, m.Phi1, m.Phi2, 1.0e6, m.s.params.k, m.s.grid);
  const auto b = pulse_areas(p2, m.Phi1, m.Phi2, 2.0e6, m.s.params.k, m.s.grid);
  CHECK(b.eta.back() == doctest::Approx(2.0 * a.eta.back()));
  CHECK(b.zeta.back() == doctest::Approx(2.0 * a.zeta.back()));
  CHECK(a.eta[0] == 0.0);
  CHECK_THROWS_AS(pulse_areas(p2, m.Phi1, m.Phi2, 1.0, 0.0, m.s.grid), InvalidArgument);
  const std::vector<double> short_mode(3, 0.0);
  CHECK_THROWS_AS(pulse_areas(p2, short_mode, m.Phi2, 1.0, m.s.params.k, m.s.grid), InvalidArgument);
}

TEST_CASE("equal Rabi frequencies cannot reach pi areas") {
  Modes m(fixtures::baseline_qubit());
  PulseSolveOptions o;
  o.free = FreeParameter::center;
  try {
    (void)m.solve(o);
    FAIL("expected PulseSolveError");
  } catch (const PulseSolveError& e) {
    CHECK_FALSE(e.best().converged);
    CHECK(std::string(e.what()).find("cannot reach pi") != std::string::npos);
  }
  // a constant envelope bounds both areas from above
  const double G2 = m.s.derived.G2;
  const double scale = G2 / std::sqrt(m.s.params.k);
  const double eta_flat = 2.0 * scale * integrate(m.s.grid, m.Phi1);
  std::vector<double> sum(m.Phi1.size());
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = m.Phi1[i] + m.Phi2[i];
  const double zeta_flat = scale * integrate(m.s.grid, sum);
  CHECK(eta_flat < M_PI);
  CHECK(zeta_flat < M_PI);
}

TEST_CASE("stronger fixed amplitude is solved by moving the center") {
  Modes m(fixtures::baseline_qubit());
  m.s.params.omega2 = 2.0 * m.s.params.omega1;
  PulseSolveOptions o;
  o.free = FreeParameter::center;
  const auto r = m.solve(o);
  CHECK(r.converged);
  CHECK(r.solved_with == FreeParameter::center);
  CHECK(std::abs(r.eta_residual) <= 1e-6);
  CHECK(std::abs(r.zeta_residual) <= 1e-6);
  CHECK(r.omega2 == doctest::Approx(m.s.params.omega2));
  const auto a = pulse_areas(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, m.s.grid);
  CHECK(a.eta.back() == doctest::Approx(M_PI).epsilon(1e-7));
  CHECK(a.zeta.back() == doctest::Approx(M_PI).epsilon(1e-7));
}

TEST_CASE("amplitude mode and the automatic fallback") {
  Modes m(fixtures::baseline_qubit());
  PulseSolveOptions o;
  o.free = FreeParameter::amplitude;
  const auto amp = m.solve(o);
  CHECK(amp.converged);
  CHECK(amp.pulse.center() == 0.0);
  CHECK(amp.pulse.duration() * 1e6 == doctest::Approx(0.741327).epsilon(1e-5));
  CHECK(amp.omega2 / m.s.params.omega1 == doctest::Approx(1.125412).epsilon(1e-5));
  const auto aut = m.solve();
  CHECK(aut.solved_with == FreeParameter::amplitude);
  CHECK(aut.pulse.duration() == doctest::Approx(amp.pulse.duration()).epsilon(1e-12));
  CHECK(aut.message.find("abandoned") != std::string::npos);

  o.fixed_center = 0.2e-6;
  const auto shifted = m.solve(o);
  CHECK(std::abs(shifted.eta_residual) <= 1e-6);
  CHECK(shifted.pulse.center() == doctest::Approx(0.2e-6));
}

TEST_CASE("solver option validation") {
  Modes m(fixtures::baseline_qubit());
  PulseSolveOptions o;
  o.duration_min = 0.0;
  CHECK_THROWS_AS(m.solve(o), InvalidArgument);
  o = {};
  o.center_min = o.center_max;
  CHECK_THROWS_AS(m.solve(o), InvalidArgument);
  o = {};
  o.tol = 0.0;
  CHECK_THROWS_AS(m.solve(o), InvalidArgument);
  o = {};
  o.free = FreeParameter::amplitude;
  o.duration_max = 0.06e-6;
  CHECK_THROWS_AS(m.solve(o), PulseSolveError);
}

TEST_CASE("closed-form receiver agrees with time integration") {
  for (const auto& c : fixtures::random_states(6, 31u)) {
    Modes m(c);
    const auto r = m.solve();
    const auto areas = pulse_areas(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, m.s.grid);
    const auto an = gamma_analytic(areas, c);
    const auto ode = simulate_receiver_ode(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, M_PI / 2, c, m.s.grid);
    CHECK(max_gamma_diff(an.gamma, ode.gamma) < 1e-6);
    double worst = 0.0;
    for (std::size_t i = 0; i < m.s.grid.size(); ++i) {
      worst = std::max(worst, std::abs(block_one(an.gamma, i) - c.pop_0()));
      worst = std::max(worst, std::abs(block_two(an.gamma, i) - c.pop_m1()));
      worst = std::max(worst, std::abs(block_one(ode.gamma, i) - c.pop_0()));
      worst = std::max(worst, std::abs(block_two(ode.gamma, i) - c.pop_m1()));
    }
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("phase of the receiving field") {
  CHECK(is_analytic_phase(M_PI / 2));
  CHECK(is_analytic_phase(M_PI / 2 + 4.0 * M_PI));
  CHECK(is_analytic_phase(-1.5 * M_PI));
  CHECK_FALSE(is_analytic_phase(0.0));
  Modes m(fixtures::baseline_qubit());
  const auto r = m.solve();
  const auto areas = pulse_areas(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, m.s.grid);
  CHECK_THROWS_AS(gamma_analytic(areas, fixtures::baseline_qubit(), 0.3), InvalidArgument);

  // any phase still transfers the populations; the amplitudes pick up a relative phase
  const SuperpositionState c(std::sqrt(0.7), std::sqrt(0.3));
  const auto ode = simulate_receiver_ode(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, 0.3, c, m.s.grid);
  const auto last = m.s.grid.size() - 1;
  CHECK(block_one(ode.gamma, last) == doctest::Approx(0.3).epsilon(1e-9));
  CHECK(block_two(ode.gamma, last) == doctest::Approx(0.7).epsilon(1e-9));
  CHECK(std::norm(ode.gamma.m1_0.back()) == doctest::Approx(0.7).epsilon(1e-6));
  CHECK(std::norm(ode.gamma.z_0.back()) == doctest::Approx(0.3).epsilon(1e-6));
}

TEST_CASE("final state reproduces the input") {
  const auto c = fixtures::baseline_qutrit();
  Modes m(c);
  const auto r = m.solve();
  const auto areas = pulse_areas(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, m.s.grid);
  const auto fin = final_state(gamma_analytic(areas, c), c);
  CHECK(fin.fidelity >= 0.999);
  CHECK(fin.leakage < 1e-9);
  CHECK_FALSE(fin.leakage_warning);
  CHECK(fin.state.pop_p1() == doctest::Approx(0.2));
}

TEST_CASE("wrong pulse areas leak population and raise the warning") {
  const auto c = fixtures::baseline_qubit();
  Modes m(c);
  const auto p2 = PulseShape::gaussian(1e-6, 0.0);
  const auto areas = pulse_areas(p2, m.Phi1, m.Phi2, m.s.derived.G2, m.s.params.k, m.s.grid);
  const auto fin = final_state(gamma_analytic(areas, c), c);
  CHECK(fin.leakage > 1e-3);
  CHECK(fin.leakage_warning);
}

TEST_CASE("conservation residual ends at the undelivered photon number") {
  const auto c = fixtures::baseline_qubit();
  Modes m(c);
  const auto r = m.solve();
  const auto areas = pulse_areas(r.pulse, m.Phi1, m.Phi2, r.G2, m.s.params.k, m.s.grid);
  const auto traj = gamma_analytic(areas, c);
  const auto res = conservation_check(traj, m.n_out, m.flux_total, m.s.params.k);
  CHECK(std::abs(res.front()) < 1e-12);
  CHECK(res.back() == doctest::Approx(1.0 + c.pop_m1() - m.n_out.back()).epsilon(1e-6));
  const std::vector<double> bad(2, 0.0);
  CHECK_THROWS_AS(conservation_check(traj, bad, m.flux_total, m.s.params.k), InvalidArgument);
}
