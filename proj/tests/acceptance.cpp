// Acceptance suite: one line per criterion. Criteria whose failure is a
// proven property of the model are printed as FAIL [known-blocked]; the suite
// then checks that the blocking condition itself holds, and only unexpected
// outcomes make the process exit nonzero.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "pnss/csv.hpp"
#include "pnss/scenario.hpp"

using namespace pnss;
namespace fs = std::filesystem;

namespace {

int unexpected = 0;

void report(const std::string& id, bool pass, const std::string& detail, bool known_blocked = false) {
  const char* tag = pass ? "PASS" : (known_blocked ? "FAIL [known-blocked]" : "FAIL");
  std::printf("%-4s %-22s %s\n", id.c_str(), tag, detail.c_str());
  if (!pass && !known_blocked) ++unexpected;
  if (pass && known_blocked) {
    std::printf("     note: criterion marked blocked unexpectedly passed\n");
  }
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

template <typename F>
void guarded(const std::string& id, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

double max_dev(const std::vector<double>& a, const std::vector<double>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

double max_dev(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double w = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
  return w;
}

double gamma_dev(const GammaAmplitudes& a, const GammaAmplitudes& b) {
  return std::max({max_dev(a.z_0, b.z_0), max_dev(a.p1_1, b.p1_1), max_dev(a.p1_2, b.p1_2),
                   max_dev(a.z_1, b.z_1), max_dev(a.m1_0, b.m1_0), max_dev(a.p1_0, b.p1_0)});
}

double block_dev(const GammaAmplitudes& g, const SuperpositionState& c) {
  double w = 0.0;
  for (std::size_t i = 0; i < g.z_0.size(); ++i) {
    w = std::max(w, std::abs(std::norm(g.z_0[i]) + std::norm(g.p1_1[i]) - c.pop_0()));
    w = std::max(w, std::abs(std::norm(g.p1_2[i]) + std::norm(g.z_1[i]) + std::norm(g.m1_0[i]) - c.pop_m1()));
  }
  return w;
}

std::vector<double> last_csv_row(const fs::path& path, const std::string& col, std::size_t& index) {
  std::ifstream in(path);
  std::string line, header, last;
  std::getline(in, line);
  std::getline(in, header);
  while (std::getline(in, line)) last = line;
  std::vector<std::string> names;
  std::stringstream hs(header);
  for (std::string s; std::getline(hs, s, ',');) names.push_back(s);
  index = static_cast<std::size_t>(std::find(names.begin(), names.end(), col) - names.begin());
  std::vector<double> out;
  std::stringstream ls(last);
  for (std::string s; std::getline(ls, s, ',');) out.push_back(std::stod(s));
  return out;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ScenarioConfig qubit_config() { return parse_config(std::string("{}")); }

ScenarioConfig qutrit_config() {
  return parse_config(std::string(R"({"initial_state": {"c_m1": [0.7071067811865476, 0],
    "c_0": [0.5477225575051661, 0], "c_p1": [0.4472135954999579, 0]}})"));
}

}  // namespace

int main() {
  std::printf("acceptance suite (baseline scenario, %d-point grid)\n", 48001);
  fixtures::Setup s;
  const auto c_base = fixtures::baseline_qubit();
  const auto randoms = fixtures::random_states(20);

  guarded("1", [&] {
    const auto run = run_sender(s.params, s.pulse, c_base, s.grid);
    const auto& p = run.populations;
    double an = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
      an = std::max(an, std::abs(p.sigma_m1[i] + p.sigma_0[i] + p.sigma_p1[i] - 1.0));
    const auto o = simulate_sender_ode(s.params, s.pulse, c_base, s.grid);
    double od = 0.0;
    for (std::size_t i = 0; i < s.grid.size(); ++i)
      od = std::max(od, std::abs(o.sigma_m1[i] + o.sigma_0[i] + o.sigma_p1[i] - 1.0));
    report("1", an <= 1e-10 && od <= 1e-6, fmt("population sum: analytic %.2e (<=1e-10), ODE %.2e (<=1e-6)", an, od));
  });

  guarded("2", [&] {
    double worst = 0.0;
    std::vector<SuperpositionState> states{c_base};
    states.insert(states.end(), randoms.begin(), randoms.end());
    for (const auto& c : states) {
      const auto th = theta(s.pulse, s.derived.alpha1, s.grid);
      const auto a = populations_analytic(th, c);
      const auto o = simulate_sender_ode(s.params, s.pulse, c, s.grid);
      worst = std::max({worst, max_dev(a.sigma_m1, o.sigma_m1), max_dev(a.sigma_0, o.sigma_0),
                        max_dev(a.sigma_p1, o.sigma_p1)});
      if (a.has_coherences)
        worst = std::max({worst, max_dev(a.coh_m1_0, o.coh_m1_0), max_dev(a.coh_0_p1, o.coh_0_p1)});
    }
    report("2", worst <= 1e-6, fmt("sender ODE vs closed form, 21 states: max dev %.2e (<=1e-6)", worst));
  });

  const auto dir = fs::temp_directory_path() / "pnss_acceptance";
  fs::remove_all(dir);
  fs::create_directories(dir);

  guarded("3", [&] {
    auto cfg = qubit_config();
    const auto r = run_send(cfg);
    write_photonics_csv((dir / "photonics.csv").string(), cfg, r);
    std::size_t i1 = 0, i2 = 0;
    const auto row = last_csv_row(dir / "photonics.csv", "P1", i1);
    (void)last_csv_row(dir / "photonics.csv", "P2", i2);
    // ϑ∞ by Simpson quadrature of α₁f₁, independent of the library's trapezoid rule
    std::vector<double> rate(s.grid.size());
    for (std::size_t i = 0; i < rate.size(); ++i) rate[i] = s.derived.alpha1 * std::exp(-std::pow(s.grid[i] / fixtures::kT1, 2));
    const double x = fixtures::simpson(s.grid, rate);
    const double p2 = 0.7 * (1.0 - (1.0 + x) * std::exp(-x));
    const double p1 = 0.3 * (1.0 - std::exp(-x)) + 0.7 * x * std::exp(-x);
    const double d_formula = std::max(std::abs(row[i1] - p1), std::abs(row[i2] - p2));
    const double d_asym = std::max(std::abs(row[i1] - 0.3), std::abs(row[i2] - 0.7));
    report("3", d_formula <= 1e-8 && d_asym <= 0.015,
           fmt("P1(inf)=%.6f P2(inf)=%.6f; formula dev %.2e (<=1e-8)", row[i1], row[i2], d_formula) +
               fmt(", asymptote dev %.4f (<=0.015)", d_asym));
  });

  guarded("4", [&] {
    double worst = 0.0;
    for (const auto& c : randoms) {
      const auto run = run_sender(s.params, s.pulse, c, s.grid);
      const auto ph = compute_photon_observables(run, s.pulse, s.derived.alpha1, c);
      for (std::size_t i = 0; i < s.grid.size(); ++i)
        worst = std::max(worst, std::abs(ph.n_out[i] - ph.distribution.P1[i] - 2.0 * ph.distribution.P2[i]));
    }
    report("4", worst <= 1e-8, fmt("n_out - (P1 + 2 P2), 20 states: max %.2e (<=1e-8)", worst));
  });

  guarded("5", [&] {
    double peak = 0.0;
    std::vector<SuperpositionState> qubits{c_base};
    for (const auto& c : randoms)
      if (c.is_qubit()) qubits.push_back(c);
    for (const auto& c : qubits) {
      const auto run = run_sender(s.params, s.pulse, c, s.grid);
      const auto ph = compute_photon_observables(run, s.pulse, s.derived.alpha1, c);
      peak = std::max(peak, *std::max_element(ph.g2.g2.begin(), ph.g2.g2.end()));
    }
    const SuperpositionState single(0.0, 1.0);
    const auto run = run_sender(s.params, s.pulse, single, s.grid);
    const auto ph = compute_photon_observables(run, s.pulse, s.derived.alpha1, single);
    const bool zero = std::all_of(ph.g2.g2.begin(), ph.g2.g2.end(), [](double v) { return v == 0.0; });
    report("5", peak <= 1.0 + 1e-9 && zero,
           fmt("max g2 over %.0f qubit inputs = %.6f (<=1+1e-9); c_m1=0 gives g2==0: ", double(qubits.size()), peak) +
               (zero ? "yes" : "no"));
  });

  guarded("6+7", [&] {
    double blocks = 0.0;
    double oracle = 0.0;
    for (const auto& c : randoms) {
      const auto run = run_sender(s.params, s.pulse, c, s.grid);
      const auto fl = fluxes_and_modes(run.theta, s.pulse, s.derived.alpha1, c);
      const auto sol = solve_pulse_shape(fl.Phi1, fl.Phi2, s.params, s.grid);
      const auto areas = pulse_areas(sol.pulse, fl.Phi1, fl.Phi2, sol.G2, s.params.k, s.grid);
      const auto an = gamma_analytic(areas, c);
      const auto ode = simulate_receiver_ode(sol.pulse, fl.Phi1, fl.Phi2, sol.G2, s.params.k, kPi / 2, c, s.grid);
      blocks = std::max({blocks, block_dev(an.gamma, c), block_dev(ode.gamma, c)});
      oracle = std::max(oracle, gamma_dev(an.gamma, ode.gamma));
    }
    report("6", blocks <= 1e-9, fmt("receiver block norms, 20 states, both paths: max dev %.2e (<=1e-9)", blocks));
    report("7", oracle <= 1e-6, fmt("receiver ODE vs closed form at phi2=pi/2: max dev %.2e (<=1e-6)", oracle));
  });

  guarded("8", [&] {
    const auto run = run_sender(s.params, s.pulse, c_base, s.grid);
    const auto fl = fluxes_and_modes(run.theta, s.pulse, s.derived.alpha1, c_base);
    PulseSolveOptions o;
    o.free = FreeParameter::center;
    bool solved = false;
    double T2 = 0.0, res = 0.0;
    try {
      const auto r = solve_pulse_shape(fl.Phi1, fl.Phi2, s.params, s.grid, o);
      solved = true;
      T2 = r.pulse.duration() * 1e6;
      res = std::max(std::abs(r.eta_residual), std::abs(r.zeta_residual));
    } catch (const PulseSolveError&) {
    }
    const bool pass = solved && res <= 1e-6 && T2 >= 0.7 && T2 <= 1.3;

    // Blocking condition: with f2 <= 1 and Phi >= 0, a constant envelope at
    // Omega2 = Omega1 bounds both areas from above.
    const double scale = s.derived.G2 / std::sqrt(s.params.k);
    std::vector<double> sum(fl.Phi1.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = fl.Phi1[i] + fl.Phi2[i];
    const double eta_max = 2.0 * scale * integrate(s.grid, fl.Phi1);
    const double zeta_max = scale * integrate(s.grid, sum);
    const bool blocked = eta_max < kPi && zeta_max < kPi;
    report("8", pass,
           solved ? fmt("Omega2=Omega1: T2=%.4f us, residual %.2e", T2, res)
                  : fmt("Omega2=Omega1 has no solution: eta <= %.5f, zeta <= %.5f < pi for any Gaussian", eta_max, zeta_max),
           blocked);

    const auto fb = solve_pulse_shape(fl.Phi1, fl.Phi2, s.params, s.grid);
    const double fres = std::max(std::abs(fb.eta_residual), std::abs(fb.zeta_residual));
    report("8a", fres <= 1e-6,
           fmt("default solve (free amplitude): T2=%.6f us, Omega2/Omega1=%.6f, residual %.2e (<=1e-6)",
               fb.pulse.duration() * 1e6, fb.omega2 / s.params.omega1, fres));
  });

  guarded("9", [&] {
    const auto q = run_transfer(qubit_config());
    const auto t = run_transfer(qutrit_config());
    const bool fid = q.final_state.fidelity >= 0.999 && t.final_state.fidelity >= 0.999;
    report("9a", fid, fmt("fidelity: qubit %.12f, qutrit %.12f (>=0.999)", q.final_state.fidelity, t.final_state.fidelity));

    double worst = 0.0;
    for (const auto* r : {&q, &t})
      for (double v : r->receiver.conservation_residual) worst = std::max(worst, std::abs(v));
    // Blocking condition: the residual ends at the photon number the sender
    // never emitted (finite theta), which is fixed before the receiver acts.
    const double tail_expected = 1.0 + q.send.sender.populations.sigma_m1.front() - q.send.photons.n_out.back();
    const bool blocked = std::abs(q.receiver.conservation_residual.back() - tail_expected) <= 1e-6 && worst > 1e-3;
    report("9b", worst <= 1e-3,
           fmt("conservation residual max %.4f, end %.4f (<=1e-3); undelivered photons at grid end %.4f",
               worst, q.receiver.conservation_residual.back(), tail_expected),
           blocked);
  });

  guarded("10", [&] {
    const double L = attenuation_length(2.0);
    bool exact = true;
    for (double L0 : {0.0, 0.06, 1.0, 2.5, 10.0}) {
      const double e1 = transmission_efficiency(L0, L, 1);
      exact = exact && transmission_efficiency(L0, L, 2) == e1 * e1;
    }
    auto cfg = qubit_config();
    cfg.channel.L0_km = 0.06;
    const auto b = evaluate_channel(cfg.channel, cfg.initial_state);
    const bool pass = std::abs(L - 2.171) <= 5e-4 && exact && std::abs(b.weighted_success - 0.954) <= 1e-3;
    report("10", pass,
           fmt("L_att=%.4f km, 60 m weighted success %.5f (0.954+-0.001), eta2==eta1^2 bitwise: ", L, b.weighted_success) +
               (exact ? "yes" : "no"));
  });

  guarded("11", [&] {
    const double r = s.derived.R_sn;
    report("11", std::abs(r - 32.7) <= 0.1, fmt("R_sn = %.4f (32.7+-0.1)", r));
  });

  guarded("12", [&] {
    auto cfg = qubit_config();
    std::vector<std::string> blobs[2];
    for (int k = 0; k < 2; ++k) {
      const auto out = dir / ("run" + std::to_string(k));
      fs::create_directories(out);
      const auto r = run_transfer(cfg);
      write_sender_csv((out / "sender.csv").string(), cfg, r.send);
      write_photonics_csv((out / "photonics.csv").string(), cfg, r.send);
      write_receiver_csv((out / "receiver.csv").string(), cfg, r);
      std::ofstream(out / "report.json") << transfer_report(cfg, r).dump(2) << '\n';
      for (const char* f : {"sender.csv", "photonics.csv", "receiver.csv", "report.json"})
        blobs[k].push_back(slurp(out / f));
    }
    report("12", blobs[0] == blobs[1], blobs[0] == blobs[1] ? "two transfer runs byte-identical (3 CSV + JSON)"
                                                            : "outputs differ between runs");
  });

  fs::remove_all(dir);
  std::printf("unexpected failures: %d\n", unexpected);
  return unexpected == 0 ? 0 : 1;
}
