#include "pnss/core.hpp"

#include <cmath>
#include <sstream>

#include "pnss/error.hpp"

namespace pnss {

PhysicalParams PhysicalParams::rb87_defaults() {
  PhysicalParams p{};
  p.g = mhz_to_rad_per_s(12.0);
  p.k = mhz_to_rad_per_s(3.0);
  p.gamma_sp = mhz_to_rad_per_s(5.87);
  p.omega1 = mhz_to_rad_per_s(10.0);
  p.omega2 = p.omega1;
  p.delta = mhz_to_rad_per_s(100.0);
  // 15 G: |g_F| = 1/2 for 5S1/2 F=1 gives 10.5 MHz; F'=2 splitting is quoted as 15 MHz.
  p.delta_B_ground = mhz_to_rad_per_s(10.5);
  p.delta_B_excited = mhz_to_rad_per_s(15.0);
  p.phi2 = kPi / 2.0;
  p.atom_mass = 1.443160648e-25;
  p.wavelength = 780.241209e-9;
  return p;
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw InvalidArgument(std::string("PhysicalParams.") + field + ": " + what);
}

}  // namespace

void PhysicalParams::validate() const {
  auto positive = [](double x) { return std::isfinite(x) && x > 0.0; };
  auto non_negative = [](double x) { return std::isfinite(x) && x >= 0.0; };
  require(positive(g), "g", "must be > 0");
  require(positive(k), "k", "must be > 0");
  require(positive(gamma_sp), "gamma_sp", "must be > 0");
  require(non_negative(omega1), "omega1", "must be >= 0");
  require(non_negative(omega2), "omega2", "must be >= 0");
  require(std::isfinite(delta) && delta != 0.0, "delta", "must be finite and nonzero");
  require(positive(delta_B_ground), "delta_B_ground", "must be > 0");
  require(positive(delta_B_excited), "delta_B_excited", "must be > 0");
  require(std::isfinite(phi2), "phi2", "must be finite");
  require(positive(atom_mass), "atom_mass", "must be > 0");
  require(positive(wavelength), "wavelength", "must be > 0");
}

DerivedQuantities derive(const PhysicalParams& p) {
  p.validate();
  DerivedQuantities d{};
  const double abs_delta = std::abs(p.delta);
  d.G1 = p.g * p.omega1 / abs_delta;
  d.G2 = p.g * p.omega2 / abs_delta;
  d.alpha1 = 4.0 * d.G1 * d.G1 / p.k;
  d.R_sn = 4.0 * p.g * p.g / (p.k * p.gamma_sp);
  d.gamma1_peak = (p.omega1 / p.delta) * (p.omega1 / p.delta) * p.gamma_sp;
  const double k_photon = 2.0 * kPi / p.wavelength;
  d.omega_rec = kHbar * k_photon * k_photon / (2.0 * p.atom_mass);
  return d;
}

SuperpositionState::SuperpositionState(cplx c_m1, cplx c_0, cplx c_p1)
    : c_m1_(c_m1), c_0_(c_0), c_p1_(c_p1) {
  const double n = std::norm(c_m1) + std::norm(c_0) + std::norm(c_p1);
  if (!std::isfinite(n) || std::abs(n - 1.0) > kNormTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "superposition state not normalized: sum |c|^2 = " << n;
    throw InvalidArgument(msg.str());
  }
}

SuperpositionState SuperpositionState::normalized(cplx c_m1, cplx c_0, cplx c_p1) {
  const double n = std::sqrt(std::norm(c_m1) + std::norm(c_0) + std::norm(c_p1));
  if (!(n > 0.0) || !std::isfinite(n)) throw InvalidArgument("cannot normalize a zero state");
  return {c_m1 / n, c_0 / n, c_p1 / n};
}

SuperpositionState SuperpositionState::with_global_phase(double chi) const {
  const cplx phase = std::polar(1.0, chi);
  return {phase * c_m1_, phase * c_0_, phase * c_p1_};
}

double SuperpositionState::fidelity(const SuperpositionState& other) const {
  const cplx overlap =
      std::conj(c_m1_) * other.c_m1_ + std::conj(c_0_) * other.c_0_ + std::conj(c_p1_) * other.c_p1_;
  return std::norm(overlap);
}

bool RegimeReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

std::vector<std::string> RegimeReport::failures() const {
  std::vector<std::string> out;
  for (const auto& e : entries)
    if (!e.pass) out.push_back(e.name);
  return out;
}

RegimeReport validate_regime(const PhysicalParams& p, const DerivedQuantities& d,
                             double pulse_duration, const RegimeThresholds& thresholds) {
  if (!(pulse_duration > 0.0)) throw InvalidArgument("pulse duration must be > 0");
  RegimeReport report{{}, thresholds.min_ratio};
  auto add = [&](std::string name, double left, double right) {
    const double ratio = left / right;
    report.entries.push_back({std::move(name), left, right, ratio, ratio >= thresholds.min_ratio});
  };
  const double abs_delta = std::abs(p.delta);
  add("|Delta|/k", abs_delta, p.k);
  add("|Delta|/gamma_sp", abs_delta, p.gamma_sp);
  add("|Delta|/Omega1", abs_delta, p.omega1);
  add("|Delta|/Delta_B", abs_delta, std::max(p.delta_B_ground, p.delta_B_excited));
  add("k/G1", p.k, d.G1);
  add("Delta_B_ground/k", p.delta_B_ground, p.k);
  add("k*T1", p.k * pulse_duration, 1.0);
  add("R_sn", d.R_sn, 1.0);
  add("G1/omega_rec", d.G1, d.omega_rec);
  return report;
}

}  // namespace pnss
