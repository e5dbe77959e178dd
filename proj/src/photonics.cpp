#include "pnss/photonics.hpp"

#include <cmath>
#include <limits>

#include "pnss/error.hpp"
#include "pnss/photon_math.hpp"

namespace pnss {

PhotonDistribution photon_distribution(const BetaAmplitudes& b) {
  const std::size_t n = b.m1_0.size();
  PhotonDistribution d;
  d.P0.resize(n);
  d.P1.resize(n);
  d.P2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    d.P0[i] = std::norm(b.m1_0[i]) + std::norm(b.z_0[i]) + std::norm(b.p1_0[i]);
    d.P1[i] = std::norm(b.z_1[i]) + std::norm(b.p1_1[i]);
    d.P2[i] = std::norm(b.p1_2[i]);
  }
  return d;
}

FluxesAndModes fluxes_and_modes(const SampledFunction& th, const PulseShape& pulse, double alpha1,
                                const SuperpositionState& c) {
  const std::size_t n = th.size();
  const double pm1 = c.pop_m1();
  const double emitting = pm1 + c.pop_0();
  FluxesAndModes out;
  out.flux_total.resize(n);
  out.flux_I.resize(n);
  out.flux_II.resize(n);
  out.Phi1.resize(n);
  out.Phi2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = th[i];
    const double rate = alpha1 * pulse.intensity(th.grid[i]);
    const double e = std::exp(-x);
    const double phi1_sq = rate * e;
    const double phi2_sq = rate * x * e;
    out.Phi1[i] = std::sqrt(phi1_sq);
    out.Phi2[i] = std::sqrt(phi2_sq);
    out.flux_I[i] = emitting * phi1_sq;
    out.flux_II[i] = pm1 * phi2_sq;
    // 1 − ⟨σ₁⟩ = ⟨σ₋₁⟩ + ⟨σ₀⟩, evaluated without cancellation.
    out.flux_total[i] = rate * (emitting + pm1 * x) * e;
  }
  return out;
}

SampledFunction mean_photon_number(const SampledFunction& th, const SuperpositionState& c) {
  const double pm1 = c.pop_m1();
  const double p0 = c.pop_0();
  std::vector<double> n(th.size());
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double x = th[i];
    n[i] = p0 * one_photon_yield(x) + pm1 * (one_photon_yield(x) + two_photon_yield(x));
  }
  return {th.grid, std::move(n)};
}

G2Result g2_zero_delay(std::span<const double> Phi1, std::span<const double> Phi2,
                       const SuperpositionState& c) {
  if (Phi1.size() != Phi2.size()) throw InvalidArgument("mode functions differ in length");
  const double pm1 = c.pop_m1();
  const double emitting = pm1 + c.pop_0();
  G2Result out;
  out.g2.resize(Phi1.size());
  out.defined.resize(Phi1.size());
  for (std::size_t i = 0; i < Phi1.size(); ++i) {
    const double a = Phi1[i] * Phi1[i];
    const double b = Phi2[i] * Phi2[i];
    const double intensity = emitting * a + pm1 * b;
    if (!(intensity > std::numeric_limits<double>::min())) {
      out.g2[i] = 0.0;
      out.defined[i] = 0;
      continue;
    }
    out.g2[i] = 4.0 * pm1 * a * b / (intensity * intensity);
    out.defined[i] = 1;
  }
  return out;
}

double mode_overlap(const TimeGrid& grid, std::span<const double> Phi1,
                    std::span<const double> Phi2) {
  if (Phi1.size() != grid.size() || Phi2.size() != grid.size())
    throw InvalidArgument("mode functions must be sampled on the grid");
  std::vector<double> prod(grid.size()), sq1(grid.size()), sq2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    prod[i] = Phi1[i] * Phi2[i];
    sq1[i] = Phi1[i] * Phi1[i];
    sq2[i] = Phi2[i] * Phi2[i];
  }
  const double n1 = integrate(grid, sq1);
  const double n2 = integrate(grid, sq2);
  if (!(n1 > 0.0) || !(n2 > 0.0)) throw InvalidArgument("mode overlap undefined for a zero-norm mode");
  return integrate(grid, prod) / std::sqrt(n1 * n2);
}

PhotonObservables compute_photon_observables(const SenderTrajectory& sender,
                                             const PulseShape& pulse, double alpha1,
                                             const SuperpositionState& c) {
  auto dist = photon_distribution(sender.beta);
  auto fl = fluxes_and_modes(sender.theta, pulse, alpha1, c);
  auto n_out = mean_photon_number(sender.theta, c);
  auto g2 = g2_zero_delay(fl.Phi1, fl.Phi2, c);
  double overlap = std::numeric_limits<double>::quiet_NaN();
  try {
    overlap = mode_overlap(sender.grid, fl.Phi1, fl.Phi2);
  } catch (const InvalidArgument&) {
  }
  return {sender.grid, std::move(dist), std::move(fl), std::move(n_out), std::move(g2), overlap};
}

}  // namespace pnss
