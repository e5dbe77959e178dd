#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pnss/core.hpp"
#include "pnss/sender.hpp"

namespace pnss {

struct PhotonDistribution {
  std::vector<double> P0;
  std::vector<double> P1;
  std::vector<double> P2;
};

/// P_j = Σ_m |β_{m,j}|².
PhotonDistribution photon_distribution(const BetaAmplitudes& beta);

/// Output fluxes (photons/s) and the real, non-negative temporal modes of the
/// first and second photon (s^{−1/2}).
struct FluxesAndModes {
  std::vector<double> flux_total;
  std::vector<double> flux_I;
  std::vector<double> flux_II;
  std::vector<double> Phi1;
  std::vector<double> Phi2;
};

/// flux_total = α₁f₁(1 − ⟨σ₁⟩), Φ₁² = α₁f₁e^{−ϑ}, Φ₂² = α₁f₁ϑe^{−ϑ},
/// flux_II = |c₋₁|²Φ₂² and flux_I = flux_total − flux_II = (1 − |c₊₁|²)Φ₁².
FluxesAndModes fluxes_and_modes(const SampledFunction& theta, const PulseShape& pulse,
                                double alpha1, const SuperpositionState& c);

/// n_out(t) = ∫ flux_total = (|c₀|² + 2|c₋₁|²)(1 − e^{−ϑ}) − |c₋₁|²ϑe^{−ϑ}.
/// For a qubit |c₀|² + 2|c₋₁|² = 1 + |c₋₁|².
SampledFunction mean_photon_number(const SampledFunction& theta, const SuperpositionState& c);

struct G2Result {
  std::vector<double> g2;
  /// 1 where g² is defined, 0 where the denominator vanishes (g² reported as 0).
  std::vector<std::uint8_t> defined;
};

/// Zero-delay g² of the output field with a_out = Φ₁b₁ + Φ₂b₂ acting on
/// c₋₁|1,1⟩ + c₀|1,0⟩ + c₊₁|0,0⟩:
///   g² = 4|c₋₁|²Φ₁²Φ₂² / ((|c₋₁|² + |c₀|²)Φ₁² + |c₋₁|²Φ₂²)².
/// For a qubit the denominator is (Φ₁² + |c₋₁|²Φ₂²)² and g² ≤ 1.
G2Result g2_zero_delay(std::span<const double> Phi1, std::span<const double> Phi2,
                       const SuperpositionState& c);

/// ∫Φ₁Φ₂ dt / (‖Φ₁‖·‖Φ₂‖). Throws InvalidArgument for a zero-norm mode.
double mode_overlap(const TimeGrid& grid, std::span<const double> Phi1,
                    std::span<const double> Phi2);

struct PhotonObservables {
  TimeGrid grid;
  PhotonDistribution distribution;
  FluxesAndModes fluxes;
  SampledFunction n_out;
  G2Result g2;
  /// NaN when either mode has zero norm (e.g. no drive).
  double overlap;
};

PhotonObservables compute_photon_observables(const SenderTrajectory& sender,
                                             const PulseShape& pulse, double alpha1,
                                             const SuperpositionState& c);

}  // namespace pnss
