#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pnss/core.hpp"
#include "pnss/error.hpp"
#include "pnss/sender.hpp"

namespace pnss {

/// Cumulative Raman pulse areas at the receiving node.
struct PulseAreas {
  SampledFunction eta;   ///< 2(|G₂|/√k)∫√f₂Φ₁
  SampledFunction zeta;  ///< (|G₂|/√k)∫√f₂(Φ₁ + Φ₂)
};

PulseAreas pulse_areas(const PulseShape& pulse2, std::span<const double> Phi1,
                       std::span<const double> Phi2, double G2, double k, const TimeGrid& grid);

/// Receiver amplitudes γ_{m,j}: receiving atom in m_F = m with j photons left.
struct GammaAmplitudes {
  std::vector<cplx> z_0;   ///< γ_{0,0}
  std::vector<cplx> p1_1;  ///< γ_{1,1}
  std::vector<cplx> p1_2;  ///< γ_{1,2}
  std::vector<cplx> z_1;   ///< γ_{0,1}
  std::vector<cplx> m1_0;  ///< γ_{−1,0}
  std::vector<cplx> p1_0;  ///< γ_{1,0}, the vacuum branch (c₊₁)
};

struct ReceiverTrajectory {
  TimeGrid grid;
  std::vector<double> eta;
  std::vector<double> zeta;
  GammaAmplitudes gamma;
  std::vector<double> rho_m1;
  std::vector<double> rho_0;
  std::vector<double> rho_p1;
  /// Filled by conservation_check; empty until then.
  std::vector<double> conservation_residual;
};

/// True when φ₂ ≡ π/2 (mod 2π).
bool is_analytic_phase(double phi2);

/// Closed-form rotation of the one- and two-photon blocks, valid for φ₂ = π/2.
/// Any other phase throws InvalidArgument (use simulate_receiver_ode).
ReceiverTrajectory gamma_analytic(const PulseAreas& areas, const SuperpositionState& c,
                                  double phi2 = kPi / 2.0);

/// Integrates the γ equations in time for arbitrary φ₂, with dη/dt and dζ/dt
/// linearly interpolated between grid points.
ReceiverTrajectory simulate_receiver_ode(const PulseShape& pulse2, std::span<const double> Phi1,
                                         std::span<const double> Phi2, double G2, double k,
                                         double phi2, const SuperpositionState& c,
                                         const TimeGrid& grid);

/// Which Gaussian parameter is solved for alongside the duration T₂.
enum class FreeParameter {
  center,     ///< fixed amplitude Ω₂, free (T₂, t₀)
  amplitude,  ///< fixed center t₀, free (T₂, Ω₂)
  automatic,  ///< center first; amplitude when a fixed-Ω₂ pulse cannot reach π
};

struct PulseSolveOptions {
  FreeParameter free = FreeParameter::automatic;
  double duration_min = 0.05e-6;  ///< s
  double duration_max = 20e-6;    ///< s
  double center_min = -1.0e-6;    ///< s, center-mode bracket
  double center_max = 1.0e-6;     ///< s
  double fixed_center = 0.0;      ///< s, amplitude mode
  double tol = 1e-6;              ///< on |η(∞) − π| and |ζ(∞) − π|
  int max_iter = 200;
};

struct PulseSolveResult {
  PulseShape pulse;
  double omega2;  ///< rad/s
  double G2;      ///< rad/s
  double eta_residual;
  double zeta_residual;
  int iterations;
  FreeParameter solved_with;
  bool converged;
  std::string message;
};

/// Error carrying the closest pulse the solver found.
class PulseSolveError : public Error {
 public:
  PulseSolveError(const std::string& what, PulseSolveResult best)
      : Error(what), best_(std::move(best)) {}
  const PulseSolveResult& best() const { return best_; }

 private:
  PulseSolveResult best_;
};

/// Shapes a Gaussian Ω₂(t) so that η(∞) = ζ(∞) = π. Throws PulseSolveError
/// (with the best residuals) when no pulse in the search space meets `tol`.
PulseSolveResult solve_pulse_shape(std::span<const double> Phi1, std::span<const double> Phi2,
                                   const PhysicalParams& params, const TimeGrid& grid,
                                   const PulseSolveOptions& options = {});

/// N₀ + 2N₋₁ − n_out + F/k at every grid point.
std::vector<double> conservation_check(const ReceiverTrajectory& traj,
                                       std::span<const double> n_out,
                                       std::span<const double> flux_total, double k);

struct FinalStateResult {
  SuperpositionState state;
  double fidelity;
  double leakage;  ///< 1 − (|γ₋₁,₀|² + |γ₀,₀|² + |γ₁,₀|²) at the last grid point
  bool leakage_warning;
};

/// Renormalized receiver state at the end of the grid and its fidelity with `c_in`.
FinalStateResult final_state(const ReceiverTrajectory& traj, const SuperpositionState& c_in,
                             double leakage_threshold = 1e-3);

}  // namespace pnss
