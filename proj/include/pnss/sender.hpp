#pragma once

#include <vector>

#include "pnss/core.hpp"
#include "pnss/numerics.hpp"

namespace pnss {

/// Peak-normalized control-field intensity profile f(t), 0 ≤ f ≤ 1.
class PulseShape {
 public:
  enum class Kind { gaussian, tabulated };

  /// f(t) = exp(−((t − center)/duration)²).
  static PulseShape gaussian(double duration, double center);

  /// Piecewise-linear profile through (times[i], intensity[i]), zero outside
  /// the table. Times strictly increasing, intensities within [0, 1].
  static PulseShape tabulated(std::vector<double> times, std::vector<double> intensity);

  Kind kind() const { return kind_; }
  double duration() const { return duration_; }
  double center() const { return center_; }

  double intensity(double t) const;
  /// √f(t), the field envelope.
  double envelope(double t) const;

  std::vector<double> sample_intensity(const TimeGrid& grid) const;
  std::vector<double> sample_envelope(const TimeGrid& grid) const;

 private:
  PulseShape() = default;

  Kind kind_ = Kind::gaussian;
  double duration_ = 0.0;
  double center_ = 0.0;
  std::vector<double> times_;
  std::vector<double> table_;
};

/// ϑ(t) = α₁ ∫_{t_start}^{t} f₁.
SampledFunction theta(const PulseShape& pulse, double alpha1, const TimeGrid& grid);

/// Ground-state populations ⟨σ_m⟩ and coherences ⟨σ_{m,m'}⟩ of the sending atom.
struct SenderPopulations {
  std::vector<double> sigma_m1;
  std::vector<double> sigma_0;
  std::vector<double> sigma_p1;
  std::vector<cplx> coh_m1_0;
  std::vector<cplx> coh_0_p1;
  std::vector<cplx> coh_m1_p1;
  /// False when the closed forms do not cover the coherences (qutrit input).
  bool has_coherences = true;
};

/// Atom-field amplitudes β_{m,j}: atom in m_F = m with j photons emitted.
struct BetaAmplitudes {
  std::vector<cplx> m1_0;
  std::vector<cplx> z_0;
  std::vector<cplx> z_1;
  std::vector<cplx> p1_0;
  std::vector<cplx> p1_1;
  std::vector<cplx> p1_2;
};

/// Closed-form populations and coherences as functions of ϑ. For c₊₁ ≠ 0 the
/// populations use ⟨σ₁⟩ = 1 − ⟨σ₋₁⟩ − ⟨σ₀⟩ and the coherences are left empty
/// (has_coherences = false); take them from simulate_sender_ode.
SenderPopulations populations_analytic(const SampledFunction& theta, const SuperpositionState& c);

/// Closed-form β amplitudes. β_{+1,0} = c₊₁ (the vacuum branch never emits).
BetaAmplitudes amplitudes_beta(const SampledFunction& theta, const SuperpositionState& c);

/// Brute-force integration of the adiabatically eliminated rate equations for
/// F = 1 from the product initial condition ⟨σ_{m,m'}⟩ = c_m*·c_m'.
SenderPopulations simulate_sender_ode(const PhysicalParams& params, const PulseShape& pulse,
                                      const SuperpositionState& c, const TimeGrid& grid);

struct SenderTrajectory {
  TimeGrid grid;
  SampledFunction theta;
  SenderPopulations populations;
  BetaAmplitudes beta;
  /// True when the coherences come from the ODE (qutrit input).
  bool coherences_from_ode = false;
};

/// ϑ, populations, coherences and β on `grid`.
SenderTrajectory run_sender(const PhysicalParams& params, const PulseShape& pulse,
                            const SuperpositionState& c, const TimeGrid& grid);

}  // namespace pnss
