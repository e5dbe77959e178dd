#pragma once

#include <array>
#include <string>
#include <vector>

#include "pnss/numerics.hpp"

namespace pnss {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kHbar = 1.054571817e-34;  // J·s

/// "X MHz" in the 2π×X MHz convention → angular frequency in rad/s.
constexpr double mhz_to_rad_per_s(double mhz) { return 2.0 * kPi * mhz * 1e6; }
constexpr double rad_per_s_to_mhz(double w) { return w / (2.0 * kPi * 1e6); }
constexpr double us_to_s(double us) { return us * 1e-6; }

/// Atom, cavity and laser constants. Rates are angular frequencies (rad/s).
struct PhysicalParams {
  double g;                ///< atom-cavity coupling
  double k;                ///< cavity field decay rate
  double gamma_sp;         ///< spontaneous decay rate
  double omega1;           ///< peak Rabi frequency, sending control field
  double omega2;           ///< peak Rabi frequency, receiving control field
  double delta;            ///< one-photon detuning (signed)
  double delta_B_ground;   ///< Zeeman splitting of F
  double delta_B_excited;  ///< Zeeman splitting of F'
  double phi2;             ///< phase of the receiving control field (rad)
  double atom_mass;        ///< kg
  double wavelength;       ///< m

  /// ⁸⁷Rb D2 line in a 15 G field with 2π×(12, 3, 5.87, 10, 100) MHz for
  /// (g, k, γ_sp, Ω₁, Δ); Ω₂ = Ω₁ and φ₂ = π/2.
  static PhysicalParams rb87_defaults();

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

struct DerivedQuantities {
  double G1;           ///< g·Ω₁/|Δ|
  double G2;           ///< g·Ω₂/|Δ|
  double alpha1;       ///< 4·G₁²/k, cavity photon generation rate
  double R_sn;         ///< 4g²/(k·γ_sp)
  double gamma1_peak;  ///< (Ω₁/Δ)²·γ_sp
  double omega_rec;    ///< ħ·(2π/λ)²/(2m)
};

DerivedQuantities derive(const PhysicalParams& params);

/// Amplitudes (c₋₁, c₀, c₊₁) of the m_F = −1, 0, +1 ground sublevels.
class SuperpositionState {
 public:
  static constexpr double kNormTolerance = 1e-12;

  /// Throws InvalidArgument if |c₋₁|² + |c₀|² + |c₊₁|² deviates from 1 by
  /// more than kNormTolerance.
  SuperpositionState(cplx c_m1, cplx c_0, cplx c_p1 = 0.0);

  /// Divides by the norm; throws on a zero vector.
  static SuperpositionState normalized(cplx c_m1, cplx c_0, cplx c_p1 = 0.0);

  cplx c_m1() const { return c_m1_; }
  cplx c_0() const { return c_0_; }
  cplx c_p1() const { return c_p1_; }
  double pop_m1() const { return std::norm(c_m1_); }
  double pop_0() const { return std::norm(c_0_); }
  double pop_p1() const { return std::norm(c_p1_); }
  /// c₊₁ == 0: the two-level (photonic qubit) case.
  bool is_qubit() const { return c_p1_ == cplx{0.0, 0.0}; }

  SuperpositionState with_global_phase(double chi) const;

  /// |⟨this|other⟩|².
  double fidelity(const SuperpositionState& other) const;

 private:
  cplx c_m1_;
  cplx c_0_;
  cplx c_p1_;
};

struct RegimeThresholds {
  double min_ratio = 5.0;  ///< operational meaning of "≫"
};

struct RegimeEntry {
  std::string name;
  double left;
  double right;
  double ratio;
  bool pass;
};

struct RegimeReport {
  std::vector<RegimeEntry> entries;
  double min_ratio;

  bool all_pass() const;
  std::vector<std::string> failures() const;
};

/// Evaluates every "≫" condition the closed-form model rests on.
/// `pulse_duration` is the sending pulse T₁ (s), used for the adiabatic k·T₁ check.
RegimeReport validate_regime(const PhysicalParams& params, const DerivedQuantities& derived,
                             double pulse_duration, const RegimeThresholds& thresholds = {});

}  // namespace pnss
