#pragma once

#include "pnss/core.hpp"

namespace pnss {

/// Fiber length (km) over which transmission falls by 1/e: 10/(dB_per_km·ln 10).
double attenuation_length(double db_per_km);

/// exp(−j·L₀/L_att) for j photons, computed as η₁ʲ so that η₂ = η₁² holds bitwise.
double transmission_efficiency(double L0_km, double L_att_km, int photons);

/// p_em · η_trans · p_abs.
double success_probability(double p_em, double eta_trans, double p_abs);

/// Accumulated fiber phase (rad) at `rate_rad_per_km`.
double phase_drift(double L0_km, double rate_rad_per_km);

struct ChannelModel {
  double L0_km = 0.0;
  double atten_db_per_km = 2.0;
  double phase_rate = 0.1;  ///< rad/km
  double p_em = 1.0;
  double p_abs = 1.0;
  double phase_warning = 0.5;  ///< rad

  double attenuation_length() const { return pnss::attenuation_length(atten_db_per_km); }
};

/// Link budget for one superposition input. Photon-number branches are weighted by
/// |c₊₁|² (vacuum, always delivered), |c₀|² (one photon) and |c₋₁|² (two photons).
struct ChannelBudget {
  double L_att_km;
  double eta1;
  double eta2;
  double success_vacuum;
  double success_one;
  double success_two;
  double weighted_success;
  double phase_rad;
  bool phase_warning;
};

ChannelBudget evaluate_channel(const ChannelModel& channel, const SuperpositionState& c);

}  // namespace pnss
