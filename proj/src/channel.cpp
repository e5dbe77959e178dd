#include "pnss/channel.hpp"

#include <cmath>

#include "pnss/error.hpp"

namespace pnss {

double attenuation_length(double db_per_km) {
  if (!(db_per_km > 0.0) || !std::isfinite(db_per_km))
    throw InvalidArgument("attenuation must be > 0 dB/km");
  return 10.0 / (db_per_km * std::log(10.0));
}

double transmission_efficiency(double L0_km, double L_att_km, int photons) {
  if (!(L0_km >= 0.0)) throw InvalidArgument("link length must be >= 0");
  if (!(L_att_km > 0.0)) throw InvalidArgument("attenuation length must be > 0");
  if (photons < 0) throw InvalidArgument("photon number must be >= 0");
  const double single = std::exp(-L0_km / L_att_km);
  double eta = 1.0;
  for (int j = 0; j < photons; ++j) eta *= single;
  return eta;
}

double success_probability(double p_em, double eta_trans, double p_abs) {
  for (double p : {p_em, eta_trans, p_abs})
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("probabilities must lie in [0, 1]");
  return p_em * eta_trans * p_abs;
}

double phase_drift(double L0_km, double rate_rad_per_km) { return rate_rad_per_km * L0_km; }

ChannelBudget evaluate_channel(const ChannelModel& ch, const SuperpositionState& c) {
  ChannelBudget b{};
  b.L_att_km = ch.attenuation_length();
  b.eta1 = transmission_efficiency(ch.L0_km, b.L_att_km, 1);
  b.eta2 = transmission_efficiency(ch.L0_km, b.L_att_km, 2);
  b.success_vacuum = 1.0;
  b.success_one = success_probability(ch.p_em, b.eta1, ch.p_abs);
  b.success_two = success_probability(ch.p_em, b.eta2, ch.p_abs);
  b.weighted_success =
      c.pop_p1() * b.success_vacuum + c.pop_0() * b.success_one + c.pop_m1() * b.success_two;
  b.phase_rad = phase_drift(ch.L0_km, ch.phase_rate);
  b.phase_warning = std::abs(b.phase_rad) > ch.phase_warning;
  return b;
}

}  // namespace pnss
