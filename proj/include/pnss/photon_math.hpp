#pragma once

#include <cmath>

namespace pnss {

/// 1 − e^{−ϑ}: probability that the first photon has left by the time ϑ.
inline double one_photon_yield(double theta) { return -std::expm1(-theta); }

/// 1 − (1 + ϑ)e^{−ϑ}, accurate for small ϑ where the direct form cancels.
inline double two_photon_yield(double theta) {
  if (theta < 0.1) {
    // Σ_{n≥2} (−1)ⁿ (n−1) ϑⁿ / n!
    double term = theta * theta / 2.0;
    double sum = 0.0;
    for (int n = 2; n < 20; ++n) {
      sum += (n - 1) * term * ((n % 2 == 0) ? 1.0 : -1.0);
      term *= theta / (n + 1);
    }
    return sum;
  }
  return -std::expm1(-theta) - theta * std::exp(-theta);
}

}  // namespace pnss
