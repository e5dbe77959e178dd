#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "pnss/core.hpp"
#include "pnss/numerics.hpp"
#include "pnss/sender.hpp"

namespace fixtures {

inline constexpr double kT1 = 0.3e-6;

struct Setup {
  pnss::PhysicalParams params = pnss::PhysicalParams::rb87_defaults();
  pnss::DerivedQuantities derived = pnss::derive(params);
  pnss::TimeGrid grid = pnss::TimeGrid::centered(0.0, 6.0 * kT1, 48001);
  pnss::PulseShape pulse = pnss::PulseShape::gaussian(kT1, 0.0);
};

inline pnss::SuperpositionState baseline_qubit() { return {std::sqrt(0.7), std::sqrt(0.3)}; }

inline pnss::SuperpositionState baseline_qutrit() { return {std::sqrt(0.5), std::sqrt(0.3), std::sqrt(0.2)}; }

/// Haar-like random states with fixed seed; every third one is a real qubit.
inline std::vector<pnss::SuperpositionState> random_states(std::size_t n, unsigned seed = 20240611u) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<pnss::SuperpositionState> out;
  for (std::size_t i = 0; i < n; ++i) {
    pnss::cplx a{gauss(rng), gauss(rng)};
    pnss::cplx b{gauss(rng), gauss(rng)};
    pnss::cplx c{gauss(rng), gauss(rng)};
    if (i % 3 == 0) {
      a = std::abs(a);
      b = std::abs(b);
      c = 0.0;
    }
    out.push_back(pnss::SuperpositionState::normalized(a, b, c));
  }
  return out;
}

/// Composite Simpson rule on an odd number of uniform samples.
inline double simpson(const pnss::TimeGrid& grid, const std::vector<double>& f) {
  const std::size_t n = f.size();
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < n; ++i) s += f[i] * (i % 2 ? 4.0 : 2.0);
  return s * grid.step() / 3.0;
}

}  // namespace fixtures
