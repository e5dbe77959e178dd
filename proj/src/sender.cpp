#include "pnss/sender.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pnss/error.hpp"
#include "pnss/photon_math.hpp"

namespace pnss {

PulseShape PulseShape::gaussian(double duration, double center) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw InvalidArgument("gaussian pulse duration must be > 0");
  if (!std::isfinite(center)) throw InvalidArgument("gaussian pulse center must be finite");
  PulseShape p;
  p.kind_ = Kind::gaussian;
  p.duration_ = duration;
  p.center_ = center;
  return p;
}

PulseShape PulseShape::tabulated(std::vector<double> times, std::vector<double> intensity) {
  if (times.size() != intensity.size() || times.size() < 2)
    throw InvalidArgument("tabulated pulse needs >= 2 (time, intensity) pairs of equal length");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidArgument("tabulated pulse times must increase");
  for (double f : intensity)
    if (!(f >= 0.0 && f <= 1.0)) throw InvalidArgument("tabulated intensity must lie in [0, 1]");
  PulseShape p;
  p.kind_ = Kind::tabulated;
  p.duration_ = times.back() - times.front();
  p.center_ = 0.5 * (times.front() + times.back());
  p.times_ = std::move(times);
  p.table_ = std::move(intensity);
  return p;
}

double PulseShape::intensity(double t) const {
  if (kind_ == Kind::gaussian) {
    const double x = (t - center_) / duration_;
    return std::exp(-x * x);
  }
  if (t < times_.front() || t > times_.back()) return 0.0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.end()) return table_.back();
  const std::size_t i = static_cast<std::size_t>(it - times_.begin()) - 1;
  const double w = (t - times_[i]) / (times_[i + 1] - times_[i]);
  return (1.0 - w) * table_[i] + w * table_[i + 1];
}

double PulseShape::envelope(double t) const { return std::sqrt(intensity(t)); }

std::vector<double> PulseShape::sample_intensity(const TimeGrid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = intensity(grid[i]);
  return out;
}

std::vector<double> PulseShape::sample_envelope(const TimeGrid& grid) const {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = envelope(grid[i]);
  return out;
}

SampledFunction theta(const PulseShape& pulse, double alpha1, const TimeGrid& grid) {
  if (!(alpha1 >= 0.0)) throw InvalidArgument("alpha1 must be >= 0");
  auto f = pulse.sample_intensity(grid);
  for (double& v : f) v *= alpha1;
  return cumulative_integral(SampledFunction(grid, std::move(f)));
}

SenderPopulations populations_analytic(const SampledFunction& th, const SuperpositionState& c) {
  const std::size_t n = th.size();
  const double pm1 = c.pop_m1();
  const double p0 = c.pop_0();
  const bool qubit = c.is_qubit();
  const cplx rho_m1_0 = std::conj(c.c_m1()) * c.c_0();

  SenderPopulations out;
  out.sigma_m1.resize(n);
  out.sigma_0.resize(n);
  out.sigma_p1.resize(n);
  out.has_coherences = qubit;
  if (qubit) {
    out.coh_m1_0.resize(n);
    out.coh_0_p1.resize(n);
    out.coh_m1_p1.assign(n, cplx{0.0, 0.0});
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double x = th[i];
    const double e = std::exp(-x);
    out.sigma_m1[i] = pm1 * e;
    out.sigma_0[i] = (p0 + pm1 * x) * e;
    out.sigma_p1[i] = qubit ? 1.0 - (1.0 + pm1 * x) * e : 1.0 - out.sigma_m1[i] - out.sigma_0[i];
    if (qubit) {
      out.coh_m1_0[i] = rho_m1_0 * e;
      out.coh_0_p1[i] = 2.0 * rho_m1_0 * (std::exp(-0.5 * x) - e);
    }
  }
  return out;
}

BetaAmplitudes amplitudes_beta(const SampledFunction& th, const SuperpositionState& c) {
  const std::size_t n = th.size();
  BetaAmplitudes b;
  b.m1_0.resize(n);
  b.z_0.resize(n);
  b.z_1.resize(n);
  b.p1_0.assign(n, c.c_p1());
  b.p1_1.resize(n);
  b.p1_2.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = th[i];
    const double half = std::exp(-0.5 * x);
    b.m1_0[i] = c.c_m1() * half;
    b.z_0[i] = c.c_0() * half;
    b.z_1[i] = c.c_m1() * std::sqrt(x * std::exp(-x));
    b.p1_1[i] = c.c_0() * std::sqrt(one_photon_yield(x));
    b.p1_2[i] = c.c_m1() * std::sqrt(two_photon_yield(x));
  }
  return b;
}

namespace {

// State layout: populations m = −1, 0, +1, then coherences (−1,0), (0,+1), (−1,+1).
constexpr std::size_t kSenderDim = 6;

constexpr std::size_t pop_index(int m) { return static_cast<std::size_t>(m + 1); }

constexpr int coh_index(int m, int mp) {
  if (m == -1 && mp == 0) return 3;
  if (m == 0 && mp == 1) return 4;
  if (m == -1 && mp == 1) return 5;
  return -1;
}

// Heaviside step with θ(0) = 1: m_F = 0 both receives from −1 and emits to +1.
constexpr double step(int m) { return m >= 0 ? 1.0 : 0.0; }

constexpr std::array<std::array<int, 2>, 3> kPairs{{{-1, 0}, {0, 1}, {-1, 1}}};

}  // namespace

SenderPopulations simulate_sender_ode(const PhysicalParams& params, const PulseShape& pulse,
                                      const SuperpositionState& c, const TimeGrid& grid) {
  const double alpha1 = derive(params).alpha1;
  const std::array<cplx, 3> amp{c.c_m1(), c.c_0(), c.c_p1()};

  std::array<cplx, kSenderDim> init{};
  for (int m = -1; m <= 1; ++m) init[pop_index(m)] = std::norm(amp[pop_index(m)]);
  for (auto [m, mp] : kPairs)
    init[static_cast<std::size_t>(coh_index(m, mp))] =
        std::conj(amp[pop_index(m)]) * amp[pop_index(mp)];

  auto rhs = [&](double t, std::span<const cplx> y, std::span<cplx> dy) {
    const double rate = alpha1 * pulse.intensity(t);
    for (int m = -1; m <= 1; ++m) {
      const cplx gain = m - 1 >= -1 ? y[pop_index(m - 1)] * step(m) : cplx{0.0, 0.0};
      dy[pop_index(m)] = rate * (gain - y[pop_index(m)] * step(-m));
    }
    for (auto [m, mp] : kPairs) {
      const auto self = static_cast<std::size_t>(coh_index(m, mp));
      const int lower = coh_index(m - 1, mp - 1);
      const cplx feed = lower >= 0 ? y[static_cast<std::size_t>(lower)] * step(m) * step(mp)
                                   : cplx{0.0, 0.0};
      dy[self] = -0.5 * rate * (y[self] * (step(-m) + step(-mp)) - 2.0 * feed);
    }
  };

  const auto traj = integrate_ode(rhs, init, grid);
  SenderPopulations out;
  auto real_part = [](const std::vector<cplx>& v) {
    std::vector<double> r(v.size());
    std::transform(v.begin(), v.end(), r.begin(), [](cplx z) { return z.real(); });
    return r;
  };
  out.sigma_m1 = real_part(traj.component(0));
  out.sigma_0 = real_part(traj.component(1));
  out.sigma_p1 = real_part(traj.component(2));
  out.coh_m1_0 = traj.component(3);
  out.coh_0_p1 = traj.component(4);
  out.coh_m1_p1 = traj.component(5);
  out.has_coherences = true;
  return out;
}

SenderTrajectory run_sender(const PhysicalParams& params, const PulseShape& pulse,
                            const SuperpositionState& c, const TimeGrid& grid) {
  const auto derived = derive(params);
  auto th = theta(pulse, derived.alpha1, grid);
  auto pops = populations_analytic(th, c);
  bool from_ode = false;
  if (!pops.has_coherences) {
    auto ode = simulate_sender_ode(params, pulse, c, grid);
    pops.coh_m1_0 = std::move(ode.coh_m1_0);
    pops.coh_0_p1 = std::move(ode.coh_0_p1);
    pops.coh_m1_p1 = std::move(ode.coh_m1_p1);
    pops.has_coherences = true;
    from_ode = true;
  }
  auto beta = amplitudes_beta(th, c);
  return {grid, std::move(th), std::move(pops), std::move(beta), from_ode};
}

}  // namespace pnss
