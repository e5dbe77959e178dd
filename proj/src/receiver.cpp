#include "pnss/receiver.hpp"

#include <cmath>
#include <sstream>

namespace pnss {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_modes(std::span<const double> Phi1, std::span<const double> Phi2, const TimeGrid& grid) {
  if (Phi1.size() != grid.size() || Phi2.size() != grid.size())
    throw InvalidArgument("mode functions must be sampled on the receiver grid");
}

struct AreaRates {
  std::vector<double> eta;
  std::vector<double> zeta;
};

AreaRates area_rates(const PulseShape& pulse2, std::span<const double> Phi1,
                     std::span<const double> Phi2, double G2, double k, const TimeGrid& grid) {
  if (!(k > 0.0)) throw InvalidArgument("cavity decay rate k must be > 0");
  const double scale = std::abs(G2) / std::sqrt(k);
  AreaRates r{std::vector<double>(grid.size()), std::vector<double>(grid.size())};
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double s = scale * pulse2.envelope(grid[i]);
    r.eta[i] = 2.0 * s * Phi1[i];
    r.zeta[i] = s * (Phi1[i] + Phi2[i]);
  }
  return r;
}

void fill_populations(ReceiverTrajectory& t) {
  const std::size_t n = t.grid.size();
  t.rho_m1.resize(n);
  t.rho_0.resize(n);
  t.rho_p1.resize(n);
  const auto& g = t.gamma;
  for (std::size_t i = 0; i < n; ++i) {
    t.rho_m1[i] = std::norm(g.m1_0[i]);
    t.rho_0[i] = std::norm(g.z_0[i]) + std::norm(g.z_1[i]);
    t.rho_p1[i] = std::norm(g.p1_0[i]) + std::norm(g.p1_1[i]) + std::norm(g.p1_2[i]);
  }
}

}  // namespace

PulseAreas pulse_areas(const PulseShape& pulse2, std::span<const double> Phi1,
                       std::span<const double> Phi2, double G2, double k, const TimeGrid& grid) {
  check_modes(Phi1, Phi2, grid);
  auto rates = area_rates(pulse2, Phi1, Phi2, G2, k, grid);
  return {cumulative_integral(SampledFunction(grid, std::move(rates.eta))),
          cumulative_integral(SampledFunction(grid, std::move(rates.zeta)))};
}

bool is_analytic_phase(double phi2) {
  const double r = std::remainder(phi2 - kPi / 2.0, 2.0 * kPi);
  return std::abs(r) <= 1e-12;
}

ReceiverTrajectory gamma_analytic(const PulseAreas& areas, const SuperpositionState& c,
                                  double phi2) {
  if (!is_analytic_phase(phi2))
    throw InvalidArgument("closed-form receiver amplitudes need phi2 = pi/2; use simulate_receiver_ode");
  const auto& grid = areas.eta.grid;
  const std::size_t n = grid.size();
  ReceiverTrajectory t{grid, areas.eta.values, areas.zeta.values, {}, {}, {}, {}, {}};
  auto& g = t.gamma;
  g.z_0.resize(n);
  g.p1_1.resize(n);
  g.p1_2.resize(n);
  g.z_1.resize(n);
  g.m1_0.resize(n);
  g.p1_0.assign(n, c.c_p1());
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = t.eta[i];
    const double zeta = t.zeta[i];
    g.z_0[i] = c.c_0() * std::sin(0.5 * eta);
    g.p1_1[i] = c.c_0() * std::cos(0.5 * eta);
    g.p1_2[i] = 0.5 * c.c_m1() * (1.0 + std::cos(zeta));
    g.z_1[i] = kInvSqrt2 * c.c_m1() * std::sin(zeta);
    g.m1_0[i] = 0.5 * c.c_m1() * (1.0 - std::cos(zeta));
  }
  fill_populations(t);
  return t;
}

ReceiverTrajectory simulate_receiver_ode(const PulseShape& pulse2, std::span<const double> Phi1,
                                         std::span<const double> Phi2, double G2, double k,
                                         double phi2, const SuperpositionState& c,
                                         const TimeGrid& grid) {
  check_modes(Phi1, Phi2, grid);
  const auto rates = area_rates(pulse2, Phi1, Phi2, G2, k, grid);
  const cplx up = std::polar(1.0, phi2);
  const cplx down = std::conj(up);
  const cplx i_half{0.0, 0.5};
  const cplx i_root{0.0, kInvSqrt2};

  // Layout: γ00, γ11, γ12, γ01, γ−10, γ10.
  auto rhs = [&](double t, std::span<const cplx> y, std::span<cplx> dy) {
    const double d_eta = interpolate(grid, rates.eta, t);
    const double d_zeta = interpolate(grid, rates.zeta, t);
    dy[0] = d_eta * i_half * y[1] * down;
    dy[1] = d_eta * i_half * y[0] * up;
    dy[2] = d_zeta * i_root * y[3] * up;
    dy[3] = d_zeta * i_root * (y[2] * down + y[4] * up);
    dy[4] = d_zeta * i_root * y[3] * down;
    dy[5] = 0.0;
  };
  const std::vector<cplx> init{0.0, c.c_0(), c.c_m1(), 0.0, 0.0, c.c_p1()};
  const auto traj = integrate_ode(rhs, init, grid);

  ReceiverTrajectory t{grid,
                       cumulative_integral(SampledFunction(grid, rates.eta)).values,
                       cumulative_integral(SampledFunction(grid, rates.zeta)).values,
                       {},
                       {},
                       {},
                       {},
                       {}};
  t.gamma.z_0 = traj.component(0);
  t.gamma.p1_1 = traj.component(1);
  t.gamma.p1_2 = traj.component(2);
  t.gamma.z_1 = traj.component(3);
  t.gamma.m1_0 = traj.component(4);
  t.gamma.p1_0 = traj.component(5);
  fill_populations(t);
  return t;
}

namespace {

/// Final areas per unit |G₂| for a Gaussian Ω₂ profile.
class AreaEvaluator {
 public:
  AreaEvaluator(std::span<const double> Phi1, std::span<const double> Phi2, double k,
                const TimeGrid& grid)
      : Phi1_(Phi1), Phi2_(Phi2), inv_sqrt_k_(1.0 / std::sqrt(k)), grid_(grid) {}

  struct Areas {
    double eta;
    double zeta;
  };

  Areas operator()(double duration, double center) {
    ++evaluations_;
    double eta = 0.0;
    double zeta = 0.0;
    double prev_eta = 0.0;
    double prev_zeta = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      const double x = (grid_[i] - center) / duration;
      const double s = std::exp(-0.5 * x * x);
      const double e = 2.0 * s * Phi1_[i];
      const double z = s * (Phi1_[i] + Phi2_[i]);
      if (i > 0) {
        eta += prev_eta + e;
        zeta += prev_zeta + z;
      }
      prev_eta = e;
      prev_zeta = z;
    }
    const double w = 0.5 * grid_.step() * inv_sqrt_k_;
    return {eta * w, zeta * w};
  }

  Areas flat() const {
    double eta = 0.0;
    double zeta = 0.0;
    for (std::size_t i = 1; i < grid_.size(); ++i) {
      eta += 2.0 * (Phi1_[i - 1] + Phi1_[i]);
      zeta += Phi1_[i - 1] + Phi1_[i] + Phi2_[i - 1] + Phi2_[i];
    }
    const double w = 0.5 * grid_.step() * inv_sqrt_k_;
    return {eta * w, zeta * w};
  }

  int evaluations() const { return evaluations_; }

 private:
  std::span<const double> Phi1_;
  std::span<const double> Phi2_;
  double inv_sqrt_k_;
  const TimeGrid& grid_;
  int evaluations_ = 0;
};

constexpr double kInnerTol = 1e-12;

PulseSolveResult make_result(double duration, double center, double G2, const PhysicalParams& p,
                             AreaEvaluator& areas, FreeParameter mode, double tol) {
  const auto a = areas(duration, center);
  PulseSolveResult r{PulseShape::gaussian(duration, center),
                     G2 * std::abs(p.delta) / p.g,
                     G2,
                     G2 * a.eta - kPi,
                     G2 * a.zeta - kPi,
                     areas.evaluations(),
                     mode,
                     false,
                     {}};
  r.converged = std::abs(r.eta_residual) <= tol && std::abs(r.zeta_residual) <= tol;
  return r;
}

std::string describe(const PulseSolveResult& r) {
  std::ostringstream s;
  s.precision(6);
  s << "T2=" << r.pulse.duration() * 1e6 << " us, t0=" << r.pulse.center() * 1e6
    << " us, Omega2/2pi=" << rad_per_s_to_mhz(r.omega2) << " MHz, eta-pi=" << r.eta_residual
    << ", zeta-pi=" << r.zeta_residual;
  return s.str();
}

PulseSolveResult solve_center(AreaEvaluator& areas, const PhysicalParams& p, double G2,
                              const PulseSolveOptions& o) {
  const auto flat = areas.flat();
  if (G2 * flat.eta < kPi || G2 * flat.zeta < kPi) {
    auto best = make_result(o.duration_max, 0.5 * (o.center_min + o.center_max), G2, p, areas,
                            FreeParameter::center, o.tol);
    std::ostringstream msg;
    msg.precision(8);
    msg << "fixed amplitude Omega2/2pi=" << rad_per_s_to_mhz(p.omega2)
        << " MHz cannot reach pi: even a constant pulse gives eta=" << G2 * flat.eta
        << ", zeta=" << G2 * flat.zeta << "; best: " << describe(best);
    best.message = msg.str();
    throw PulseSolveError(msg.str(), best);
  }

  // ζ(∞) grows monotonically with T₂ at fixed t₀; solve it, then steer t₀ for η(∞).
  auto duration_for = [&](double center) {
    auto f = [&](double d) { return G2 * areas(d, center).zeta - kPi; };
    return find_root(f, o.duration_min, o.duration_max, kInnerTol, o.max_iter);
  };
  auto eta_gap = [&](double center) {
    const double d = duration_for(center);
    return G2 * areas(d, center).eta - kPi;
  };

  double center = 0.0;
  try {
    center = find_root(eta_gap, o.center_min, o.center_max, kInnerTol, o.max_iter);
  } catch (const NumericsError& e) {
    // Report whichever bracket end came closer.
    PulseSolveResult best = make_result(o.duration_max, o.center_min, G2, p, areas,
                                        FreeParameter::center, o.tol);
    for (double c : {o.center_min, o.center_max}) {
      try {
        auto r = make_result(duration_for(c), c, G2, p, areas, FreeParameter::center, o.tol);
        if (std::abs(r.eta_residual) < std::abs(best.eta_residual)) best = r;
      } catch (const NumericsError&) {
      }
    }
    best.message = std::string("center solve failed: ") + e.what() + "; best: " + describe(best);
    throw PulseSolveError(best.message, best);
  }
  return make_result(duration_for(center), center, G2, p, areas, FreeParameter::center, o.tol);
}

PulseSolveResult solve_amplitude(AreaEvaluator& areas, const PhysicalParams& p,
                                 const PulseSolveOptions& o) {
  const double center = o.fixed_center;
  // Areas are linear in |G₂|, so η(∞) = ζ(∞) fixes T₂ alone.
  auto balance = [&](double d) {
    const auto a = areas(d, center);
    return (a.zeta - a.eta) / a.eta;
  };
  double duration = 0.0;
  try {
    duration = find_root(balance, o.duration_min, o.duration_max, kInnerTol, o.max_iter);
  } catch (const NumericsError& e) {
    auto best = make_result(o.duration_max, center, p.g * p.omega2 / std::abs(p.delta), p, areas,
                            FreeParameter::amplitude, o.tol);
    best.message = std::string("amplitude solve failed: ") + e.what() + "; best: " + describe(best);
    throw PulseSolveError(best.message, best);
  }
  const double G2 = kPi / areas(duration, center).eta;
  return make_result(duration, center, G2, p, areas, FreeParameter::amplitude, o.tol);
}

}  // namespace

PulseSolveResult solve_pulse_shape(std::span<const double> Phi1, std::span<const double> Phi2,
                                   const PhysicalParams& params, const TimeGrid& grid,
                                   const PulseSolveOptions& options) {
  check_modes(Phi1, Phi2, grid);
  if (!(options.duration_min > 0.0 && options.duration_max > options.duration_min))
    throw InvalidArgument("pulse solve: need 0 < duration_min < duration_max");
  if (!(options.center_max > options.center_min))
    throw InvalidArgument("pulse solve: need center_min < center_max");
  if (!(options.tol > 0.0)) throw InvalidArgument("pulse solve: tol must be > 0");

  AreaEvaluator areas(Phi1, Phi2, params.k, grid);
  const double G2 = derive(params).G2;

  PulseSolveResult result = [&] {
    switch (options.free) {
      case FreeParameter::center:
        return solve_center(areas, params, G2, options);
      case FreeParameter::amplitude:
        return solve_amplitude(areas, params, options);
      case FreeParameter::automatic:
        break;
    }
    try {
      return solve_center(areas, params, G2, options);
    } catch (const PulseSolveError& e) {
      auto r = solve_amplitude(areas, params, options);
      r.message = std::string("fixed-amplitude solve abandoned (") + e.what() + ")";
      r.converged = std::abs(r.eta_residual) <= options.tol && std::abs(r.zeta_residual) <= options.tol;
      return r;
    }
  }();
  result.iterations = areas.evaluations();
  if (!result.converged) {
    std::string msg = "pulse solve did not reach tol: " + describe(result);
    result.message = msg;
    throw PulseSolveError(msg, result);
  }
  return result;
}

std::vector<double> conservation_check(const ReceiverTrajectory& traj,
                                       std::span<const double> n_out,
                                       std::span<const double> flux_total, double k) {
  const std::size_t n = traj.grid.size();
  if (n_out.size() != n || flux_total.size() != n)
    throw InvalidArgument("sender observables must share the receiver grid");
  std::vector<double> residual(n);
  for (std::size_t i = 0; i < n; ++i)
    residual[i] = traj.rho_0[i] + 2.0 * traj.rho_m1[i] - n_out[i] + flux_total[i] / k;
  return residual;
}

FinalStateResult final_state(const ReceiverTrajectory& traj, const SuperpositionState& c_in,
                             double leakage_threshold) {
  const auto& g = traj.gamma;
  const cplx m1 = g.m1_0.back();
  const cplx z = g.z_0.back();
  const cplx p1 = g.p1_0.back();
  const double retained = std::norm(m1) + std::norm(z) + std::norm(p1);
  auto state = SuperpositionState::normalized(m1, z, p1);
  const double leakage = 1.0 - retained;
  return {state, c_in.fidelity(state), leakage, leakage > leakage_threshold};
}

}  // namespace pnss
