#include "pnss/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pnss/error.hpp"

namespace pnss {

TimeGrid::TimeGrid(double t_start, double t_end, std::size_t n_points)
    : t_start_(t_start), t_end_(t_end), step_(0.0) {
  if (n_points < 2) throw InvalidArgument("TimeGrid needs at least 2 points");
  if (!(t_end > t_start) || !std::isfinite(t_start) || !std::isfinite(t_end))
    throw InvalidArgument("TimeGrid requires finite t_start < t_end");
  step_ = (t_end - t_start) / static_cast<double>(n_points - 1);
  std::vector<double> v(n_points);
  for (std::size_t i = 0; i < n_points; ++i) v[i] = t_start + static_cast<double>(i) * step_;
  v.back() = t_end;
  values_ = std::make_shared<const std::vector<double>>(std::move(v));
}

TimeGrid TimeGrid::centered(double center, double half_span, std::size_t n_points) {
  return TimeGrid(center - half_span, center + half_span, n_points);
}

template <typename T>
Sampled<T>::Sampled(TimeGrid g, std::vector<T> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size())
    throw InvalidArgument("sample count " + std::to_string(values.size()) +
                          " does not match grid size " + std::to_string(grid.size()));
}

template struct Sampled<double>;
template struct Sampled<cplx>;

namespace {

std::vector<double> trapezoid_running(double h, std::span<const double> f) {
  std::vector<double> out(f.size(), 0.0);
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) {
    acc += 0.5 * h * (f[i - 1] + f[i]);
    out[i] = acc;
  }
  return out;
}

}  // namespace

SampledFunction cumulative_integral(const SampledFunction& f) {
  return {f.grid, trapezoid_running(f.grid.step(), f.values)};
}

std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f) {
  if (t.size() != f.size()) throw InvalidArgument("abscissae and samples differ in length");
  if (t.size() < 2) throw InvalidArgument("need at least 2 samples to integrate");
  const double h = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  if (!(h > 0.0)) throw InvalidArgument("abscissae must be strictly increasing");
  for (std::size_t i = 1; i < t.size(); ++i) {
    if (std::abs((t[i] - t[i - 1]) - h) > 1e-12 * std::abs(h) +
                                              4.0 * std::numeric_limits<double>::epsilon() *
                                                  std::max(std::abs(t[i]), std::abs(t[i - 1])))
      throw InvalidArgument("non-uniform grid at index " + std::to_string(i));
  }
  return trapezoid_running(h, f);
}

double integrate(const TimeGrid& grid, std::span<const double> f) {
  if (f.size() != grid.size()) throw InvalidArgument("sample count does not match grid");
  double acc = 0.0;
  for (std::size_t i = 1; i < f.size(); ++i) acc += 0.5 * (f[i - 1] + f[i]);
  return acc * grid.step();
}

double interpolate(const TimeGrid& grid, std::span<const double> samples, double t) {
  if (t <= grid.t_start()) return samples.front();
  if (t >= grid.t_end()) return samples.back();
  const double x = (t - grid.t_start()) / grid.step();
  auto i = static_cast<std::size_t>(x);
  if (i >= grid.size() - 1) i = grid.size() - 2;
  const double w = x - static_cast<double>(i);
  return (1.0 - w) * samples[i] + w * samples[i + 1];
}

OdeTrajectory::OdeTrajectory(TimeGrid grid, std::size_t dim)
    : grid_(std::move(grid)), dim_(dim), data_(grid_.size() * dim) {}

std::vector<cplx> OdeTrajectory::component(std::size_t j) const {
  std::vector<cplx> out(grid_.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = data_[i * dim_ + j];
  return out;
}

namespace {

void check_finite(std::span<const cplx> d, double t, std::size_t step) {
  for (std::size_t j = 0; j < d.size(); ++j) {
    if (!std::isfinite(d[j].real()) || !std::isfinite(d[j].imag())) {
      std::ostringstream msg;
      msg << "non-finite derivative at t=" << t << " (step " << step << ", component " << j << ")";
      throw NumericsError(msg.str());
    }
  }
}

}  // namespace

OdeTrajectory integrate_ode(const OdeRhs& rhs, std::span<const cplx> init, const TimeGrid& grid) {
  const std::size_t n = init.size();
  OdeTrajectory traj(grid, n);
  std::copy(init.begin(), init.end(), traj.state(0).begin());

  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), tmp(n);
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double t = grid[i];
    const double h = grid[i + 1] - t;
    auto y = traj.state(i);

    rhs(t, y, k1);
    check_finite(k1, t, i);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k1[j];
    rhs(t + 0.5 * h, tmp, k2);
    check_finite(k2, t + 0.5 * h, i);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + 0.5 * h * k2[j];
    rhs(t + 0.5 * h, tmp, k3);
    check_finite(k3, t + 0.5 * h, i);
    for (std::size_t j = 0; j < n; ++j) tmp[j] = y[j] + h * k3[j];
    rhs(t + h, tmp, k4);
    check_finite(k4, t + h, i);

    auto next = traj.state(i + 1);
    for (std::size_t j = 0; j < n; ++j)
      next[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  }
  return traj;
}

double find_root(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_iter) {
  if (a > b) std::swap(a, b);
  double fa = f(a);
  double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb))
    throw NumericsError("non-finite function value at bracket end");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) {
    std::ostringstream msg;
    msg << "no sign change in bracket [" << a << ", " << b << "]: f(a)=" << fa << ", f(b)=" << fb;
    throw NumericsError(msg.str());
  }

  int side = 0;
  int slow_steps = 0;
  double width = b - a;
  for (int iter = 0; iter < max_iter; ++iter) {
    double x = (a * fb - b * fa) / (fb - fa);
    if (slow_steps >= 2 || !(x > a && x < b)) {
      x = 0.5 * (a + b);
      slow_steps = 0;
    }
    const double fx = f(x);
    if (!std::isfinite(fx)) throw NumericsError("non-finite function value inside bracket");
    if (std::abs(fx) <= tol) return x;

    if ((fx > 0.0) == (fb > 0.0)) {
      b = x;
      fb = fx;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = x;
      fa = fx;
      if (side == +1) fb *= 0.5;
      side = +1;
    }

    const double new_width = b - a;
    slow_steps = new_width > 0.5 * width ? slow_steps + 1 : 0;
    width = new_width;
    const double mid = 0.5 * (a + b);
    if (width <= tol * std::abs(mid) || mid == a || mid == b) return x;
  }
  throw NumericsError("find_root: iteration budget exhausted");
}

}  // namespace pnss
