#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace pnss {

using cplx = std::complex<double>;

/// Uniform sampling of [t_start, t_end]. Copies share the sample storage.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, std::size_t n_points);

  /// Grid of `n_points` centered on `center` covering center ± half_span.
  static TimeGrid centered(double center, double half_span, std::size_t n_points);

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double step() const { return step_; }
  std::size_t size() const { return values_->size(); }
  double operator[](std::size_t i) const { return (*values_)[i]; }
  std::span<const double> values() const { return *values_; }

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.t_start_ == b.t_start_ && a.t_end_ == b.t_end_ && a.size() == b.size();
  }

 private:
  double t_start_;
  double t_end_;
  double step_;
  std::shared_ptr<const std::vector<double>> values_;
};

/// Samples of a function on a TimeGrid, one value per grid point.
template <typename T>
struct Sampled {
  TimeGrid grid;
  std::vector<T> values;

  Sampled(TimeGrid g, std::vector<T> v);
  std::size_t size() const { return values.size(); }
  const T& operator[](std::size_t i) const { return values[i]; }
  const T& back() const { return values.back(); }
};

using SampledFunction = Sampled<double>;

extern template struct Sampled<double>;
extern template struct Sampled<cplx>;

/// Trapezoidal running integral; the first sample is 0.
SampledFunction cumulative_integral(const SampledFunction& f);

/// Same, for raw abscissae. Throws InvalidArgument unless `t` is uniform
/// (relative spacing deviation ≤ 1e-12) and sized like `f`.
std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f);

/// Full trapezoidal integral of samples on `grid`.
double integrate(const TimeGrid& grid, std::span<const double> f);

/// Linear interpolation of `samples` (aligned with `grid`) at `t`; clamps to
/// the end values outside the grid.
double interpolate(const TimeGrid& grid, std::span<const double> samples, double t);

/// dy/dt = rhs(t, y). `dydt` has the size of `y` and must be fully written.
using OdeRhs = std::function<void(double t, std::span<const cplx> y, std::span<cplx> dydt)>;

/// States of an ODE solution, one row per grid point.
class OdeTrajectory {
 public:
  OdeTrajectory(TimeGrid grid, std::size_t dim);

  const TimeGrid& grid() const { return grid_; }
  std::size_t dim() const { return dim_; }
  std::span<const cplx> state(std::size_t i) const { return {data_.data() + i * dim_, dim_}; }
  std::span<cplx> state(std::size_t i) { return {data_.data() + i * dim_, dim_}; }
  /// Component `j` across all grid points.
  std::vector<cplx> component(std::size_t j) const;

 private:
  TimeGrid grid_;
  std::size_t dim_;
  std::vector<cplx> data_;
};

/// Classical fixed-step RK4 with one step per grid interval. A non-finite
/// derivative raises NumericsError naming the time, step and component.
OdeTrajectory integrate_ode(const OdeRhs& rhs, std::span<const cplx> init, const TimeGrid& grid);

/// Safeguarded secant (Illinois regula falsi with bisection fallback) on a
/// sign-changing bracket. Stops when |f(x)| ≤ tol or the bracket width is
/// ≤ tol·|x|. Throws NumericsError if f(a)·f(b) > 0 or the iteration budget
/// runs out.
double find_root(const std::function<double(double)>& f, double a, double b, double tol,
                 int max_iter = 200);

}  // namespace pnss
