#include "gvortex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvortex {

RadialGrid::RadialGrid(double r_min, double r_max, std::size_t n_points)
    : r_min_(r_min), r_max_(r_max), n_points_(n_points) {
  if (!(r_min > 0.0)) {
    throw std::invalid_argument("RadialGrid: r_min must be > 0");
  }
  if (!(r_max > r_min)) {
    throw std::invalid_argument("RadialGrid: r_max must exceed r_min");
  }
  if (n_points < kMinPoints) {
    throw std::invalid_argument("RadialGrid: at least 64 nodes required");
  }
  spacing_ = (r_max - r_min) / static_cast<double>(n_points - 1);
}

std::vector<double> RadialGrid::nodes() const {
  std::vector<double> out(n_points_);
  for (std::size_t i = 0; i < n_points_; ++i) out[i] = r(i);
  return out;
}

RadialGrid build_grid(double center, double width, double width_multiplier,
                      std::size_t points_per_width) {
  if (width_multiplier < 6.0) {
    throw std::invalid_argument("build_grid: width multiplier below 6 truncates the profile");
  }
  if (!(center > 0.0) || !(width > 0.0)) {
    throw std::invalid_argument("build_grid: center and width must be positive");
  }
  if (points_per_width == 0) {
    throw std::invalid_argument("build_grid: points_per_width must be positive");
  }
  const double lo = std::max(kGridLeftClamp, center - width_multiplier * width);
  const double hi = center + width_multiplier * width;
  const auto n = static_cast<std::size_t>(
      std::ceil(width_multiplier * static_cast<double>(points_per_width) - 1e-9));
  return RadialGrid(lo, hi, std::max(n, RadialGrid::kMinPoints));
}

double integrate_rdr(std::span<const double> f, const RadialGrid& grid) {
  if (f.size() != grid.size()) {
    throw std::invalid_argument("integrate_rdr: sample count does not match grid");
  }
  const std::size_t n = f.size();
  double sum = 0.5 * (f[0] * grid.r(0) + f[n - 1] * grid.r(n - 1));
  for (std::size_t i = 1; i + 1 < n; ++i) sum += f[i] * grid.r(i);
  return sum * grid.spacing();
}

template <typename T>
RadialField<T>::RadialField(RadialGrid g, std::vector<T> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw std::invalid_argument("RadialField: value count does not match grid");
  }
}

template struct RadialField<double>;
template struct RadialField<std::complex<double>>;

namespace {

template <typename T>
double mass_impl(const RadialField<T>& f) {
  std::vector<double> sq(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) sq[i] = std::norm(f.values[i]);
  return kTwoPi * integrate_rdr(sq, f.grid);
}

template <typename T>
RadialField<T> normalize_impl(const RadialField<T>& f) {
  const double m = mass_impl(f);
  if (!(m > 0.0)) {
    throw std::invalid_argument("normalize: zero field");
  }
  RadialField<T> out = f;
  const double s = 1.0 / std::sqrt(m);
  for (auto& v : out.values) v *= s;
  return out;
}

}  // namespace

double mass(const RealField& f) { return mass_impl(f); }
double mass(const ComplexField& f) { return mass_impl(f); }
RealField normalize(const RealField& f) { return normalize_impl(f); }
ComplexField normalize(const ComplexField& f) { return normalize_impl(f); }

double inner_rdr(const RealField& f, const RealField& g) {
  if (!(f.grid == g.grid)) {
    throw std::invalid_argument("inner_rdr: grid mismatch");
  }
  std::vector<double> prod(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) prod[i] = f[i] * g[i];
  return kTwoPi * integrate_rdr(prod, f.grid);
}

double lp_norm_rdr(const RealField& f, double p) {
  if (p == 0.0) {
    double m = 0.0;
    for (double v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  std::vector<double> pw(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) pw[i] = std::pow(std::abs(f[i]), p);
  return std::pow(kTwoPi * integrate_rdr(pw, f.grid), 1.0 / p);
}

}  // namespace gvortex
