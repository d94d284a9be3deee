#pragma once

#include <span>
#include <vector>

namespace gvortex {

/// Least-squares polynomial y ~ sum_k c_k x^k.
struct PolyFit {
  std::vector<double> coeffs;  // ascending powers of x
  double r_squared = 0.0;
  // Same fit in t = (x - center) / scale, better conditioned.
  double center = 0.0;
  double scale = 1.0;
  std::vector<double> centered;
};

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);

/// Abscissa of the extremum of a quadratic fit.
double quadratic_vertex(const PolyFit& fit);

}  // namespace gvortex
