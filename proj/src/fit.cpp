#include "gvortex/fit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gvortex/parallel.hpp"

namespace gvortex {

namespace {
unsigned g_threads = 0;
}

void set_thread_count(unsigned count) { g_threads = count; }

unsigned thread_count() {
  if (g_threads != 0) return g_threads;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

PolyFit fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  if (x.size() != y.size()) throw std::invalid_argument("fit_polynomial: length mismatch");
  if (degree < 0) throw std::invalid_argument("fit_polynomial: negative degree");
  const std::size_t m = static_cast<std::size_t>(degree) + 1;
  if (x.size() < m) throw std::invalid_argument("fit_polynomial: not enough points");

  // Center and scale the abscissa for conditioning.
  const double xc = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double xs = 0.0;
  for (double v : x) xs = std::max(xs, std::abs(v - xc));
  if (xs == 0.0) xs = 1.0;

  // Normal equations on the scaled variable t = (x - xc) / xs.
  std::vector<double> a(m * m, 0.0), b(m, 0.0);
  std::vector<double> pw(m);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = (x[i] - xc) / xs;
    pw[0] = 1.0;
    for (std::size_t k = 1; k < m; ++k) pw[k] = pw[k - 1] * t;
    for (std::size_t r = 0; r < m; ++r) {
      b[r] += pw[r] * y[i];
      for (std::size_t c = 0; c < m; ++c) a[r * m + c] += pw[r] * pw[c];
    }
  }
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::abs(a[r * m + col]) > std::abs(a[piv * m + col])) piv = r;
    }
    if (a[piv * m + col] == 0.0) throw std::runtime_error("fit_polynomial: singular system");
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(a[col * m + c], a[piv * m + c]);
      std::swap(b[col], b[piv]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = a[r * m + col] / a[col * m + col];
      for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> t_coeffs(m);
  for (std::size_t r = m; r-- > 0;) {
    double s = b[r];
    for (std::size_t c = r + 1; c < m; ++c) s -= a[r * m + c] * t_coeffs[c];
    t_coeffs[r] = s / a[r * m + r];
  }

  // Back to powers of x: sum_k t_k ((x - xc) / xs)^k.
  PolyFit fit;
  fit.coeffs.assign(m, 0.0);
  for (std::size_t k = 0; k < m; ++k) {
    // expand (x - xc)^k
    std::vector<double> e(k + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t step = 0; step < k; ++step) {
      for (std::size_t j = step + 1; j-- > 0;) {
        e[j + 1] += e[j];
        e[j] *= -xc;
      }
    }
    const double scale = t_coeffs[k] / std::pow(xs, static_cast<double>(k));
    for (std::size_t j = 0; j <= k; ++j) fit.coeffs[j] += scale * e[j];
  }

  const double ymean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
  double ss_tot = 0.0, ss_res = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = (x[i] - xc) / xs;
    double pred = 0.0, p = 1.0;
    for (std::size_t k = 0; k < m; ++k) {
      pred += t_coeffs[k] * p;
      p *= t;
    }
    ss_res += (y[i] - pred) * (y[i] - pred);
    ss_tot += (y[i] - ymean) * (y[i] - ymean);
  }
  fit.center = xc;
  fit.scale = xs;
  fit.centered = t_coeffs;
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

double quadratic_vertex(const PolyFit& fit) {
  if (fit.centered.size() != 3 || fit.centered[2] == 0.0) {
    throw std::invalid_argument("quadratic_vertex: needs a nondegenerate quadratic fit");
  }
  return fit.center - fit.scale * fit.centered[1] / (2.0 * fit.centered[2]);
}

}  // namespace gvortex
