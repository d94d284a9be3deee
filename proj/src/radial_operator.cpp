#include "gvortex/radial_operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gvortex {

namespace {

constexpr double kPivotFloor = 1e-300;

double extra_at(std::span<const double> extra, std::size_t i) {
  return extra.empty() ? 0.0 : extra[i];
}

void check_length(std::span<const double> v, std::size_t n, const char* what) {
  if (v.size() != n) {
    throw std::invalid_argument(std::string("RadialHamiltonian: length mismatch in ") + what);
  }
}

}  // namespace

RadialHamiltonian::RadialHamiltonian(RadialGrid grid, std::vector<double> potential)
    : grid_(grid), potential_(std::move(potential)) {
  check_length(potential_, grid_.size(), "potential");
  // Thomas elimination of B = tridiag(1, 10, 1) / 12 on the interior.
  const std::size_t m = grid_.size() - 2;
  b_diag_factor_.resize(m);
  b_diag_factor_[0] = 10.0 / 12.0;
  for (std::size_t i = 1; i < m; ++i) {
    b_diag_factor_[i] = 10.0 / 12.0 - (1.0 / 144.0) / b_diag_factor_[i - 1];
  }
}

void RadialHamiltonian::apply_kinetic(std::span<const double> w, std::span<double> out) const {
  const std::size_t n = grid_.size();
  check_length(w, n, "apply_kinetic input");
  check_length(out, n, "apply_kinetic output");
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  const std::size_t m = n - 2;
  // t = -D2 w on interior nodes, ends of w taken as zero.
  std::vector<double> t(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double left = (i - 1 == 0) ? 0.0 : w[i - 1];
    const double right = (i + 1 == n - 1) ? 0.0 : w[i + 1];
    t[k] = (2.0 * w[i] - left - right) * inv_h2;
  }
  // Solve B y = t.
  for (std::size_t k = 1; k < m; ++k) {
    t[k] -= (1.0 / 12.0) / b_diag_factor_[k - 1] * t[k - 1];
  }
  t[m - 1] /= b_diag_factor_[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) {
    t[k] = (t[k] - (1.0 / 12.0) * t[k + 1]) / b_diag_factor_[k];
  }
  out[0] = 0.0;
  out[n - 1] = 0.0;
  for (std::size_t k = 0; k < m; ++k) out[k + 1] = t[k];
}

void RadialHamiltonian::apply(std::span<const double> w, std::span<double> out,
                              std::span<const double> extra) const {
  apply_kinetic(w, out);
  const std::size_t n = grid_.size();
  if (!extra.empty()) check_length(extra, n, "extra potential");
  for (std::size_t i = 1; i + 1 < n; ++i) {
    out[i] += (potential_[i] + extra_at(extra, i)) * w[i];
  }
}

std::size_t RadialHamiltonian::count_below(double sigma, std::span<const double> extra) const {
  const std::size_t n = grid_.size();
  if (!extra.empty()) check_length(extra, n, "extra potential");
  const std::size_t m = n - 2;
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  std::vector<double> d(m);
  for (std::size_t k = 0; k < m; ++k) {
    d[k] = potential_[k + 1] + extra_at(extra, k + 1) - sigma;
  }
  auto a0 = [&](std::size_t k) {
    const double neighbours = (k == 0 || k == m - 1) ? 1.0 : 2.0;
    double bdb = 100.0 * d[k];
    if (k > 0) bdb += d[k - 1];
    if (k + 1 < m) bdb += d[k + 1];
    return (20.0 - neighbours) / 12.0 * inv_h2 + bdb / 144.0;
  };
  // a1(k) = M[k][k+1], a2(k) = M[k][k+2]
  auto a1 = [&](std::size_t k) { return -8.0 / 12.0 * inv_h2 + 10.0 * (d[k] + d[k + 1]) / 144.0; };
  auto a2 = [&](std::size_t k) { return -1.0 / 12.0 * inv_h2 + d[k + 1] / 144.0; };

  // Banded LDL^T; l1 = L[k][k-1], l2 = L[k][k-2].
  std::size_t negatives = 0;
  double dm2 = 0.0, dm1 = 0.0;     // D[k-2], D[k-1]
  double l1_prev = 0.0;            // L[k-1][k-2]
  for (std::size_t k = 0; k < m; ++k) {
    double l2 = 0.0, l1 = 0.0;
    if (k >= 2) l2 = a2(k - 2) / dm2;
    if (k >= 1) {
      double num = a1(k - 1);
      if (k >= 2) num -= l2 * l1_prev * dm2;
      l1 = num / dm1;
    }
    double dk = a0(k);
    if (k >= 1) dk -= l1 * l1 * dm1;
    if (k >= 2) dk -= l2 * l2 * dm2;
    if (std::abs(dk) < kPivotFloor) dk = -kPivotFloor;
    if (dk < 0.0) ++negatives;
    dm2 = dm1;
    dm1 = dk;
    l1_prev = l1;
  }
  return negatives;
}

void RadialHamiltonian::solve_shifted(double sigma, std::span<const double> b, std::span<double> x,
                                      std::span<const double> extra) const {
  const std::size_t n = grid_.size();
  check_length(b, n, "solve_shifted rhs");
  check_length(x, n, "solve_shifted output");
  if (!extra.empty()) check_length(extra, n, "extra potential");
  const std::size_t m = n - 2;
  const double inv_h2 = 1.0 / (grid_.spacing() * grid_.spacing());
  // Multiply through by B: (-D2 + B diag(P - sigma)) x = B b.
  std::vector<double> p(m), sub(m - 1), diag(m), sup(m - 1), rhs(m);
  for (std::size_t k = 0; k < m; ++k) p[k] = potential_[k + 1] + extra_at(extra, k + 1) - sigma;
  for (std::size_t k = 0; k < m; ++k) {
    diag[k] = 2.0 * inv_h2 + 10.0 / 12.0 * p[k];
    if (k + 1 < m) {
      sup[k] = -inv_h2 + p[k + 1] / 12.0;
      sub[k] = -inv_h2 + p[k] / 12.0;
    }
    double bb = 10.0 * b[k + 1];
    if (k > 0) bb += b[k];
    if (k + 1 < m) bb += b[k + 2];
    rhs[k] = bb / 12.0;
  }
  solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup), rhs);
  x[0] = 0.0;
  x[n - 1] = 0.0;
  for (std::size_t k = 0; k < m; ++k) x[k + 1] = rhs[k];
}

double RadialHamiltonian::quadratic_form(std::span<const double> w) const {
  std::vector<double> hw(w.size());
  apply(w, hw);
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) s += w[i] * hw[i];
  return s * grid_.spacing();
}

double RadialHamiltonian::spectrum_lower_bound() const {
  return *std::min_element(potential_.begin() + 1, potential_.end() - 1);
}

double RadialHamiltonian::spectrum_upper_bound() const {
  const double h = grid_.spacing();
  return *std::max_element(potential_.begin() + 1, potential_.end() - 1) + 6.0 / (h * h);
}

void solve_tridiagonal(std::vector<double> dl, std::vector<double> d, std::vector<double> du,
                       std::span<double> b) {
  const std::size_t n = d.size();
  if (b.size() != n || dl.size() + 1 != n || du.size() + 1 != n) {
    throw std::invalid_argument("solve_tridiagonal: inconsistent sizes");
  }
  auto guard = [](double& v) {
    if (std::abs(v) < kPivotFloor) v = kPivotFloor;
  };
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const bool last = (i + 2 == n);
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      guard(d[i]);
      const double fact = dl[i] / d[i];
      d[i + 1] -= fact * du[i];
      b[i + 1] -= fact * b[i];
      dl[i] = 0.0;
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      const double temp = d[i + 1];
      d[i + 1] = du[i] - fact * temp;
      if (!last) {
        dl[i] = du[i + 1];
        du[i + 1] = -fact * dl[i];
      } else {
        dl[i] = 0.0;
      }
      du[i] = temp;
      const double tb = b[i];
      b[i] = b[i + 1];
      b[i + 1] = tb - fact * b[i + 1];
    }
  }
  guard(d[n - 1]);
  b[n - 1] /= d[n - 1];
  if (n > 1) b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
  for (std::size_t i = n - 2; i-- > 0;) {
    b[i] = (b[i] - du[i] * b[i + 1] - dl[i] * b[i + 2]) / d[i];
  }
}

double discrete_norm(std::span<const double> w, double spacing) {
  double s = 0.0;
  for (double v : w) s += v * v;
  return std::sqrt(s * spacing);
}

double bisect_eigenvalue(const RadialHamiltonian& h, std::size_t index, double rel_tol) {
  double lo = h.spectrum_lower_bound();
  if (h.count_below(lo) > index) {
    throw std::runtime_error("bisect_eigenvalue: inertia count inconsistent at lower bound");
  }
  // Grow the upper end geometrically from the bottom of the well.
  double span = 1.0;
  double hi = lo + span;
  const double top = h.spectrum_upper_bound();
  while (h.count_below(hi) <= index) {
    span *= 2.0;
    hi = lo + span;
    if (hi > 2.0 * top + 1.0) {
      throw std::runtime_error("bisect_eigenvalue: index exceeds spectrum");
    }
  }
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (hi - lo <= rel_tol * std::max(1.0, std::abs(mid))) break;
    if (mid <= lo || mid >= hi) break;
    if (h.count_below(mid) > index) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<Eigenpair> lowest_eigenpairs(const RadialHamiltonian& h, std::size_t how_many) {
  const auto& grid = h.grid();
  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  std::vector<Eigenpair> out;
  out.reserve(how_many);
  for (std::size_t k = 0; k < how_many; ++k) {
    const double lambda = bisect_eigenvalue(h, k);
    std::vector<double> v(n, 0.0), next(n, 0.0);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      v[i] = 1.0 + 0.5 * std::sin(0.37 * static_cast<double>(i));
    }
    for (int it = 0; it < 4; ++it) {
      h.solve_shifted(lambda, v, next);
      // Deflate previously found vectors.
      for (const auto& prev : out) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += prev.vector[i] * next[i];
        dot *= dx;
        for (std::size_t i = 0; i < n; ++i) next[i] -= dot * prev.vector[i];
      }
      const double nrm = discrete_norm(next, dx);
      if (!(nrm > 0.0) || !std::isfinite(nrm)) {
        throw std::runtime_error("lowest_eigenpairs: inverse iteration failed");
      }
      for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / nrm;
    }
    Eigenpair pair;
    std::vector<double> hv(n);
    h.apply(v, hv);
    double rq = 0.0;
    for (std::size_t i = 0; i < n; ++i) rq += v[i] * hv[i];
    pair.value = rq * dx;
    for (std::size_t i = 0; i < n; ++i) hv[i] -= pair.value * v[i];
    pair.residual = discrete_norm(hv, dx);
    pair.vector = std::move(v);
    out.push_back(std::move(pair));
  }
  return out;
}

}  // namespace gvortex
