#include "gvortex/linear1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gvortex/fit.hpp"
#include "gvortex/parallel.hpp"

namespace gvortex {

namespace {

void check_scaled(double omega, double D) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("mode problem: omega must be positive");
  }
  if (!(D > 0.0 && D < 1.0)) {
    throw std::invalid_argument("mode problem: D_Omega must lie in (0, 1)");
  }
}

}  // namespace

ModeProblem ModeProblem::make(int n, double omega, double D_Omega) {
  check_scaled(omega, D_Omega);
  if (n == 0) throw std::invalid_argument("ModeProblem: n = 0 has no interior well");
  ModeProblem m;
  m.n = n;
  m.omega = omega;
  m.D_Omega = D_Omega;
  m.R_n = solve_Rn(n, omega, D_Omega);
  m.h_n = oscillator_width(m);
  return m;
}

double potential_Vn(int n, double omega, double D, double r) {
  if (!(r > 0.0)) throw std::invalid_argument("potential_Vn: r must be positive");
  const double nn = static_cast<double>(n);
  const double w2 = omega * omega;
  const double r2 = r * r;
  return nn * nn / r2 - 2.0 * nn * omega + (1.0 - D) * w2 * r2 + 0.5 * D * w2 +
         0.5 * D * w2 * r2 * r2;
}

double potential_Vn(const ModeProblem& m, double r) {
  return potential_Vn(m.n, m.omega, m.D_Omega, r);
}

double solve_Rn(int n, double omega, double D) {
  check_scaled(omega, D);
  if (n == 0) return 0.0;
  const double nn = std::abs(static_cast<double>(n));
  const double a = (1.0 - D) / D;
  const double b = nn * nn / (D * omega * omega);
  // Newton on s = R^2 for s^3 + a s^2 - b, convex and increasing; starting
  // at b^{1/3} (to the right of the root) the iterates decrease monotonically.
  double s = std::cbrt(b);
  for (int it = 0; it < 200; ++it) {
    const double g = (s * s + a * s) * s - b;
    const double dg = 3.0 * s * s + 2.0 * a * s;
    const double next = s - g / dg;
    if (!(next > 0.0)) throw std::runtime_error("solve_Rn: iterate left the positive axis");
    const bool done = std::abs(next - s) <= 4.0 * std::numeric_limits<double>::epsilon() * s;
    s = next;
    if (done) {
      const double res = std::abs((s * s + a * s) * s - b) / b;
      if (res > 1e-12) throw std::runtime_error("solve_Rn: residual above tolerance");
      return std::sqrt(s);
    }
  }
  throw std::runtime_error("solve_Rn: no convergence");
}

double Vn_derivative(const ModeProblem& m, int order, double at) {
  if (!(at > 0.0)) throw std::invalid_argument("Vn_derivative: point must be positive");
  const double n2 = static_cast<double>(m.n) * static_cast<double>(m.n);
  const double w2 = m.omega * m.omega;
  const double D = m.D_Omega;
  const double r = at;
  switch (order) {
    case 1:
      return -2.0 * n2 / (r * r * r) + 2.0 * (1.0 - D) * w2 * r + 2.0 * D * w2 * r * r * r;
    case 2:
      return 6.0 * n2 / std::pow(r, 4) + 2.0 * (1.0 - D) * w2 + 6.0 * D * w2 * r * r;
    case 3:
      return -24.0 * n2 / std::pow(r, 5) + 12.0 * D * w2 * r;
    case 4:
      return 120.0 * n2 / std::pow(r, 6) + 12.0 * D * w2;
    default:
      throw std::invalid_argument("Vn_derivative: unsupported order " + std::to_string(order));
  }
}

double oscillator_width(const ModeProblem& m) {
  const double v2 = Vn_derivative(m, 2, m.R_n);
  if (!(v2 > 0.0)) throw std::logic_error("oscillator_width: nonpositive curvature");
  return std::pow(2.0 / v2, 0.25);
}

RadialGrid build_grid(const ModeProblem& m, double width_multiplier,
                      std::size_t points_per_width) {
  return build_grid(m.R_n, m.h_n, width_multiplier, points_per_width);
}

std::vector<double> symmetrized_potential(const ModeProblem& m, const RadialGrid& grid) {
  std::vector<double> u(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid.r(i);
    u[i] = potential_Vn(m, r) - 0.25 / (r * r);
  }
  return u;
}

std::vector<double> to_symmetric(const RealField& f) {
  const auto& g = f.grid;
  std::vector<double> w(g.size(), 0.0);
  for (std::size_t i = 1; i + 1 < g.size(); ++i) w[i] = std::sqrt(kTwoPi * g.r(i)) * f[i];
  return w;
}

RealField from_symmetric(const RadialGrid& grid, const std::vector<double>& w) {
  RealField f(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) f[i] = w[i] / std::sqrt(kTwoPi * grid.r(i));
  return f;
}

EigenResult solve_linear_modes(const ModeProblem& m, const RadialGrid& grid,
                               std::size_t how_many) {
  if (how_many < 1 || how_many > 2) {
    throw std::invalid_argument("solve_linear_modes: how_many must be 1 or 2");
  }
  RadialHamiltonian h(grid, symmetrized_potential(m, grid));
  auto pairs = lowest_eigenpairs(h, how_many);

  auto& v1 = pairs[0].vector;
  double sum = 0.0;
  for (double v : v1) sum += v;
  if (sum < 0.0) {
    for (double& v : v1) v = -v;
  }
  const std::size_t n = grid.size();
  const double dx = grid.spacing();
  double edge = 0.0;
  for (std::size_t i = 0; i < 3; ++i) edge += v1[i] * v1[i] + v1[n - 1 - i] * v1[n - 1 - i];
  if (edge * dx > 1e-8) {
    throw std::runtime_error("solve_linear_modes: grid too small for mode n = " +
                             std::to_string(m.n));
  }

  EigenResult out;
  out.count = how_many;
  out.lambda1 = pairs[0].value;
  out.residual_norms[0] = pairs[0].residual;
  out.g1 = from_symmetric(grid, v1);
  if (how_many == 2) {
    auto& v2 = pairs[1].vector;
    double moment = 0.0;
    for (std::size_t i = 0; i < n; ++i) moment += v2[i] * (grid.r(i) - m.R_n);
    if (moment < 0.0) {
      for (double& v : v2) v = -v;
    }
    out.lambda2 = pairs[1].value;
    out.residual_norms[1] = pairs[1].residual;
    out.g2 = from_symmetric(grid, v2);
  } else {
    out.lambda2 = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

BlowUpProfile blow_up_profile(const EigenResult& e, const ModeProblem& m) {
  const auto& grid = e.g1.grid;
  BlowUpProfile p;
  p.x.resize(grid.size());
  p.xi.resize(grid.size());
  // c^2 = h^{-1} \int g^2 dr makes \int xi^2 dx = 1.
  std::vector<double> g2(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) g2[i] = e.g1[i] * e.g1[i];
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double wgt = (i == 0 || i + 1 == grid.size()) ? 0.5 : 1.0;
    s += wgt * g2[i];
  }
  s *= grid.spacing();
  p.c_1n = std::sqrt(s / m.h_n);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    p.x[i] = (grid.r(i) - m.R_n) / m.h_n;
    p.xi[i] = e.g1[i] / p.c_1n;
  }
  return p;
}

ModeWindow mode_window(double omega, double a_constant) {
  if (!(omega > 0.0)) throw std::invalid_argument("mode_window: omega must be positive");
  if (!(a_constant > 0.0)) throw std::invalid_argument("mode_window: a must be positive");
  ModeWindow w;
  w.a_constant = a_constant;
  w.energy_floor = std::sqrt(6.0) * omega;
  const double half = a_constant * std::sqrt(omega);
  const auto lo = static_cast<long long>(std::ceil(omega - half - 1e-12));
  const auto hi = static_cast<long long>(std::floor(omega + half + 1e-12));
  for (long long n = lo; n <= hi; ++n) w.indices.push_back(static_cast<int>(n));
  return w;
}

double cost_function_C(double R, double omega, double D) {
  if (!(R > 0.0)) throw std::invalid_argument("cost_function_C: R must be positive");
  const double w2 = omega * omega;
  const double R2 = R * R;
  const double S = D * R2 + 1.0 - D;
  return 1.5 * D * w2 * R2 * R2 + 2.0 * (1.0 - D) * w2 * R2 + 0.5 * D * w2 -
         2.0 * w2 * R2 * std::sqrt(S) + std::sqrt(6.0 * D * w2 * R2 + 4.0 * (1.0 - D) * w2);
}

double index_for_radius(double R, double omega, double D) {
  return omega * R * R * std::sqrt(D * R * R + 1.0 - D);
}

double minimize_cost(double omega, double D) {
  check_scaled(omega, D);
  const double w2 = omega * omega;
  auto dC = [&](double R) {
    const double S = D * R * R + 1.0 - D;
    const double T = 6.0 * D * w2 * R * R + 4.0 * (1.0 - D) * w2;
    return 6.0 * D * w2 * R * R * R + 4.0 * (1.0 - D) * w2 * R -
           2.0 * w2 * (2.0 * R * std::sqrt(S) + D * R * R * R / std::sqrt(S)) +
           6.0 * D * w2 * R / std::sqrt(T);
  };
  double lo = 1e-6, hi = 2.0;
  while (dC(hi) <= 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("minimize_cost: no bracket");
  }
  if (dC(lo) >= 0.0) throw std::runtime_error("minimize_cost: no bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dC(mid) > 0.0) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

ModeSelection select_nstar(double omega, double D, const ModeWindow& window,
                           const std::vector<std::pair<int, double>>& table) {
  if (table.empty()) throw std::invalid_argument("select_nstar: empty table");
  (void)window;
  ModeSelection sel;
  sel.R_min = minimize_cost(omega, D);
  sel.N_real = index_for_radius(sel.R_min, omega, D);

  std::vector<std::pair<int, double>> sorted = table;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.second < b.second || (a.second == b.second && a.first < b.first); });
  sel.n_star = sorted[0].first;
  sel.n_runner_up = sorted.size() > 1 ? sorted[1].first : sorted[0].first;
  if (sorted.size() > 1 &&
      std::abs(sorted[1].second - sorted[0].second) < kDegeneracyTolerance * omega) {
    sel.degenerate = true;
    sel.n_star = std::min(sorted[0].first, sorted[1].first);
    sel.n_runner_up = std::max(sorted[0].first, sorted[1].first);
  }

  if (table.size() >= 3) {
    std::vector<double> x, y;
    for (const auto& [n, lam] : table) {
      x.push_back(static_cast<double>(n));
      y.push_back(lam);
    }
    const auto fit = fit_polynomial(x, y, 2);
    sel.quadratic_coeff = fit.centered[2] / (fit.scale * fit.scale);
    sel.vertex = quadratic_vertex(fit);
    sel.fit_r2 = fit.r_squared;
  }
  return sel;
}

std::vector<ModeRecord> sweep_linear_modes(double omega, double D, const std::vector<int>& ns,
                                           const GridOptions& options, std::size_t how_many) {
  std::vector<ModeRecord> out(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    ModeRecord rec;
    rec.mode = ModeProblem::make(ns[i], omega, D);
    rec.grid = build_grid(rec.mode, options.width_multiplier, options.points_per_width);
    rec.eigen = solve_linear_modes(rec.mode, rec.grid, how_many);
    out[i] = std::move(rec);
  });
  return out;
}

std::vector<std::pair<int, double>> lambda_table(const std::vector<ModeRecord>& records) {
  std::vector<std::pair<int, double>> t;
  t.reserve(records.size());
  for (const auto& r : records) t.emplace_back(r.mode.n, r.eigen.lambda1);
  return t;
}

}  // namespace gvortex
