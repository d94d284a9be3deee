#include "gvortex/oscillator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gvortex/grid.hpp"

namespace gvortex {

double HermiteExpansion::tail_ratio() const {
  double total = 0.0, tail = 0.0;
  const std::size_t n = coefficients.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double c2 = coefficients[j] * coefficients[j];
    total += c2;
    if (j + 4 >= n) tail += c2;
  }
  return total > 0.0 ? tail / total : 0.0;
}

void hermite_functions(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = std::exp(-0.5 * x * x) / std::pow(kPi, 0.25);
  if (out.size() > 1) out[1] = std::sqrt(2.0) * x * out[0];
  for (std::size_t j = 1; j + 1 < out.size(); ++j) {
    const double jj = static_cast<double>(j);
    out[j + 1] = std::sqrt(2.0 / (jj + 1.0)) * x * out[j] - std::sqrt(jj / (jj + 1.0)) * out[j - 1];
  }
}

double hermite_function(std::size_t j, double x) {
  std::vector<double> v(j + 1);
  hermite_functions(x, v);
  return v[j];
}

double oscillator_eigenfunction(int j, double x) {
  if (j < 1) throw std::invalid_argument("oscillator_eigenfunction: j must be >= 1");
  return hermite_function(static_cast<std::size_t>(j - 1), x);
}

std::vector<double> oscillator_eigenfunction(int j, std::span<const double> x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = oscillator_eigenfunction(j, x[i]);
  return out;
}

GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n < 1) throw std::invalid_argument("gauss_hermite: need at least one node");
  // Nodes are the eigenvalues of the Jacobi matrix with off-diagonal sqrt(j/2).
  auto count_below = [n](double x) {
    std::size_t neg = 0;
    double d = -x;
    if (d < 0.0) ++neg;
    for (std::size_t j = 1; j < n; ++j) {
      const double b2 = static_cast<double>(j) / 2.0;
      if (d == 0.0) d = 1e-300;
      d = -x - b2 / d;
      if (d < 0.0) ++neg;
    }
    return neg;
  };
  const double bound = std::sqrt(2.0 * static_cast<double>(n)) + 2.0;
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> psi(n + 1);
  for (std::size_t k = 0; k < n; ++k) {
    double lo = -bound, hi = bound;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (count_below(mid) > k) hi = mid; else lo = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 3; ++it) {
      hermite_functions(x, psi);
      const double f = psi[n];
      const double df = std::sqrt(2.0 * static_cast<double>(n)) * psi[n - 1] - x * psi[n];
      if (df == 0.0) break;
      const double step = f / df;
      if (std::abs(step) > hi - lo + 1e-12) break;
      x -= step;
    }
    hermite_functions(x, std::span<double>(psi.data(), n));
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += psi[j] * psi[j];
    rule.nodes[k] = x;
    rule.weights[k] = 1.0 / s;
  }
  return rule;
}

const GaussHermiteRule& default_quadrature() {
  static const GaussHermiteRule rule = gauss_hermite(kQuadratureNodes);
  return rule;
}

MomentTable moment_integrals() {
  const auto& q = default_quadrature();
  MomentTable t;
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double x = q.nodes[k];
    const double xi = hermite_function(0, x);
    const double xi2 = xi * xi;
    t.xi1_fourth += q.weights[k] * xi2 * xi2;
    t.x1_xi1_sq += q.weights[k] * x * xi2;
    t.x2_xi1_sq += q.weights[k] * x * x * xi2;
    t.x4_xi1_sq += q.weights[k] * x * x * x * x * xi2;
  }
  return t;
}

HermiteExpansion project(const std::function<double(double)>& f, std::size_t j_max) {
  const auto& q = default_quadrature();
  std::vector<double> c(j_max + 1, 0.0), psi(j_max + 1);
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const double x = q.nodes[k];
    const double fx = f(x) * q.weights[k];
    hermite_functions(x, psi);
    for (std::size_t j = 0; j <= j_max; ++j) c[j] += fx * psi[j];
  }
  HermiteExpansion out(std::move(c));
  if (out.tail_ratio() > 1e-10) {
    throw std::runtime_error("project: Hermite truncation inadequate (tail ratio above 1e-10)");
  }
  return out;
}

double evaluate(const HermiteExpansion& u, double x) {
  if (u.size() == 0) return 0.0;
  std::vector<double> psi(u.size());
  hermite_functions(x, psi);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u.coefficients[j] * psi[j];
  return s;
}

double inner(const HermiteExpansion& a, const HermiteExpansion& b) {
  double s = 0.0;
  const std::size_t n = std::min(a.size(), b.size());
  for (std::size_t j = 0; j < n; ++j) s += a.coefficients[j] * b.coefficients[j];
  return s;
}

HermiteExpansion add(const HermiteExpansion& a, const HermiteExpansion& b, double scale_b) {
  std::vector<double> c(std::max(a.size(), b.size()), 0.0);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = a[j] + scale_b * b[j];
  return HermiteExpansion(std::move(c));
}

HermiteExpansion scaled(const HermiteExpansion& a, double s) {
  HermiteExpansion out = a;
  for (double& v : out.coefficients) v *= s;
  return out;
}

HermiteExpansion multiply_x(const HermiteExpansion& u) {
  const std::size_t n = u.size();
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    double v = 0.0;
    if (k >= 1) v += u[k - 1] * std::sqrt(kk / 2.0);
    v += u[k + 1] * std::sqrt((kk + 1.0) / 2.0);
    c[k] = v;
  }
  return HermiteExpansion(std::move(c));
}

HermiteExpansion multiply_x_power(const HermiteExpansion& u, int power) {
  if (power < 0) throw std::invalid_argument("multiply_x_power: negative power");
  HermiteExpansion out = u;
  for (int p = 0; p < power; ++p) out = multiply_x(out);
  return out;
}

HermiteExpansion derivative(const HermiteExpansion& u) {
  const std::size_t n = u.size();
  std::vector<double> c(n + 1, 0.0);
  for (std::size_t k = 0; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    double v = u[k + 1] * std::sqrt((kk + 1.0) / 2.0);
    if (k >= 1) v -= u[k - 1] * std::sqrt(kk / 2.0);
    c[k] = v;
  }
  return HermiteExpansion(std::move(c));
}

HermiteExpansion unit_vector(std::size_t j) {
  std::vector<double> c(j + 1, 0.0);
  c[j] = 1.0;
  return HermiteExpansion(std::move(c));
}

HermiteExpansion apply_shifted_oscillator(const HermiteExpansion& u) {
  HermiteExpansion out = u;
  for (std::size_t j = 0; j < out.size(); ++j) out.coefficients[j] *= 2.0 * static_cast<double>(j);
  return out;
}

HermiteExpansion solve_shifted_oscillator(const HermiteExpansion& rhs, double constraint_value) {
  double norm = 0.0;
  for (double v : rhs.coefficients) norm += v * v;
  norm = std::sqrt(norm);
  if (std::abs(rhs[0]) > 1e-8 * std::max(1.0, norm)) {
    throw std::domain_error("solve_shifted_oscillator: right-hand side not orthogonal to xi_1");
  }
  std::vector<double> c(std::max<std::size_t>(rhs.size(), 1), 0.0);
  c[0] = constraint_value;
  for (std::size_t j = 1; j < rhs.size(); ++j) c[j] = rhs[j] / (2.0 * static_cast<double>(j));
  return HermiteExpansion(std::move(c));
}

std::vector<double> hermite_to_polynomial(const HermiteExpansion& u) {
  const std::size_t n = u.size();
  std::vector<double> poly(std::max<std::size_t>(n, 1), 0.0);
  // Monomial coefficients of the recurrence polynomials psi_j / psi_0.
  std::vector<double> prev(n + 1, 0.0), cur(n + 1, 0.0), next(n + 1, 0.0);
  cur[0] = 1.0;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k <= j; ++k) poly[k] += u.coefficients[j] * cur[k];
    const double jj = static_cast<double>(j);
    std::fill(next.begin(), next.end(), 0.0);
    const double a = (j == 0) ? std::sqrt(2.0) : std::sqrt(2.0 / (jj + 1.0));
    const double b = (j == 0) ? 0.0 : std::sqrt(jj / (jj + 1.0));
    for (std::size_t k = 0; k + 1 <= n; ++k) next[k + 1] += a * cur[k];
    for (std::size_t k = 0; k <= n; ++k) next[k] -= b * prev[k];
    prev.swap(cur);
    cur.swap(next);
  }
  return poly;
}

WellExpansion well_expansion(const ModeProblem& m) {
  WellExpansion w;
  w.R = m.R_n;
  w.h = m.h_n;
  const double h4 = std::pow(m.h_n, 4);
  w.a3 = Vn_derivative(m, 3, m.R_n) * h4 / 6.0;
  w.a4 = Vn_derivative(m, 4, m.R_n) * h4 / 24.0;
  return w;
}

namespace {

// (1/R) xi_1' - a3 x^3 xi_1
HermiteExpansion linear_first_order_rhs(const WellExpansion& w) {
  const auto xi1 = unit_vector(0);
  return add(scaled(derivative(xi1), 1.0 / w.R), multiply_x_power(xi1, 3), -w.a3);
}

// (x / R^2) xi_1' + a4 x^4 xi_1 - (1/R) u' + a3 x^3 u
HermiteExpansion second_order_terms(const WellExpansion& w, const HermiteExpansion& u) {
  const auto xi1 = unit_vector(0);
  auto t = scaled(multiply_x(derivative(xi1)), 1.0 / (w.R * w.R));
  t = add(t, multiply_x_power(xi1, 4), w.a4);
  t = add(t, derivative(u), -1.0 / w.R);
  t = add(t, multiply_x_power(u, 3), w.a3);
  return t;
}

const HermiteExpansion& xi1_cubed() {
  static const HermiteExpansion e = project([](double x) {
    const double v = hermite_function(0, x);
    return v * v * v;
  });
  return e;
}

}  // namespace

HermiteExpansion correction_P_expansion(const ModeProblem& m) {
  return solve_shifted_oscillator(linear_first_order_rhs(well_expansion(m)), 0.0);
}

std::array<double, 4> correction_P(const ModeProblem& m) {
  const auto poly = hermite_to_polynomial(correction_P_expansion(m));
  double scale = 0.0;
  for (double v : poly) scale = std::max(scale, std::abs(v));
  std::array<double, 4> p{};
  for (std::size_t k = 0; k < poly.size(); ++k) {
    if (k < 4) {
      p[k] = poly[k];
    } else if (std::abs(poly[k]) > 1e-10 * scale) {
      throw std::runtime_error("correction_P: solution is not a cubic multiple of xi_1");
    }
  }
  if (std::abs(p[0]) > 1e-10 * scale || std::abs(p[2]) > 1e-10 * scale) {
    throw std::runtime_error("correction_P: even part does not vanish");
  }
  p[0] = 0.0;
  p[2] = 0.0;
  return p;
}

double compute_K_prime(const ModeProblem& m) {
  const auto w = well_expansion(m);
  const auto phi = correction_P_expansion(m);
  return second_order_terms(w, phi)[0];
}

HermiteExpansion correction_Q(const ModeProblem& m, double K_prime) {
  const auto w = well_expansion(m);
  const auto phi = correction_P_expansion(m);
  const auto rhs = add(scaled(unit_vector(0), K_prime), second_order_terms(w, phi), -1.0);
  return solve_shifted_oscillator(rhs, -0.5 * inner(phi, phi));
}

TauResult correction_tau(const ModeProblem& m, double G) {
  if (!(G >= 0.0)) throw std::invalid_argument("correction_tau: G must be nonnegative");
  const auto w = well_expansion(m);
  const double g = G / (kPi * w.R);
  const auto& cube = xi1_cubed();
  auto rhs = linear_first_order_rhs(w);
  rhs = add(rhs, unit_vector(0), g * cube[0]);
  rhs = add(rhs, cube, -g);
  TauResult out;
  out.tau = solve_shifted_oscillator(rhs, 0.0);
  out.J_prime = second_order_terms(w, out.tau)[0] + g * inner(cube, out.tau);
  return out;
}

double asymptotic_lambda1(const ModeProblem& m) {
  const double v2 = Vn_derivative(m, 2, m.R_n);
  return potential_Vn(m, m.R_n) + std::sqrt(v2 / 2.0) + compute_K_prime(m);
}

double asymptotic_gamma(const ModeProblem& m, double G) {
  const double v2 = Vn_derivative(m, 2, m.R_n);
  const double quartic = moment_integrals().xi1_fourth;
  return potential_Vn(m, m.R_n) + std::sqrt(v2 / 2.0) +
         G / (kTwoPi * m.h_n * m.R_n) * quartic + correction_tau(m, G).J_prime;
}

CorrectionResult compute_corrections(const ModeProblem& m, double G) {
  CorrectionResult r;
  r.n = m.n;
  r.G = G;
  r.P_expansion = correction_P_expansion(m);
  r.P_coeffs = correction_P(m);
  r.K_prime_n = compute_K_prime(m);
  r.Q_expansion = correction_Q(m, r.K_prime_n);
  const auto tau = correction_tau(m, G);
  r.tau_expansion = tau.tau;
  r.J_prime_n = tau.J_prime;
  r.lambda1_asym = asymptotic_lambda1(m);
  r.gamma_asym = asymptotic_gamma(m, G);
  return r;
}

}  // namespace gvortex
