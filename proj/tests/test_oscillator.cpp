#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "gvortex/oscillator.hpp"

using namespace gvortex;

namespace {
double xi1(double x) { return std::pow(kPi, -0.25) * std::exp(-x * x / 2.0); }

// Fourth-order finite-difference L2 norm of (-d^2 + x^2 - 1) u - rhs on [-10, 10].
template <typename U, typename F>
double ode_residual(U u, F rhs, double d = 1e-3) {
  double acc = 0.0;
  for (double x = -10.0; x <= 10.0; x += d) {
    const double upp =
        (-u(x - 2 * d) + 16 * u(x - d) - 30 * u(x) + 16 * u(x + d) - u(x + 2 * d)) / (12 * d * d);
    const double r = -upp + (x * x - 1.0) * u(x) - rhs(x);
    acc += r * r * d;
  }
  return std::sqrt(acc);
}

double gamma_half(int k) { return std::tgamma(k + 0.5); }
}  // namespace

TEST_CASE("oscillator eigenfunctions") {
  const double d = 1e-3;
  double n1 = 0.0, n12 = 0.0, worst = 0.0;
  for (double x = -10.0; x <= 10.0; x += d) {
    const double f = oscillator_eigenfunction(1, x);
    n1 += f * f * d;
    n12 += f * oscillator_eigenfunction(2, x) * d;
    const double fpp = (oscillator_eigenfunction(1, x - d) - 2 * f + oscillator_eigenfunction(1, x + d)) / (d * d);
    if (std::abs(x) < 5) worst = std::max(worst, std::abs(-fpp + x * x * f - f) / xi1(0));
    CHECK(oscillator_eigenfunction(2, -x) == doctest::Approx(-oscillator_eigenfunction(2, x)).epsilon(1e-14));
  }
  CHECK(oscillator_eigenfunction(1, 0.7) == doctest::Approx(xi1(0.7)).epsilon(1e-14));
  CHECK(n1 == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(n12) < 1e-12);
  CHECK(worst < 1e-6);
  const double r3 = ode_residual([](double x) { return oscillator_eigenfunction(2, x); },
                                 [](double x) { return 2.0 * oscillator_eigenfunction(2, x); });
  CHECK(r3 < 1e-6);
  CHECK(hermite_function(0, 0.3) == oscillator_eigenfunction(1, 0.3));
}

TEST_CASE("Gauss-Hermite exactness") {
  const auto& q = default_quadrature();
  CHECK(q.nodes.size() == kQuadratureNodes);
  for (int k = 0; k <= 79; ++k) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      const double x = q.nodes[i];
      s += q.weights[i] * std::pow(x, 2 * k) * std::exp(-x * x);
    }
    CHECK(s == doctest::Approx(gamma_half(k)).epsilon(1e-11));
  }
  const auto small = gauss_hermite(5);
  double s = 0.0;
  for (std::size_t i = 0; i < 5; ++i) s += small.weights[i] * std::exp(-small.nodes[i] * small.nodes[i]);
  CHECK(s == doctest::Approx(std::sqrt(kPi)).epsilon(1e-13));
}

TEST_CASE("moment integrals") {
  const auto m = moment_integrals();
  CHECK(m.xi1_fourth == doctest::Approx(1.0 / std::sqrt(kTwoPi)).epsilon(1e-13));
  CHECK(m.x2_xi1_sq == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(m.x4_xi1_sq == doctest::Approx(0.75).epsilon(1e-13));
  CHECK(std::abs(m.x1_xi1_sq) < 1e-14);
}

TEST_CASE("solve_shifted_oscillator") {
  auto z = solve_shifted_oscillator(HermiteExpansion({0.0, 0.0, 0.0}), 0.0);
  for (std::size_t j = 0; j < 3; ++j) CHECK(z[j] == 0.0);
  const auto u = solve_shifted_oscillator(unit_vector(1), 0.0);
  CHECK(u[1] == doctest::Approx(0.5));
  CHECK(u[0] == 0.0);
  CHECK_THROWS_AS(solve_shifted_oscillator(unit_vector(0), 0.0), std::domain_error);

  const auto dxi = derivative(unit_vector(0));
  const auto v = solve_shifted_oscillator(dxi, 0.0);
  const double res = ode_residual([&](double x) { return evaluate(v, x); },
                                  [](double x) { return -x * xi1(x); });
  CHECK(res < 1e-6);

  std::mt19937_64 eng(11);
  std::normal_distribution<double> nd;
  std::vector<double> c(30);
  for (std::size_t j = 1; j < c.size(); ++j) c[j] = nd(eng);
  c[0] = 0.37;
  const HermiteExpansion in(c);
  const auto back = solve_shifted_oscillator(apply_shifted_oscillator(in), 0.37);
  for (std::size_t j = 0; j < c.size(); ++j) CHECK(back[j] == doctest::Approx(c[j]).epsilon(1e-12));
}

TEST_CASE("basis operations agree with pointwise evaluation") {
  const auto f = project([](double x) { return (1.0 + x - 0.3 * x * x * x) * xi1(x); });
  for (double x : {-2.0, -0.4, 0.0, 1.3, 3.0}) {
    CHECK(evaluate(f, x) == doctest::Approx((1.0 + x - 0.3 * x * x * x) * xi1(x)).epsilon(1e-12));
    CHECK(evaluate(multiply_x(f), x) == doctest::Approx(x * evaluate(f, x)).epsilon(1e-11));
    CHECK(evaluate(multiply_x_power(f, 3), x) == doctest::Approx(x * x * x * evaluate(f, x)).epsilon(1e-11));
    const double h = 1e-4;
    const double fd = (evaluate(f, x + h) - evaluate(f, x - h)) / (2 * h);
    CHECK(evaluate(derivative(f), x) == doctest::Approx(fd).epsilon(1e-7));
  }
  const auto poly = hermite_to_polynomial(f);
  CHECK(poly[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(poly[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(poly[2]) < 1e-10);
  CHECK(poly[3] == doctest::Approx(-0.3).epsilon(1e-10));
  CHECK(inner(f, f) == doctest::Approx(1.0 + 0.5 - 0.6 * 0.75 + 0.09 * 15.0 / 8.0).epsilon(1e-12));
  CHECK_THROWS(project([](double x) { return 1.0 / (1.0 + x * x); }));
}

TEST_CASE("correction P closed form and ODE residual") {
  for (int n : {80, 100, 120}) {
    const auto m = ModeProblem::make(n, 100.0, 0.5);
    const auto we = well_expansion(m);
    CHECK(we.a3 == doctest::Approx(Vn_derivative(m, 3, m.R_n) * std::pow(m.h_n, 4) / 6.0).epsilon(1e-13));
    const auto P = correction_P(m);
    CHECK(std::abs(P[0]) < 1e-12);
    CHECK(std::abs(P[2]) < 1e-12);
    CHECK(P[3] == doctest::Approx(-we.a3 / 6.0).epsilon(1e-10));
    CHECK(P[1] == doctest::Approx(-(1.0 / m.R_n + we.a3) / 2.0).epsilon(1e-10));
    auto Pxi = [&](double x) { return (P[1] * x + P[3] * x * x * x) * xi1(x); };
    auto rhs = [&](double x) { return -x * xi1(x) / m.R_n - we.a3 * x * x * x * xi1(x); };
    CHECK(ode_residual(Pxi, rhs) < 1e-8);
    const auto Pe = correction_P_expansion(m);
    CHECK(std::abs(Pe[0]) < 1e-10);
    for (std::size_t j = 0; j < Pe.size(); j += 2) CHECK(std::abs(Pe[j]) < 1e-10);
  }
  const auto p = correction_P(ModeProblem::make(100, 200.0, 0.5));
  const auto q = correction_P(ModeProblem::make(104, 200.0, 0.5));
  for (int k : {1, 3}) CHECK(std::abs(p[k] - q[k]) <= 4.0 * 4.0 / 200.0);
}

TEST_CASE("P splits into the derivative term and the cubic well term") {
  for (double w : {100.0, 400.0}) {
    const auto m = ModeProblem::make(static_cast<int>(w), w, 0.5);
    const auto P = correction_P(m);
    const auto zeroed = solve_shifted_oscillator(scaled(derivative(unit_vector(0)), 1.0 / m.R_n), 0.0);
    const auto poly = hermite_to_polynomial(zeroed);
    CHECK(poly[1] == doctest::Approx(-0.5 / m.R_n).epsilon(1e-12));
    const double a3 = well_expansion(m).a3;
    CHECK(P[1] - poly[1] == doctest::Approx(-a3 / 2.0).epsilon(1e-10));
    CHECK(P[3] == doctest::Approx(-a3 / 6.0).epsilon(1e-10));
  }
}

TEST_CASE("K_prime") {
  const auto dxi = derivative(unit_vector(0));
  CHECK(inner(unit_vector(0), multiply_x(dxi)) == doctest::Approx(-0.5).epsilon(1e-13));
  double lo = 1e9, hi = -1e9;
  for (int n : mode_window(200.0).indices) {
    const double K = compute_K_prime(ModeProblem::make(n, 200.0, 0.5));
    lo = std::min(lo, K);
    hi = std::max(hi, K);
  }
  CHECK(std::isfinite(lo));
  CHECK(std::abs(lo) < 5.0);
  CHECK(std::abs(hi) < 5.0);

  std::vector<double> gap;
  for (double w : {100.0, 400.0}) {
    const auto m = ModeProblem::make(static_cast<int>(w), w, 0.5);
    const auto e = solve_linear_modes(m, build_grid(m, 15.0, 80), 1);
    gap.push_back(std::abs(e.lambda1 - asymptotic_lambda1(m)));
  }
  CHECK(gap[1] < gap[0]);
  CHECK(gap[0] / gap[1] > 1.5);
}

TEST_CASE("correction Q") {
  const auto m = ModeProblem::make(95, 100.0, 0.5);
  const double K = compute_K_prime(m);
  const auto Q = correction_Q(m, K);
  const auto Pe = correction_P_expansion(m);
  const auto& q = default_quadrature();
  double pp = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i) pp += q.weights[i] * std::pow(evaluate(Pe, q.nodes[i]), 2);
  CHECK(Q[0] == doctest::Approx(-0.5 * pp).epsilon(1e-8));
  for (std::size_t j = 1; j < Q.size(); j += 2) CHECK(std::abs(Q[j]) < 1e-10);
  CHECK_THROWS_AS(correction_Q(m, K + 1.0), std::domain_error);
}

TEST_CASE("blow-up expansion accuracy improves with omega") {
  std::vector<double> dist;
  for (double w : {100.0, 400.0}) {
    const auto m = ModeProblem::make(static_cast<int>(w), w, 0.5);
    const auto e = solve_linear_modes(m, build_grid(m, 15.0, 120), 1);
    const auto b = blow_up_profile(e, m);
    const auto c = compute_corrections(m, 0.0);
    double acc = 0.0;
    const double dx = b.x[1] - b.x[0];
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      const double x = b.x[i];
      const double rec = xi1(x) + m.h_n * evaluate(c.P_expansion, x) + m.h_n * m.h_n * evaluate(c.Q_expansion, x);
      acc += std::pow(rec - b.xi[i], 2) * dx;
    }
    dist.push_back(std::sqrt(acc));
  }
  CHECK(dist[1] < dist[0]);
  CHECK(dist[0] / dist[1] > 4.0);
}

TEST_CASE("tau and J_prime") {
  const auto m = ModeProblem::make(100, 100.0, 0.5);
  const auto t0 = correction_tau(m, 0.0);
  const auto Pe = correction_P_expansion(m);
  for (std::size_t j = 0; j < 20; ++j) CHECK(t0.tau[j] == doctest::Approx(Pe[j]).epsilon(1e-12).scale(1.0));
  const auto t1 = correction_tau(m, 1.0);
  CHECK(std::abs(t1.tau[0]) < 1e-10);
  CHECK(asymptotic_gamma(m, 0.0) == doctest::Approx(asymptotic_lambda1(m)).epsilon(1e-14));
  const double interaction = asymptotic_gamma(m, 1.0) - asymptotic_lambda1(m) - (t1.J_prime - t0.J_prime);
  const double expected = std::pow(5.0, 0.25) * std::sqrt(100.0) / kTwoPi / std::sqrt(kTwoPi);
  CHECK(interaction == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(asymptotic_lambda1(m) - std::sqrt(5.0) * 100.0 - compute_K_prime(m)) < 1e-9);
}

TEST_CASE("expansion tails and truncation stability") {
  const auto m = ModeProblem::make(97, 100.0, 0.5);
  const auto c = compute_corrections(m, 1.0);
  CHECK(c.P_expansion.size() <= 4);
  CHECK(c.tau_expansion.tail_ratio() < 1e-10);
  const auto cube40 = project([](double x) { return std::pow(xi1(x), 3); }, 40);
  const auto cube80 = project([](double x) { return std::pow(xi1(x), 3); }, 80);
  for (std::size_t j = 0; j <= 40; ++j) CHECK(std::abs(cube40[j] - cube80[j]) < 1e-10);
  for (std::size_t j = 1; j <= 40; j += 2) CHECK(std::abs(cube80[j]) < 1e-12);
}

TEST_CASE("asymptotic lambda1 tracks the numerics") {
  const auto win = mode_window(200.0);
  const auto recs = sweep_linear_modes(200.0, 0.5, win.indices, {}, 1);
  const auto sel = select_nstar(200.0, 0.5, win, lambda_table(recs));
  const auto& r = recs[static_cast<std::size_t>(sel.n_star - win.indices.front())];
  CHECK(std::abs(r.eigen.lambda1 - asymptotic_lambda1(r.mode)) <= 1.0);
  const double a = asymptotic_lambda1(ModeProblem::make(sel.n_star - 1, 200.0, 0.5));
  const double b = asymptotic_lambda1(r.mode);
  const double c = asymptotic_lambda1(ModeProblem::make(sel.n_star + 1, 200.0, 0.5));
  CHECK(a - 2 * b + c > 0.0);
}
