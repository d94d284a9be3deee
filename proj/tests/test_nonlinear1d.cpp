#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gvortex/nonlinear1d.hpp"
#include "gvortex/oscillator.hpp"

using namespace gvortex;

namespace {
double quartic_rdr(const RealField& f) {
  std::vector<double> p(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) p[i] = std::pow(f[i], 4);
  return kTwoPi * integrate_rdr(p, f.grid);
}

struct Fixture {
  ModeProblem m;
  RadialGrid grid;
  EigenResult eig;
  explicit Fixture(int n, double w) : m(ModeProblem::make(n, w, 0.5)), grid(build_grid(m)), eig(solve_linear_modes(m, grid)) {}
};
}  // namespace

TEST_CASE("energy_En") {
  const Fixture fx(100, 100.0);
  CHECK(energy_En(fx.eig.g1, fx.m, 0.0) == doctest::Approx(fx.eig.lambda1).epsilon(1e-10));
  const double quad = energy_En(fx.eig.g1, fx.m, 0.0);
  const double full = energy_En(fx.eig.g1, fx.m, 1.0);
  CHECK(full - quad == doctest::Approx(quartic_rdr(fx.eig.g1)).epsilon(1e-12));
  RealField twice = fx.eig.g1;
  for (auto& v : twice.values) v *= 2.0;
  CHECK(energy_En(twice, fx.m, 1.0) == doctest::Approx(4.0 * quad + 16.0 * (full - quad)).epsilon(1e-12));
  RealField bad = fx.eig.g1;
  bad.values.pop_back();
  CHECK_THROWS_AS(energy_En(bad, fx.m, 1.0), std::invalid_argument);
}

TEST_CASE("Gaussian trial state obeys the leading-order energy bound") {
  const double w = 100.0, G = 1.0;
  const auto m = ModeProblem::make(100, w, 0.5);
  const auto g = build_grid(m);
  RealField f(g);
  for (std::size_t i = 0; i < g.size(); ++i) f[i] = std::exp(-std::pow((g.r(i) - 1.0) / m.h_n, 2) / 2.0);
  f = normalize(f);
  const double lead = std::sqrt(5.0) * w;
  const double inter = G * std::sqrt(w) * std::pow(5.0, 0.25) / kTwoPi / std::sqrt(kTwoPi);
  const double E = energy_En(f, m, G);
  CHECK(E <= lead + inter + 5.0);
  CHECK(E >= lead - 5.0);
}

TEST_CASE("G = 0 reproduces the linear ground state") {
  const Fixture fx(95, 100.0);
  const auto r = solve_ground_state(fx.m, 0.0, fx.grid);
  CHECK(r.gamma_n == doctest::Approx(fx.eig.lambda1).epsilon(1e-8));
  RealField d = r.Psi_n;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= fx.eig.g1[i];
  CHECK(std::sqrt(mass(d)) <= 1e-6);
  CHECK(r.multiplier == doctest::Approx(r.gamma_n).epsilon(1e-14));
}

TEST_CASE("ground state at G = 1, omega = 200") {
  const Fixture fx(200, 200.0);
  const auto r = solve_ground_state(fx.m, 1.0, fx.grid, FlowParams::single_mode(), &fx.eig);
  CHECK(r.gamma_n >= fx.eig.lambda1);
  CHECK(r.gamma_n <= fx.eig.lambda1 + quartic_rdr(fx.eig.g1));
  CHECK(*std::min_element(r.Psi_n.values.begin(), r.Psi_n.values.end()) >= -1e-10);
  CHECK(mass(r.Psi_n) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.el_residual <= 1e-6 * std::abs(r.gamma_n));
  CHECK(el_residual(r, fx.m, 1.0) == doctest::Approx(r.el_residual).epsilon(1e-6));
  CHECK(r.multiplier == doctest::Approx(r.gamma_n + quartic_rdr(r.Psi_n)).epsilon(1e-12));
  CHECK(r.lambda1 == doctest::Approx(fx.eig.lambda1).epsilon(1e-12));
  const double J = std::abs(r.gamma_n - asymptotic_gamma(fx.m, 1.0));
  CHECK(J < 1.0);
}

TEST_CASE("el_residual responds linearly to an excited admixture") {
  const Fixture fx(100, 100.0);
  NonlinearResult r;
  r.n = 100;
  r.gamma_n = fx.eig.lambda1;
  r.multiplier = fx.eig.lambda1;
  r.Psi_n = fx.eig.g1;
  const double base = el_residual(r, fx.m, 0.0);
  CHECK(base < 1e-6 * fx.eig.lambda1);
  for (std::size_t i = 0; i < r.Psi_n.size(); ++i) r.Psi_n[i] += 0.01 * fx.eig.g2[i];
  const double pert = el_residual(r, fx.m, 0.0);
  CHECK(pert == doctest::Approx(0.01 * (fx.eig.lambda2 - fx.eig.lambda1)).epsilon(0.01));
}

TEST_CASE("gamma_n is nondecreasing and concave in G") {
  const Fixture fx(100, 100.0);
  std::vector<double> g;
  for (double G : {0.0, 0.5, 1.0, 1.5, 2.0}) g.push_back(solve_ground_state(fx.m, G, fx.grid, {}, &fx.eig).gamma_n);
  for (std::size_t k = 0; k + 1 < g.size(); ++k) CHECK(g[k + 1] >= g[k]);
  for (std::size_t k = 1; k + 1 < g.size(); ++k) CHECK(g[k] >= 0.5 * (g[k - 1] + g[k + 1]) - 1e-9);
  CHECK(g[2] >= 0.5 * (g[0] + g[4]) - 1e-9);
}

TEST_CASE("gamma profile at omega = 200") {
  const auto win = mode_window(200.0);
  const auto gp = gamma_profile(200.0, 0.5, 1.0, win);
  REQUIRE(gp.results.size() == win.indices.size());
  const auto lin = select_nstar(200.0, 0.5, win, lambda_table(gp.linear));
  CHECK(std::abs(gp.selection.n_star - lin.n_star) <= 1);
  const std::size_t k = static_cast<std::size_t>(gp.selection.n_star - win.indices.front());
  CHECK(gp.results[k + 1].gamma_n - gp.results[k].gamma_n >= -0.5);
  CHECK(gp.selection.fit_r2 > 0.999);
  for (const auto& r : gp.results) CHECK(r.gamma_n >= r.lambda1);
}

TEST_CASE("L^p growth and blow-up of Psi_n") {
  std::vector<double> n4, ninf, dist;
  for (double w : {100.0, 400.0}) {
    const Fixture fx(static_cast<int>(w), w);
    const auto r = solve_ground_state(fx.m, 1.0, fx.grid, {}, &fx.eig);
    n4.push_back(lp_norm_rdr(r.Psi_n, 4));
    ninf.push_back(lp_norm_rdr(r.Psi_n, 0));
    EigenResult e = fx.eig;
    e.g1 = r.Psi_n;
    const auto b = blow_up_profile(e, fx.m);
    double acc = 0.0;
    for (std::size_t i = 0; i < b.x.size(); ++i)
      acc += std::pow(b.xi[i] - oscillator_eigenfunction(1, b.x[i]), 2) * (b.x[1] - b.x[0]);
    dist.push_back(std::sqrt(acc));
  }
  CHECK(n4[1] / n4[0] == doctest::Approx(std::pow(4.0, 0.125)).epsilon(0.05));
  CHECK(ninf[1] / ninf[0] == doctest::Approx(std::pow(4.0, 0.25)).epsilon(0.05));
  CHECK(dist[1] < dist[0]);
  CHECK(dist[0] / dist[1] == doctest::Approx(2.0).epsilon(0.3));
}

TEST_CASE("flow parameters are validated") {
  FlowParams f;
  CHECK_NOTHROW(validate(f));
  f.dt = 0.0;
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
  f = FlowParams::coupled();
  f.relax_time = -1.0;
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
  f = FlowParams{};
  f.max_iter = 0;
  CHECK_THROWS_AS(validate(f), std::invalid_argument);
}
