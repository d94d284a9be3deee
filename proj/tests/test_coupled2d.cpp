#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "gvortex/coupled2d.hpp"
#include "gvortex/nonlinear1d.hpp"

using namespace gvortex;

namespace {

struct Bump {
  int n;
  cplx a;
  double c, s;
  double f(double r) const { return std::exp(-(r - c) * (r - c) / (2 * s * s)); }
  double fp(double r) const { return -(r - c) / (s * s) * f(r); }
};

std::vector<Bump> random_bumps(const ScaledParams& p, const std::vector<int>& ns, std::mt19937_64& eng) {
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<Bump> out;
  for (int n : ns) {
    const auto m = ModeProblem::make(n, p.omega, p.D_Omega);
    out.push_back({n, cplx(nd(eng), nd(eng)), m.R_n + m.h_n * u(eng), m.h_n * (1.0 + 0.6 * u(eng))});
  }
  return out;
}

CondensateState sample(const ScaledParams& p, ModeRange range, const RadialGrid& g, const std::vector<Bump>& bumps) {
  CondensateState s(p, range, g);
  for (const auto& b : bumps) {
    auto& f = s.mode(b.n);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] += b.a * b.f(g.r(i));
  }
  s.refresh();
  return s;
}

struct Oracle {
  double energy = 0.0, quartic = 0.0, density_dev = 0.0;
};

// Cartesian form of the magnetic gradient: |d_x u + i w y u|^2 + |d_y u - i w x u|^2,
// integrated on a polar grid with the trapezoidal rule.
Oracle cartesian_oracle(const ScaledParams& p, const std::vector<Bump>& bumps, double r0, double r1,
                        std::size_t n_r, std::size_t n_t, const RealField* ref = nullptr) {
  Oracle o;
  const double dr = (r1 - r0) / static_cast<double>(n_r - 1), dt = kTwoPi / static_cast<double>(n_t);
  for (std::size_t i = 0; i < n_r; ++i) {
    const double r = r0 + dr * static_cast<double>(i);
    double refv = 0.0;
    if (ref) {
      const double x = (r - ref->grid.r_min()) / ref->grid.spacing();
      const auto k = static_cast<std::size_t>(std::clamp(x, 0.0, double(ref->size() - 2)));
      const double t = x - double(k);
      refv = (1 - t) * (*ref)[k] + t * (*ref)[k + 1];
    }
    double row = 0.0, row4 = 0.0, rowd = 0.0;
    for (std::size_t j = 0; j < n_t; ++j) {
      const double th = dt * static_cast<double>(j);
      const double x = r * std::cos(th), y = r * std::sin(th);
      cplx u = 0.0, ur = 0.0, ut = 0.0;
      for (const auto& b : bumps) {
        const cplx e = std::polar(1.0, b.n * th);
        u += b.a * b.f(r) * e;
        ur += b.a * b.fp(r) * e;
        ut += cplx(0.0, b.n) * b.a * b.f(r) * e;
      }
      const cplx ux = std::cos(th) * ur - std::sin(th) / r * ut;
      const cplx uy = std::sin(th) * ur + std::cos(th) / r * ut;
      const cplx I(0.0, 1.0);
      const double m2 = std::norm(u);
      row += std::norm(ux + I * p.omega * y * u) + std::norm(uy - I * p.omega * x * u) +
             0.5 * p.D_Omega * p.omega * p.omega * std::pow(r * r - 1.0, 2) * m2 + p.G * m2 * m2;
      row4 += m2 * m2;
      rowd += std::pow(m2 - refv * refv, 2);
    }
    const double w = (i == 0 || i + 1 == n_r) ? 0.5 : 1.0;
    o.energy += w * row * r;
    o.quartic += w * row4 * r;
    o.density_dev += w * rowd * r;
  }
  o.energy *= dr * dt;
  o.quartic *= dr * dt;
  o.density_dev = std::sqrt(o.density_dev * dr * dt);
  return o;
}

double quartic_1d(const ComplexField& f) {
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = std::pow(std::norm(f[i]), 2);
  return kTwoPi * integrate_rdr(v, f.grid);
}

struct Setup {
  ScaledParams p;
  ModeRange range;
  RadialGrid grid;
  std::vector<ModeRecord> table;
  int n_star = 0;
  explicit Setup(double w, double G = 1.0)
      : p{w, 0.5, G}, range(default_mode_range(w)), grid(shared_grid(p, range)), table(linear_table(p, range, grid)) {
    n_star = range.lo;
    for (const auto& r : table)
      if (r.eigen.lambda1 < table[std::size_t(n_star - range.lo)].eigen.lambda1) n_star = r.mode.n;
  }
  const ModeRecord& rec(int n) const { return table[std::size_t(n - range.lo)]; }
};

CondensateState single_mode(const Setup& st, int n, const RealField& f) {
  CondensateState s(st.p, st.range, st.grid);
  for (std::size_t i = 0; i < f.size(); ++i) s.mode(n)[i] = f[i];
  s.refresh();
  return s;
}

}  // namespace

TEST_CASE("default mode range") {
  const auto r = default_mode_range(100.0);
  CHECK(r.lo == 80);
  CHECK(r.hi == 120);
  CHECK(r.size() == 41);
  CHECK(r.contains(100));
  CHECK_FALSE(r.contains(121));
}

TEST_CASE("quartic integral") {
  const ScaledParams p{50.0, 0.5, 1.0};
  const ModeRange range{46, 54};
  const auto g = shared_grid(p, range, {15.0, 120});
  CondensateState zero(p, range, g);
  CHECK(quartic_integral(zero) == 0.0);

  std::mt19937_64 eng(5);
  auto one = random_bumps(p, {50}, eng);
  const auto s1 = sample(p, range, g, one);
  CHECK(quartic_integral(s1) == doctest::Approx(quartic_1d(s1.mode(50))).epsilon(1e-12));
  CHECK(quartic_lower_bound(s1) == doctest::Approx(quartic_integral(s1)).epsilon(1e-12));

  std::vector<Bump> two = {{49, 1.0, 1.0, 0.09}, {52, 1.0, 1.02, 0.09}};
  const auto s2 = normalized(sample(p, range, g, two));
  const double scale = 1.0 / std::sqrt(total_mass(sample(p, range, g, two)));
  for (auto& b : two) b.a *= scale;
  const auto o = cartesian_oracle(p, two, g.r_min(), g.r_max(), 6000, 512);
  CHECK(quartic_integral(s2) == doctest::Approx(o.quartic).epsilon(1e-8));
}

TEST_CASE("quartic lower bound") {
  const ScaledParams p{50.0, 0.5, 1.0};
  const auto range = default_mode_range(50.0);
  const auto g = shared_grid(p, range);
  std::mt19937_64 eng(17);
  std::bernoulli_distribution pick(0.4);
  for (int k = 0; k < 100; ++k) {
    std::vector<int> ns;
    for (int n = range.lo; n <= range.hi; ++n)
      if (pick(eng)) ns.push_back(n);
    if (ns.empty()) ns.push_back(50);
    const auto s = sample(p, range, g, random_bumps(p, ns, eng));
    CHECK(quartic_integral(s) >= quartic_lower_bound(s) * (1.0 - 1e-12));
  }
  std::vector<Bump> apart = {{45, 1.0, 0.6, 0.02}, {55, cplx(0.0, 2.0), 1.4, 0.02}};
  const auto s = sample(p, range, g, apart);
  const double self = quartic_1d(s.mode(45)) + quartic_1d(s.mode(55));
  CHECK(quartic_integral(s) == doctest::Approx(self).epsilon(1e-12));
  CHECK(quartic_lower_bound(s) == doctest::Approx(self).epsilon(1e-12));
}

TEST_CASE("energy decoupling matches a Cartesian quadrature") {
  const ScaledParams p{50.0, 0.5, 1.0};
  std::mt19937_64 eng(23);
  std::uniform_int_distribution<int> shift(-3, 3);
  const std::size_t ppw[3] = {80, 120, 160};
  for (std::size_t res = 0; res < 3; ++res) {
    for (int k = 0; k < 3; ++k) {
      const int lo = 48 + shift(eng);
      const ModeRange range{lo, lo + 4};
      const auto g = shared_grid(p, range, {15.0, ppw[res]});
      const auto bumps = random_bumps(p, {lo, lo + 1, lo + 2, lo + 3, lo + 4}, eng);
      const auto s = sample(p, range, g, bumps);
      const auto o = cartesian_oracle(p, bumps, g.r_min(), g.r_max(), 3000 + 1500 * res, 128);
      const auto e = energy_F_omega(s);
      CHECK(e.total == doctest::Approx(o.energy).epsilon(1e-7));
      CHECK(e.quartic == doctest::Approx(o.quartic).epsilon(1e-8));
      CHECK(e.total == doctest::Approx(e.quadratic + p.G * e.quartic).epsilon(1e-14));
    }
  }
}

TEST_CASE("single-mode energies collapse to the one-dimensional problem") {
  const Setup st(100.0);
  const auto& r = st.rec(st.n_star);
  const auto s = single_mode(st, st.n_star, r.eigen.g1);
  RealField g = r.eigen.g1;
  CHECK(energy_F_omega(s).total ==
        doctest::Approx(r.eigen.lambda1 + quartic_1d(s.mode(st.n_star))).epsilon(1e-10));
  CHECK(energy_F_omega(s).total == doctest::Approx(energy_En(g, r.mode, 1.0)).epsilon(1e-12));
  const auto gs = solve_ground_state(r.mode, 1.0, st.grid, FlowParams::single_mode(), &r.eigen);
  const auto sp = single_mode(st, st.n_star, gs.Psi_n);
  CHECK(chemical_potential(sp) == doctest::Approx(gs.multiplier).epsilon(1e-10));
  CHECK(energy_F_omega(sp).total == doctest::Approx(gs.gamma_n).epsilon(1e-12));
}

TEST_CASE("rotation covariance and global phase invariance") {
  const ScaledParams p{50.0, 0.5, 1.0};
  const auto range = default_mode_range(50.0);
  const auto g = shared_grid(p, range);
  std::mt19937_64 eng(31);
  const auto s = sample(p, range, g, random_bumps(p, {44, 47, 50, 51, 55}, eng));
  const double e0 = energy_F_omega(s).total;
  auto rot = s, ph = s;
  for (int n = range.lo; n <= range.hi; ++n) {
    for (auto& v : rot.mode(n).values) v *= std::polar(1.0, n * 0.731);
    for (auto& v : ph.mode(n).values) v *= std::polar(1.0, 2.1);
  }
  rot.refresh();
  ph.refresh();
  CHECK(energy_F_omega(rot).total == doctest::Approx(e0).epsilon(1e-12));
  CHECK(energy_F_omega(ph).total == doctest::Approx(e0).epsilon(1e-12));
  CHECK(quartic_integral(rot) == doctest::Approx(quartic_integral(s)).epsilon(1e-12));
}

TEST_CASE("gradient matches finite differences") {
  const ScaledParams p{50.0, 0.5, 1.0};
  const auto range = default_mode_range(50.0);
  const auto g = shared_grid(p, range);
  std::mt19937_64 eng(41);
  const auto s = normalized(sample(p, range, g, random_bumps(p, {46, 49, 50, 52, 53}, eng)));
  const auto grad = energy_gradient(s);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 20; ++k) {
    CondensateState dir(p, range, g);
    for (int n = range.lo; n <= range.hi; ++n) {
      const auto m = ModeProblem::make(n, p.omega, p.D_Omega);
      const cplx a(nd(eng), nd(eng));
      const double c = m.R_n + 0.5 * m.h_n * nd(eng);
      for (std::size_t i = 1; i + 1 < g.size(); ++i)
        dir.mode(n)[i] = a * std::exp(-std::pow((g.r(i) - c) / m.h_n, 2) / 2.0);
    }
    dir.refresh();
    dir = normalized(dir);
    double analytic = 0.0;
    for (int n = range.lo; n <= range.hi; ++n) {
      std::vector<double> prod(g.size());
      for (std::size_t i = 0; i < g.size(); ++i)
        prod[i] = std::real(std::conj(grad[std::size_t(n - range.lo)][i]) * dir.mode(n)[i]);
      analytic += 2.0 * kTwoPi * integrate_rdr(prod, g);
    }
    auto at = [&](double eps) {
      auto t = s;
      for (int n = range.lo; n <= range.hi; ++n)
        for (std::size_t i = 0; i < g.size(); ++i) t.mode(n)[i] += eps * dir.mode(n)[i];
      t.refresh();
      return energy_F_omega(t).total;
    };
    const double e = 1e-3;
    const double fd = (-at(2 * e) + 8 * at(e) - 8 * at(-e) + at(-2 * e)) / (12 * e);
    CHECK(analytic == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("initial state") {
  const Setup st(50.0);
  const auto a = initial_state(st.p, st.range, st.grid, st.table, 3);
  const auto b = initial_state(st.p, st.range, st.grid, st.table, 3);
  const auto c = initial_state(st.p, st.range, st.grid, st.table, 4);
  CHECK(total_mass(a) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.mode(50).values == b.mode(50).values);
  CHECK(a.mode(50).values != c.mode(50).values);
  const auto spectrum = mode_mass_spectrum(a, 50);
  CHECK(spectrum.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(spectrum.mass[std::size_t(50 - st.range.lo)] == *std::max_element(spectrum.mass.begin(), spectrum.mass.end()));
}

TEST_CASE("minimizer without interaction is the linear ground mode") {
  const Setup st(50.0, 0.0);
  const auto init = initial_state(st.p, st.range, st.grid, st.table, 1);
  MinimizeReport rep;
  const auto s = minimize_full(init, FlowParams::coupled(), st.table, &rep);
  const auto spectrum = mode_mass_spectrum(s, st.n_star);
  CHECK(spectrum.total == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(1.0 - spectrum.mass[std::size_t(st.n_star - st.range.lo)] <= 1e-8);
  const double l1 = st.rec(st.n_star).eigen.lambda1;
  CHECK(rep.energy == doctest::Approx(l1).epsilon(1e-8));
  CHECK(chemical_potential(s) == doctest::Approx(l1).epsilon(1e-8));
}

TEST_CASE("minimizer at omega = 100, G = 1") {
  const Setup st(100.0);
  const auto& r = st.rec(st.n_star);
  const double gamma = solve_ground_state(r.mode, 1.0, st.grid, FlowParams::single_mode(), &r.eigen).gamma_n;
  const auto init = initial_state(st.p, st.range, st.grid, st.table, 2);
  MinimizeReport rep;
  const auto s = minimize_full(init, FlowParams::coupled(), st.table, &rep);
  CHECK(total_mass(s) == doctest::Approx(1.0).epsilon(1e-9));
  const double I = energy_F_omega(s).total;
  CHECK(I == doctest::Approx(rep.energy).epsilon(1e-12));
  CHECK(I >= gamma - 0.5);
  CHECK(I <= gamma + 1e-6);
  const auto spectrum = mode_mass_spectrum(s, st.n_star);
  CHECK(spectrum.mass[std::size_t(st.n_star - st.range.lo)] >= 0.95);
  CHECK(spectrum.moment <= 5.0);
  CHECK(spectrum.mass.front() < 1e-8);
  CHECK(spectrum.mass.back() < 1e-8);
  const double mu = chemical_potential(s);
  CHECK(mu == doctest::Approx(I + quartic_integral(s)).epsilon(1e-12));
  CHECK(mu <= 2.0 * I);
  CHECK(rep.el_residual <= 1e-5 * std::abs(mu));
  RealField g2 = r.eigen.g1;
  for (auto& v : g2.values) v *= v;
  const double ratio = density_deviation(s, r.eigen.g1) / std::sqrt(mass(g2));
  CHECK(ratio <= 0.2);
}

TEST_CASE("density deviation") {
  const Setup st(50.0);
  const auto& g1 = st.rec(50).eigen.g1;
  const auto s = single_mode(st, 50, g1);
  CHECK(density_deviation(s, g1) < 1e-14);
  std::vector<Bump> bumps = {{49, cplx(0.3, 0.1), 1.0, 0.09}, {50, 1.0, 0.99, 0.1}, {52, cplx(0.0, -0.4), 1.01, 0.08}};
  const auto raw = sample(st.p, st.range, st.grid, bumps);
  const double sc = 1.0 / std::sqrt(total_mass(raw));
  for (auto& b : bumps) b.a *= sc;
  const auto t = sample(st.p, st.range, st.grid, bumps);
  const auto o = cartesian_oracle(st.p, bumps, st.grid.r_min(), st.grid.r_max(), st.grid.size(), 64, &g1);
  CHECK(density_deviation(t, g1) == doctest::Approx(o.density_dev).epsilon(1e-7));
  const auto coeffs = density_coefficients(t);
  CHECK(coeffs.size() == t.mode_count());
  const std::size_t i = st.grid.size() / 2;
  double m0 = 0.0;
  for (int n = st.range.lo; n <= st.range.hi; ++n) m0 += std::norm(t.mode(n)[i]);
  CHECK(std::real(coeffs[0][i]) == doctest::Approx(m0).epsilon(1e-14));
}

TEST_CASE("mode mass spectrum") {
  const Setup st(50.0);
  const auto s = single_mode(st, 48, st.rec(48).eigen.g1);
  const auto spectrum = mode_mass_spectrum(s, 48);
  CHECK(spectrum.moment == 0.0);
  CHECK(spectrum.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mode_mass_spectrum(s, 50).moment == doctest::Approx(4.0).epsilon(1e-12));
}
