#include "gvortex/coupled2d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <stdexcept>
#include <string>

#include "gvortex/parallel.hpp"
#include "gvortex/radial_operator.hpp"

namespace gvortex {

namespace {

using Field = std::vector<std::vector<cplx>>;  // [mode][node], w = sqrt(2 pi r) f

constexpr std::size_t kNodeChunks = 32;

class Engine {
 public:
  Engine(const ScaledParams& p, ModeRange range, const RadialGrid& grid)
      : grid_(grid), lo_(range.lo), m_(range.size()), n_(grid.size()), beta_(p.G / kTwoPi) {
    hams_.reserve(m_);
    for (std::size_t k = 0; k < m_; ++k) {
      const int n = lo_ + static_cast<int>(k);
      ModeProblem mp;
      mp.n = n;
      mp.omega = p.omega;
      mp.D_Omega = p.D_Omega;
      hams_.emplace_back(grid, symmetrized_potential(mp, grid));
    }
    inv_r_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) inv_r_[i] = 1.0 / grid.r(i);
  }

  std::size_t modes() const { return m_; }
  std::size_t nodes() const { return n_; }
  double spacing() const { return grid_.spacing(); }
  double beta() const { return beta_; }
  const RadialHamiltonian& ham(std::size_t k) const { return hams_[k]; }

  // Delta sum conj(v) H v per mode; optionally also H v.
  std::vector<double> quadratic(const Field& v, Field* hv) const {
    std::vector<double> out(m_);
    if (hv) hv->assign(m_, std::vector<cplx>(n_));
    parallel_for(m_, [&](std::size_t k) {
      std::vector<double> re(n_), im(n_), hre(n_), him(n_);
      for (std::size_t i = 0; i < n_; ++i) {
        re[i] = v[k][i].real();
        im[i] = v[k][i].imag();
      }
      hams_[k].apply(re, hre);
      hams_[k].apply(im, him);
      double s = 0.0;
      for (std::size_t i = 1; i + 1 < n_; ++i) s += re[i] * hre[i] + im[i] * him[i];
      out[k] = s * grid_.spacing();
      if (hv) {
        for (std::size_t i = 0; i < n_; ++i) (*hv)[k][i] = cplx(hre[i], him[i]);
      }
    });
    return out;
  }

  // Delta sum_i sum_m |C_m|^2 / r_i with C_m = sum_p v_{p+m} conj(v_p); the
  // cubic term 2 beta sum_m C_m v_{n-m} / r into `cubic` when requested, and
  // the density sum_p |v_p|^2 / r into `density`.
  double quartic(const Field& v, Field* cubic, std::vector<double>* density) const {
    if (cubic) cubic->assign(m_, std::vector<cplx>(n_, cplx(0.0, 0.0)));
    if (density) density->assign(n_, 0.0);
    std::vector<double> partial(kNodeChunks, 0.0);
    const std::size_t interior = n_ - 2;
    parallel_for(kNodeChunks, [&](std::size_t chunk) {
      const std::size_t begin = 1 + interior * chunk / kNodeChunks;
      const std::size_t end = 1 + interior * (chunk + 1) / kNodeChunks;
      std::vector<cplx> a(m_), c(m_);
      double acc = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        for (std::size_t p = 0; p < m_; ++p) a[p] = v[p][i];
        for (std::size_t m = 0; m < m_; ++m) {
          cplx s(0.0, 0.0);
          for (std::size_t p = 0; p + m < m_; ++p) s += a[p + m] * std::conj(a[p]);
          c[m] = s;
        }
        double sq = std::norm(c[0]);
        for (std::size_t m = 1; m < m_; ++m) sq += 2.0 * std::norm(c[m]);
        acc += sq * inv_r_[i];
        if (density) (*density)[i] = c[0].real() * inv_r_[i];
        if (cubic) {
          const double scale = 2.0 * beta_ * inv_r_[i];
          for (std::size_t n = 0; n < m_; ++n) {
            cplx s(0.0, 0.0);
            for (std::size_t k = 0; k < m_; ++k) {
              // m = n - k
              const cplx cm = (n >= k) ? c[n - k] : std::conj(c[k - n]);
              s += cm * a[k];
            }
            (*cubic)[n][i] = scale * s;
          }
        }
      }
      partial[chunk] = acc;
    });
    double total = 0.0;
    for (double p : partial) total += p;
    return total * grid_.spacing();
  }

  struct Eval {
    double energy = 0.0;
    Field grad;
    std::vector<double> density;
  };

  double energy(const Field& v) const {
    const auto q = quadratic(v, nullptr);
    double e = 0.0;
    for (double x : q) e += x;
    return e + beta_ * quartic(v, nullptr, nullptr);
  }

  Eval evaluate(const Field& v) const {
    Eval out;
    Field hv, cubic;
    const auto q = quadratic(v, &hv);
    const double quart = quartic(v, &cubic, &out.density);
    out.energy = beta_ * quart;
    for (double x : q) out.energy += x;
    out.grad = std::move(hv);
    for (std::size_t k = 0; k < m_; ++k) {
      for (std::size_t i = 0; i < n_; ++i) out.grad[k][i] += cubic[k][i];
    }
    return out;
  }

 private:
  RadialGrid grid_;
  int lo_;
  std::size_t m_;
  std::size_t n_;
  double beta_;
  std::vector<RadialHamiltonian> hams_;
  std::vector<double> inv_r_;
};

Field to_field(const CondensateState& s) {
  Field v(s.mode_count(), std::vector<cplx>(s.grid.size(), cplx(0.0, 0.0)));
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    for (std::size_t i = 1; i + 1 < s.grid.size(); ++i) {
      v[k][i] = std::sqrt(kTwoPi * s.grid.r(i)) * s.modes[k][i];
    }
  }
  return v;
}

void from_field(const Field& v, CondensateState& s) {
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    for (std::size_t i = 0; i < s.grid.size(); ++i) {
      s.modes[k][i] = v[k][i] / std::sqrt(kTwoPi * s.grid.r(i));
    }
  }
  s.refresh();
}

double field_dot(const Field& a, const Field& b, double dx) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (std::size_t i = 0; i < a[k].size(); ++i) {
      s += a[k][i].real() * b[k][i].real() + a[k][i].imag() * b[k][i].imag();
    }
  }
  return s * dx;
}

void axpy(Field& y, double alpha, const Field& x) {
  for (std::size_t k = 0; k < y.size(); ++k) {
    for (std::size_t i = 0; i < y[k].size(); ++i) y[k][i] += alpha * x[k][i];
  }
}

void scale_field(Field& y, double alpha) {
  for (auto& row : y) {
    for (auto& z : row) z *= alpha;
  }
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

void check_same_shape(const CondensateState& s) {
  for (const auto& f : s.modes) {
    if (!(f.grid == s.grid) || f.values.size() != s.grid.size()) {
      throw std::invalid_argument("CondensateState: modes must share the state grid");
    }
  }
  if (s.modes.size() != s.range.size()) {
    throw std::invalid_argument("CondensateState: mode count does not match the range");
  }
}

}  // namespace

ModeRange default_mode_range(double omega) {
  const int center = static_cast<int>(std::lround(omega));
  const int half = static_cast<int>(std::ceil(2.0 * std::sqrt(omega)));
  return ModeRange{std::max(1, center - half), center + half};
}

CondensateState::CondensateState(const ScaledParams& p, ModeRange r, const RadialGrid& g)
    : params(p), range(r), grid(g) {
  validate(p);
  if (r.size() == 0) throw std::invalid_argument("CondensateState: empty mode range");
  modes.assign(r.size(), ComplexField(g));
}

ComplexField& CondensateState::mode(int n) {
  if (!range.contains(n)) throw std::out_of_range("CondensateState: mode outside range");
  return modes[static_cast<std::size_t>(n - range.lo)];
}

const ComplexField& CondensateState::mode(int n) const {
  if (!range.contains(n)) throw std::out_of_range("CondensateState: mode outside range");
  return modes[static_cast<std::size_t>(n - range.lo)];
}

void CondensateState::refresh() {
  total_mass = gvortex::total_mass(*this);
  energy_cache.reset();
}

double total_mass(const CondensateState& s) {
  double m = 0.0;
  for (const auto& f : s.modes) m += mass(f);
  return m;
}

CondensateState normalized(const CondensateState& s) {
  const double m = total_mass(s);
  if (!(m > 0.0)) throw std::invalid_argument("normalized: zero state");
  CondensateState out = s;
  const double c = 1.0 / std::sqrt(m);
  for (auto& f : out.modes) {
    for (auto& z : f.values) z *= c;
  }
  out.refresh();
  return out;
}

std::vector<std::vector<cplx>> density_coefficients(const CondensateState& s) {
  check_same_shape(s);
  const std::size_t M = s.mode_count(), N = s.grid.size();
  std::vector<std::vector<cplx>> c(M, std::vector<cplx>(N, cplx(0.0, 0.0)));
  for (std::size_t i = 0; i < N; ++i) {
    for (std::size_t m = 0; m < M; ++m) {
      cplx acc(0.0, 0.0);
      for (std::size_t p = 0; p + m < M; ++p) acc += s.modes[p + m][i] * std::conj(s.modes[p][i]);
      c[m][i] = acc;
    }
  }
  return c;
}

double quartic_integral(const CondensateState& s) {
  const auto c = density_coefficients(s);
  const std::size_t N = s.grid.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double sq = std::norm(c[0][i]);
    for (std::size_t m = 1; m < c.size(); ++m) sq += 2.0 * std::norm(c[m][i]);
    acc += trapezoid_weight(i, N) * s.grid.r(i) * sq;
  }
  return kTwoPi * acc * s.grid.spacing();
}

double quartic_lower_bound(const CondensateState& s) {
  check_same_shape(s);
  const std::size_t N = s.grid.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    double rho = 0.0;
    for (const auto& f : s.modes) rho += std::norm(f[i]);
    acc += trapezoid_weight(i, N) * s.grid.r(i) * rho * rho;
  }
  return kTwoPi * acc * s.grid.spacing();
}

EnergyBreakdown energy_F_omega(const CondensateState& s) {
  check_same_shape(s);
  Engine eng(s.params, s.range, s.grid);
  const Field v = to_field(s);
  EnergyBreakdown b;
  b.per_mode = eng.quadratic(v, nullptr);
  for (double x : b.per_mode) b.quadratic += x;
  b.quartic = quartic_integral(s);
  b.total = b.quadratic + s.params.G * b.quartic;
  return b;
}

double evaluate_energy(CondensateState& s) {
  s.energy_cache = energy_F_omega(s);
  return s.energy_cache->total;
}

std::vector<ComplexField> energy_gradient(const CondensateState& s) {
  check_same_shape(s);
  Engine eng(s.params, s.range, s.grid);
  const auto ev = eng.evaluate(to_field(s));
  std::vector<ComplexField> out(s.mode_count(), ComplexField(s.grid));
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    for (std::size_t i = 1; i + 1 < s.grid.size(); ++i) {
      out[k][i] = ev.grad[k][i] / std::sqrt(kTwoPi * s.grid.r(i));
    }
  }
  return out;
}

RadialGrid shared_grid(const ScaledParams& p, ModeRange range, const GridOptions& options) {
  validate(p);
  if (range.size() == 0 || range.lo <= 0) {
    throw std::invalid_argument("shared_grid: needs a nonempty range of positive modes");
  }
  const int center = std::clamp(static_cast<int>(std::lround(p.omega)), range.lo, range.hi);
  const auto mc = ModeProblem::make(center, p.omega, p.D_Omega);
  const auto mlo = ModeProblem::make(range.lo, p.omega, p.D_Omega);
  const auto mhi = ModeProblem::make(range.hi, p.omega, p.D_Omega);
  const double W = options.width_multiplier;
  if (W < 6.0) throw std::invalid_argument("shared_grid: width multiplier below 6");
  const double reach = W * std::max({mc.h_n, mlo.h_n, mhi.h_n});
  const double lo = std::max(kGridLeftClamp, mlo.R_n - reach);
  const double hi = mhi.R_n + reach;
  // Same spacing as a single-mode grid around the central well.
  const auto nominal = static_cast<std::size_t>(std::ceil(W * static_cast<double>(options.points_per_width)));
  const double spacing = 2.0 * W * mc.h_n / static_cast<double>(nominal - 1);
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing)) + 1;
  return RadialGrid(lo, hi, std::max(n, RadialGrid::kMinPoints));
}

std::vector<ModeRecord> linear_table(const ScaledParams& p, ModeRange range,
                                     const RadialGrid& grid) {
  std::vector<ModeRecord> out(range.size());
  parallel_for(range.size(), [&](std::size_t k) {
    ModeRecord rec;
    rec.mode = ModeProblem::make(range.lo + static_cast<int>(k), p.omega, p.D_Omega);
    rec.grid = grid;
    rec.eigen = solve_linear_modes(rec.mode, grid, 2);
    out[k] = std::move(rec);
  });
  return out;
}

CondensateState initial_state(const ScaledParams& p, ModeRange range, const RadialGrid& grid,
                              const std::vector<ModeRecord>& table, std::uint64_t seed) {
  if (table.size() != range.size()) throw std::invalid_argument("initial_state: table size mismatch");
  CondensateState s(p, range, grid);
  std::mt19937_64 rng(seed);
  const double center = std::round(p.omega);
  const double width = std::sqrt(p.omega) / 4.0;
  for (std::size_t k = 0; k < range.size(); ++k) {
    const int n = range.lo + static_cast<int>(k);
    if (table[k].mode.n != n || !(table[k].eigen.g1.grid == grid)) {
      throw std::invalid_argument("initial_state: table does not match range and grid");
    }
    const double dn = static_cast<double>(n) - center;
    const double weight = std::exp(-0.5 * dn * dn / (width * width));
    // 53 random bits mapped to [0, 1).
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const cplx phase = std::polar(1.0, kTwoPi * u);
    const double amp = std::sqrt(weight);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      s.modes[k][i] = amp * phase * table[k].eigen.g1[i];
    }
  }
  return normalized(s);
}

CondensateState minimize_full(const CondensateState& init, const FlowParams& flow,
                              const std::vector<ModeRecord>& table, MinimizeReport* report) {
  validate(flow);
  check_same_shape(init);
  if (std::abs(total_mass(init) - 1.0) > 1e-9) {
    throw std::invalid_argument("minimize_full: initial state must have unit mass");
  }
  if (table.size() != init.mode_count()) {
    throw std::invalid_argument("minimize_full: linear table does not cover the mode range");
  }
  std::size_t low = 0;
  for (std::size_t k = 1; k < table.size(); ++k) {
    if (table[k].eigen.lambda1 < table[low].eigen.lambda1) low = k;
  }
  const double sigma = table[low].eigen.lambda1 -
                       flow.shift_margin * (table[low].eigen.lambda2 - table[low].eigen.lambda1);

  Engine eng(init.params, init.range, init.grid);
  const double dx = eng.spacing();
  const std::size_t M = eng.modes(), N = eng.nodes();

  auto renormalize = [&](Field& v) {
    const double nrm = std::sqrt(field_dot(v, v, dx));
    if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("minimize_full: lost the state");
    scale_field(v, 1.0 / nrm);
  };

  Field v = to_field(init);
  renormalize(v);
  auto cur = eng.evaluate(v);

  // Relaxation: semi-implicit normalized gradient flow
  // (1 + dt (H_n + 2 G |u|^2)) v_new = v, followed by renormalization.
  const double rdt = flow.relax_dt;
  const auto relax_steps = static_cast<std::size_t>(std::ceil(flow.relax_time / rdt - 1e-9));
  for (std::size_t k = 0; k < relax_steps; ++k) {
    std::vector<double> extra(N, 0.0);
    for (std::size_t i = 1; i + 1 < N; ++i) extra[i] = 2.0 * eng.beta() * cur.density[i];
    Field next(M, std::vector<cplx>(N));
    parallel_for(M, [&](std::size_t kk) {
      std::vector<double> re(N), im(N), xre(N), xim(N);
      for (std::size_t i = 0; i < N; ++i) {
        re[i] = v[kk][i].real() / rdt;
        im[i] = v[kk][i].imag() / rdt;
      }
      eng.ham(kk).solve_shifted(-1.0 / rdt, re, xre, extra);
      eng.ham(kk).solve_shifted(-1.0 / rdt, im, xim, extra);
      for (std::size_t i = 0; i < N; ++i) next[kk][i] = cplx(xre[i], xim[i]);
    });
    renormalize(next);
    v = std::move(next);
    cur = eng.evaluate(v);
  }

  Field res(M, std::vector<cplx>(N)), z(M, std::vector<cplx>(N)), dir, prev_res;
  double prev_rz = 0.0;
  bool have_prev = false;
  double step = flow.dt;
  std::deque<double> history{cur.energy};
  MinimizeReport rep;
  double mu = 0.0, res_norm = 0.0;
  std::size_t it = 0;

  for (;; ++it) {
    mu = field_dot(v, cur.grad, dx);
    for (std::size_t k = 0; k < M; ++k) {
      for (std::size_t i = 0; i < N; ++i) res[k][i] = cur.grad[k][i] - mu * v[k][i];
    }
    res_norm = std::sqrt(field_dot(res, res, dx));
    const bool energy_flat =
        history.size() > flow.window &&
        std::abs(history.front() - history.back()) < flow.tol_energy * std::abs(cur.energy);
    if ((energy_flat && res_norm < flow.tol_residual * std::abs(mu)) ||
        res_norm <= 1e-12 * std::abs(mu)) {
      break;
    }
    if (it >= flow.max_iter) throw std::runtime_error("minimize_full: no convergence within max_iter");

    // Preconditioned residual, one real tridiagonal solve per component.
    std::vector<double> extra(N, 0.0);
    for (std::size_t i = 1; i + 1 < N; ++i) extra[i] = 2.0 * eng.beta() * cur.density[i];
    parallel_for(M, [&](std::size_t k) {
      std::vector<double> re(N), im(N), xre(N), xim(N);
      for (std::size_t i = 0; i < N; ++i) {
        re[i] = res[k][i].real();
        im[i] = res[k][i].imag();
      }
      eng.ham(k).solve_shifted(sigma, re, xre, extra);
      eng.ham(k).solve_shifted(sigma, im, xim, extra);
      for (std::size_t i = 0; i < N; ++i) z[k][i] = cplx(xre[i], xim[i]);
    });
    const double rz = field_dot(res, z, dx);

    // Polak-Ribiere (nonnegative) conjugation of the preconditioned direction.
    double beta_cg = 0.0;
    if (have_prev && prev_rz > 0.0) {
      double num = field_dot(z, res, dx) - field_dot(z, prev_res, dx);
      beta_cg = std::max(0.0, num / prev_rz);
    }
    Field p = z;
    scale_field(p, -1.0);
    if (beta_cg > 0.0) axpy(p, beta_cg, dir);
    axpy(p, -field_dot(v, p, dx), v);
    double slope = 2.0 * field_dot(res, p, dx);
    if (!(slope < 0.0)) {
      p = z;
      scale_field(p, -1.0);
      axpy(p, -field_dot(v, p, dx), v);
      slope = 2.0 * field_dot(res, p, dx);
      beta_cg = 0.0;
    }

    auto trial_at = [&](double t) {
      Field w = v;
      axpy(w, t, p);
      renormalize(w);
      return w;
    };

    // Quadratic-model line search with halving.
    double t = step;
    bool accepted = false;
    for (int halving = 0; halving <= flow.max_halvings && !accepted; ++halving) {
      Field w = trial_at(t);
      const double e1 = eng.energy(w);
      double best_t = t, best_e = e1;
      const double curv = (e1 - cur.energy - slope * t) / (t * t);
      if (curv > 0.0) {
        const double t_star = -slope / (2.0 * curv);
        if (t_star > 0.0 && std::abs(t_star - t) > 1e-3 * t && t_star < 8.0 * t) {
          Field w2 = trial_at(t_star);
          const double e2 = eng.energy(w2);
          if (e2 < best_e) {
            best_e = e2;
            best_t = t_star;
            w = std::move(w2);
          }
        }
      }
      if (best_e <= cur.energy + 1e-14 * std::abs(cur.energy)) {
        if (best_t != t) w = trial_at(best_t);
        v = std::move(w);
        cur = eng.evaluate(v);
        step = std::min(4.0 * flow.dt, std::max(best_t, 1e-6 * flow.dt));
        accepted = true;
      } else {
        t *= 0.5;
        ++rep.rejected_steps;
      }
    }
    if (!accepted) {
      throw std::runtime_error("minimize_full: energy increase persists after step halving");
    }
    dir = std::move(p);
    prev_res = res;
    prev_rz = rz;
    have_prev = true;
    history.push_back(cur.energy);
    if (history.size() > flow.window + 1) history.pop_front();
  }

  CondensateState out = init;
  out.energy_cache.reset();
  from_field(v, out);
  rep.iterations = it;
  rep.energy = cur.energy;
  rep.mu = mu;
  rep.el_residual = res_norm;
  if (report) *report = rep;
  return out;
}

double chemical_potential(const CondensateState& s) {
  const auto b = energy_F_omega(s);
  return b.total + s.params.G * b.quartic;
}

ModeMassSpectrum mode_mass_spectrum(const CondensateState& s, int n_star) {
  ModeMassSpectrum out;
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    const int n = s.range.lo + static_cast<int>(k);
    const double m = mass(s.modes[k]);
    out.n.push_back(n);
    out.mass.push_back(m);
    out.total += m;
    const double d = static_cast<double>(n - n_star);
    out.moment += m * d * d;
  }
  return out;
}

double density_deviation(const CondensateState& s, const RealField& ref) {
  if (!(ref.grid == s.grid)) throw std::invalid_argument("density_deviation: grid mismatch");
  const auto c = density_coefficients(s);
  const std::size_t N = s.grid.size();
  double acc = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d0 = c[0][i].real() - ref[i] * ref[i];
    double sq = d0 * d0;
    for (std::size_t m = 1; m < c.size(); ++m) sq += 2.0 * std::norm(c[m][i]);
    acc += trapezoid_weight(i, N) * s.grid.r(i) * sq;
  }
  return std::sqrt(kTwoPi * acc * s.grid.spacing());
}

}  // namespace gvortex
