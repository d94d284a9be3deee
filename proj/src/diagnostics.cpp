#include "gvortex/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "gvortex/fit.hpp"
#include "gvortex/parallel.hpp"

namespace gvortex {

namespace {

double global_max(const PolarSamples& s) {
  double m = 0.0;
  for (const auto& z : s.values) m = std::max(m, std::abs(z));
  return m;
}

std::vector<cplx> phase_table(const ModeRange& range, std::size_t n_theta, int sign) {
  // table[j * M + k] = exp(sign i n_k theta_j)
  const std::size_t M = range.size();
  std::vector<cplx> t(n_theta * M);
  for (std::size_t j = 0; j < n_theta; ++j) {
    for (std::size_t k = 0; k < M; ++k) {
      const long n = range.lo + static_cast<long>(k);
      // Reduce n j modulo n_theta before scaling so the angle stays exact.
      const long nt = static_cast<long>(n_theta);
      long q = (n * static_cast<long>(j)) % nt;
      if (q < 0) q += nt;
      const double a = kTwoPi * static_cast<double>(q) / static_cast<double>(n_theta);
      t[j * M + k] = std::polar(1.0, sign * a);
    }
  }
  return t;
}

// Values on the circle of radius rho, linear in r between grid nodes.
std::vector<cplx> circle(const PolarSamples& s, double rho) {
  const auto& g = s.grid;
  if (!(rho >= g.r_min()) || !(rho <= g.r_max())) {
    throw std::domain_error("winding_number: radius " + std::to_string(rho) + " outside the grid");
  }
  const double pos = (rho - g.r_min()) / g.spacing();
  std::size_t i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= g.size()) i = g.size() - 2;
  const double t = pos - static_cast<double>(i);
  std::vector<cplx> c(s.n_theta);
  for (std::size_t j = 0; j < s.n_theta; ++j) c[j] = (1.0 - t) * s.at(i, j) + t * s.at(i + 1, j);
  return c;
}

struct RowStats {
  std::vector<double> amax, amin;
};

RowStats row_stats(const PolarSamples& s) {
  const std::size_t N = s.grid.size();
  RowStats st{std::vector<double>(N, 0.0), std::vector<double>(N, 0.0)};
  for (std::size_t i = 0; i < N; ++i) {
    double hi = 0.0, lo = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < s.n_theta; ++j) {
      const double a = std::abs(s.at(i, j));
      hi = std::max(hi, a);
      lo = std::min(lo, a);
    }
    st.amax[i] = hi;
    st.amin[i] = lo;
  }
  return st;
}

// Zero of the bilinear interpolant on the cell with corners
// u00 = (i, j), u10 = (i+1, j), u01 = (i, j+1), u11 = (i+1, j+1).
bool bilinear_zero(cplx u00, cplx u10, cplx u01, cplx u11, double s0, double t0, double& s_out,
                   double& t_out) {
  double s = s0, t = t0;
  for (int it = 0; it < 30; ++it) {
    const cplx f = u00 * (1 - s) * (1 - t) + u10 * s * (1 - t) + u01 * (1 - s) * t + u11 * s * t;
    const cplx fs = (u10 - u00) * (1 - t) + (u11 - u01) * t;
    const cplx ft = (u01 - u00) * (1 - s) + (u11 - u10) * s;
    const double det = fs.real() * ft.imag() - fs.imag() * ft.real();
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double ds = (f.real() * ft.imag() - f.imag() * ft.real()) / det;
    const double dt = (fs.real() * f.imag() - fs.imag() * f.real()) / det;
    s -= ds;
    t -= dt;
    if (std::abs(ds) + std::abs(dt) < 1e-14) break;
  }
  if (!(s >= -1e-9 && s <= 1 + 1e-9 && t >= -1e-9 && t <= 1 + 1e-9)) return false;
  s_out = s;
  t_out = t;
  return true;
}

}  // namespace

double PolarSamples::theta(std::size_t j) const {
  return kTwoPi * static_cast<double>(j) / static_cast<double>(n_theta);
}

std::size_t default_angular_points(const CondensateState& s) {
  const std::size_t M = s.mode_count();
  const auto nmax = static_cast<std::size_t>(std::max(std::abs(s.range.lo), std::abs(s.range.hi)));
  const std::size_t need = std::max<std::size_t>({4 * M, 4 * nmax, 4});
  std::size_t p = 1;
  while (p < need) p <<= 1;
  return p;
}

PolarSamples reconstruct_2d(const CondensateState& s, std::size_t n_theta) {
  const std::size_t M = s.mode_count();
  if (M == 0) throw std::invalid_argument("reconstruct_2d: empty state");
  if (n_theta < 4 * M) {
    throw std::invalid_argument("reconstruct_2d: undersampled angular grid (n_theta = " +
                                std::to_string(n_theta) + " < 4 x " + std::to_string(M) + " modes)");
  }
  PolarSamples out{s.grid, n_theta, std::vector<cplx>(s.grid.size() * n_theta)};
  const auto tab = phase_table(s.range, n_theta, +1);
  parallel_for(s.grid.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < n_theta; ++j) {
      cplx acc = 0.0;
      const cplx* e = &tab[j * M];
      for (std::size_t k = 0; k < M; ++k) acc += s.modes[k][i] * e[k];
      out.values[i * n_theta + j] = acc;
    }
  });
  return out;
}

CondensateState analyze_2d(const PolarSamples& samples, const CondensateState& like) {
  if (!(samples.grid == like.grid)) throw std::invalid_argument("analyze_2d: grid mismatch");
  CondensateState out(like.params, like.range, like.grid);
  const std::size_t M = like.mode_count(), nt = samples.n_theta;
  const auto tab = phase_table(like.range, nt, -1);
  parallel_for(like.grid.size(), [&](std::size_t i) {
    for (std::size_t k = 0; k < M; ++k) {
      cplx acc = 0.0;
      for (std::size_t j = 0; j < nt; ++j) acc += samples.at(i, j) * tab[j * M + k];
      out.modes[k][i] = acc / static_cast<double>(nt);
    }
  });
  out.refresh();
  return out;
}

WindingResult winding_number(const PolarSamples& samples, double radius) {
  const auto c = circle(samples, radius);
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& z : c) lo = std::min(lo, std::abs(z));
  const double hi = global_max(samples);
  if (!(lo > 1e-6 * hi)) {
    throw std::domain_error("winding_number: |u| nearly vanishes on the circle r = " +
                            std::to_string(radius));
  }
  double total = 0.0;
  for (std::size_t j = 0; j < c.size(); ++j) total += std::arg(c[(j + 1) % c.size()] / c[j]);
  const double turns = total / kTwoPi;
  WindingResult w;
  w.winding = static_cast<int>(std::lround(turns));
  w.rounding_residual = std::abs(turns - w.winding);
  w.radius = radius;
  return w;
}

HoleCheck hole_check(const PolarSamples& samples, const CondensateState& s, double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("hole_check: delta must be non-negative");
  const double omega = s.params.omega;
  const double bound = delta * std::log(omega) / omega;
  HoleCheck h;
  h.delta = delta;
  h.min_in_annulus = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.grid.size(); ++i) {
    const double d = samples.grid.r(i) - 1.0;
    const bool in_hole = d * d >= bound;
    for (std::size_t j = 0; j < samples.n_theta; ++j) {
      const double a = std::abs(samples.at(i, j));
      h.max_overall = std::max(h.max_overall, a);
      if (in_hole) {
        h.max_in_hole = std::max(h.max_in_hole, a);
      } else {
        h.min_in_annulus = std::min(h.min_in_annulus, a);
      }
    }
  }
  if (!std::isfinite(h.min_in_annulus)) h.min_in_annulus = 0.0;
  h.pass = h.max_in_hole <= 0.1 * h.max_overall;
  return h;
}

ZeroSet detect_zeros(const PolarSamples& samples, double threshold) {
  const std::size_t N = samples.grid.size(), nt = samples.n_theta;
  ZeroSet z;
  z.threshold = threshold;
  z.min_ring_distance_sq = std::numeric_limits<double>::infinity();
  const double cut = threshold * global_max(samples);
  auto absu = [&](std::size_t i, std::size_t j) { return std::abs(samples.at(i, j)); };
  const double dr = samples.grid.spacing(), dth = kTwoPi / static_cast<double>(nt);
  for (std::size_t i = 1; i + 1 < N; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      const double a = absu(i, j);
      if (!(a < cut)) continue;
      bool is_min = true, strict = false;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const std::size_t jj = (j + nt + static_cast<std::size_t>(dj + 1) - 1) % nt;
          const double b = absu(i + static_cast<std::size_t>(di + 1) - 1, jj);
          if (b < a) {
            is_min = false;
            break;
          }
          if (b > a) strict = true;
        }
      }
      if (!is_min || !strict) continue;
      double r = samples.grid.r(i), th = samples.theta(j);
      for (int ci = -1; ci <= 0; ++ci) {
        bool found = false;
        for (int cj = -1; cj <= 0; ++cj) {
          const std::size_t i0 = i + static_cast<std::size_t>(ci + 1) - 1;
          const std::size_t j0 = (j + nt + static_cast<std::size_t>(cj + 1) - 1) % nt;
          const std::size_t j1 = (j0 + 1) % nt;
          double ss = 0.0, tt = 0.0;
          if (bilinear_zero(samples.at(i0, j0), samples.at(i0 + 1, j0), samples.at(i0, j1),
                            samples.at(i0 + 1, j1), -static_cast<double>(ci), -static_cast<double>(cj),
                            ss, tt)) {
            r = samples.grid.r(i0) + ss * dr;
            th = samples.theta(j0) + tt * dth;
            found = true;
            break;
          }
        }
        if (found) break;
      }
      ++z.count;
      if (z.points.size() < kMaxListedZeros) z.points.emplace_back(r, th);
      z.min_ring_distance_sq = std::min(z.min_ring_distance_sq, (r - 1.0) * (r - 1.0));
    }
  }
  return z;
}

AnnulusGeometry annulus_geometry(const PolarSamples& samples, double threshold) {
  const auto st = row_stats(samples);
  const std::size_t N = st.amax.size();
  const std::size_t p = static_cast<std::size_t>(
      std::max_element(st.amax.begin(), st.amax.end()) - st.amax.begin());
  const double cut = threshold * st.amax[p];
  if (!(st.amin[p] > cut)) throw std::domain_error("annulus_geometry: no zero-free annulus");
  AnnulusGeometry a;
  std::size_t lo = p, hi = p;
  while (lo > 0 && st.amin[lo - 1] > cut) --lo;
  while (hi + 1 < N && st.amin[hi + 1] > cut) ++hi;
  a.r_lo = samples.grid.r(lo);
  a.r_hi = samples.grid.r(hi);
  std::size_t hin = p, hout = p;
  while (hin > 0 && st.amax[hin] > cut) --hin;
  while (hout + 1 < N && st.amax[hout] > cut) ++hout;
  a.hole_inner_radius = samples.grid.r(hin);
  a.hole_outer_radius = samples.grid.r(hout);
  return a;
}

GaussianFit gaussian_profile_fit(std::span<const double> abs_values, const RadialGrid& grid) {
  if (abs_values.size() != grid.size()) throw std::invalid_argument("gaussian_profile_fit: size mismatch");
  const double top = *std::max_element(abs_values.begin(), abs_values.end());
  if (!(top > 0.0)) throw std::domain_error("gaussian_profile_fit: zero profile");
  std::vector<double> x, y;
  std::size_t first = abs_values.size(), last = 0;
  for (std::size_t i = 0; i < abs_values.size(); ++i) {
    if (abs_values[i] > 0.1 * top) {
      first = std::min(first, i);
      last = i;
      x.push_back(grid.r(i));
      y.push_back(std::log(abs_values[i]));
    }
  }
  if (x.size() != last - first + 1) throw std::domain_error("gaussian_profile_fit: non-unimodal profile");
  if (x.size() < 5) throw std::domain_error("gaussian_profile_fit: fewer than 5 points above 0.1 max");
  const PolyFit f = fit_polynomial(x, y, 2);
  const double t1 = f.centered[1], t2 = f.centered[2];
  if (!(t2 < 0.0)) throw std::domain_error("gaussian_profile_fit: fitted parabola is not concave");
  GaussianFit g;
  g.center = quadratic_vertex(f);
  g.width = f.scale / std::sqrt(2.0 * -t2);
  g.amplitude = std::exp(f.centered[0] - t1 * t1 / (4.0 * t2));
  g.r_squared = f.r_squared;
  return g;
}

DecayFit decay_fit(const PolarSamples& samples, const CondensateState& s) {
  const auto st = row_stats(samples);
  const double top = *std::max_element(st.amax.begin(), st.amax.end());
  const double omega = s.params.omega;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < st.amax.size(); ++i) {
    const double r = samples.grid.r(i);
    const double a = st.amax[i];
    if (r >= 0.3 && a >= 1e-8 * top && a <= 0.1 * top) {
      x.push_back(omega * (r - 1.0) * (r - 1.0));
      y.push_back(std::log(a));
    }
  }
  if (x.size() < 5) throw std::domain_error("decay_fit: insufficient dynamic range");
  const PolyFit f = fit_polynomial(x, y, 1);
  DecayFit d;
  d.sigma = -f.coeffs[1];
  d.r_squared = f.r_squared;
  d.points = x.size();
  return d;
}

GroundProjection project_ground_modes(const CondensateState& s, const std::vector<ModeRecord>& table,
                                      const ModeWindow& window) {
  GroundProjection p;
  const std::size_t N = s.grid.size();
  double res2 = 0.0;
  for (std::size_t k = 0; k < s.mode_count(); ++k) {
    const int n = s.range.lo + static_cast<int>(k);
    if (!std::binary_search(window.indices.begin(), window.indices.end(), n)) {
      res2 += mass(s.modes[k]);
    }
  }
  for (int n : window.indices) {
    if (!s.range.contains(n)) continue;
    auto it = std::find_if(table.begin(), table.end(), [&](const ModeRecord& m) {
      return m.mode.n == n && m.grid == s.grid;
    });
    if (it == table.end()) {
      throw std::invalid_argument("project_ground_modes: missing eigenpair for n = " + std::to_string(n));
    }
    const auto& f = s.mode(n);
    const auto& g = it->eigen.g1;
    std::vector<double> re(N), im(N);
    for (std::size_t i = 0; i < N; ++i) {
      re[i] = f[i].real() * g[i];
      im[i] = f[i].imag() * g[i];
    }
    const cplx a = kTwoPi * cplx(integrate_rdr(re, s.grid), integrate_rdr(im, s.grid));
    ComplexField diff(s.grid);
    for (std::size_t i = 0; i < N; ++i) diff[i] = f[i] - a * g[i];
    res2 += mass(diff);
    p.n.push_back(n);
    p.coefficients.push_back(a);
  }
  p.residual = std::sqrt(res2);
  return p;
}

InteractionReport interaction_lower_bound_report(const CondensateState& s, const RealField& g1_nstar,
                                                 int n_star, double c1, double c2) {
  if (!(g1_nstar.grid == s.grid)) throw std::invalid_argument("interaction_lower_bound_report: grid mismatch");
  InteractionReport r;
  r.c1 = c1;
  r.c2 = c2;
  r.quartic = quartic_integral(s);
  std::vector<double> g4(g1_nstar.size());
  for (std::size_t i = 0; i < g4.size(); ++i) g4[i] = std::pow(g1_nstar[i], 4);
  r.leading = kTwoPi * integrate_rdr(g4, s.grid);
  r.moment = mode_mass_spectrum(s, n_star).moment;
  const double corr = c1 * r.moment / std::sqrt(s.params.omega);
  r.lower = r.leading - corr - c2;
  r.c2_required = r.leading - corr - r.quartic;
  r.lower_bound_holds = r.quartic >= r.lower;
  r.upper_bound_holds = r.quartic <= r.leading * (1.0 + 1e-12);
  return r;
}

RadialProfile radial_profile(const PolarSamples& samples) {
  const auto st = row_stats(samples);
  RadialProfile p;
  p.r = samples.grid.nodes();
  p.abs_max = st.amax;
  p.abs_min = st.amin;
  p.winding.resize(p.r.size(), 0.0);
  for (std::size_t i = 0; i < p.r.size(); ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < samples.n_theta; ++j) {
      const cplx a = samples.at(i, j), b = samples.at(i, (j + 1) % samples.n_theta);
      if (a != 0.0 && b != 0.0) total += std::arg(b / a);
    }
    p.winding[i] = total / kTwoPi;
  }
  return p;
}

VortexReport analyze_vortex(const CondensateState& s, const std::vector<ModeRecord>& table,
                            const ModeWindow& window, double hole_delta, std::size_t n_theta) {
  if (n_theta == 0) n_theta = default_angular_points(s);
  const PolarSamples u = reconstruct_2d(s, n_theta);
  VortexReport rep;
  const auto geo = annulus_geometry(u);
  rep.hole_inner_radius = geo.hole_inner_radius;
  rep.hole_outer_radius = geo.hole_outer_radius;
  rep.zero_free_annulus = {geo.r_lo, geo.r_hi};

  const auto w1 = winding_number(u, 1.0);
  rep.winding_at_r1 = w1.winding;
  rep.winding_residual_at_r1 = w1.rounding_residual;
  rep.windings_unanimous = true;
  for (std::size_t k = 0; k < kWindingRadii; ++k) {
    const double rho = geo.r_lo + (static_cast<double>(k) + 0.5) / kWindingRadii * (geo.r_hi - geo.r_lo);
    rep.annulus_windings.push_back(winding_number(u, rho));
    if (rep.annulus_windings.back().winding != rep.annulus_windings.front().winding) {
      rep.windings_unanimous = false;
    }
  }

  std::vector<double> at0(u.grid.size());
  for (std::size_t i = 0; i < at0.size(); ++i) at0[i] = std::abs(u.at(i, 0));
  rep.gaussian_fit = gaussian_profile_fit(at0, u.grid);
  rep.decay = decay_fit(u, s);
  rep.projection_residual = project_ground_modes(s, table, window).residual;
  rep.zeros = detect_zeros(u);
  rep.hole = hole_check(u, s, hole_delta);
  return rep;
}

}  // namespace gvortex
