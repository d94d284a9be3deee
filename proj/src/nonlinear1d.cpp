#include "gvortex/nonlinear1d.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <string>

#include "gvortex/parallel.hpp"

namespace gvortex {

void validate(const FlowParams& f) {
  if (!(f.dt > 0.0) || f.max_iter == 0 || !(f.tol_energy > 0.0) || !(f.tol_residual > 0.0) ||
      f.seed == 0 || f.window == 0 || f.max_halvings <= 0 || !(f.shift_margin > 0.0) ||
      !(f.relax_dt > 0.0) || !(f.relax_time >= 0.0)) {
    throw std::invalid_argument("FlowParams: fields must be positive (relax_time non-negative)");
  }
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b, double dx) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s * dx;
}

// Delta * sum v^4 / r
double quartic_sum(const std::vector<double>& v, const RadialGrid& grid) {
  double s = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const double v2 = v[i] * v[i];
    s += v2 * v2 / grid.r(i);
  }
  return s * grid.spacing();
}

struct Evaluation {
  double energy = 0.0;
  double quartic = 0.0;  // beta * Delta sum v^4 / r
  std::vector<double> gradient;
};

// Energy and half-gradient of E(v) = <v, H v> + beta Delta sum v^4 / r.
Evaluation evaluate(const RadialHamiltonian& h, const std::vector<double>& v, double beta) {
  const auto& grid = h.grid();
  Evaluation e;
  e.gradient.assign(v.size(), 0.0);
  h.apply(v, e.gradient);
  const double quad = dot(v, e.gradient, grid.spacing());
  e.quartic = beta * quartic_sum(v, grid);
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    e.gradient[i] += 2.0 * beta * v[i] * v[i] * v[i] / grid.r(i);
  }
  e.energy = quad + e.quartic;
  return e;
}

void normalize_discrete(std::vector<double>& v, double dx) {
  const double nrm = discrete_norm(v, dx);
  if (!(nrm > 0.0) || !std::isfinite(nrm)) throw std::runtime_error("nonlinear flow: lost the state");
  for (double& x : v) x /= nrm;
}

}  // namespace

double energy_En(const RealField& f, const ModeProblem& m, double G) {
  if (f.values.size() != f.grid.size()) throw std::invalid_argument("energy_En: grid mismatch");
  RadialHamiltonian h(f.grid, symmetrized_potential(m, f.grid));
  const auto v = to_symmetric(f);
  return evaluate(h, v, G / kTwoPi).energy;
}

NonlinearResult solve_ground_state(const ModeProblem& m, double G, const RadialGrid& grid,
                                   const FlowParams& flow, const EigenResult* linear) {
  validate(flow);
  if (!(G >= 0.0)) throw std::invalid_argument("solve_ground_state: G must be nonnegative");
  EigenResult own;
  if (linear == nullptr || linear->count < 2 || !(linear->g1.grid == grid)) {
    own = solve_linear_modes(m, grid, 2);
    linear = &own;
  }
  RadialHamiltonian h(grid, symmetrized_potential(m, grid));
  const double dx = grid.spacing();
  const double beta = G / kTwoPi;
  const double sigma = linear->lambda1 - flow.shift_margin * (linear->lambda2 - linear->lambda1);

  std::vector<double> v = to_symmetric(linear->g1);
  normalize_discrete(v, dx);
  Evaluation cur = evaluate(h, v, beta);

  std::deque<double> history{cur.energy};
  std::vector<double> res(v.size()), dir(v.size()), trial(v.size()), extra(v.size(), 0.0);
  double step = flow.dt;
  std::size_t it = 0;
  double mu = 0.0, res_norm = 0.0;
  for (;; ++it) {
    mu = dot(v, cur.gradient, dx);
    for (std::size_t i = 0; i < v.size(); ++i) res[i] = cur.gradient[i] - mu * v[i];
    res_norm = discrete_norm(res, dx);
    const bool energy_flat =
        history.size() > flow.window &&
        std::abs(history.front() - history.back()) < flow.tol_energy * std::abs(cur.energy);
    const bool residual_small = res_norm < flow.tol_residual * std::abs(cur.energy);
    if ((energy_flat && residual_small) || res_norm <= 1e-13 * std::abs(cur.energy)) break;
    if (it >= flow.max_iter) {
      throw std::runtime_error("solve_ground_state: max iterations reached for n = " +
                               std::to_string(m.n));
    }

    for (std::size_t i = 1; i + 1 < v.size(); ++i) extra[i] = 2.0 * beta * v[i] * v[i] / grid.r(i);
    h.solve_shifted(sigma, res, dir, extra);

    bool accepted = false;
    for (int halving = 0; halving <= flow.max_halvings; ++halving) {
      for (std::size_t i = 0; i < v.size(); ++i) trial[i] = v[i] - step * dir[i];
      normalize_discrete(trial, dx);
      Evaluation next = evaluate(h, trial, beta);
      if (next.energy <= cur.energy + 1e-14 * std::abs(cur.energy)) {
        v.swap(trial);
        cur = std::move(next);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      throw std::runtime_error("solve_ground_state: energy increase persists after step halving");
    }
    step = std::min(flow.dt, 2.0 * step);
    history.push_back(cur.energy);
    if (history.size() > flow.window + 1) history.pop_front();
  }

  double sum = 0.0;
  for (double x : v) sum += x;
  if (sum < 0.0) {
    for (double& x : v) x = -x;
  }
  NonlinearResult out;
  out.n = m.n;
  out.gamma_n = cur.energy;
  out.Psi_n = from_symmetric(grid, v);
  out.multiplier = cur.energy + cur.quartic;
  out.iterations = it;
  out.lambda1 = linear->lambda1;
  for (double x : out.Psi_n.values) {
    if (x < -1e-10) {
      throw std::runtime_error("solve_ground_state: minimizer changes sign for n = " +
                               std::to_string(m.n));
    }
  }
  out.el_residual = el_residual(out, m, G);
  return out;
}

double el_residual(const NonlinearResult& res, const ModeProblem& m, double G) {
  const auto& grid = res.Psi_n.grid;
  RadialHamiltonian h(grid, symmetrized_potential(m, grid));
  // In w = sqrt(2 pi r) f the equation reads (K + U) w + 2 G w^3 / (2 pi r) = mult w.
  const auto w = to_symmetric(res.Psi_n);
  std::vector<double> hw(w.size());
  h.apply(w, hw);
  const double beta = G / kTwoPi;
  for (std::size_t i = 1; i + 1 < w.size(); ++i) {
    hw[i] += 2.0 * beta * w[i] * w[i] * w[i] / grid.r(i) - res.multiplier * w[i];
  }
  return discrete_norm(hw, grid.spacing());
}

GammaProfile gamma_profile(double omega, double D, double G, const ModeWindow& window,
                           const GridOptions& options, const FlowParams& flow) {
  GammaProfile p;
  const auto& ns = window.indices;
  p.linear = sweep_linear_modes(omega, D, ns, options, 2);
  p.results.resize(ns.size());
  parallel_for(ns.size(), [&](std::size_t i) {
    const auto& rec = p.linear[i];
    try {
      p.results[i] = solve_ground_state(rec.mode, G, rec.grid, flow, &rec.eigen);
    } catch (const std::exception& e) {
      throw std::runtime_error("gamma_profile: mode n = " + std::to_string(rec.mode.n) +
                               " failed: " + e.what());
    }
  });
  std::vector<std::pair<int, double>> table;
  for (const auto& r : p.results) table.emplace_back(r.n, r.gamma_n);
  p.selection = select_nstar(omega, D, window, table);
  return p;
}

}  // namespace gvortex
