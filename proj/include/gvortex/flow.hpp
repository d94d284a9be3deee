#pragma once

#include <cstddef>
#include <cstdint>

namespace gvortex {

/// Controls for the normalized descent used by the nonlinear solvers.
///
/// Each step moves along the preconditioned residual
/// (K + U_n + 2 G |u|^2 - sigma)^{-1} (grad E - mu u), sigma sitting
/// `shift_margin` times the first spectral gap below the lowest linear level,
/// and renormalizes. `dt` is the initial step length; it is halved on an
/// energy increase at most `max_halvings` times.
struct FlowParams {
  double dt = 1.0;
  std::size_t max_iter = 2000;
  double tol_energy = 1e-13;    // relative energy change over `window` steps
  double tol_residual = 1e-6;   // Euler-Lagrange residual relative to |energy|
  std::uint64_t seed = 1;
  std::size_t window = 10;
  int max_halvings = 20;
  double shift_margin = 0.1;
  // Semi-implicit normalized gradient flow run before the descent
  // (coupled problem only); relax_time = 0 skips it.
  double relax_dt = 0.1;
  double relax_time = 0.0;

  /// Defaults for the per-mode problems.
  static FlowParams single_mode() { return FlowParams{}; }

  /// Defaults for the coupled problem.
  static FlowParams coupled() {
    FlowParams f;
    f.max_iter = 5000;
    f.tol_energy = 1e-12;
    f.tol_residual = 1e-5;
    f.window = 20;
    f.shift_margin = 1e-3;
    f.relax_time = 20.0;
    return f;
  }
};

/// Throws std::invalid_argument unless every field is positive.
void validate(const FlowParams& f);

}  // namespace gvortex
