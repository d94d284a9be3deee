#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gvortex/flow.hpp"
#include "gvortex/linear1d.hpp"

namespace gvortex {

struct NonlinearResult {
  int n = 0;
  double gamma_n = 0.0;
  RealField Psi_n;          // unit mass, nonnegative
  double multiplier = 0.0;  // gamma_n + 2 pi G \int Psi^4 r dr
  double el_residual = 0.0;
  std::size_t iterations = 0;
  double lambda1 = 0.0;     // linear ground level on the same grid
};

/// 2 pi \int (|f'|^2 + V_n f^2 + G f^4) r dr with the discrete operator used
/// by the eigensolver (Dirichlet ends).
double energy_En(const RealField& f, const ModeProblem& m, double G);

/// Minimizes E_n under unit mass starting from the linear ground state.
/// `linear` may carry a precomputed solve_linear_modes result (two levels)
/// on the same grid.
NonlinearResult solve_ground_state(const ModeProblem& m, double G, const RadialGrid& grid,
                                   const FlowParams& flow = FlowParams::single_mode(),
                                   const EigenResult* linear = nullptr);

/// L^2(r dr) norm of -Psi'' - Psi'/r + V_n Psi + 2 G Psi^3 - multiplier Psi.
double el_residual(const NonlinearResult& res, const ModeProblem& m, double G);

struct GammaProfile {
  std::vector<ModeRecord> linear;
  std::vector<NonlinearResult> results;
  ModeSelection selection;  // argmin and parabola of n -> gamma_n
};

/// gamma_n over the window, in parallel; a failing mode aborts with its n.
GammaProfile gamma_profile(double omega, double D_Omega, double G, const ModeWindow& window,
                           const GridOptions& grid = {},
                           const FlowParams& flow = FlowParams::single_mode());

}  // namespace gvortex
