#pragma once

#include <array>
#include <cstddef>
#include <utility>
#include <vector>

#include "gvortex/grid.hpp"
#include "gvortex/radial_operator.hpp"

namespace gvortex {

/// One angular mode n of the scaled problem with its well data.
struct ModeProblem {
  int n = 0;
  double omega = 0.0;
  double D_Omega = 0.0;
  double R_n = 0.0;
  double h_n = 0.0;

  /// Validates the inputs and derives R_n and h_n. Rejects n = 0, where the
  /// well degenerates to r = 0.
  static ModeProblem make(int n, double omega, double D_Omega);
};

/// n^2/r^2 - 2 n omega + (1-D) omega^2 r^2 + D omega^2/2 + D omega^2 r^4 / 2.
double potential_Vn(int n, double omega, double D_Omega, double r);
double potential_Vn(const ModeProblem& m, double r);

/// Positive root of R^6 + ((1-D)/D) R^4 = n^2 / (D omega^2); 0 for n = 0.
double solve_Rn(int n, double omega, double D_Omega);

/// (2 / V_n''(R_n))^{1/4}.
double oscillator_width(const ModeProblem& m);

/// Analytic derivative of V_n of order 1..4 at r = at.
double Vn_derivative(const ModeProblem& m, int order, double at);

/// Grid centered on the well of m: [max(0.02, R_n - W h_n), R_n + W h_n].
RadialGrid build_grid(const ModeProblem& m, double width_multiplier = kDefaultWidthMultiplier,
                      std::size_t points_per_width = kDefaultPointsPerWidth);

struct GridOptions {
  double width_multiplier = kDefaultWidthMultiplier;
  std::size_t points_per_width = kDefaultPointsPerWidth;
};

/// V_n - 1/(4 r^2) on the grid nodes: the potential seen by w = sqrt(r) f.
std::vector<double> symmetrized_potential(const ModeProblem& m, const RadialGrid& grid);

struct EigenResult {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  RealField g1;  // unit mass, nonnegative
  RealField g2;  // unit mass, orthogonal to g1, positive on the outer side
  std::array<double, 2> residual_norms{};
  std::size_t count = 0;  // number of eigenpairs actually computed (1 or 2)
};

/// Lowest one or two eigenpairs of -f'' - f'/r + V_n f in L^2(r dr).
/// Throws std::runtime_error if the ground state carries more than 1e-8 of
/// its mass on the three outermost nodes at either end.
EigenResult solve_linear_modes(const ModeProblem& m, const RadialGrid& grid,
                               std::size_t how_many = 2);

/// Interior w = sqrt(2 pi r) f, with zero ends; Delta * sum w^2 equals the mass.
std::vector<double> to_symmetric(const RealField& f);
RealField from_symmetric(const RadialGrid& grid, const std::vector<double>& w);

struct BlowUpProfile {
  std::vector<double> x;   // (r - R_n) / h_n at the grid nodes
  std::vector<double> xi;  // c^{-1} g1(R_n + h_n x), unit L^2(dx)
  double c_1n = 0.0;
};

BlowUpProfile blow_up_profile(const EigenResult& e, const ModeProblem& m);

struct ModeWindow {
  double a_constant = 0.0;
  std::vector<int> indices;  // ascending
  double energy_floor = 0.0; // sqrt(6) omega
};

inline constexpr double kDefaultWindowConstant = 2.0;

ModeWindow mode_window(double omega, double a_constant = kDefaultWindowConstant);

/// V_n(R) + sqrt(V_n''(R)/2) written as a function of the well location R,
/// with n = omega R^2 sqrt(D R^2 + 1 - D) eliminated.
double cost_function_C(double R, double omega, double D_Omega);

/// Index whose well sits at R: omega R^2 sqrt(D R^2 + 1 - D).
double index_for_radius(double R, double omega, double D_Omega);

/// Minimizer of cost_function_C over R > 0.
double minimize_cost(double omega, double D_Omega);

struct ModeSelection {
  int n_star = 0;
  int n_runner_up = 0;
  double R_min = 0.0;
  double N_real = 0.0;
  double quadratic_coeff = 0.0;
  double vertex = 0.0;
  double fit_r2 = 0.0;
  bool degenerate = false;
};

inline constexpr double kDegeneracyTolerance = 1e-6;

/// Picks n* from a table of (n, lambda_1n) pairs and fits a parabola.
ModeSelection select_nstar(double omega, double D_Omega, const ModeWindow& window,
                           const std::vector<std::pair<int, double>>& table);

struct ModeRecord {
  ModeProblem mode;
  RadialGrid grid;
  EigenResult eigen;
};

/// Solves every mode in `ns` on its own grid, in parallel.
std::vector<ModeRecord> sweep_linear_modes(double omega, double D_Omega,
                                           const std::vector<int>& ns,
                                           const GridOptions& options = {},
                                           std::size_t how_many = 2);

/// Convenience: the (n, lambda1) table of a sweep.
std::vector<std::pair<int, double>> lambda_table(const std::vector<ModeRecord>& records);

}  // namespace gvortex
