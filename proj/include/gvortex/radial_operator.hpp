#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gvortex/grid.hpp"

namespace gvortex {

/// Radial Schroedinger operator -w'' + U(r) w acting on w = sqrt(r) f, with
/// w = 0 on both grid ends. The kinetic part uses the compact fourth-order
/// form K = B^{-1} (-D2), B = tridiag(1, 10, 1) / 12, which is symmetric and
/// positive semidefinite on the interior nodes.
///
/// Vectors passed to the methods have one entry per grid node; the two end
/// entries are treated as zero on input and written as zero on output.
class RadialHamiltonian {
 public:
  RadialHamiltonian(RadialGrid grid, std::vector<double> potential);

  const RadialGrid& grid() const { return grid_; }
  const std::vector<double>& potential() const { return potential_; }

  void apply_kinetic(std::span<const double> w, std::span<double> out) const;

  /// out = (K + U + extra) w; `extra` may be empty.
  void apply(std::span<const double> w, std::span<double> out,
             std::span<const double> extra = {}) const;

  /// Number of eigenvalues of K + U + extra strictly below sigma, from the
  /// inertia of the congruent pentadiagonal matrix B (K + U + extra - sigma) B.
  std::size_t count_below(double sigma, std::span<const double> extra = {}) const;

  /// Solves (K + U + extra - sigma) x = b.
  void solve_shifted(double sigma, std::span<const double> b, std::span<double> x,
                     std::span<const double> extra = {}) const;

  /// Delta * sum_i w_i ((K + U) w)_i.
  double quadratic_form(std::span<const double> w) const;

  /// Lower bound min U and upper bound max U + 6 / spacing^2 of the spectrum.
  double spectrum_lower_bound() const;
  double spectrum_upper_bound() const;

 private:
  RadialGrid grid_;
  std::vector<double> potential_;
  // Thomas factorization of B restricted to the interior nodes.
  std::vector<double> b_diag_factor_;
};

struct Eigenpair {
  double value = 0.0;
  std::vector<double> vector;  // Delta * sum w^2 = 1, ends zero
  double residual = 0.0;       // || (H - value) w || in the same norm
};

/// k-th eigenvalue (0-based) by bisection on the inertia count.
double bisect_eigenvalue(const RadialHamiltonian& h, std::size_t index,
                         double rel_tol = 1e-14);

/// Lowest `how_many` eigenpairs: bisection for the values, inverse iteration
/// for the vectors, Rayleigh quotient for the reported value.
std::vector<Eigenpair> lowest_eigenpairs(const RadialHamiltonian& h, std::size_t how_many);

/// Solves a general tridiagonal system with partial pivoting.
/// sub[i] couples row i+1 to column i, sup[i] couples row i to column i+1.
void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                       std::vector<double> sup, std::span<double> rhs_inout);

/// Euclidean norm weighted by the grid spacing.
double discrete_norm(std::span<const double> w, double spacing);

}  // namespace gvortex
