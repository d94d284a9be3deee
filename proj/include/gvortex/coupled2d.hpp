#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "gvortex/flow.hpp"
#include "gvortex/grid.hpp"
#include "gvortex/linear1d.hpp"
#include "gvortex/params.hpp"

namespace gvortex {

using cplx = std::complex<double>;

struct ModeRange {
  int lo = 0;
  int hi = -1;
  std::size_t size() const { return hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0; }
  bool contains(int n) const { return n >= lo && n <= hi; }
};

/// [round(omega) - ceil(2 sqrt(omega)), round(omega) + ceil(2 sqrt(omega))].
ModeRange default_mode_range(double omega);

struct EnergyBreakdown {
  std::vector<double> per_mode;  // F_n(f_n), indexed by n - lo
  double quadratic = 0.0;        // sum of per_mode
  double quartic = 0.0;          // \int |u|^4
  double total = 0.0;            // quadratic + G quartic
};

/// u(r, theta) = sum_n f_n(r) e^{i n theta} on a grid shared by all modes.
/// The radial kinetic operator treats the grid end values as zero.
struct CondensateState {
  ScaledParams params;
  ModeRange range;
  RadialGrid grid;
  std::vector<ComplexField> modes;  // modes[n - range.lo]
  double total_mass = 0.0;
  std::optional<EnergyBreakdown> energy_cache;

  CondensateState() = default;
  CondensateState(const ScaledParams& p, ModeRange r, const RadialGrid& g);

  std::size_t mode_count() const { return modes.size(); }
  ComplexField& mode(int n);
  const ComplexField& mode(int n) const;

  /// Recomputes total_mass and drops the energy cache.
  void refresh();
};

/// 2 pi sum_n \int |f_n|^2 r dr.
double total_mass(const CondensateState& s);

/// Copy rescaled to unit total mass; throws on a zero state.
CondensateState normalized(const CondensateState& s);

/// \int_{R^2} |u|^4 = 2 pi sum_m \int |sum_p f_{p+m} conj(f_p)|^2 r dr.
double quartic_integral(const CondensateState& s);

/// 2 pi \int (sum_p |f_p|^2)^2 r dr.
double quartic_lower_bound(const CondensateState& s);

/// sum_n F_n(f_n) + G \int |u|^4.
EnergyBreakdown energy_F_omega(const CondensateState& s);

/// Fills s.energy_cache and returns the total.
double evaluate_energy(CondensateState& s);

/// Riesz representative of the derivative of energy_F_omega in L^2(r dr):
/// dF[delta] = 2 Re sum_n 2 pi \int conj(grad_n) delta_n r dr for perturbations
/// vanishing at the grid ends. grad_n = (-Delta_r + V_n) f_n + 2 G (|u|^2 u)_n.
std::vector<ComplexField> energy_gradient(const CondensateState& s);

/// Grid shared by a range of modes: centered on the well of round(omega),
/// stretched to cover the outermost wells.
RadialGrid shared_grid(const ScaledParams& p, ModeRange range, const GridOptions& options = {});

/// Linear ground and first excited levels of every mode in the range on `grid`.
std::vector<ModeRecord> linear_table(const ScaledParams& p, ModeRange range,
                                     const RadialGrid& grid);

/// Mass spread as a Gaussian in n centered at round(omega) with width
/// sqrt(omega)/4; each mode carries its g_{1,n} profile and a random phase.
CondensateState initial_state(const ScaledParams& p, ModeRange range, const RadialGrid& grid,
                              const std::vector<ModeRecord>& table, std::uint64_t seed);

struct MinimizeReport {
  std::size_t iterations = 0;
  double energy = 0.0;
  double mu = 0.0;
  double el_residual = 0.0;  // || grad - mu u || in L^2(R^2)
  std::size_t rejected_steps = 0;
};

/// Minimizes F_omega over unit-mass states of the given mode range.
/// `table` supplies the linear levels used to place the preconditioner shift.
CondensateState minimize_full(const CondensateState& init, const FlowParams& flow,
                              const std::vector<ModeRecord>& table,
                              MinimizeReport* report = nullptr);

/// energy_F_omega(s) + G quartic_integral(s).
double chemical_potential(const CondensateState& s);

struct ModeMassSpectrum {
  std::vector<int> n;
  std::vector<double> mass;
  double total = 0.0;
  double moment = 0.0;  // sum mass_n |n - n*|^2
};

ModeMassSpectrum mode_mass_spectrum(const CondensateState& s, int n_star);

/// || |u|^2 - ref^2 ||_{L^2(R^2)} from the angular Fourier coefficients of |u|^2.
double density_deviation(const CondensateState& s, const RealField& ref);

/// Angular Fourier coefficients c_m(r) = sum_p f_{p+m} conj(f_p) of |u|^2 for
/// m = 0 .. mode_count - 1 (negative m are conjugates).
std::vector<std::vector<cplx>> density_coefficients(const CondensateState& s);

}  // namespace gvortex
