#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "gvortex/coupled2d.hpp"
#include "gvortex/linear1d.hpp"

namespace gvortex {

/// u(r_i, theta_j) on the state grid times a uniform angular grid.
struct PolarSamples {
  RadialGrid grid;
  std::size_t n_theta = 0;
  std::vector<cplx> values;  // values[i * n_theta + j]

  cplx at(std::size_t i, std::size_t j) const { return values[i * n_theta + j]; }
  double theta(std::size_t j) const;
};

/// Smallest power of two that is at least 4 times the mode count and at
/// least 4 times the largest |n|, so phase increments stay below pi.
std::size_t default_angular_points(const CondensateState& s);

/// Synthesis u = sum_n f_n e^{i n theta}. Rejects n_theta < 4 * mode count.
PolarSamples reconstruct_2d(const CondensateState& s, std::size_t n_theta);

/// Angular analysis of samples back onto the modes of `like`.
CondensateState analyze_2d(const PolarSamples& samples, const CondensateState& like);

struct WindingResult {
  int winding = 0;
  double rounding_residual = 0.0;  // |total / 2 pi - winding|
  double radius = 0.0;
};

/// Phase circulation around the circle of the given radius (linear
/// interpolation between grid nodes). Throws std::domain_error when
/// min |u| <= 1e-6 max |u| on the circle.
WindingResult winding_number(const PolarSamples& samples, double radius);

struct HoleCheck {
  double delta = 0.0;
  double max_in_hole = 0.0;      // max |u| over ||x| - 1|^2 >= delta ln(omega) / omega
  double min_in_annulus = 0.0;   // min |u| over the complement
  double max_overall = 0.0;
  bool pass = false;             // max_in_hole <= 0.1 max_overall
};

HoleCheck hole_check(const PolarSamples& samples, const CondensateState& s, double delta);

struct ZeroSet {
  std::vector<std::pair<double, double>> points;  // (r, theta), at most kMaxListedZeros
  std::size_t count = 0;
  double min_ring_distance_sq = 0.0;  // min over zeros of (|x| - 1)^2
  double threshold = 0.0;
};

inline constexpr double kZeroThreshold = 1e-4;
inline constexpr std::size_t kMaxListedZeros = 1000;

/// Local minima of |u| below threshold * max |u|, refined by bilinear
/// interpolation inside the adjacent cells.
ZeroSet detect_zeros(const PolarSamples& samples, double threshold = kZeroThreshold);

struct AnnulusGeometry {
  double hole_inner_radius = 0.0;  // last radius inside the ring where max_theta |u| <= thr max
  double hole_outer_radius = 0.0;  // first radius outside the ring where max_theta |u| <= thr max
  double r_lo = 0.0;               // zero-free annulus: min_theta |u| > thr max on [r_lo, r_hi]
  double r_hi = 0.0;
};

AnnulusGeometry annulus_geometry(const PolarSamples& samples, double threshold = kZeroThreshold);

struct GaussianFit {
  double amplitude = 0.0;
  double center = 0.0;
  double width = 0.0;  // 1/e half-width of |u|^2
  double r_squared = 0.0;
};

/// Fits log |u| by a concave parabola where |u| > 0.1 max.
GaussianFit gaussian_profile_fit(std::span<const double> abs_values, const RadialGrid& grid);

struct DecayFit {
  double sigma = 0.0;
  double r_squared = 0.0;
  std::size_t points = 0;
};

/// Regression of max_theta log|u| against omega (r - 1)^2 over r >= 0.3 and
/// |u| in [1e-8, 0.1] max; sigma is minus the slope.
DecayFit decay_fit(const PolarSamples& samples, const CondensateState& s);

struct GroundProjection {
  std::vector<int> n;
  std::vector<cplx> coefficients;  // 2 pi \int f_n g_{1,n} r dr
  double residual = 0.0;           // || u - u~ ||_{L^2(R^2)}
};

/// Projection of each window mode on g_{1,n}; modes outside the window count
/// fully in the residual. `table` must hold g_{1,n} on the state grid.
GroundProjection project_ground_modes(const CondensateState& s, const std::vector<ModeRecord>& table,
                                      const ModeWindow& window);

struct InteractionReport {
  double quartic = 0.0;      // \int |u|^4
  double leading = 0.0;      // 2 pi \int g_{1,n*}^4 r dr
  double moment = 0.0;       // sum mass_n |n - n*|^2
  double c1 = 1.0;
  double c2 = 1.0;
  double lower = 0.0;        // leading - c1 omega^{-1/2} moment - c2
  double c2_required = 0.0;  // smallest c2 for which the lower bound holds
  bool lower_bound_holds = false;
  bool upper_bound_holds = false;  // quartic <= leading
};

InteractionReport interaction_lower_bound_report(const CondensateState& s, const RealField& g1_nstar,
                                                 int n_star, double c1 = 1.0, double c2 = 1.0);

struct RadialProfile {
  std::vector<double> r;
  std::vector<double> abs_max;
  std::vector<double> abs_min;
  std::vector<double> winding;  // total phase change / 2 pi at each radius
};

RadialProfile radial_profile(const PolarSamples& samples);

struct VortexReport {
  int winding_at_r1 = 0;
  double winding_residual_at_r1 = 0.0;
  std::vector<WindingResult> annulus_windings;
  bool windings_unanimous = false;
  double hole_inner_radius = 0.0;
  double hole_outer_radius = 0.0;
  std::pair<double, double> zero_free_annulus{0.0, 0.0};
  GaussianFit gaussian_fit;
  DecayFit decay;
  double projection_residual = 0.0;
  ZeroSet zeros;
  HoleCheck hole;
};

inline constexpr std::size_t kWindingRadii = 8;

VortexReport analyze_vortex(const CondensateState& s, const std::vector<ModeRecord>& table,
                            const ModeWindow& window, double hole_delta = 1.0,
                            std::size_t n_theta = 0);

}  // namespace gvortex
