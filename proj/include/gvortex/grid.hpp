#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gvortex {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;

/// Uniform grid on [r_min, r_max] carrying the measure r dr. r_min > 0 keeps
/// the centrifugal term finite on every node.
class RadialGrid {
 public:
  RadialGrid() = default;
  RadialGrid(double r_min, double r_max, std::size_t n_points);

  double r_min() const { return r_min_; }
  double r_max() const { return r_max_; }
  std::size_t size() const { return n_points_; }
  double spacing() const { return spacing_; }
  double r(std::size_t i) const { return r_min_ + spacing_ * static_cast<double>(i); }
  std::vector<double> nodes() const;

  bool operator==(const RadialGrid& other) const = default;

  static constexpr std::size_t kMinPoints = 64;

 private:
  double r_min_ = 0.0;
  double r_max_ = 0.0;
  std::size_t n_points_ = 0;
  double spacing_ = 0.0;
};

inline constexpr double kDefaultWidthMultiplier = 15.0;
inline constexpr std::size_t kDefaultPointsPerWidth = 40;
inline constexpr double kGridLeftClamp = 0.02;

/// Window [max(0.02, center - W*width), center + W*width] with ceil(W*ppw)
/// nodes. Rejects W < 6.
RadialGrid build_grid(double center, double width,
                      double width_multiplier = kDefaultWidthMultiplier,
                      std::size_t points_per_width = kDefaultPointsPerWidth);

/// Trapezoidal approximation of \int f(r) r dr (no 2 pi factor).
double integrate_rdr(std::span<const double> f, const RadialGrid& grid);

template <typename T>
struct RadialField {
  RadialGrid grid;
  std::vector<T> values;

  RadialField() = default;
  RadialField(RadialGrid g, std::vector<T> v);
  explicit RadialField(RadialGrid g) : grid(g), values(g.size(), T{}) {}

  std::size_t size() const { return values.size(); }
  T& operator[](std::size_t i) { return values[i]; }
  const T& operator[](std::size_t i) const { return values[i]; }
};

using RealField = RadialField<double>;
using ComplexField = RadialField<std::complex<double>>;

/// 2 pi \int |f|^2 r dr.
double mass(const RealField& f);
double mass(const ComplexField& f);

/// Rescales to unit mass; throws on a zero field.
RealField normalize(const RealField& f);
ComplexField normalize(const ComplexField& f);

/// 2 pi \int f g r dr for real fields on the same grid.
double inner_rdr(const RealField& f, const RealField& g);

/// L^p(r dr) norm; p = 0 requests the sup norm.
double lp_norm_rdr(const RealField& f, double p);

}  // namespace gvortex
