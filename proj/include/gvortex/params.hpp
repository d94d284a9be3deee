#pragma once

#include <string>

namespace gvortex {

/// Physical trap parameters: rotation speed, quartic strength, coupling.
struct TrapParams {
  double Omega = 0.0;
  double k = 0.0;
  double G = 0.0;
};

/// Parameters of the scaled functional F_omega.
struct ScaledParams {
  double omega = 0.0;
  double D_Omega = 0.0;
  double G = 0.0;
};

enum class RegimeKind { ExtremeRotation, FixedG, Other };

struct RegimeTag {
  RegimeKind kind = RegimeKind::Other;
  double ratio_G2_over_omega = 0.0;
  // Set alongside ExtremeRotation: the refined single-mode results hold for
  // any G held fixed while omega grows.
  bool fixed_g_eligible = false;
};

inline constexpr double kDefaultRegimeThreshold = 0.1;

void validate(const TrapParams& p);
void validate(const ScaledParams& s);

ScaledParams scale_parameters(const TrapParams& p);

/// Spatial blow-up factor R with u(x) = R psi(R x).
double rescale_length(const TrapParams& p);

/// Converts a value of F_omega back to the (shifted) physical energy.
double unscale_energy(const TrapParams& p, double f_omega_value);

RegimeTag classify_regime(const ScaledParams& s,
                          double threshold = kDefaultRegimeThreshold);

std::string to_string(RegimeKind kind);

}  // namespace gvortex
