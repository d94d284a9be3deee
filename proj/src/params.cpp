#include "gvortex/params.hpp"

#include <cmath>
#include <stdexcept>

namespace gvortex {

void validate(const TrapParams& p) {
  if (!(p.Omega > 1.0)) {
    throw std::invalid_argument("TrapParams: Omega must be > 1");
  }
  if (!(p.k > 0.0)) {
    throw std::invalid_argument("TrapParams: k must be > 0");
  }
  if (!(p.G > 0.0)) {
    throw std::invalid_argument("TrapParams: G must be > 0");
  }
}

void validate(const ScaledParams& s) {
  if (!(s.omega > 0.0)) {
    throw std::invalid_argument("ScaledParams: omega must be > 0");
  }
  if (!(s.D_Omega > 0.0 && s.D_Omega < 1.0)) {
    throw std::invalid_argument("ScaledParams: D_Omega must lie in (0,1)");
  }
  if (!(s.G >= 0.0)) {
    throw std::invalid_argument("ScaledParams: G must be >= 0");
  }
}

ScaledParams scale_parameters(const TrapParams& p) {
  validate(p);
  const double w2m1 = p.Omega * p.Omega - 1.0;
  return ScaledParams{p.Omega * w2m1 / (2.0 * p.k), w2m1 / (p.Omega * p.Omega), p.G};
}

double rescale_length(const TrapParams& p) {
  if (!(p.Omega > 1.0)) {
    throw std::invalid_argument("rescale_length: Omega must be > 1");
  }
  if (!(p.k > 0.0)) {
    throw std::invalid_argument("rescale_length: k must be > 0");
  }
  return std::sqrt((p.Omega * p.Omega - 1.0) / (2.0 * p.k));
}

double unscale_energy(const TrapParams& p, double f_omega_value) {
  if (!(p.Omega > 1.0)) {
    throw std::invalid_argument("unscale_energy: Omega must be > 1");
  }
  return (2.0 * p.k / (p.Omega * p.Omega - 1.0)) * f_omega_value;
}

RegimeTag classify_regime(const ScaledParams& s, double threshold) {
  validate(s);
  RegimeTag tag;
  tag.ratio_G2_over_omega = s.G * s.G / s.omega;
  if (tag.ratio_G2_over_omega <= threshold && tag.ratio_G2_over_omega < 1.0) {
    tag.kind = RegimeKind::ExtremeRotation;
    tag.fixed_g_eligible = true;
  }
  return tag;
}

std::string to_string(RegimeKind kind) {
  switch (kind) {
    case RegimeKind::ExtremeRotation: return "ExtremeRotation";
    case RegimeKind::FixedG: return "FixedG";
    case RegimeKind::Other: return "Other";
  }
  return "Other";
}

}  // namespace gvortex
