#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gvortex/linear1d.hpp"

namespace gvortex {

/// Coefficients c_j on the normalized oscillator eigenfunctions psi_j
/// (eigenvalue 2j + 1). psi_j is written xi_{j+1} elsewhere.
struct HermiteExpansion {
  std::vector<double> coefficients;

  HermiteExpansion() = default;
  explicit HermiteExpansion(std::vector<double> c) : coefficients(std::move(c)) {}

  std::size_t size() const { return coefficients.size(); }
  double operator[](std::size_t j) const { return j < coefficients.size() ? coefficients[j] : 0.0; }

  /// Share of sum c_j^2 carried by the top four degrees.
  double tail_ratio() const;
};

inline constexpr std::size_t kDefaultJmax = 40;
inline constexpr std::size_t kQuadratureNodes = 80;

/// Normalized Hermite function psi_j(x) by the three-term recurrence.
double hermite_function(std::size_t j, double x);

/// psi_0(x), ..., psi_{out.size()-1}(x).
void hermite_functions(double x, std::span<double> out);

/// xi_j = psi_{j-1}, the j-th eigenfunction (eigenvalue 2j - 1) of -d^2/dx^2 + x^2.
double oscillator_eigenfunction(int j, double x);
std::vector<double> oscillator_eigenfunction(int j, std::span<const double> x);

/// Gauss-Hermite rule with the Gaussian weight folded into the weights, so
/// that sum_k weights[k] f(nodes[k]) approximates \int f dx.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussHermiteRule gauss_hermite(std::size_t n);
const GaussHermiteRule& default_quadrature();

struct MomentTable {
  double xi1_fourth = 0.0;  // \int xi_1^4
  double x1_xi1_sq = 0.0;   // \int x xi_1^2
  double x2_xi1_sq = 0.0;   // \int x^2 xi_1^2
  double x4_xi1_sq = 0.0;   // \int x^4 xi_1^2
};

MomentTable moment_integrals();

/// Projection onto psi_0..psi_jmax by quadrature. Throws if the tail ratio
/// exceeds 1e-10.
HermiteExpansion project(const std::function<double(double)>& f, std::size_t j_max = kDefaultJmax);

double evaluate(const HermiteExpansion& u, double x);
double inner(const HermiteExpansion& a, const HermiteExpansion& b);
HermiteExpansion add(const HermiteExpansion& a, const HermiteExpansion& b, double scale_b = 1.0);
HermiteExpansion scaled(const HermiteExpansion& a, double s);
HermiteExpansion multiply_x(const HermiteExpansion& u);
HermiteExpansion multiply_x_power(const HermiteExpansion& u, int power);
HermiteExpansion derivative(const HermiteExpansion& u);
HermiteExpansion unit_vector(std::size_t j);

/// (-d^2/dx^2 + x^2 - 1) applied on the basis: c_j -> 2 j c_j.
HermiteExpansion apply_shifted_oscillator(const HermiteExpansion& u);

/// Solves (-d^2/dx^2 + x^2 - 1) u = rhs with <xi_1, u> = constraint_value.
/// Throws std::domain_error when <xi_1, rhs> is not zero within 1e-8.
HermiteExpansion solve_shifted_oscillator(const HermiteExpansion& rhs, double constraint_value);

/// Monomial coefficients of u / xi_1 (ascending powers).
std::vector<double> hermite_to_polynomial(const HermiteExpansion& u);

/// Taylor data of the well in oscillator units.
struct WellExpansion {
  double R = 0.0;
  double h = 0.0;
  double a3 = 0.0;  // V'''(R) h^4 / 6
  double a4 = 0.0;  // V''''(R) h^4 / 24
};

WellExpansion well_expansion(const ModeProblem& m);

/// P_n xi_1 as an expansion, and P_n itself as the cubic p0 + p1 x + p2 x^2 + p3 x^3.
HermiteExpansion correction_P_expansion(const ModeProblem& m);
std::array<double, 4> correction_P(const ModeProblem& m);

double compute_K_prime(const ModeProblem& m);

/// Q_n xi_1.
HermiteExpansion correction_Q(const ModeProblem& m, double K_prime);

struct TauResult {
  HermiteExpansion tau;
  double J_prime = 0.0;
};

TauResult correction_tau(const ModeProblem& m, double G);

struct CorrectionResult {
  int n = 0;
  double G = 0.0;
  std::array<double, 4> P_coeffs{};
  HermiteExpansion P_expansion;
  HermiteExpansion Q_expansion;
  double K_prime_n = 0.0;
  HermiteExpansion tau_expansion;
  double J_prime_n = 0.0;
  double lambda1_asym = 0.0;
  double gamma_asym = 0.0;
};

CorrectionResult compute_corrections(const ModeProblem& m, double G);

/// V_n(R_n) + sqrt(V_n''(R_n)/2) + K'_n.
double asymptotic_lambda1(const ModeProblem& m);

/// V_n(R_n) + sqrt(V_n''(R_n)/2) + G/(2 pi h_n R_n) \int xi_1^4 + J'_n.
double asymptotic_gamma(const ModeProblem& m, double G);

}  // namespace gvortex
