#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "gvortex/params.hpp"

using namespace gvortex;

TEST_CASE("scale_parameters closed forms") {
  auto s = scale_parameters({3.0, 1.0, 1.0});
  CHECK(s.omega == doctest::Approx(12.0).epsilon(1e-15));
  CHECK(s.D_Omega == doctest::Approx(8.0 / 9.0).epsilon(1e-15));
  CHECK(s.G == 1.0);

  s = scale_parameters({std::sqrt(2.0), 1.0, 1.0});
  CHECK(s.omega == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-14));
  CHECK(s.D_Omega == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("D_Omega tends to one at large rotation") {
  double prev = 0.0;
  for (double W : {2.0, 10.0, 100.0, 1e4}) {
    const auto s = scale_parameters({W, 1.0, 1.0});
    CHECK(s.D_Omega > prev);
    prev = s.D_Omega;
  }
  CHECK(prev == doctest::Approx(1.0).epsilon(1e-7));
}

TEST_CASE("invalid trap parameters are rejected") {
  CHECK_THROWS_AS(scale_parameters({1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(scale_parameters({0.5, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(scale_parameters({3.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(rescale_length({1.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(unscale_energy({0.9, 1.0, 1.0}, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScaledParams{100.0, 1.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScaledParams{100.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ScaledParams{-1.0, 0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("rescale_length") {
  CHECK(rescale_length({3.0, 1.0, 1.0}) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(rescale_length({std::sqrt(3.0), 1.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rescale_length({3.0, 4.0, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("unscale_energy") {
  CHECK(unscale_energy({3.0, 1.0, 1.0}, 8.0) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unscale_energy({7.0, 2.5, 1.0}, 0.0) == 0.0);
  CHECK(unscale_energy({std::sqrt(3.0), 1.0, 1.0}, 5.0) == doctest::Approx(5.0).epsilon(1e-14));
  const TrapParams p{4.2, 0.7, 1.0};
  for (double a : {-3.0, 0.5, 2.0, 1e3}) {
    CHECK(unscale_energy(p, a * 1.7) == doctest::Approx(a * unscale_energy(p, 1.7)).epsilon(1e-15));
  }
}

TEST_CASE("classify_regime") {
  auto t = classify_regime({400.0, 0.5, 1.0});
  CHECK(t.kind == RegimeKind::ExtremeRotation);
  CHECK(t.ratio_G2_over_omega == doctest::Approx(0.0025));
  t = classify_regime({4.0, 0.5, 10.0});
  CHECK(t.kind == RegimeKind::Other);
  CHECK(t.ratio_G2_over_omega == doctest::Approx(25.0));
  t = classify_regime({100.0, 0.5, 1.0});
  CHECK(t.kind == RegimeKind::ExtremeRotation);
  CHECK(t.fixed_g_eligible);
  CHECK(classify_regime({10.0, 0.5, 1.0}).kind == RegimeKind::ExtremeRotation);
  CHECK(classify_regime({10.0, 0.5, 1.0}, 0.05).kind != RegimeKind::ExtremeRotation);
  CHECK(to_string(RegimeKind::ExtremeRotation) == "ExtremeRotation");
}

TEST_CASE("inverting the scaling recovers the trap") {
  std::mt19937_64 eng(7);
  std::uniform_real_distribution<double> u(-2.0, std::log10(29.0)), logk(-2.0, 2.0);
  for (int i = 0; i < 1000; ++i) {
    const double W = 1.0 + std::pow(10.0, u(eng));
    const double k = std::pow(10.0, logk(eng));
    const auto s = scale_parameters({W, k, 1.0});
    const double W_back = 1.0 / std::sqrt(1.0 - s.D_Omega);
    const double k_back = W_back * (s.D_Omega / (1.0 - s.D_Omega)) / (2.0 * s.omega);
    CHECK(std::abs(W_back - W) <= 1e-12 * W);
    CHECK(std::abs(k_back - k) <= 1e-12 * k);
  }
}

TEST_CASE("omega and D_Omega increase with Omega") {
  double po = 0.0, pd = 0.0;
  for (double W = 1.01; W < 50.0; W *= 1.1) {
    const auto s = scale_parameters({W, 2.0, 1.0});
    CHECK(s.omega > po);
    CHECK(s.D_Omega > pd);
    po = s.omega;
    pd = s.D_Omega;
  }
}
