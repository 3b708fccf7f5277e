#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "privdr/privacy.hpp"

#include <cmath>
#include <filesystem>
#include <numeric>
#include <stdexcept>

using namespace privdr;

namespace
{
  DPParams
  params(double sensitivity, double epsilon, std::uint64_t seed = 7)
  {
    DPParams p;
    p.sensitivity = sensitivity;
    p.epsilon = epsilon;
    p.seed = seed;
    return p;
  }
}

TEST_CASE("laplace scale is sensitivity over epsilon")
{
  CHECK(laplace_scale(params(1.0, 0.1)) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(laplace_scale(params(1.0, 1.0)) == 1.0);
  CHECK(laplace_scale(params(2.0, 0.5)) == 4.0);
}

TEST_CASE("invalid privacy parameters are rejected")
{
  CHECK_THROWS_AS(params(1.0, 0.0).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(1.0, -0.1).validate(), std::invalid_argument);
  CHECK_THROWS_AS(params(0.0, 0.1).validate(), std::invalid_argument);
  auto p = params(1.0, 0.1);
  p.delta = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.delta = 0.05;
  CHECK_NOTHROW(p.validate());
  CHECK(p.has_delta_slack());
  // denormal epsilon makes the scale overflow
  CHECK_THROWS_AS(params(1e300, 1e-300).validate(), std::invalid_argument);
}

TEST_CASE("laplace pdf values and symmetry")
{
  CHECK(laplace_pdf(0.0, 1.0) == 0.5);
  CHECK(laplace_pdf(0.0, 10.0) == doctest::Approx(0.05));
  CHECK(laplace_pdf(10.0, 10.0) == doctest::Approx(0.018393972058572117).epsilon(1e-14));
  for (double x = -40.0; x <= 40.0; x += 0.37) {
    CHECK(laplace_pdf(x, 3.0) == laplace_pdf(-x, 3.0));
  }
  CHECK_THROWS_AS(laplace_pdf(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(laplace_pdf(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("laplace pdf integrates to one")
{
  // composite Simpson on [-40 lambda, 40 lambda]
  double const scale = 2.5;
  double const lo = -40.0 * scale;
  double const hi = 40.0 * scale;
  int const n = 200000;
  double const h = (hi - lo) / n;
  double sum = laplace_pdf(lo, scale) + laplace_pdf(hi, scale);
  for (int i = 1; i < n; ++i) {
    sum += (i % 2 ? 4.0 : 2.0) * laplace_pdf(lo + i * h, scale);
  }
  CHECK(sum * h / 3.0 == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("inverse cdf transform")
{
  CHECK(laplace_from_uniform(0.5, 10.0) == 0.0);
  auto const p = 0.5 * (1.0 + 1.0 - std::exp(-1.0));
  CHECK(laplace_from_uniform(p, 10.0) == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(laplace_from_uniform(1.0 - p, 10.0) == doctest::Approx(-10.0).epsilon(1e-12));
}

TEST_CASE("uniform source stays inside the open interval")
{
  Rng rng{123};
  for (int i = 0; i < 100000; ++i) {
    auto const u = uniform_open01(rng);
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
  }
}

TEST_CASE("sampled moments match the laplace distribution")
{
  Rng rng{42};
  double const scale = 10.0;
  int const n = 1000000;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    auto const x = sample_laplace(scale, rng);
    sum += x;
    sum_sq += x * x;
  }
  auto const mean = sum / n;
  auto const var = sum_sq / n - mean * mean;
  CHECK(std::abs(mean) <= 0.05 * scale);
  CHECK(var == doctest::Approx(200.0).epsilon(0.05));
}

TEST_CASE("noise trace generation")
{
  auto const p = params(1.0, 0.1, 99);
  auto const a = generate_noise_trace(p, 432);
  auto const b = generate_noise_trace(p, 432);
  CHECK(a.size() == 432);
  CHECK(a.step_seconds == 600);
  CHECK(a.values == b.values);

  auto const mean = std::accumulate(a.values.begin(), a.values.end(), 0.0) / 432.0;
  CHECK(std::abs(mean) <= 3.0 * 10.0 * std::sqrt(2.0) / std::sqrt(432.0));

  auto const other = generate_noise_trace(params(1.0, 0.1, 100), 432);
  CHECK(other.values != a.values);
  CHECK_THROWS_AS(generate_noise_trace(p, 0), std::invalid_argument);
}

TEST_CASE("net pv subtracts the noise and keeps negatives")
{
  Trace pv;
  pv.values = {5.0};
  CHECK(compute_net_pv(pv, NoiseTrace{{1.2}, 600}).values[0] == doctest::Approx(3.8));
  CHECK(compute_net_pv(pv, NoiseTrace{{0.0}, 600}).values == pv.values);
  pv.values = {0.5};
  CHECK(compute_net_pv(pv, NoiseTrace{{1.0}, 600}).values[0] == -0.5);

  pv.values = {1.0, 2.0};
  CHECK_THROWS_AS(compute_net_pv(pv, NoiseTrace{{1.0}, 600}), std::invalid_argument);
  CHECK_THROWS_AS(compute_net_pv(pv, NoiseTrace{{1.0, 2.0}, 300}), std::invalid_argument);
}

TEST_CASE("property: adding the noise back restores pv")
{
  auto const noise = generate_noise_trace(params(1.0, 0.1, 5), 500);
  Trace pv;
  Rng rng{11};
  for (int i = 0; i < 500; ++i) {
    pv.values.push_back(300.0 * uniform_open01(rng));
  }
  auto const net = compute_net_pv(pv, noise);
  for (std::size_t k = 0; k < pv.size(); ++k) {
    CHECK(net.values[k] + noise.values[k] == doctest::Approx(pv.values[k]).epsilon(1e-13));
  }
}

TEST_CASE("density ratio bound")
{
  auto const p = params(1.0, 0.1);
  CHECK(density_ratio_bound_check(p, 0.0, 1.0));
  for (double x : {-3.0, 0.0, 17.5}) {
    CHECK(density_ratio_bound_check(p, x, 0.0));
  }
  for (int x = -50; x <= 50; ++x) {
    for (double s : {-1.0, -0.5, 0.5, 1.0}) {
      CHECK(density_ratio_bound_check(p, x, s));
    }
  }
  CHECK_THROWS_AS(density_ratio_bound_check(p, 0.0, 1.5), std::invalid_argument);

}

TEST_CASE("property: ratio bound holds across configurations")
{
  for (double sens : {0.5, 1.0, 3.0}) {
    for (double eps : {0.05, 0.1, 1.0, 2.0}) {
      auto const p = params(sens, eps);
      for (int i = -200; i <= 200; ++i) {
        auto const x = i * 0.25 * sens;
        for (double frac : {-1.0, -0.5, -0.1, 0.1, 0.5, 1.0}) {
          REQUIRE(density_ratio_bound_check(p, x, frac * sens));
        }
      }
    }
  }
}

TEST_CASE("expected squared error")
{
  CHECK(mechanism_expected_squared_error(params(1.0, 0.1), 1) == 200.0);
  CHECK(mechanism_expected_squared_error(params(1.0, 0.1), 432) == 86400.0);
  CHECK(mechanism_expected_squared_error(params(1.0, 1.0), 1) == 2.0);
  CHECK_THROWS_AS(mechanism_expected_squared_error(params(1.0, 1.0), 0), std::invalid_argument);
}

TEST_CASE("noise csv round trip")
{
  auto const noise = generate_noise_trace(params(1.0, 0.1, 3), 50);
  auto const path = std::filesystem::temp_directory_path() / "privdr_noise_roundtrip.csv";
  write_noise_csv(path, noise);
  auto const back = load_noise_csv(path, 600);
  CHECK(back.values == noise.values);
  std::filesystem::remove(path);
}
