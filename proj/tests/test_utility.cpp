/*
 Copyright 2026 The ruinbound Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#include <cmath>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "ruinbound/errors.hpp"
#include "ruinbound/utility.hpp"

using namespace ruinbound;

namespace {

const MarketParams kM0{0.02, 0.06, 0.2, 0.04};

std::vector<double> log_points(double lo, double hi, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(lo * std::pow(hi / lo, i / double(n - 1)));
  return v;
}

UtilitySpec tabulated_power2() {
  std::vector<double> theta = log_points(0.01, 100.0, 40);
  std::vector<double> marginal;
  for (double t : theta) marginal.push_back(1.0 / (t * t));
  return UtilitySpec::tabulated(theta, marginal, -1.0 / theta.front());
}

}  // namespace

TEST_CASE("closed-form families agree with their definitions") {
  struct Pair {
    UtilitySpec spec;
    oracle::Utility ref;
  };
  const std::vector<Pair> cases{{UtilitySpec::power(0.5), oracle::power(0.5)},
                                {UtilitySpec::power(2.0), oracle::power(2.0)},
                                {UtilitySpec::power(3.5), oracle::power(3.5)},
                                {UtilitySpec::log(), oracle::log_utility()},
                                {UtilitySpec::shifted_power(2.0, 1.0, 0.2), oracle::shifted(2.0, 1.0, 0.2)},
                                {UtilitySpec::shifted_power(0.7, 0.3, 0.0), oracle::shifted(0.7, 0.3, 0.0)}};
  for (const auto& [spec, ref] : cases) {
    CAPTURE(spec.describe());
    for (double c : {1e-6, 0.01, 0.3, 1.0, 7.0, 1e4}) {
      CHECK(u_value(spec, c) == doctest::Approx(ref.value(c)).epsilon(1e-12));
      CHECK(u_marginal(spec, c) == doctest::Approx(ref.marginal(c)).epsilon(1e-13));
      CHECK(inverse_marginal(spec, u_marginal(spec, c)) == doctest::Approx(c).epsilon(1e-12));
    }
  }
}

TEST_CASE("limits at zero and infinity") {
  CHECK(u_at_zero(UtilitySpec::power(0.5)) == 0.0);
  CHECK(std::isinf(marginal_at_zero(UtilitySpec::power(0.5))));
  CHECK(std::isinf(u_at_infinity(UtilitySpec::power(0.5))));
  CHECK(u_at_zero(UtilitySpec::power(2.0)) == -kInfinity);
  CHECK(u_at_infinity(UtilitySpec::power(2.0)) == 0.0);
  CHECK(u_at_zero(UtilitySpec::log()) == -kInfinity);
  CHECK(u_at_infinity(UtilitySpec::log()) == kInfinity);
  const UtilitySpec s = UtilitySpec::shifted_power(2.0, 1.0, 0.2);
  CHECK(u_at_zero(s) == doctest::Approx(-0.2));
  CHECK(marginal_at_zero(s) == doctest::Approx(1.0));
  CHECK(u_at_infinity(s) == doctest::Approx(0.8));
  CHECK(inverse_marginal(s, 1.0) == 0.0);
  CHECK(inverse_marginal(s, 5.0) == 0.0);
}

TEST_CASE("factories reject invalid parameters") {
  CHECK_THROWS_AS(UtilitySpec::power(1.0), InvalidInput);
  CHECK_THROWS_AS(UtilitySpec::power(-2.0), InvalidInput);
  CHECK_THROWS_AS(UtilitySpec::shifted_power(2.0, 0.0, 0.0), InvalidInput);
  CHECK_THROWS_AS(UtilitySpec::shifted_power(2.0, 1.0, -0.1), InvalidInput);
  const std::vector<double> t{1.0, 2.0, 3.0};
  const std::vector<double> up{1.0, 2.0, 0.5};
  CHECK_THROWS_AS(UtilitySpec::tabulated(t, up), InvalidInput);
}

TEST_CASE("kernel integrals match independent quadrature") {
  const RootSet k = derive_roots(kM0);
  struct Pair {
    UtilitySpec spec;
    oracle::Utility ref;
  };
  const std::vector<Pair> cases{{UtilitySpec::power(0.5), oracle::power(0.5)},
                                {UtilitySpec::power(2.0), oracle::power(2.0)},
                                {UtilitySpec::log(), oracle::log_utility()},
                                {UtilitySpec::shifted_power(2.0, 1.0, 0.2), oracle::shifted(2.0, 1.0, 0.2)},
                                {UtilitySpec::shifted_power(0.7, 0.3, 0.0), oracle::shifted(0.7, 0.3, 0.0)}};
  for (const auto& [spec, ref] : cases) {
    CAPTURE(spec.describe());
    for (double c : {0.05, 0.5, 2.0, 30.0}) {
      CAPTURE(c);
      const double minus = kernel_integral(spec, k, KernelBranch::kMinus, c, kInfinity);
      CHECK(minus == doctest::Approx(oracle::kernel(ref, k.lambda_minus, c, oracle::kInf)).epsilon(1e-10));
      const double plus = kernel_integral(spec, k, KernelBranch::kPlus, c, 3.0 * c);
      CHECK(plus == doctest::Approx(oracle::kernel(ref, k.lambda_plus, c, 3.0 * c)).epsilon(1e-10));
    }
  }
  const UtilitySpec s = UtilitySpec::shifted_power(2.0, 1.0, 0.2);
  const double from_zero = kernel_integral(s, k, KernelBranch::kMinus, 0.0, kInfinity);
  CHECK(from_zero == doctest::Approx(1.0 / (1.0 + 2.0 * std::sqrt(2.0))).epsilon(1e-13));
}

TEST_CASE("finiteness assumption") {
  const RootSet k = derive_roots(kM0);
  // p * lambda_minus < -1 is needed for power-type tails.
  CHECK(check_finiteness(UtilitySpec::power(0.5), k));
  CHECK_FALSE(check_finiteness(UtilitySpec::power(0.2), k));
  CHECK_FALSE(check_finiteness(UtilitySpec::shifted_power(0.4, 1.0, 0.0), k));
  CHECK(check_finiteness(UtilitySpec::log(), k));
  CHECK_THROWS_AS(kernel_integral(UtilitySpec::power(0.2), k, KernelBranch::kMinus, 1.0, kInfinity),
                  ModelError);
}

TEST_CASE("tabulated utility reproduces a power law sampled on its grid") {
  const UtilitySpec tab = tabulated_power2();
  const UtilitySpec pw = UtilitySpec::power(2.0);
  const RootSet k = derive_roots(kM0);
  CHECK(check_finiteness(tab, k));
  for (double c : {1e-4, 0.013, 0.5, 3.3, 99.0, 1e3}) {
    CAPTURE(c);
    CHECK(u_marginal(tab, c) == doctest::Approx(u_marginal(pw, c)).epsilon(1e-11));
    CHECK(u_value(tab, c) == doctest::Approx(u_value(pw, c)).epsilon(1e-9));
    CHECK(inverse_marginal(tab, u_marginal(pw, c)) == doctest::Approx(c).epsilon(1e-11));
    CHECK(kernel_integral(tab, k, KernelBranch::kMinus, c, kInfinity) ==
          doctest::Approx(kernel_integral(pw, k, KernelBranch::kMinus, c, kInfinity)).epsilon(1e-9));
    CHECK(kernel_integral(tab, k, KernelBranch::kPlus, c, 2.0 * c) ==
          doctest::Approx(kernel_integral(pw, k, KernelBranch::kPlus, c, 2.0 * c)).epsilon(1e-9));
  }
  CHECK(u_at_zero(tab) == -kInfinity);
  CHECK(u_at_infinity(tab) == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(std::isinf(marginal_at_zero(tab)));
}

TEST_CASE("tabulated kernel integrates its own interpolant") {
  std::vector<double> theta = log_points(0.05, 20.0, 25);
  std::vector<double> marginal;
  for (double t : theta) marginal.push_back(std::pow(t + 0.5, -1.8) * (1.0 + 0.02 * std::sin(t)));
  const UtilitySpec tab = UtilitySpec::tabulated(theta, marginal);
  const RootSet k = derive_roots(kM0);
  // The interpolant has kinks at the nodes, so the reference splits there.
  auto piecewise = [&](const std::function<double(double)>& f, double lo, double hi) {
    double sum = 0.0;
    double cursor = lo;
    for (double t : theta) {
      if (t <= cursor || t >= hi) continue;
      sum += oracle::integral(f, cursor, t);
      cursor = t;
    }
    return sum + oracle::integral(f, cursor, hi);
  };
  auto kernel_minus = [&](double t) { return std::pow(u_marginal(tab, t), -k.lambda_minus); };
  auto marginal_fn = [&](double t) { return u_marginal(tab, t); };
  for (double c : {0.01, 0.07, 1.0, 15.0, 40.0}) {
    CAPTURE(c);
    CHECK(kernel_integral(tab, k, KernelBranch::kMinus, c, kInfinity) ==
          doctest::Approx(piecewise(kernel_minus, c, oracle::kInf)).epsilon(1e-12));
    CHECK(u_value(tab, 2.0 * c) - u_value(tab, c) ==
          doctest::Approx(piecewise(marginal_fn, c, 2.0 * c)).epsilon(1e-12));
  }
}
