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

#include "doctest.h"
#include "ruinbound/quadrature.hpp"

using namespace ruinbound;

TEST_CASE("finite interval") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, M_PI);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-14));
  const auto g = integrate([](double x) { return std::exp(-x * x); }, -3.0, 5.0);
  CHECK(g.value == doctest::Approx(0.5 * std::sqrt(M_PI) * (std::erf(5.0) + std::erf(3.0))).epsilon(1e-13));
}

TEST_CASE("reversed and empty intervals") {
  auto f = [](double x) { return x * x; };
  CHECK(integrate(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  CHECK(integrate(f, 2.0, 2.0).value == 0.0);
}

TEST_CASE("semi-infinite tails, fast and slow algebraic decay") {
  for (double s : {1.05, 1.2, 2.5, 6.0}) {
    CAPTURE(s);
    const auto r = integrate_tail([s](double x) { return std::pow(x, -s); }, 2.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::pow(2.0, 1.0 - s) / (s - 1.0)).epsilon(1e-10));
  }
  const auto e = integrate_tail([](double x) { return std::exp(-x); }, 0.5);
  CHECK(e.value == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
}

TEST_CASE("integrable endpoint singularity at zero") {
  for (double s : {0.1, 0.5, 0.9}) {
    CAPTURE(s);
    const auto r = integrate_from_zero([s](double x) { return std::pow(x, -s); }, 3.0);
    CHECK(r.converged);
    CHECK(r.value == doctest::Approx(std::pow(3.0, 1.0 - s) / (1.0 - s)).epsilon(1e-10));
  }
  const auto l = integrate_from_zero([](double x) { return std::log(x); }, 1.0);
  CHECK(l.value == doctest::Approx(-1.0).epsilon(1e-12));
}
