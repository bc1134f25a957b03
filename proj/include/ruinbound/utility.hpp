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

#pragma once

#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ruinbound/market.hpp"

namespace ruinbound {

/// U(c) = c^(1-p) / (1-p), p > 0 and p != 1.
struct PowerUtility {
  double p = 2.0;
};

/// U(c) = ln c.
struct LogUtility {};

/// U(c) = ((c + eta)^(1-p) - eta^(1-p)) / (1-p) - offset.
///
/// Finite U(0) = -offset and finite U'(0) = eta^-p, which is what makes the
/// zero-consumption band and the critical penalty reachable for P <= 0.
struct ShiftedPowerUtility {
  double p = 2.0;
  double eta = 1.0;
  double offset = 0.0;
};

/// Utility given by marginal utility samples on an increasing grid.
///
/// U' is interpolated linearly in (log theta, log U') and extrapolated with
/// the end slopes, so it is a power law on each segment and in both tails.
/// U is recovered by quadrature from an anchor value at the first node; the
/// inverse marginal is the exact inverse of the interpolant, with a bisection
/// fallback.
class TabulatedUtility {
 public:
  TabulatedUtility(std::span<const double> theta, std::span<const double> marginal,
                   double u_anchor = 0.0);

  double value(double c) const;
  double marginal(double c) const;
  double inverse_marginal(double y) const;
  double value_at_zero() const { return data_->u_zero; }
  double value_at_infinity() const { return data_->u_infinity; }

  /// Integral of U'(theta)^(-lambda) over [lower, upper], upper may be inf.
  double kernel(double lambda, double lower, double upper) const;

  /// Decay exponent q of U' ~ theta^-q beyond the last node.
  double right_exponent() const { return -data_->slope.back(); }
  /// Decay exponent q of U' ~ theta^-q below the first node.
  double left_exponent() const { return -data_->slope.front(); }
  std::size_t size() const { return data_->log_theta.size(); }

 private:
  struct Data {
    std::vector<double> log_theta;
    std::vector<double> log_marginal;
    std::vector<double> slope;       // d log U' / d log theta per segment
    std::vector<double> cumulative;  // integral of U' from the first node
    double u_anchor = 0.0;
    double u_zero = 0.0;
    double u_infinity = 0.0;
  };

  double log_marginal_at(double log_c) const;
  double integrate_marginal(double lo, double hi) const;

  std::shared_ptr<const Data> data_;
};

/// A utility family. Immutable and cheap to copy.
class UtilitySpec {
 public:
  using Kind = std::variant<PowerUtility, LogUtility, ShiftedPowerUtility, TabulatedUtility>;

  static UtilitySpec power(double p);
  static UtilitySpec log();
  static UtilitySpec shifted_power(double p, double eta, double offset);
  static UtilitySpec tabulated(std::span<const double> theta, std::span<const double> marginal,
                               double u_anchor = 0.0);

  const Kind& kind() const { return kind_; }
  std::string describe() const;

 private:
  explicit UtilitySpec(Kind kind) : kind_(std::move(kind)) {}
  Kind kind_;
};

enum class KernelBranch { kPlus, kMinus };

/// U(c) for c >= 0; U(0) is the limit and may be -inf.
double u_value(const UtilitySpec& spec, double c);
/// U'(c) for c >= 0; U'(0) is the limit and may be +inf.
double u_marginal(const UtilitySpec& spec, double c);
/// Inverse of U' on (0, U'(0)), extended by 0 on [U'(0), inf).
double inverse_marginal(const UtilitySpec& spec, double y);

double u_at_zero(const UtilitySpec& spec);
double marginal_at_zero(const UtilitySpec& spec);
/// lim_{c -> inf} U(c), possibly +inf.
double u_at_infinity(const UtilitySpec& spec);

/// Integral of U'(theta)^(-lambda) over [lower, upper] where lambda is
/// lambda_plus or lambda_minus. upper may be +inf. Throws ModelError when the
/// integral diverges.
double kernel_integral(const UtilitySpec& spec, const RootSet& roots, KernelBranch branch,
                       double lower, double upper);

/// Same with an explicit exponent.
double kernel_integral_exponent(const UtilitySpec& spec, double lambda, double lower,
                                double upper);

/// True when the integral of U'^(-lambda_minus) over [c, inf) is finite.
bool check_finiteness(const UtilitySpec& spec, const RootSet& roots);

/// Integral of s^e over [lower, upper]; upper may be +inf, lower may be 0.
/// Throws ModelError on divergence.
double power_integral(double e, double lower, double upper);

}  // namespace ruinbound
