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

#include "ruinbound/utility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ruinbound/errors.hpp"
#include "ruinbound/quadrature.hpp"

namespace ruinbound {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_nonnegative(double c, const char* what) {
  if (!(c >= 0.0)) throw InvalidInput(std::string(what) + " requires a nonnegative argument");
}

// (s^k - 1) / k evaluated without cancellation, k -> 0 gives log s.
double power_ratio_term(double k, double log_ratio) {
  if (k == 0.0) return log_ratio;
  return std::expm1(k * log_ratio) / k;
}

// U(c) = (c^(1-p) - 0) / (1-p) for the plain power family.
double power_value(double p, double c) {
  if (c == 0.0) return p < 1.0 ? 0.0 : -kInfinity;
  if (std::isinf(c)) return p < 1.0 ? kInfinity : 0.0;
  return std::pow(c, 1.0 - p) / (1.0 - p);
}

double shifted_value(const ShiftedPowerUtility& u, double c) {
  if (std::isinf(c)) {
    return u.p > 1.0 ? std::pow(u.eta, 1.0 - u.p) / (u.p - 1.0) - u.offset : kInfinity;
  }
  const double log_ratio = std::log1p(c / u.eta);
  return std::pow(u.eta, 1.0 - u.p) * power_ratio_term(1.0 - u.p, log_ratio) - u.offset;
}

QuadratureOptions tight() {
  QuadratureOptions o;
  o.rel_tol = 1e-14;
  o.abs_tol = 1e-300;
  return o;
}

void require_converged(const QuadratureResult& r, const char* what) {
  const double scale = std::max(std::abs(r.value), 1e-300);
  if (!std::isfinite(r.value) || r.error > 1e-10 * scale + 1e-300) {
    throw NumericalError(std::string("quadrature did not converge for ") + what);
  }
}

}  // namespace

double power_integral(double e, double lower, double upper) {
  if (!(lower >= 0.0) || !(upper >= lower)) {
    throw InvalidInput("power_integral requires 0 <= lower <= upper");
  }
  if (lower == upper) return 0.0;
  const double k = e + 1.0;
  if (std::isinf(upper)) {
    if (!(k < 0.0) || lower == 0.0) throw ModelError("kernel integral diverges at infinity");
    return std::pow(lower, k) / (-k);
  }
  if (lower == 0.0) {
    if (!(k > 0.0)) throw ModelError("kernel integral diverges at zero");
    return std::pow(upper, k) / k;
  }
  return std::pow(lower, k) * power_ratio_term(k, std::log(upper / lower));
}

// ---------------------------------------------------------------------------
// TabulatedUtility

TabulatedUtility::TabulatedUtility(std::span<const double> theta,
                                   std::span<const double> marginal, double u_anchor) {
  if (theta.size() != marginal.size()) {
    throw InvalidInput("tabulated utility: theta and marginal sizes differ");
  }
  if (theta.size() < 3) throw InvalidInput("tabulated utility: need at least 3 nodes");
  if (!std::isfinite(u_anchor)) throw InvalidInput("tabulated utility: anchor must be finite");
  auto data = std::make_shared<Data>();
  data->u_anchor = u_anchor;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    if (!(theta[i] > 0.0) || !std::isfinite(theta[i]) || !(marginal[i] > 0.0) ||
        !std::isfinite(marginal[i])) {
      throw InvalidInput("tabulated utility: nodes and marginals must be positive and finite");
    }
    if (i > 0 && !(theta[i] > theta[i - 1])) {
      throw InvalidInput("tabulated utility: theta must be strictly increasing");
    }
    if (i > 0 && !(marginal[i] < marginal[i - 1])) {
      throw InvalidInput("tabulated utility: marginal utility must be strictly decreasing");
    }
    data->log_theta.push_back(std::log(theta[i]));
    data->log_marginal.push_back(std::log(marginal[i]));
  }
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    data->slope.push_back((data->log_marginal[i + 1] - data->log_marginal[i]) /
                          (data->log_theta[i + 1] - data->log_theta[i]));
  }
  data_ = data;

  // Cumulative integral of U' between nodes; each segment is a power law.
  data->cumulative.assign(theta.size(), 0.0);
  for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
    data->cumulative[i + 1] = data->cumulative[i] + integrate_marginal(theta[i], theta[i + 1]);
  }

  const QuadratureOptions opts = tight();
  const Integrand marginal_fn = [this](double c) { return this->marginal(c); };
  if (left_exponent() < 1.0) {
    auto r = integrate_from_zero(marginal_fn, theta.front(), opts);
    require_converged(r, "U(0)");
    data->u_zero = u_anchor - r.value;
  } else {
    data->u_zero = -kInfinity;
  }
  if (right_exponent() > 1.0) {
    auto r = integrate_tail(marginal_fn, theta.back(), opts);
    require_converged(r, "U(inf)");
    data->u_infinity = u_anchor + data->cumulative.back() + r.value;
  } else {
    data->u_infinity = kInfinity;
  }
}

double TabulatedUtility::log_marginal_at(double log_c) const {
  const auto& lt = data_->log_theta;
  const auto& lm = data_->log_marginal;
  const auto& s = data_->slope;
  if (log_c <= lt.front()) return lm.front() + s.front() * (log_c - lt.front());
  if (log_c >= lt.back()) return lm.back() + s.back() * (log_c - lt.back());
  const auto it = std::upper_bound(lt.begin(), lt.end(), log_c);
  const std::size_t i = static_cast<std::size_t>(it - lt.begin()) - 1;
  return lm[i] + s[i] * (log_c - lt[i]);
}

double TabulatedUtility::marginal(double c) const {
  require_nonnegative(c, "u_marginal");
  if (c == 0.0) return kInfinity;
  if (std::isinf(c)) return 0.0;
  return std::exp(log_marginal_at(std::log(c)));
}

double TabulatedUtility::integrate_marginal(double lo, double hi) const {
  if (lo == hi) return 0.0;
  auto f = [this](double c) { return marginal(c); };
  const auto& lt = data_->log_theta;
  double sum = 0.0;
  double cursor = lo;
  // Split at nodes so every piece is a single power law.
  for (double node_log : lt) {
    const double node = std::exp(node_log);
    if (node <= cursor) continue;
    if (node >= hi) break;
    auto r = integrate(f, cursor, node, tight());
    require_converged(r, "U");
    sum += r.value;
    cursor = node;
  }
  auto r = integrate(f, cursor, hi, tight());
  require_converged(r, "U");
  return sum + r.value;
}

double TabulatedUtility::value(double c) const {
  require_nonnegative(c, "u_value");
  if (c == 0.0) return data_->u_zero;
  if (std::isinf(c)) return data_->u_infinity;
  const auto& lt = data_->log_theta;
  const double first = std::exp(lt.front());
  if (c <= first) return data_->u_anchor - integrate_marginal(c, first);
  const double lc = std::log(c);
  std::size_t i = lt.size() - 1;
  if (lc < lt.back()) {
    i = static_cast<std::size_t>(std::upper_bound(lt.begin(), lt.end(), lc) - lt.begin()) - 1;
  }
  return data_->u_anchor + data_->cumulative[i] + integrate_marginal(std::exp(lt[i]), c);
}

double TabulatedUtility::inverse_marginal(double y) const {
  if (!(y > 0.0)) throw InvalidInput("inverse_marginal requires y > 0");
  if (std::isinf(y)) return 0.0;
  const auto& lt = data_->log_theta;
  const auto& lm = data_->log_marginal;
  const auto& s = data_->slope;
  const double ly = std::log(y);
  double log_c = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  if (ly >= lm.front()) {
    log_c = lt.front() + (ly - lm.front()) / s.front();
    lo = -1e300;
    hi = lt.front();
  } else if (ly <= lm.back()) {
    log_c = lt.back() + (ly - lm.back()) / s.back();
    lo = lt.back();
    hi = 1e300;
  } else {
    // lm is decreasing: find i with lm[i] >= ly > lm[i+1].
    const auto it = std::lower_bound(lm.begin(), lm.end(), ly, std::greater<double>());
    const std::size_t i = static_cast<std::size_t>(it - lm.begin()) - 1;
    log_c = lt[i] + (ly - lm[i]) / s[i];
    lo = lt[i];
    hi = lt[i + 1];
  }
  if (std::abs(log_marginal_at(log_c) - ly) <= 1e-12 * (1.0 + std::abs(ly))) {
    return std::exp(log_c);
  }
  // Fallback: bisection on log c inside the located segment.
  lo = std::max(lo, log_c - 50.0);
  hi = std::min(hi, log_c + 50.0);
  for (int k = 0; k < 200 && hi - lo > 1e-15 * (1.0 + std::abs(lo)); ++k) {
    const double mid = 0.5 * (lo + hi);
    if (log_marginal_at(mid) > ly) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::exp(0.5 * (lo + hi));
}

double TabulatedUtility::kernel(double lambda, double lower, double upper) const {
  if (!(lower >= 0.0) || !(upper >= lower)) {
    throw InvalidInput("kernel_integral requires 0 <= lower <= upper");
  }
  if (lower == upper) return 0.0;
  const double left_power = left_exponent() * lambda;   // integrand ~ theta^left_power at 0
  const double right_power = right_exponent() * lambda;  // ... and at infinity
  // (U')^-lambda = exp(-lambda log U').
  auto f = [this, lambda](double theta) {
    return std::exp(-lambda * log_marginal_at(std::log(theta)));
  };
  const auto& lt = data_->log_theta;
  const double first = std::exp(lt.front());
  const double last = std::exp(lt.back());
  const QuadratureOptions opts = tight();
  double sum = 0.0;
  double cursor = lower;
  if (cursor == 0.0) {
    if (!(left_power > -1.0)) throw ModelError("kernel integral diverges at zero");
    const double stop = std::min(first, upper);
    auto r = integrate_from_zero(f, stop, opts);
    require_converged(r, "kernel near zero");
    sum += r.value;
    cursor = stop;
  }
  const double finite_end = std::isinf(upper) ? std::max(cursor, last) : upper;
  for (double node_log : lt) {
    const double node = std::exp(node_log);
    if (node <= cursor) continue;
    if (node >= finite_end) break;
    auto r = integrate(f, cursor, node, opts);
    require_converged(r, "kernel");
    sum += r.value;
    cursor = node;
  }
  if (finite_end > cursor) {
    auto r = integrate(f, cursor, finite_end, opts);
    require_converged(r, "kernel");
    sum += r.value;
    cursor = finite_end;
  }
  if (std::isinf(upper)) {
    if (!(right_power < -1.0)) throw ModelError("kernel integral diverges at infinity");
    auto r = integrate_tail(f, cursor, opts);
    require_converged(r, "kernel tail");
    sum += r.value;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// UtilitySpec

UtilitySpec UtilitySpec::power(double p) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("power utility requires p > 0");
  if (p == 1.0) throw InvalidInput("power utility requires p != 1 (use log)");
  return UtilitySpec(PowerUtility{p});
}

UtilitySpec UtilitySpec::log() { return UtilitySpec(LogUtility{}); }

UtilitySpec UtilitySpec::shifted_power(double p, double eta, double offset) {
  if (!(p > 0.0) || !std::isfinite(p)) throw InvalidInput("shifted_power requires p > 0");
  if (!(eta > 0.0) || !std::isfinite(eta)) throw InvalidInput("shifted_power requires eta > 0");
  if (!(offset >= 0.0) || !std::isfinite(offset)) {
    throw InvalidInput("shifted_power requires K >= 0");
  }
  return UtilitySpec(ShiftedPowerUtility{p, eta, offset});
}

UtilitySpec UtilitySpec::tabulated(std::span<const double> theta,
                                   std::span<const double> marginal, double u_anchor) {
  return UtilitySpec(TabulatedUtility(theta, marginal, u_anchor));
}

std::string UtilitySpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const PowerUtility& u) { os << "power(p=" << u.p << ")"; },
                 [&](const LogUtility&) { os << "log"; },
                 [&](const ShiftedPowerUtility& u) {
                   os << "shifted_power(p=" << u.p << ", eta=" << u.eta << ", K=" << u.offset
                      << ")";
                 },
                 [&](const TabulatedUtility& u) { os << "tabulated(" << u.size() << " nodes)"; },
             },
             kind_);
  return os.str();
}

double u_value(const UtilitySpec& spec, double c) {
  require_nonnegative(c, "u_value");
  return std::visit(Overloaded{
                        [&](const PowerUtility& u) { return power_value(u.p, c); },
                        [&](const LogUtility&) { return std::log(c); },
                        [&](const ShiftedPowerUtility& u) { return shifted_value(u, c); },
                        [&](const TabulatedUtility& u) { return u.value(c); },
                    },
                    spec.kind());
}

double u_marginal(const UtilitySpec& spec, double c) {
  require_nonnegative(c, "u_marginal");
  return std::visit(Overloaded{
                        [&](const PowerUtility& u) {
                          return c == 0.0 ? kInfinity : std::pow(c, -u.p);
                        },
                        [&](const LogUtility&) { return 1.0 / c; },
                        [&](const ShiftedPowerUtility& u) { return std::pow(c + u.eta, -u.p); },
                        [&](const TabulatedUtility& u) { return u.marginal(c); },
                    },
                    spec.kind());
}

double inverse_marginal(const UtilitySpec& spec, double y) {
  if (!(y > 0.0)) throw InvalidInput("inverse_marginal requires y > 0");
  return std::visit(Overloaded{
                        [&](const PowerUtility& u) { return std::pow(y, -1.0 / u.p); },
                        [&](const LogUtility&) { return 1.0 / y; },
                        [&](const ShiftedPowerUtility& u) {
                          if (y >= std::pow(u.eta, -u.p)) return 0.0;
                          return std::max(0.0, std::pow(y, -1.0 / u.p) - u.eta);
                        },
                        [&](const TabulatedUtility& u) { return u.inverse_marginal(y); },
                    },
                    spec.kind());
}

double u_at_zero(const UtilitySpec& spec) { return u_value(spec, 0.0); }

double marginal_at_zero(const UtilitySpec& spec) { return u_marginal(spec, 0.0); }

double u_at_infinity(const UtilitySpec& spec) { return u_value(spec, kInfinity); }

double kernel_integral_exponent(const UtilitySpec& spec, double lambda, double lower,
                                double upper) {
  if (!(lower >= 0.0) || !(upper >= lower)) {
    throw InvalidInput("kernel_integral requires 0 <= lower <= upper");
  }
  return std::visit(Overloaded{
                        [&](const PowerUtility& u) {
                          return power_integral(u.p * lambda, lower, upper);
                        },
                        [&](const LogUtility&) { return power_integral(lambda, lower, upper); },
                        [&](const ShiftedPowerUtility& u) {
                          if (lower == upper) return 0.0;
                          return power_integral(u.p * lambda, lower + u.eta, upper + u.eta);
                        },
                        [&](const TabulatedUtility& u) { return u.kernel(lambda, lower, upper); },
                    },
                    spec.kind());
}

double kernel_integral(const UtilitySpec& spec, const RootSet& roots, KernelBranch branch,
                       double lower, double upper) {
  const double lambda = branch == KernelBranch::kPlus ? roots.lambda_plus : roots.lambda_minus;
  return kernel_integral_exponent(spec, lambda, lower, upper);
}

bool check_finiteness(const UtilitySpec& spec, const RootSet& roots) {
  const double lm = roots.lambda_minus;
  return std::visit(Overloaded{
                        [&](const PowerUtility& u) { return u.p * lm < -1.0; },
                        [&](const LogUtility&) { return lm < -1.0; },
                        [&](const ShiftedPowerUtility& u) { return u.p * lm < -1.0; },
                        [&](const TabulatedUtility& u) { return u.right_exponent() * lm < -1.0; },
                    },
                    spec.kind());
}

}  // namespace ruinbound
