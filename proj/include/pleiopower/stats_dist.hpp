#pragma once

// Chi-square, noncentral chi-square and boundary-mixture distributions used
// for LRT reference nulls and NCP-based power, plus a one-sample KS test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "pleiopower/error.hpp"

namespace pleiopower {

/// P(chi2_df > x) via the regularized upper incomplete gamma function.
inline double chisq_sf(double x, int df) {
  if (df <= 0) throw std::invalid_argument("chisq_sf: df must be positive (df=0 is only valid inside a MixtureNull)");
  if (!(x >= 0.0)) throw std::invalid_argument("chisq_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

/// P(chi2_df(ncp) > x) as a Poisson(ncp/2)-weighted sum of central survival
/// terms. Summation starts at the Poisson mode and walks both ways until the
/// bound on the neglected Poisson mass drops below 1e-14.
inline double noncentral_chisq_sf(double x, int df, double ncp) {
  if (!(ncp >= 0.0)) throw std::invalid_argument("noncentral_chisq_sf: ncp must be >= 0");
  if (ncp == 0.0) return chisq_sf(x, df);
  if (df <= 0) throw std::invalid_argument("noncentral_chisq_sf: df must be positive");
  if (!(x >= 0.0)) throw std::invalid_argument("noncentral_chisq_sf: x must be >= 0");
  if (x == 0.0) return 1.0;

  constexpr double tail_tol = 1e-14;
  const double mu = 0.5 * ncp;
  const long mode = static_cast<long>(std::floor(mu));
  const double log_mode_weight =
      -mu + static_cast<double>(mode) * std::log(mu) - std::lgamma(static_cast<double>(mode) + 1.0);
  const double mode_weight = std::exp(log_mode_weight);

  double sum = mode_weight * chisq_sf(x, df + 2 * static_cast<int>(mode));

  // forward: j > mode, weights decay geometrically once j+1 > mu
  double w = mode_weight;
  for (long j = mode + 1;; ++j) {
    w *= mu / static_cast<double>(j);
    sum += w * chisq_sf(x, df + 2 * static_cast<int>(j));
    const double ratio = mu / static_cast<double>(j + 1);
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < tail_tol) break;
    if (w == 0.0) break;
  }
  // backward: j < mode
  w = mode_weight;
  for (long j = mode - 1; j >= 0; --j) {
    w *= static_cast<double>(j + 1) / mu;
    sum += w * chisq_sf(x, df + 2 * static_cast<int>(j));
    const double ratio = static_cast<double>(j) / mu;
    if (ratio < 1.0 && w * ratio / (1.0 - ratio) < tail_tol) break;
  }
  return std::clamp(sum, 0.0, 1.0);
}

/// Finite mixture of central chi-squares; df = 0 is a point mass at zero.
class MixtureNull {
 public:
  struct Component {
    double weight;
    int df;
  };

  MixtureNull() = default;

  explicit MixtureNull(std::vector<Component> components) : components_(std::move(components)) {
    if (components_.empty()) throw std::invalid_argument("MixtureNull: no components");
    double total = 0.0;
    int point_masses = 0;
    for (const auto& c : components_) {
      if (!(c.weight > 0.0)) throw std::invalid_argument("MixtureNull: weights must be positive");
      if (c.df < 0) throw std::invalid_argument("MixtureNull: df must be >= 0");
      if (c.df == 0) ++point_masses;
      total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("MixtureNull: weights must sum to 1");
    if (point_masses > 1) throw std::invalid_argument("MixtureNull: at most one df=0 component");
  }

  static MixtureNull chi_square(int df) { return MixtureNull({{1.0, df}}); }
  /// 0.5 chi2_{df} + 0.5 chi2_{df+1}
  static MixtureNull half_half(int df) { return MixtureNull({{0.5, df}, {0.5, df + 1}}); }

  const std::vector<Component>& components() const { return components_; }

  double point_mass() const {
    for (const auto& c : components_)
      if (c.df == 0) return c.weight;
    return 0.0;
  }

  std::string describe() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (i) os << '+';
      os << components_[i].weight << "*chi2(" << components_[i].df << ')';
    }
    return os.str();
  }

 private:
  std::vector<Component> components_{{1.0, 1}};
};

inline double mixture_sf(double x, const MixtureNull& null) {
  if (!(x >= 0.0)) throw std::invalid_argument("mixture_sf: x must be >= 0");
  if (x == 0.0) return 1.0;
  double s = 0.0;
  for (const auto& c : null.components())
    if (c.df > 0) s += c.weight * chisq_sf(x, c.df);
  return s;
}

/// Right-continuous CDF; F(0) includes the point mass.
inline double mixture_cdf(double x, const MixtureNull& null) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) return null.point_mass();
  return 1.0 - mixture_sf(x, null);
}

/// Sorted sample of simulated LRT statistics.
struct EmpiricalNull {
  std::vector<double> sorted_statistics;
  std::string source;

  static EmpiricalNull from_sample(std::vector<double> sample, std::string source) {
    for (double v : sample)
      if (!(v >= 0.0)) throw std::invalid_argument("EmpiricalNull: statistics must be nonnegative");
    std::sort(sample.begin(), sample.end());
    return EmpiricalNull{std::move(sample), std::move(source)};
  }

  std::size_t size() const { return sorted_statistics.size(); }
};

/// Monte Carlo p-value (1 + #{s >= x}) / (n + 1); never exactly zero.
inline double empirical_sf(double x, const EmpiricalNull& null) {
  const auto& s = null.sorted_statistics;
  if (s.empty()) throw std::invalid_argument("empirical_sf: empty null sample");
  const auto at_least = static_cast<double>(s.end() - std::lower_bound(s.begin(), s.end(), x));
  return (1.0 + at_least) / (static_cast<double>(s.size()) + 1.0);
}

using NullDistribution = std::variant<MixtureNull, EmpiricalNull>;

inline double null_sf(double x, const NullDistribution& null) {
  return std::visit(
      [x](const auto& d) {
        if constexpr (std::is_same_v<std::decay_t<decltype(d)>, MixtureNull>)
          return mixture_sf(x, d);
        else
          return empirical_sf(x, d);
      },
      null);
}

inline std::string describe(const NullDistribution& null) {
  if (const auto* m = std::get_if<MixtureNull>(&null)) return m->describe();
  const auto& e = std::get<EmpiricalNull>(null);
  return "empirical(n=" + std::to_string(e.size()) + (e.source.empty() ? "" : ";" + e.source) + ")";
}

/// Root of mixture_sf(x) = alpha, bisection to 1e-9. Returns 0 when the point
/// mass alone already exceeds 1 - alpha.
inline double null_critical(const MixtureNull& null, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("null_critical: alpha must be in (0,1)");
  if (1.0 - null.point_mass() <= alpha) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  while (mixture_sf(hi, null) > alpha) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw NumericalError("null_critical: failed to bracket quantile");
  }
  while (hi - lo > 1e-9) {
    const double mid = 0.5 * (lo + hi);
    (mixture_sf(mid, null) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

/// Upper order-statistic convention: the smallest sample value with at most
/// alpha*n values strictly above it.
inline double null_critical(const EmpiricalNull& null, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("null_critical: alpha must be in (0,1)");
  const auto& s = null.sorted_statistics;
  const auto required = static_cast<std::size_t>(std::ceil(20.0 / alpha - 1e-9));
  if (s.size() < required)
    throw std::invalid_argument("null_critical: empirical null needs at least " + std::to_string(required) +
                                " statistics for alpha=" + std::to_string(alpha) + " (have " +
                                std::to_string(s.size()) + ")");
  const double n = static_cast<double>(s.size());
  const auto allowed_above = static_cast<std::size_t>(std::floor(alpha * n + 1e-9));
  // candidate at sorted position i has (n - upper_bound(s[i])) values strictly above
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto above = static_cast<std::size_t>(s.end() - std::upper_bound(s.begin(), s.end(), s[i]));
    if (above <= allowed_above) return s[i];
  }
  return s.back();
}

inline double null_critical(const NullDistribution& null, double alpha) {
  return std::visit([alpha](const auto& d) { return null_critical(d, alpha); }, null);
}

/// Total NCP giving `target_power` for a df-degree test at `critical_value`:
/// root of noncentral_chisq_sf(c, df, ncp) = target_power on [0, 1e4].
/// Zero when the target does not exceed the level: power at ncp 0 is alpha
/// (up to the rounding of c).
inline double solve_total_ncp(double alpha, double target_power, double critical_value, int df) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("solve_total_ncp: alpha must be in (0,1)");
  if (!(target_power > 0.0 && target_power < 1.0))
    throw std::invalid_argument("solve_total_ncp: target_power must be in (0,1)");
  if (!(critical_value >= 0.0)) throw std::invalid_argument("solve_total_ncp: critical value must be >= 0");
  constexpr double upper = 1e4;
  auto gap = [&](double ncp) { return noncentral_chisq_sf(critical_value, df, ncp) - target_power; };
  if (target_power <= alpha || gap(0.0) >= 0.0) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  double f_lo = gap(0.0), f_hi = gap(hi);
  while (f_hi < 0.0) {
    if (hi >= upper) throw NumericalError("solve_total_ncp: target power unreachable for ncp <= 1e4");
    lo = hi;
    f_lo = f_hi;
    hi = std::min(2.0 * hi, upper);
    f_hi = gap(hi);
  }
  if (f_hi == 0.0) return hi;
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(gap, lo, hi, f_lo, f_hi,
                                                      boost::math::tools::eps_tolerance<double>(45), iterations);
  return 0.5 * (root.first + root.second);
}

/// Asymptotic Kolmogorov survival P(K > t).
inline double kolmogorov_sf(double t) {
  constexpr double tol = 1e-10;
  if (t <= 0.0) return 1.0;
  if (t < 1.18) {
    const double pi2 = std::numbers::pi * std::numbers::pi;
    double s = 0.0;
    for (int j = 1; j < 1000; ++j) {
      const double odd = 2.0 * j - 1.0;
      const double term = std::exp(-odd * odd * pi2 / (8.0 * t * t));
      s += term;
      if (term < tol) break;
    }
    return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / t * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int j = 1; j < 1000; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    s += (j % 2 == 1 ? term : -term);
    if (term < tol) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic;
  double p_value;
};

/// One-sample KS test against a mixture reference. Tied sample values
/// (as produced by the point mass at zero) are compared against both one-sided
/// limits of the reference CDF.
namespace detail {

template <class Right, class Left>
KsResult ks_impl(std::span<const double> sample, Right&& cdf, Left&& cdf_left) {
  if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
  if (sample.size() < 50) throw std::invalid_argument("ks_test: asymptotic p-value needs n >= 50");
  std::vector<double> s(sample.begin(), sample.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t j = i;
    while (j < s.size() && s[j] == s[i]) ++j;
    const double ecdf_before = static_cast<double>(i) / n;
    const double ecdf_after = static_cast<double>(j) / n;
    d = std::max({d, std::abs(ecdf_after - cdf(s[i])), std::abs(cdf_left(s[i]) - ecdf_before)});
    i = j;
  }
  return {d, kolmogorov_sf(std::sqrt(n) * d)};
}

}  // namespace detail

inline KsResult ks_test(std::span<const double> sample, const MixtureNull& reference) {
  return detail::ks_impl(
      sample, [&](double x) { return mixture_cdf(x, reference); },
      [&](double x) { return x > 0.0 ? mixture_cdf(x, reference) : 0.0; });  // continuous away from 0
}

/// One-sample KS test against a continuous CDF.
inline KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf) {
  return detail::ks_impl(sample, cdf, cdf);
}

}  // namespace pleiopower
