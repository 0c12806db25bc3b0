#pragma once

// Asymptotic power of the linkage tests from the noncentrality parameter of
// the LRT. The per-family NCP is the gap between the maxima of twice the
// expected log-likelihood f(theta) = -ln|Sigma| - tr(Sigma^-1 Sigma_true)
// over the alternative and null parameter sets, averaged over sib-pair IBD
// states pi in {0, 1/2, 1} with probabilities (1/4, 1/2, 1/4).

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pleiopower/likelihood.hpp"
#include "pleiopower/linkage_tests.hpp"
#include "pleiopower/model_core.hpp"
#include "pleiopower/parallel.hpp"
#include "pleiopower/stats_dist.hpp"

namespace pleiopower {

/// Fully informative marker, full sibs.
inline std::vector<std::pair<FamilyRelatedness, double>> sib_pair_ibd_configs() {
  return {{FamilyRelatedness::sib_pair(0.0), 0.25},
          {FamilyRelatedness::sib_pair(0.5), 0.5},
          {FamilyRelatedness::sib_pair(1.0), 0.25}};
}

/// -ln|Sigma(eval)| - tr(Sigma(eval)^-1 Sigma(truth)) for one relatedness config.
inline double expected_f(const VcModel& eval, const VcModel& truth, const FamilyRelatedness& rel) {
  if (eval.k() != truth.k()) throw std::invalid_argument("expected_f: models differ in trait count");
  const MatrixXd sigma = assemble_sigma(eval, rel);
  const MatrixXd sigma_true = assemble_sigma(truth, rel);
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("expected_f: covariance is not positive definite");
  const double logdet = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  return -logdet - llt.solve(sigma_true).trace();
}

/// IBD-averaged expected_f over sib-pair configurations.
inline double expected_f_bar(const VcModel& eval, const VcModel& truth) {
  double s = 0.0;
  for (const auto& [rel, w] : sib_pair_ibd_configs()) s += w * expected_f(eval, truth, rel);
  return s;
}

struct AlternativeSpec {
  VcModel truth;
  int tested_trait = 0;
  TestType test = TestType::mtst;

  Structure fitted() const { return fitted_structure(test); }
};

struct NcpResult {
  double lambda_star = 0.0;
  double f_alt = 0.0;   ///< sup of f-bar over the alternative set
  double f_null = 0.0;  ///< sup of f-bar over the null set
  VcModel alt_argmax;
  VcModel null_argmax;
  bool truth_in_alternative = true;
};

namespace detail {

/// Rank <= 1 major-gene covariance is representable under complete pleiotropy.
inline bool rank_one(const MatrixXd& a) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(a, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  if (ev.size() < 2) return true;
  return ev(ev.size() - 2) <= 1e-10 * std::max(ev(ev.size() - 1), 1e-300);
}

}  // namespace detail

/// lambda* = sup_alt f-bar - sup_null f-bar. The alternative supremum is the
/// truth itself unless the fitted structure cannot represent it (general truth
/// fitted under complete pleiotropy), in which case it is optimized too.
inline NcpResult ncp_per_family(const AlternativeSpec& spec, const FitOptions& fit = {}) {
  spec.truth.validate();
  if (spec.tested_trait < 0 || spec.tested_trait >= spec.truth.k())
    throw std::invalid_argument("ncp_per_family: tested trait out of range");
  const bool ut = spec.test == TestType::ut;
  const VcModel truth = ut ? restrict_model(spec.truth, {spec.tested_trait}) : spec.truth;
  const int tested = ut ? 0 : spec.tested_trait;
  const Structure structure = spec.fitted();
  if (spec.test == TestType::mtst_general && truth.k() < 2)
    throw std::invalid_argument("ncp_per_family: general-model test needs at least two traits");

  const SufficientStats stats = expected_stats(truth, sib_pair_ibd_configs());
  NcpResult r;
  const FitResult null_fit =
      fit_stats(stats, FitConstraint::null_for(structure, tested), truth.trait_names, truth, false, fit);
  r.null_argmax = null_fit.model;
  r.f_null = expected_f_bar(null_fit.model, truth);

  r.truth_in_alternative = !(structure == Structure::pleiotropic && truth.structure() == Structure::general &&
                             !detail::rank_one(truth.A()));
  if (r.truth_in_alternative) {
    r.alt_argmax = truth;
    r.f_alt = expected_f_bar(truth, truth);
  } else {
    FitOptions alt_fit = fit;
    alt_fit.extra_starts.push_back(null_fit.model);
    const FitResult alt =
        fit_stats(stats, FitConstraint::unconstrained(structure), truth.trait_names, truth, false, alt_fit);
    r.alt_argmax = alt.model;
    r.f_alt = expected_f_bar(alt.model, truth);
  }
  // the optimizer pins f-bar to ~1e-8, so smaller gaps either way are noise
  double lambda = r.f_alt - r.f_null;
  if (lambda < -1e-8) throw NumericalError("ncp_per_family: negative NCP " + std::to_string(lambda));
  if (lambda <= 1e-8) lambda = 0.0;
  r.lambda_star = lambda;
  return r;
}

struct PowerResult {
  double lambda_star = 0.0;
  double lambda_total = 0.0;
  double critical_value = 0.0;
  int df = 1;
  /// ceil(lambda_total / lambda_star); absent when lambda_star = 0.
  std::optional<long long> required_n;
  std::optional<double> power_at_n;
  std::optional<long long> n;
  std::string convention;

  bool attainable() const { return required_n.has_value(); }
};

inline PowerResult power_and_n(double lambda_star, double alpha, double target_power, std::optional<long long> n,
                               double critical_value, int df_alt, std::string convention = {}) {
  if (!(lambda_star >= 0.0)) throw std::invalid_argument("power_and_n: lambda* must be >= 0");
  if (n && *n < 0) throw std::invalid_argument("power_and_n: n must be >= 0");
  PowerResult r;
  r.lambda_star = lambda_star;
  r.critical_value = critical_value;
  r.df = df_alt;
  r.n = n;
  r.convention = std::move(convention);
  r.lambda_total = solve_total_ncp(alpha, target_power, critical_value, df_alt);
  if (lambda_star > 0.0) {
    const double ratio = r.lambda_total / lambda_star;
    if (ratio > 9e18) throw NumericalError("power_and_n: required sample size overflows");
    auto req = static_cast<long long>(std::ceil(ratio));
    // exact multiples: keep the smallest n with n * lambda* >= lambda_T
    if (req > 0 && static_cast<double>(req - 1) * lambda_star >= r.lambda_total) --req;
    r.required_n = std::max(req, 1LL);
  }
  if (n) r.power_at_n = noncentral_chisq_sf(critical_value, df_alt, static_cast<double>(*n) * lambda_star);
  return r;
}

inline PowerResult power_and_n(double lambda_star, double alpha, double target_power, std::optional<long long> n,
                               const MixtureNull& null_for_critical, int df_alt) {
  return power_and_n(lambda_star, alpha, target_power, n, null_critical(null_for_critical, alpha), df_alt,
                     "null=" + null_for_critical.describe());
}

/// How the UT critical value is chosen: from its 1/2 chi2_0 + 1/2 chi2_1 null
/// (the chi2_1 quantile at 1 - 2 alpha), or the plain chi2_1 quantile.
enum class UtCritical { mixture, chisq1 };

inline const char* to_string(UtCritical c) { return c == UtCritical::mixture ? "mixture" : "chisq1"; }

struct PowerOptions {
  double alpha = 0.01;
  double target_power = 0.8;
  std::optional<long long> n;
  UtCritical ut_critical = UtCritical::mixture;
  FitOptions fit;
  /// Critical values for general-model tests with k >= 3, keyed by k.
  /// Defaults to the simulated alpha = 0.01 table.
  std::optional<std::map<int, double>> general_criticals;
};

struct TestCalibration {
  double critical = 0.0;
  int df = 1;
  std::string description;
};

/// Critical value and noncentral degrees of freedom used for power. The
/// general-model alternative has k free parameters in row/column i of A.
inline TestCalibration calibration_for(TestType test, int k, const PowerOptions& opt) {
  switch (test) {
    case TestType::ut: {
      const MixtureNull null = opt.ut_critical == UtCritical::mixture ? MixtureNull::half_half(0) : MixtureNull::chi_square(1);
      return {null_critical(null, opt.alpha), 1, std::string("ut_critical=") + to_string(opt.ut_critical)};
    }
    case TestType::mtst:
      return {null_critical(MixtureNull::chi_square(1), opt.alpha), 1, "null=chi2(1)"};
    case TestType::mtst_general: {
      if (k == 2) return {null_critical(MixtureNull::half_half(1), opt.alpha), 2, "null=0.5*chi2(1)+0.5*chi2(2)"};
      if (opt.general_criticals) {
        auto it = opt.general_criticals->find(k);
        if (it == opt.general_criticals->end())
          throw std::invalid_argument("no general-model critical value supplied for k=" + std::to_string(k));
        return {it->second, k, "critical=supplied"};
      }
      if (std::abs(opt.alpha - 0.01) > 1e-12)
        throw std::invalid_argument("general-model critical values for k>=3 are tabulated only at alpha=0.01; "
                                    "regenerate them with simulate-null");
      const auto& table = general_critical_table_01();
      auto it = table.find(k);
      if (it == table.end()) throw std::invalid_argument("no tabulated general-model critical value for k=" + std::to_string(k));
      return {it->second, k, "critical=simulated-table"};
    }
  }
  throw std::logic_error("calibration_for: unknown test");
}

inline PowerResult compute_power(const AlternativeSpec& spec, const PowerOptions& opt = {}) {
  const NcpResult ncp = ncp_per_family(spec, opt.fit);
  const TestCalibration cal = calibration_for(spec.test, spec.truth.k(), opt);
  std::ostringstream conv;
  conv << "test=" << to_string(spec.test) << ";" << cal.description << ";df=" << cal.df
       << ";ibd=sib-pair-perfect-marker(1/4,1/2,1/4)";
  if (!ncp.truth_in_alternative) conv << ";alternative=optimized";
  return power_and_n(ncp.lambda_star, opt.alpha, opt.target_power, opt.n, cal.critical, cal.df, conv.str());
}

enum class SweepParameter { tested_effect, other_effect, rho_g, rho_e, rho_a };

inline SweepParameter parse_sweep_parameter(const std::string& s) {
  if (s == "tested-effect") return SweepParameter::tested_effect;
  if (s == "other-effect") return SweepParameter::other_effect;
  if (s == "rho-g") return SweepParameter::rho_g;
  if (s == "rho-e") return SweepParameter::rho_e;
  if (s == "rho-a") return SweepParameter::rho_a;
  throw std::invalid_argument("unknown sweep parameter '" + s +
                              "' (expected tested-effect, other-effect, rho-g, rho-e or rho-a)");
}

inline const char* to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::tested_effect: return "tested-effect";
    case SweepParameter::other_effect: return "other-effect";
    case SweepParameter::rho_g: return "rho-g";
    case SweepParameter::rho_e: return "rho-e";
    case SweepParameter::rho_a: return "rho-a";
  }
  return "?";
}

/// Sets one grid value. Effect sizes change a_prop with g_prop fixed and the
/// environmental share absorbing the difference; rho_g and rho_e change the
/// (tested, other) pair; rho_a sets every off-diagonal major-gene correlation
/// and turns the model general.
inline ModelSpec apply_sweep_value(ModelSpec spec, SweepParameter p, int tested, int other, double value) {
  auto set_effect = [&](int t) {
    auto& tr = spec.traits.at(t);
    tr.a_prop = value;
    tr.e_prop = 1.0 - tr.a_prop - tr.g_prop;
  };
  auto set_pair = [&](MatrixXd& r) {
    r(tested, other) = value;
    r(other, tested) = value;
  };
  switch (p) {
    case SweepParameter::tested_effect: set_effect(tested); break;
    case SweepParameter::other_effect: set_effect(other); break;
    case SweepParameter::rho_g: set_pair(spec.rho_g); break;
    case SweepParameter::rho_e: set_pair(spec.rho_e); break;
    case SweepParameter::rho_a: {
      MatrixXd r = MatrixXd::Constant(spec.k(), spec.k(), value);
      r.diagonal().setOnes();
      spec.rho_a = r;
      break;
    }
  }
  return spec;
}

struct SweepRow {
  double value = 0.0;
  TestType test = TestType::mtst;
  std::optional<PowerResult> result;
  std::string error;
};

/// One row per (grid value, test), grid-major. Invalid grid points are
/// reported per row.
inline std::vector<SweepRow> sweep(const ModelSpec& base, int tested, int other, SweepParameter parameter,
                                   const std::vector<double>& grid, const std::vector<TestType>& tests,
                                   const PowerOptions& opt = {}, unsigned threads = 1) {
  if (tested < 0 || tested >= base.k() || other < 0 || other >= base.k())
    throw std::invalid_argument("sweep: trait index out of range");
  if (tested == other && parameter != SweepParameter::tested_effect && parameter != SweepParameter::rho_a)
    throw std::invalid_argument("sweep: 'other' trait must differ from the tested trait");
  std::vector<SweepRow> rows(grid.size() * tests.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    auto& row = rows[i];
    row.value = grid[i / tests.size()];
    row.test = tests[i % tests.size()];
    try {
      const ModelSpec spec = apply_sweep_value(base, parameter, tested, other, row.value);
      AlternativeSpec alt{spec.to_model(), tested, row.test};
      row.result = compute_power(alt, opt);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

struct MisspecRow {
  double rho_a = 0.0;
  std::optional<PowerResult> pleiotropic;
  std::optional<PowerResult> general;
  std::string error;
};

/// Required sample sizes for the trait-specific test under a general truth
/// with every major-gene correlation equal to rho_a, fitted either under
/// complete pleiotropy (misspecified) or under the general model.
inline std::vector<MisspecRow> misspec_compare(const ModelSpec& base, int tested, const std::vector<double>& rho_a_grid,
                                               const PowerOptions& opt = {}, unsigned threads = 1) {
  if (tested < 0 || tested >= base.k()) throw std::invalid_argument("misspec_compare: tested trait out of range");
  if (base.k() < 2) throw std::invalid_argument("misspec_compare: needs at least two traits");
  std::vector<MisspecRow> rows(rho_a_grid.size());
  parallel_for(rows.size(), threads, [&](std::size_t i) {
    auto& row = rows[i];
    row.rho_a = rho_a_grid[i];
    try {
      const ModelSpec spec = apply_sweep_value(base, SweepParameter::rho_a, tested, tested, row.rho_a);
      const VcModel truth = spec.to_model();
      row.pleiotropic = compute_power({truth, tested, TestType::mtst}, opt);
      row.general = compute_power({truth, tested, TestType::mtst_general}, opt);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

}  // namespace pleiopower
