#pragma once

// Sibship simulation at a fully informative locus, null-distribution
// simulation of the linkage tests and type-1 error estimation.

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <optional>
#include <sstream>
#include <random>
#include <string>
#include <vector>

#include "pleiopower/likelihood.hpp"
#include "pleiopower/linkage_tests.hpp"
#include "pleiopower/parallel.hpp"
#include "pleiopower/rng.hpp"
#include "pleiopower/stats_dist.hpp"

namespace pleiopower {

struct SimConfig {
  VcModel model;
  int n_families = 1000;
  int sibship_size = 2;
  int reps = 2000;
  std::uint64_t base_seed = 20100801;

  void validate() const {
    model.validate();
    if (n_families < 1) throw std::invalid_argument("SimConfig: n_families must be >= 1");
    if (sibship_size < 1) throw std::invalid_argument("SimConfig: sibship_size must be >= 1");
    if (reps < 1) throw std::invalid_argument("SimConfig: reps must be >= 1");
  }
};

/// Each child receives a uniformly chosen allele from each parent;
/// pi_jl = (same paternal + same maternal) / 2, 2phi = 1/2.
inline FamilyRelatedness gen_sibship_ibd(int sibship_size, Rng& rng) {
  if (sibship_size < 1) throw std::invalid_argument("gen_sibship_ibd: sibship size must be >= 1");
  std::bernoulli_distribution coin(0.5);
  std::vector<int> paternal(sibship_size), maternal(sibship_size);
  for (int j = 0; j < sibship_size; ++j) {
    paternal[j] = coin(rng);
    maternal[j] = coin(rng);
  }
  MatrixXd pi(sibship_size, sibship_size);
  for (int j = 0; j < sibship_size; ++j)
    for (int l = 0; l < sibship_size; ++l)
      pi(j, l) = 0.5 * ((paternal[j] == paternal[l]) + (maternal[j] == maternal[l]));
  return FamilyRelatedness::sibship(pi);
}

/// Phenotypes y ~ N(mu, Sigma_i) given a family's relatedness.
inline MatrixXd draw_phenotypes(const VcModel& model, const FamilyRelatedness& rel, Rng& rng) {
  const MatrixXd sigma = assemble_sigma(model, rel);
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw NumericalError("draw_phenotypes: family covariance is not positive definite");
  std::normal_distribution<double> z;
  VectorXd e(sigma.rows());
  for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = z(rng);
  const VectorXd y = detail::repeat_means(model.means, rel.size()) + llt.matrixL() * e;
  const auto k = model.k();
  MatrixXd out(rel.size(), k);
  for (int j = 0; j < rel.size(); ++j) out.row(j) = y.segment(j * k, k).transpose();
  return out;
}

/// Dataset for replicate `rep`; the stream of family f depends only on
/// (base_seed, rep, f).
inline Dataset gen_dataset(const SimConfig& config, const VcModel& model, int rep) {
  Dataset d;
  d.trait_names = model.trait_names;
  d.families.reserve(static_cast<std::size_t>(config.n_families));
  for (int f = 0; f < config.n_families; ++f) {
    Rng rng = make_rng(derive_seed(config.base_seed, rep, f));
    FamilyRelatedness rel = gen_sibship_ibd(config.sibship_size, rng);
    MatrixXd y = draw_phenotypes(model, rel, rng);
    d.families.push_back({std::to_string(f + 1), std::move(rel), std::move(y)});
  }
  return d;
}

inline Dataset gen_dataset(const SimConfig& config, int rep) { return gen_dataset(config, config.model, rep); }

/// Null model for calibrating a test of `tested`: no major-gene effect on the
/// tested trait (polygenic 0.30), others with a_prop = other_a and polygenic
/// 0.30, uniform polygenic and environmental correlations `rho`. The general
/// structure uses major-gene correlation `rho_a_others` among the other traits;
/// the default 1 is the pleiotropic null written as a general model.
struct NullModelOptions {
  double other_a = 0.20;
  double polygenic = 0.30;
  double rho = 0.2;
  double rho_a_others = 1.0;
};

inline VcModel default_null_model(int k, int tested, Structure structure, const NullModelOptions& o = {}) {
  if (k < 1 || tested < 0 || tested >= k) throw std::invalid_argument("default_null_model: bad k or tested trait");
  std::vector<TraitSpec> traits;
  for (int t = 0; t < k; ++t) {
    const double a = t == tested ? 0.0 : o.other_a;
    traits.push_back({"T" + std::to_string(t + 1), a, o.polygenic, 1.0 - a - o.polygenic});
  }
  MatrixXd r = MatrixXd::Constant(k, k, o.rho);
  r.diagonal().setOnes();
  if (structure == Structure::pleiotropic) return model_from_proportions(traits, r, r);
  MatrixXd ra = MatrixXd::Constant(k, k, o.rho_a_others);
  ra.diagonal().setOnes();
  return model_from_proportions(traits, r, r, ra);
}

/// True when the model satisfies the null of `kind`.
inline bool satisfies_null(const VcModel& model, const TestKind& kind) {
  const MatrixXd a = model.A();
  if (kind.type == TestType::mtst_general) return a.row(kind.trait).cwiseAbs().maxCoeff() <= 1e-12;
  return std::abs(a(kind.trait, kind.trait)) <= 1e-12;
}

struct Type1Estimate {
  double alpha = 0.0;
  double critical = 0.0;
  double rate = 0.0;
  double standard_error = 0.0;
};

struct NullCalibration {
  EmpiricalNull statistics;
  std::vector<double> per_rep;  ///< statistic of replicate r (NaN where the fit failed)
  std::vector<Type1Estimate> type1;
  KsResult ks{0.0, 1.0};  ///< meaningful only with a reference and >= 50 statistics
  std::map<double, double> empirical_criticals;
  int failures = 0;
  int clamped = 0;
  bool valid = true;
  std::string reference;
};

struct CalibrationOptions {
  std::vector<double> alphas{0.01, 0.05};
  FitOptions fit;
  unsigned threads = 1;
};

/// Simulates `config.reps` datasets under the null model config.model and
/// collects the LRT of `kind`. Rates and the KS test use the reference null
/// when one is given; empirical criticals are reported for alphas with at least
/// 20/alpha successful replicates. More than 2% failed replicates marks the
/// calibration invalid.
inline NullCalibration calibrate_null(const SimConfig& config, const TestKind& kind,
                                      const std::optional<MixtureNull>& reference,
                                      const CalibrationOptions& options = {}) {
  config.validate();
  if (!satisfies_null(config.model, kind))
    throw std::invalid_argument("calibrate_null: model does not satisfy the null hypothesis of the test");
  NullCalibration cal;
  if (reference) cal.reference = reference->describe();
  cal.per_rep.assign(static_cast<std::size_t>(config.reps), std::numeric_limits<double>::quiet_NaN());
  std::vector<char> clamped(cal.per_rep.size(), 0);
  // the bivariate-or-larger general test at k >= 3 has no asymptotic null;
  // the statistic itself is still well defined
  std::optional<EmpiricalNull> placeholder;
  if (kind.type == TestType::mtst_general && config.model.k() >= 3)
    placeholder = EmpiricalNull::from_sample({0.0}, "placeholder");
  parallel_for(cal.per_rep.size(), options.threads, [&](std::size_t rep) {
    try {
      const Dataset data = gen_dataset(config, static_cast<int>(rep));
      TestOptions topts;
      topts.fit = options.fit;
      topts.fit.seed = derive_seed(config.base_seed, rep, 0x5eedULL);
      topts.empirical_null = placeholder;
      const TestResult r = run_test(data, kind, topts);
      cal.per_rep[rep] = r.lrt;
      clamped[rep] = r.clamped;
    } catch (const std::exception&) {
    }
  });
  std::vector<double> ok;
  for (std::size_t i = 0; i < cal.per_rep.size(); ++i) {
    if (std::isnan(cal.per_rep[i])) {
      ++cal.failures;
    } else {
      ok.push_back(cal.per_rep[i]);
      cal.clamped += clamped[i];
    }
  }
  cal.valid = cal.failures <= 0.02 * config.reps && !ok.empty();
  std::ostringstream src;
  src << "k=" << config.model.k() << ";test=" << to_string(kind.type) << ";trait=" << kind.trait
      << ";structure=" << to_string(config.model.structure()) << ";families=" << config.n_families
      << ";sibs=" << config.sibship_size << ";reps=" << config.reps << ";seed=" << config.base_seed;
  cal.statistics = EmpiricalNull::from_sample(ok, src.str());
  const double n = static_cast<double>(ok.size());
  for (double alpha : options.alphas) {
    if (reference) {
      Type1Estimate t;
      t.alpha = alpha;
      t.critical = null_critical(*reference, alpha);
      if (n > 0) {
        t.rate = static_cast<double>(std::count_if(ok.begin(), ok.end(), [&](double v) { return v > t.critical; })) / n;
        t.standard_error = std::sqrt(alpha * (1.0 - alpha) / n);
      }
      cal.type1.push_back(t);
    }
    if (n >= std::ceil(20.0 / alpha - 1e-9)) cal.empirical_criticals[alpha] = null_critical(cal.statistics, alpha);
  }
  if (reference && ok.size() >= 50) cal.ks = ks_test(ok, *reference);
  return cal;
}

inline NullCalibration calibrate_null(SimConfig config, const TestKind& kind, const VcModel& h0_model,
                                      const std::optional<MixtureNull>& reference,
                                      const CalibrationOptions& options = {}) {
  config.model = h0_model;
  return calibrate_null(config, kind, reference, options);
}

}  // namespace pleiopower
