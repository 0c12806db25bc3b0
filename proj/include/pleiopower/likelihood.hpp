#pragma once

// Multivariate-normal likelihood of family data under a VcModel and
// constrained maximum-likelihood fitting.
//
// Families sharing an identical relatedness pattern contribute only through
// their count, sum and cross-product, so the likelihood is evaluated once per
// distinct pattern. Simulated sib pairs at a fully informative marker have
// three patterns; families with continuous multipoint IBD each form their own.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pleiopower/error.hpp"
#include "pleiopower/model_core.hpp"
#include "pleiopower/optimize.hpp"
#include "pleiopower/rng.hpp"

namespace pleiopower {

struct Family {
  std::string id;
  FamilyRelatedness rel;
  MatrixXd phenotypes;  ///< members x traits
};

/// Per-trait transform applied at ingestion: standardized = (raw - mean) / sd.
struct Standardization {
  VectorXd mean;
  VectorXd sd;
};

struct Dataset {
  std::vector<std::string> trait_names;
  std::vector<Family> families;
  std::optional<Standardization> standardization;

  int k() const { return static_cast<int>(trait_names.size()); }

  void validate() const {
    if (families.empty()) throw DataError("dataset has no families");
    for (const auto& f : families) {
      if (f.phenotypes.cols() != k()) throw DataError("family " + f.id + ": trait count mismatch");
      if (f.phenotypes.rows() != f.rel.size()) throw DataError("family " + f.id + ": phenotype rows do not match relatedness");
      if (!f.phenotypes.allFinite()) throw DataError("family " + f.id + ": non-finite phenotype");
    }
  }

  /// Same families restricted to the given trait columns.
  Dataset project(const std::vector<int>& traits) const {
    Dataset d;
    for (int t : traits) d.trait_names.push_back(trait_names.at(t));
    d.families.reserve(families.size());
    for (const auto& f : families) {
      Family g{f.id, f.rel, MatrixXd(f.phenotypes.rows(), static_cast<Eigen::Index>(traits.size()))};
      for (std::size_t c = 0; c < traits.size(); ++c) g.phenotypes.col(static_cast<Eigen::Index>(c)) = f.phenotypes.col(traits[c]);
      d.families.push_back(std::move(g));
    }
    if (standardization) {
      Standardization s{VectorXd(traits.size()), VectorXd(traits.size())};
      for (std::size_t c = 0; c < traits.size(); ++c) {
        s.mean(static_cast<Eigen::Index>(c)) = standardization->mean(traits[c]);
        s.sd(static_cast<Eigen::Index>(c)) = standardization->sd(traits[c]);
      }
      d.standardization = s;
    }
    return d;
  }
};

namespace detail {
inline VectorXd stacked(const MatrixXd& phenotypes) {
  // member-major: index = member * k + trait
  const MatrixXd t = phenotypes.transpose();
  return Eigen::Map<const VectorXd>(t.data(), t.size());
}
inline VectorXd repeat_means(const VectorXd& mu, Eigen::Index members) { return mu.replicate(members, 1); }
}  // namespace detail

/// Sum of family log-densities, including the -(d/2) ln 2pi terms.
inline double loglik(const VcModel& model, const Dataset& data) {
  if (model.k() != data.k()) throw std::invalid_argument("loglik: model and data trait counts differ");
  const MatrixXd a = model.A();
  double total = 0.0;
  for (const auto& f : data.families) {
    const MatrixXd sigma = assemble_sigma(a, model.G, model.E, f.rel);
    Eigen::LLT<MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) throw NumericalError("loglik: covariance of family " + f.id + " is not positive definite");
    const VectorXd r = detail::stacked(f.phenotypes) - detail::repeat_means(model.means, f.rel.size());
    const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    const VectorXd z = llt.matrixL().solve(r);
    total += -0.5 * (static_cast<double>(r.size()) * std::log(2.0 * std::numbers::pi) + logdet + z.squaredNorm());
  }
  return total;
}

/// Families with one relatedness pattern: count, sum of stacked phenotype
/// vectors, and sum of their outer products.
struct PatternGroup {
  FamilyRelatedness rel;
  double count = 0.0;
  VectorXd sum;
  MatrixXd cross;
};

struct SufficientStats {
  int k = 0;
  std::vector<PatternGroup> groups;
};

inline SufficientStats summarize(const Dataset& data) {
  data.validate();
  SufficientStats stats;
  stats.k = data.k();
  std::map<std::vector<double>, std::size_t> index;
  for (const auto& f : data.families) {
    const auto m = f.rel.size();
    std::vector<double> key{static_cast<double>(m)};
    for (int j = 0; j < m; ++j)
      for (int l = j + 1; l < m; ++l) {
        key.push_back(f.rel.pi_hat(j, l));
        key.push_back(f.rel.two_phi(j, l));
      }
    auto [it, inserted] = index.try_emplace(key, stats.groups.size());
    if (inserted) {
      const auto d = static_cast<Eigen::Index>(m) * stats.k;
      stats.groups.push_back({f.rel, 0.0, VectorXd::Zero(d), MatrixXd::Zero(d, d)});
    }
    auto& g = stats.groups[it->second];
    const VectorXd y = detail::stacked(f.phenotypes);
    g.count += 1.0;
    g.sum += y;
    g.cross.noalias() += y * y.transpose();
  }
  return stats;
}

/// Statistics whose likelihood is the expectation of a single family's
/// log-likelihood under `truth`, averaged over weighted relatedness configs.
inline SufficientStats expected_stats(const VcModel& truth,
                                      const std::vector<std::pair<FamilyRelatedness, double>>& configs) {
  SufficientStats stats;
  stats.k = truth.k();
  const MatrixXd a = truth.A();
  for (const auto& [rel, w] : configs) {
    const VectorXd mu = detail::repeat_means(truth.means, rel.size());
    const MatrixXd sigma = assemble_sigma(a, truth.G, truth.E, rel);
    stats.groups.push_back({rel, w, w * mu, w * (sigma + mu * mu.transpose())});
  }
  return stats;
}

/// Gradient of the log-likelihood with respect to the model matrices, each
/// entry treated as an independent variable.
struct MatrixGradient {
  MatrixXd dA, dG, dE;
  VectorXd dmu;
};

/// Grouped log-likelihood; returns -infinity when some covariance is not PD.
inline double grouped_loglik(const MatrixXd& a, const MatrixXd& g, const MatrixXd& e, const VectorXd& mu,
                             const SufficientStats& stats, MatrixGradient* grad = nullptr) {
  const auto k = static_cast<Eigen::Index>(stats.k);
  if (grad) {
    grad->dA = MatrixXd::Zero(k, k);
    grad->dG = MatrixXd::Zero(k, k);
    grad->dE = MatrixXd::Zero(k, k);
    grad->dmu = VectorXd::Zero(k);
  }
  double total = 0.0;
  const double log2pi = std::log(2.0 * std::numbers::pi);
  for (const auto& grp : stats.groups) {
    const auto m = static_cast<Eigen::Index>(grp.rel.size());
    const MatrixXd sigma = assemble_sigma(a, g, e, grp.rel);
    Eigen::LLT<MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
    const MatrixXd& l = llt.matrixLLT();
    const double logdet = 2.0 * l.diagonal().array().log().sum();
    const VectorXd muf = detail::repeat_means(mu, m);
    const double n = grp.count;
    MatrixXd scatter = grp.cross;
    scatter.noalias() -= muf * grp.sum.transpose();
    scatter.noalias() -= grp.sum * muf.transpose();
    scatter.noalias() += n * muf * muf.transpose();
    const MatrixXd inv = llt.solve(MatrixXd::Identity(m * k, m * k));
    const MatrixXd inv_s = inv * scatter;
    total += -0.5 * (n * (static_cast<double>(m * k) * log2pi + logdet) + inv_s.trace());
    if (grad) {
      const MatrixXd mgrad = -0.5 * (n * inv - inv_s * inv);
      for (Eigen::Index j = 0; j < m; ++j)
        for (Eigen::Index q = 0; q < m; ++q) {
          const auto blk = mgrad.block(j * k, q * k, k, k);
          if (j == q) {
            grad->dA += blk;
            grad->dG += blk;
            grad->dE += blk;
          } else {
            grad->dA += grp.rel.pi_hat(j, q) * blk;
            grad->dG += grp.rel.two_phi(j, q) * blk;
          }
        }
      const VectorXd r = inv * (grp.sum - n * muf);
      for (Eigen::Index j = 0; j < m; ++j) grad->dmu += r.segment(j * k, k);
    }
  }
  return total;
}

inline double grouped_loglik(const VcModel& model, const SufficientStats& stats) {
  return grouped_loglik(model.A(), model.G, model.E, model.means, stats);
}

/// Which major-gene structure is fitted and which of its parameters are held
/// at zero: loading a_i (pleiotropic) or row/column i of A (general).
struct FitConstraint {
  Structure structure = Structure::pleiotropic;
  std::set<int> fixed_zero;

  static FitConstraint unconstrained(Structure s) { return {s, {}}; }
  static FitConstraint null_for(Structure s, int trait) { return {s, {trait}}; }
};

struct FitResult {
  VcModel model;
  double loglik = 0.0;
  bool converged = false;
  long evaluations = 0;
  int n_starts_used = 0;
};

struct FitOptions {
  int n_starts = 5;
  std::uint64_t seed = 20100801;
  double rel_tol = 1e-9;
  /// Bound on the predicted remaining loglik gain at convergence.
  double abs_tol = 1e-8;
  int max_iterations = 5000;
  /// Simplex evaluations per start, as a multiple of (parameters + 1).
  int simplex_budget = 30;
  /// Relative scale of the random perturbation applied to perturbed starts.
  double perturbation = 0.3;
  /// Central differences instead of the analytic gradient in the
  /// quasi-Newton stage (slower; same optimum).
  bool numerical_gradient = false;
  /// Additional starting models (e.g. the fit of a nested hypothesis).
  std::vector<VcModel> extra_starts;
};

namespace detail {

inline constexpr double kEnvFloor = 1e-6;

inline int tri(int n) { return n * (n + 1) / 2; }

inline MatrixXd lower_from(const VectorXd& theta, Eigen::Index offset, int n) {
  MatrixXd l = MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) l(i, j) = theta(offset++);
  return l;
}

inline void write_lower(const MatrixXd& l, VectorXd& theta, Eigen::Index offset) {
  const auto n = l.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j <= i; ++j) theta(offset++) = l(i, j);
}

/// Cholesky factor of a PSD matrix, with the diagonal kept at least `min_diag`
/// so the factor is not at the stationary point L = 0.
inline MatrixXd start_factor(MatrixXd m, double min_diag) {
  const auto n = m.rows();
  if (n == 0) return m;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  VectorXd ev = es.eigenvalues().cwiseMax(min_diag * min_diag);
  m = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
  Eigen::LLT<MatrixXd> llt(m);
  MatrixXd l = llt.matrixL();
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::abs(l(i, i)) < min_diag) l(i, i) = min_diag;
  return l;
}

inline MatrixXd psd_project(const MatrixXd& m, double floor = 0.0) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (m + m.transpose()));
  VectorXd ev = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace detail

/// Maps an unconstrained parameter vector onto models satisfying a
/// FitConstraint. Layout: [means][major gene][chol(G)][chol(E - floor I)].
/// Loadings are free reals; general A is L L^T over the non-fixed traits.
class Parameterization {
 public:
  Parameterization(int k, FitConstraint constraint, std::vector<std::string> names, bool free_means,
                   VectorXd fixed_means)
      : k_(k), constraint_(std::move(constraint)), names_(std::move(names)), free_means_(free_means),
        fixed_means_(std::move(fixed_means)) {
    for (int t : constraint_.fixed_zero)
      if (t < 0 || t >= k_) throw std::invalid_argument("FitConstraint: fixed_zero trait index out of range");
    for (int t = 0; t < k_; ++t)
      if (!constraint_.fixed_zero.contains(t)) free_.push_back(t);
    const int nf = static_cast<int>(free_.size());
    major_size_ = constraint_.structure == Structure::pleiotropic ? nf : detail::tri(nf);
    major_offset_ = free_means_ ? k_ : 0;
    g_offset_ = major_offset_ + major_size_;
    e_offset_ = g_offset_ + detail::tri(k_);
    size_ = e_offset_ + detail::tri(k_);
  }

  int size() const { return size_; }
  const FitConstraint& constraint() const { return constraint_; }
  const std::vector<int>& free_traits() const { return free_; }

  struct Matrices {
    MatrixXd a, g, e, lg, le, la;
    VectorXd loadings, mu;
  };

  Matrices matrices(const VectorXd& theta) const {
    Matrices m;
    m.mu = free_means_ ? VectorXd(theta.head(k_)) : fixed_means_;
    const int nf = static_cast<int>(free_.size());
    m.a = MatrixXd::Zero(k_, k_);
    if (constraint_.structure == Structure::pleiotropic) {
      m.loadings = VectorXd::Zero(k_);
      for (int i = 0; i < nf; ++i) m.loadings(free_[i]) = theta(major_offset_ + i);
      m.a = m.loadings * m.loadings.transpose();
    } else {
      m.la = detail::lower_from(theta, major_offset_, nf);
      const MatrixXd sub = m.la * m.la.transpose();
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) m.a(free_[i], free_[j]) = sub(i, j);
    }
    m.lg = detail::lower_from(theta, g_offset_, k_);
    m.le = detail::lower_from(theta, e_offset_, k_);
    m.g = m.lg * m.lg.transpose();
    m.e = m.le * m.le.transpose();
    m.e.diagonal().array() += detail::kEnvFloor;
    return m;
  }

  VcModel model(const VectorXd& theta) const {
    const Matrices m = matrices(theta);
    VcModel out;
    out.trait_names = names_;
    if (constraint_.structure == Structure::pleiotropic)
      out.major_gene = Pleiotropic{m.loadings};
    else
      out.major_gene = General{m.a};
    out.G = m.g;
    out.E = m.e;
    out.means = m.mu;
    return out;
  }

  /// Parameter vector of the closest model in the constrained family. Free
  /// major-gene parameters are kept away from zero, where the gradient
  /// vanishes identically.
  VectorXd theta(const VcModel& model) const {
    VectorXd th(size_);
    if (free_means_) th.head(k_) = model.means;
    const MatrixXd a = model.A();
    const VectorXd total = model.total_variance().cwiseMax(1e-8);
    const int nf = static_cast<int>(free_.size());
    if (constraint_.structure == Structure::pleiotropic) {
      VectorXd load(k_);
      if (const auto* p = std::get_if<Pleiotropic>(&model.major_gene)) {
        load = p->loadings;
      } else {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
        const VectorXd v = es.eigenvectors().col(k_ - 1);
        for (int t = 0; t < k_; ++t) load(t) = std::sqrt(std::max(a(t, t), 0.0)) * (v(t) < 0 ? -1.0 : 1.0);
      }
      for (int i = 0; i < nf; ++i) {
        const int t = free_[i];
        const double min_load = 0.05 * std::sqrt(total(t));
        double v = load(t);
        if (std::abs(v) < min_load) v = v < 0 ? -min_load : min_load;
        th(major_offset_ + i) = v;
      }
    } else if (nf > 0) {
      MatrixXd sub(nf, nf);
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) sub(i, j) = a(free_[i], free_[j]);
      double scale = 0.0;
      for (int t : free_) scale += total(t);
      detail::write_lower(detail::start_factor(sub, 0.05 * std::sqrt(scale / nf)), th, major_offset_);
    }
    const double mean_var = total.mean();
    detail::write_lower(detail::start_factor(model.G, 0.02 * std::sqrt(mean_var)), th, g_offset_);
    MatrixXd e = model.E;
    e.diagonal().array() -= detail::kEnvFloor;
    detail::write_lower(detail::start_factor(e, 0.02 * std::sqrt(mean_var)), th, e_offset_);
    return th;
  }

  /// Chain rule from matrix gradients to the parameter vector.
  VectorXd chain(const Matrices& m, const MatrixGradient& mg) const {
    VectorXd out = VectorXd::Zero(size_);
    if (free_means_) out.head(k_) = mg.dmu;
    const int nf = static_cast<int>(free_.size());
    if (constraint_.structure == Structure::pleiotropic) {
      const VectorXd ga = 2.0 * mg.dA * m.loadings;
      for (int i = 0; i < nf; ++i) out(major_offset_ + i) = ga(free_[i]);
    } else if (nf > 0) {
      MatrixXd sub(nf, nf);
      for (int i = 0; i < nf; ++i)
        for (int j = 0; j < nf; ++j) sub(i, j) = mg.dA(free_[i], free_[j]);
      detail::write_lower(2.0 * sub * m.la, out, major_offset_);
    }
    detail::write_lower(2.0 * mg.dG * m.lg, out, g_offset_);
    detail::write_lower(2.0 * mg.dE * m.le, out, e_offset_);
    return out;
  }

 private:
  int k_;
  FitConstraint constraint_;
  std::vector<std::string> names_;
  bool free_means_;
  VectorXd fixed_means_;
  std::vector<int> free_;
  int major_size_ = 0;
  int major_offset_ = 0;
  int g_offset_ = 0;
  int e_offset_ = 0;
  int size_ = 0;
};

/// Negative grouped log-likelihood over a parameterization, with gradient.
inline optim::Objective make_objective(const Parameterization& param, const SufficientStats& stats) {
  return [&param, &stats](const VectorXd& theta, VectorXd* grad) {
    const auto m = param.matrices(theta);
    MatrixGradient mg;
    const double ll = grouped_loglik(m.a, m.g, m.e, m.mu, stats, grad ? &mg : nullptr);
    if (!std::isfinite(ll)) return std::numeric_limits<double>::infinity();
    if (grad) *grad = -param.chain(m, mg);
    return -ll;
  };
}

/// Method-of-moments start: pairwise cross-products regressed on (pi, 2phi)
/// give A and G; E is the remainder of the phenotypic covariance.
inline VcModel moment_start(const SufficientStats& stats, const std::vector<std::string>& names) {
  const auto k = static_cast<Eigen::Index>(stats.k);
  VectorXd mu = VectorXd::Zero(k);
  double individuals = 0.0;
  for (const auto& g : stats.groups) {
    const auto m = static_cast<Eigen::Index>(g.rel.size());
    for (Eigen::Index j = 0; j < m; ++j) mu += g.sum.segment(j * k, k);
    individuals += g.count * static_cast<double>(m);
  }
  mu /= individuals;
  MatrixXd p = MatrixXd::Zero(k, k);
  double spp = 0, spf = 0, sff = 0;
  MatrixXd xp = MatrixXd::Zero(k, k), xf = MatrixXd::Zero(k, k), xsum = MatrixXd::Zero(k, k);
  double pairs = 0.0;
  for (const auto& g : stats.groups) {
    const auto m = static_cast<Eigen::Index>(g.rel.size());
    for (Eigen::Index j = 0; j < m; ++j) {
      const auto sj = g.sum.segment(j * k, k);
      p += g.cross.block(j * k, j * k, k, k) - mu * sj.transpose() - sj * mu.transpose() + g.count * mu * mu.transpose();
      for (Eigen::Index l = j + 1; l < m; ++l) {
        const auto sl = g.sum.segment(l * k, k);
        MatrixXd c = g.cross.block(j * k, l * k, k, k) - mu * sl.transpose() - sj * mu.transpose() +
                     g.count * mu * mu.transpose();
        c = 0.5 * (c + c.transpose()) / g.count;
        const double pi = g.rel.pi_hat(j, l), f = g.rel.two_phi(j, l), w = g.count;
        spp += w * pi * pi;
        spf += w * pi * f;
        sff += w * f * f;
        xp += w * pi * c;
        xf += w * f * c;
        xsum += w * c;
        pairs += w;
      }
    }
  }
  p /= individuals;
  MatrixXd a, gmat;
  const double det = spp * sff - spf * spf;
  if (pairs == 0.0) {
    a = 0.2 * MatrixXd(p.diagonal().asDiagonal());
    gmat = a;
  } else if (det > 1e-8 * std::max(1.0, spp * sff)) {
    a = (sff * xp - spf * xf) / det;
    gmat = (spp * xf - spf * xp) / det;
  } else {
    a = xsum / pairs;
    gmat = a;
  }
  a = detail::psd_project(a);
  gmat = detail::psd_project(gmat);
  const double floor = 0.05 * p.diagonal().minCoeff();
  MatrixXd e = detail::psd_project(p - a - gmat, floor);
  VcModel out;
  out.trait_names = names;
  out.major_gene = General{a};
  out.G = gmat;
  out.E = e;
  out.means = mu;
  return out;
}

namespace detail {

/// Largest-magnitude free loading positive.
inline void normalize_signs(VcModel& model, const FitConstraint& c) {
  auto* p = std::get_if<Pleiotropic>(&model.major_gene);
  if (!p) return;
  int best = -1;
  for (int t = 0; t < model.k(); ++t)
    if (!c.fixed_zero.contains(t) && (best < 0 || std::abs(p->loadings(t)) > std::abs(p->loadings(best)))) best = t;
  if (best >= 0 && p->loadings(best) < 0) p->loadings = -p->loadings;
}

}  // namespace detail

/// Multi-start maximization of the grouped likelihood. Start 0 is `primary`
/// (moments for data, the truth for expected statistics); the remaining
/// n_starts-1 are seeded perturbations of it; extra_starts are added on top.
inline FitResult fit_stats(const SufficientStats& stats, const FitConstraint& constraint,
                           const std::vector<std::string>& names, const VcModel& primary, bool free_means,
                           const FitOptions& options) {
  const Parameterization param(stats.k, constraint, names, free_means, primary.means);
  const auto objective = make_objective(param, stats);
  std::vector<VectorXd> starts;
  const VectorXd base = param.theta(primary);
  starts.push_back(base);
  for (int s = 1; s < options.n_starts; ++s) {
    Rng rng = make_rng(derive_seed(options.seed, s));
    std::normal_distribution<double> z;
    VectorXd th = base;
    for (Eigen::Index i = 0; i < th.size(); ++i)
      th(i) += options.perturbation * std::max(std::abs(th(i)), 0.1) * z(rng);
    starts.push_back(th);
  }
  for (const auto& m : options.extra_starts) starts.push_back(param.theta(m));

  FitResult best;
  best.loglik = -std::numeric_limits<double>::infinity();
  bool any_converged = false;
  double best_unconverged = -std::numeric_limits<double>::infinity();
  long evaluations = 0;
  for (const auto& x0 : starts) {
    const long simplex_evals = static_cast<long>(options.simplex_budget) * (param.size() + 1);
    auto nm = optim::nelder_mead(objective, x0, 0.05, simplex_evals);
    const VectorXd from = std::isfinite(nm.value) ? nm.x : x0;
    auto qn = optim::bfgs(objective, from, {options.rel_tol, options.abs_tol, options.max_iterations, options.numerical_gradient});
    evaluations += nm.evaluations + qn.evaluations;
    if (!std::isfinite(qn.value)) continue;
    const double ll = -qn.value;
    if (!qn.converged) {
      best_unconverged = std::max(best_unconverged, ll);
      continue;
    }
    any_converged = true;
    if (ll > best.loglik) {
      best.loglik = ll;
      best.model = param.model(qn.x);
    }
  }
  if (!any_converged)
    throw NumericalError("fit_ml: none of " + std::to_string(starts.size()) +
                         " starts converged (best unconverged loglik " + std::to_string(best_unconverged) +
                         ", evaluations " + std::to_string(evaluations) + ")");
  best.converged = true;
  best.evaluations = evaluations;
  best.n_starts_used = static_cast<int>(starts.size());
  detail::normalize_signs(best.model, constraint);
  return best;
}

/// Maximum-likelihood fit of `data` under `constraint` (means free).
inline FitResult fit_ml(const Dataset& data, const FitConstraint& constraint, const FitOptions& options = {}) {
  if (data.k() < 1) throw std::invalid_argument("fit_ml: no traits");
  const SufficientStats stats = summarize(data);
  const VcModel start = moment_start(stats, data.trait_names);
  FitResult r = fit_stats(stats, constraint, data.trait_names, start, true, options);
  r.loglik = grouped_loglik(r.model, stats);
  return r;
}

}  // namespace pleiopower
