#pragma once

// Variance-components model (major gene A, polygenic G, environment E),
// relatedness of a family, and assembly of the family covariance matrix.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "pleiopower/error.hpp"

namespace pleiopower {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Variance proportions of one standardized trait.
struct TraitSpec {
  std::string name;
  double a_prop = 0.0;
  double g_prop = 0.0;
  double e_prop = 1.0;
};

/// Complete pleiotropy: A = a a^T.
struct Pleiotropic {
  VectorXd loadings;
};

/// Unconstrained PSD major-gene covariance.
struct General {
  MatrixXd A;
};

using MajorGeneStructure = std::variant<Pleiotropic, General>;

enum class Structure { pleiotropic, general };

inline const char* to_string(Structure s) { return s == Structure::pleiotropic ? "pleiotropic" : "general"; }

/// Smallest eigenvalue >= -1e-10 * largest eigenvalue.
inline bool is_psd(const MatrixXd& m, double rel_tol = 1e-10) {
  if (m.rows() != m.cols()) return false;
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) return false;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(m, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  const double largest = std::max(ev.maxCoeff(), 0.0);
  return ev.minCoeff() >= -rel_tol * largest - 1e-300;
}

inline bool is_correlation_matrix(const MatrixXd& r) {
  if (r.rows() != r.cols()) return false;
  for (Eigen::Index i = 0; i < r.rows(); ++i)
    if (std::abs(r(i, i) - 1.0) > 1e-9) return false;
  return is_psd(r);
}

/// Correlation matrix of a covariance; entries involving a zero variance are 0.
inline MatrixXd correlation_of(const MatrixXd& cov) {
  const auto k = cov.rows();
  MatrixXd r = MatrixXd::Identity(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j)
      if (i != j) {
        const double d = cov(i, i) * cov(j, j);
        r(i, j) = d > 0.0 ? cov(i, j) / std::sqrt(d) : 0.0;
      }
  return r;
}

struct VcModel {
  std::vector<std::string> trait_names;
  MajorGeneStructure major_gene = Pleiotropic{};
  MatrixXd G;
  MatrixXd E;
  VectorXd means;

  int k() const { return static_cast<int>(G.rows()); }

  Structure structure() const {
    return std::holds_alternative<Pleiotropic>(major_gene) ? Structure::pleiotropic : Structure::general;
  }

  MatrixXd A() const {
    if (const auto* p = std::get_if<Pleiotropic>(&major_gene)) return p->loadings * p->loadings.transpose();
    return std::get<General>(major_gene).A;
  }

  VectorXd total_variance() const { return A().diagonal() + G.diagonal() + E.diagonal(); }

  /// Proportions of each trait's total variance.
  std::vector<TraitSpec> traits() const {
    const MatrixXd a = A();
    std::vector<TraitSpec> out;
    for (int t = 0; t < k(); ++t) {
      const double v = a(t, t) + G(t, t) + E(t, t);
      out.push_back({trait_names.at(t), a(t, t) / v, G(t, t) / v, E(t, t) / v});
    }
    return out;
  }

  /// Throws DataError when an invariant is violated.
  void validate() const {
    const int n = k();
    if (n < 1) throw DataError("VcModel: at least one trait required");
    if (static_cast<int>(trait_names.size()) != n) throw DataError("VcModel: trait name count does not match k");
    if (G.cols() != n || E.rows() != n || E.cols() != n)
      throw DataError("VcModel: G and E must be k x k");
    if (means.size() != n) throw DataError("VcModel: means must have k entries");
    const MatrixXd a = A();
    if (a.rows() != n || a.cols() != n) throw DataError("VcModel: major-gene structure dimension mismatch");
    if (!is_psd(a)) throw DataError("VcModel: A is not symmetric PSD");
    if (!is_psd(G)) throw DataError("VcModel: G is not symmetric PSD");
    if (!is_psd(E)) throw DataError("VcModel: E is not symmetric PSD");
    for (int t = 0; t < n; ++t)
      if (E(t, t) < 1e-6) throw DataError("VcModel: environmental variance of trait " + trait_names[t] + " below 1e-6");
  }
};

inline VcModel model_from_proportions(const std::vector<TraitSpec>& traits, const MatrixXd& rho_g, const MatrixXd& rho_e,
                               const std::optional<MatrixXd>& rho_a = std::nullopt,
                               const std::optional<VectorXd>& means = std::nullopt);

/// Proportions-and-correlations description of a standardized model; rho_a
/// present means a general major-gene structure.
struct ModelSpec {
  std::vector<TraitSpec> traits;
  MatrixXd rho_g;
  MatrixXd rho_e;
  std::optional<MatrixXd> rho_a;
  std::optional<VectorXd> means;

  int k() const { return static_cast<int>(traits.size()); }
  VcModel to_model() const { return model_from_proportions(traits, rho_g, rho_e, rho_a, means); }
};

/// Builds a unit-variance model. Pleiotropic loadings are +sqrt(a_prop).
inline VcModel model_from_proportions(const std::vector<TraitSpec>& traits, const MatrixXd& rho_g,
                                      const MatrixXd& rho_e, const std::optional<MatrixXd>& rho_a,
                                      const std::optional<VectorXd>& means) {
  const auto k = static_cast<Eigen::Index>(traits.size());
  if (k < 1) throw DataError("model_from_proportions: no traits");
  for (const auto& t : traits) {
    for (double p : {t.a_prop, t.g_prop, t.e_prop})
      if (!(p >= 0.0 && p <= 1.0)) throw DataError("trait " + t.name + ": proportions must lie in [0,1]");
    if (std::abs(t.a_prop + t.g_prop + t.e_prop - 1.0) > 1e-9)
      throw DataError("trait " + t.name + ": a_prop + g_prop + e_prop must equal 1");
  }
  auto check_corr = [k](const MatrixXd& r, const char* what) {
    if (r.rows() != k || r.cols() != k) throw DataError(std::string(what) + ": dimension does not match trait count");
    if (!is_correlation_matrix(r)) throw DataError(std::string(what) + " is not a valid correlation matrix");
  };
  check_corr(rho_g, "rho_g");
  check_corr(rho_e, "rho_e");
  if (rho_a) check_corr(*rho_a, "rho_a");

  VectorXd a(k), g(k), e(k);
  for (Eigen::Index t = 0; t < k; ++t) {
    a(t) = std::sqrt(traits[t].a_prop);
    g(t) = std::sqrt(traits[t].g_prop);
    e(t) = std::sqrt(traits[t].e_prop);
  }
  VcModel m;
  for (const auto& t : traits) m.trait_names.push_back(t.name);
  m.G = rho_g.cwiseProduct(g * g.transpose());
  m.E = rho_e.cwiseProduct(e * e.transpose());
  if (rho_a)
    m.major_gene = General{rho_a->cwiseProduct(a * a.transpose())};
  else
    m.major_gene = Pleiotropic{a};
  m.means = means ? *means : VectorXd::Zero(k);
  m.validate();
  return m;
}

/// Proportions-and-correlations form of a model. Scale is dropped and
/// pleiotropic loadings become +sqrt(a_prop); `signed_loadings` reports
/// whether any sign is lost that way.
inline ModelSpec spec_of(const VcModel& m, bool* signed_loadings = nullptr) {
  ModelSpec s;
  s.traits = m.traits();
  s.rho_g = correlation_of(m.G);
  s.rho_e = correlation_of(m.E);
  if (m.structure() == Structure::general) s.rho_a = correlation_of(m.A());
  s.means = m.means;
  if (signed_loadings) {
    *signed_loadings = false;
    if (const auto* p = std::get_if<Pleiotropic>(&m.major_gene))
      *signed_loadings = (p->loadings.array() < 0.0).any();
  }
  return s;
}

/// Sub-model on the given trait indices (loadings and sub-matrices kept as is).
inline VcModel restrict_model(const VcModel& m, const std::vector<int>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  VcModel r;
  MatrixXd g(n, n), e(n, n), a(n, n);
  const MatrixXd full_a = m.A();
  VectorXd mu(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    r.trait_names.push_back(m.trait_names.at(idx[i]));
    mu(i) = m.means(idx[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      g(i, j) = m.G(idx[i], idx[j]);
      e(i, j) = m.E(idx[i], idx[j]);
      a(i, j) = full_a(idx[i], idx[j]);
    }
  }
  if (const auto* p = std::get_if<Pleiotropic>(&m.major_gene)) {
    VectorXd l(n);
    for (Eigen::Index i = 0; i < n; ++i) l(i) = p->loadings(idx[i]);
    r.major_gene = Pleiotropic{l};
  } else {
    r.major_gene = General{a};
  }
  r.G = g;
  r.E = e;
  r.means = mu;
  return r;
}

/// Pairwise IBD proportions and doubled kinship coefficients of one family.
/// Diagonals are not used by covariance assembly.
struct FamilyRelatedness {
  std::vector<std::string> member_ids;
  MatrixXd pi_hat;
  MatrixXd two_phi;

  int size() const { return static_cast<int>(pi_hat.rows()); }

  static FamilyRelatedness sib_pair(double pi, std::vector<std::string> ids = {"1", "2"}) {
    FamilyRelatedness r;
    r.member_ids = std::move(ids);
    r.pi_hat = MatrixXd{{1.0, pi}, {pi, 1.0}};
    r.two_phi = MatrixXd{{1.0, 0.5}, {0.5, 1.0}};
    return r;
  }

  /// Full sibship with the given IBD matrix; 2*phi = 1/2 off the diagonal.
  static FamilyRelatedness sibship(MatrixXd pi_hat) {
    FamilyRelatedness r;
    const auto m = pi_hat.rows();
    for (Eigen::Index j = 0; j < m; ++j) r.member_ids.push_back(std::to_string(j + 1));
    r.two_phi = MatrixXd::Constant(m, m, 0.5);
    r.two_phi.diagonal().setOnes();
    r.pi_hat = std::move(pi_hat);
    r.pi_hat.diagonal().setOnes();
    return r;
  }
};

/// Family covariance, member-major layout (index = member * k + trait):
/// diagonal blocks A+G+E, block (j,l) = pi_jl A + 2phi_jl G.
inline MatrixXd assemble_sigma(const MatrixXd& A, const MatrixXd& G, const MatrixXd& E,
                               const FamilyRelatedness& rel) {
  const auto k = G.rows();
  const auto m = static_cast<Eigen::Index>(rel.size());
  if (m < 1) throw std::invalid_argument("assemble_sigma: empty family");
  if (rel.two_phi.rows() != m || rel.two_phi.cols() != m || rel.pi_hat.cols() != m)
    throw std::invalid_argument("assemble_sigma: relatedness matrices are not m x m");
  if (A.rows() != k || E.rows() != k) throw std::invalid_argument("assemble_sigma: component dimension mismatch");
  MatrixXd sigma(m * k, m * k);
  const MatrixXd total = A + G + E;
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index l = 0; l < m; ++l)
      sigma.block(j * k, l * k, k, k) = j == l ? total : MatrixXd(rel.pi_hat(j, l) * A + rel.two_phi(j, l) * G);
  return sigma;
}

inline MatrixXd assemble_sigma(const VcModel& model, const FamilyRelatedness& rel) {
  return assemble_sigma(model.A(), model.G, model.E, rel);
}

}  // namespace pleiopower
