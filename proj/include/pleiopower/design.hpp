#pragma once

// Exploring the correlation space (Inverse-Wishart sampling, k-means choice of
// representative sets) and choosing the best trait subset for a study.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pleiopower/model_core.hpp"
#include "pleiopower/parallel.hpp"
#include "pleiopower/power.hpp"
#include "pleiopower/rng.hpp"

namespace pleiopower {

struct CorrelationSample {
  MatrixXd rho_g;
  MatrixXd rho_e;
};

/// Wishart(df, I) by the Bartlett decomposition.
inline MatrixXd sample_wishart_identity(int k, double df, Rng& rng) {
  std::normal_distribution<double> z;
  MatrixXd l = MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    std::chi_squared_distribution<double> chi(df - i);
    l(i, i) = std::sqrt(chi(rng));
    for (int j = 0; j < i; ++j) l(i, j) = z(rng);
  }
  return l * l.transpose();
}

/// Correlation matrix of an Inverse-Wishart(I, k+1) draw; for this choice
/// every pairwise correlation is marginally uniform on (-1, 1).
inline MatrixXd sample_iw_correlation(int k, Rng& rng) {
  const MatrixXd w = sample_wishart_identity(k, k + 1.0, rng);
  const MatrixXd sigma = w.llt().solve(MatrixXd::Identity(k, k));
  MatrixXd r = correlation_of(0.5 * (sigma + sigma.transpose()));
  r.diagonal().setOnes();
  return r;
}

/// Sample i uses its own stream, so a prefix of a longer run reproduces a
/// shorter one.
inline std::vector<CorrelationSample> sample_correlation_sets(int k, int count, std::uint64_t seed) {
  if (k < 2) throw std::invalid_argument("sample_correlation_sets: k must be >= 2");
  if (count < 1) throw std::invalid_argument("sample_correlation_sets: count must be >= 1");
  std::vector<CorrelationSample> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Rng rng = make_rng(derive_seed(seed, i));
    MatrixXd g = sample_iw_correlation(k, rng);
    MatrixXd e = sample_iw_correlation(k, rng);
    out.push_back({std::move(g), std::move(e)});
  }
  return out;
}

/// Strict upper triangles of rho_g then rho_e.
inline VectorXd correlation_features(const CorrelationSample& s) {
  const auto k = s.rho_g.rows();
  VectorXd v(k * (k - 1));
  Eigen::Index p = 0;
  for (const MatrixXd* m : {&s.rho_g, &s.rho_e})
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = i + 1; j < k; ++j) v(p++) = (*m)(i, j);
  return v;
}

struct Representatives {
  std::vector<CorrelationSample> samples;  ///< medoids, largest cluster first
  std::vector<std::size_t> indices;        ///< positions of the medoids in the input
  std::vector<std::size_t> cluster_sizes;
  double within_ss = 0.0;
  std::vector<int> assignment;  ///< cluster of each input sample, in output order
};

namespace detail {

struct KmeansRun {
  std::vector<VectorXd> centers;
  std::vector<int> assign;
  double wcss = std::numeric_limits<double>::infinity();
};

inline KmeansRun lloyd(const std::vector<VectorXd>& x, std::vector<VectorXd> centers, int max_iter = 300) {
  KmeansRun run;
  const auto n = x.size();
  const auto c = centers.size();
  std::vector<int> assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < c; ++j) {
        const double d = (x[i] - centers[j]).squaredNorm();
        if (d < bd) {
          bd = d;
          best = static_cast<int>(j);
        }
      }
      if (assign[i] != best) {
        assign[i] = best;
        changed = true;
      }
    }
    std::vector<VectorXd> sum(c, VectorXd::Zero(x.front().size()));
    std::vector<int> count(c, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sum[assign[i]] += x[i];
      ++count[assign[i]];
    }
    for (std::size_t j = 0; j < c; ++j) {
      if (count[j] > 0) {
        centers[j] = sum[j] / count[j];
        continue;
      }
      // empty cluster: move it to the point farthest from its center
      std::size_t far = 0;
      double fd = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = (x[i] - centers[assign[i]]).squaredNorm();
        if (d > fd) {
          fd = d;
          far = i;
        }
      }
      centers[j] = x[far];
      assign[far] = static_cast<int>(j);
      changed = true;
    }
    if (!changed) break;
  }
  run.wcss = 0.0;
  for (std::size_t i = 0; i < n; ++i) run.wcss += (x[i] - centers[assign[i]]).squaredNorm();
  run.centers = std::move(centers);
  run.assign = std::move(assign);
  return run;
}

inline std::vector<VectorXd> kmeanspp_init(const std::vector<VectorXd>& x, std::size_t c, Rng& rng) {
  std::vector<VectorXd> centers;
  std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
  centers.push_back(x[pick(rng)]);
  std::vector<double> d2(x.size());
  while (centers.size() < c) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double m = std::numeric_limits<double>::infinity();
      for (const auto& ce : centers) m = std::min(m, (x[i] - ce).squaredNorm());
      d2[i] = m;
      total += m;
    }
    if (total <= 0.0) {
      centers.push_back(x[pick(rng)]);
      continue;
    }
    std::discrete_distribution<std::size_t> weighted(d2.begin(), d2.end());
    centers.push_back(x[weighted(rng)]);
  }
  return centers;
}

inline bool lex_less(const VectorXd& a, const VectorXd& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace detail

/// K-means (Lloyd, k-means++ starts, best of `restarts` by within-cluster SS)
/// on the correlation features; returns each cluster's medoid. Samples are put
/// in lexicographic feature order before clustering, so the result does not
/// depend on input order; ties (cluster size, medoid distance) go to the
/// earlier sample in that order.
inline Representatives select_representatives(const std::vector<CorrelationSample>& samples, int centers,
                                              std::uint64_t seed, int restarts = 10) {
  if (centers < 1) throw std::invalid_argument("select_representatives: centers must be >= 1");
  if (samples.size() < static_cast<std::size_t>(centers))
    throw std::invalid_argument("select_representatives: " + std::to_string(samples.size()) +
                                " samples for " + std::to_string(centers) + " centers");
  const std::size_t n = samples.size();
  std::vector<VectorXd> raw(n);
  for (std::size_t i = 0; i < n; ++i) raw[i] = correlation_features(samples[i]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return detail::lex_less(raw[a], raw[b]); });
  std::vector<VectorXd> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = raw[order[i]];

  detail::KmeansRun best;
  for (int r = 0; r < restarts; ++r) {
    Rng rng = make_rng(derive_seed(seed, r));
    auto run = detail::lloyd(x, detail::kmeanspp_init(x, static_cast<std::size_t>(centers), rng));
    if (run.wcss < best.wcss - 1e-12) best = std::move(run);
  }

  struct Cluster {
    std::size_t size = 0;
    std::size_t medoid = 0;  // canonical position
    int id = 0;
  };
  std::vector<Cluster> clusters(static_cast<std::size_t>(centers));
  std::vector<double> medoid_d(clusters.size(), std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < clusters.size(); ++j) clusters[j].id = static_cast<int>(j);
  for (std::size_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::size_t>(best.assign[i]);
    ++clusters[j].size;
    const double d = (x[i] - best.centers[j]).squaredNorm();
    if (d < medoid_d[j]) {
      medoid_d[j] = d;
      clusters[j].medoid = i;
    }
  }
  std::sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    return a.size != b.size ? a.size > b.size : a.medoid < b.medoid;
  });
  std::vector<int> rank(clusters.size());
  for (std::size_t r = 0; r < clusters.size(); ++r) rank[clusters[r].id] = static_cast<int>(r);

  Representatives out;
  out.within_ss = best.wcss;
  out.assignment.assign(n, -1);
  for (std::size_t i = 0; i < n; ++i) out.assignment[order[i]] = rank[best.assign[i]];
  for (const auto& c : clusters) {
    out.indices.push_back(order[c.medoid]);
    out.samples.push_back(samples[order[c.medoid]]);
    out.cluster_sizes.push_back(c.size);
  }
  return out;
}

struct SubsetDesign {
  std::vector<int> traits;
  std::vector<std::optional<long long>> per_trait_required_n;  ///< aligned with traits
  std::optional<long long> design_n;  ///< max over the subset; empty if any trait failed
  int rank = 0;
  std::string error;
};

/// All subsets of `subset_size` traits in lexicographic order.
inline std::vector<std::vector<int>> trait_subsets(int k, int subset_size) {
  std::vector<std::vector<int>> out;
  std::vector<bool> mask(static_cast<std::size_t>(k), false);
  std::fill(mask.begin(), mask.begin() + subset_size, true);
  do {
    std::vector<int> s;
    for (int i = 0; i < k; ++i)
      if (mask[i]) s.push_back(i);
    out.push_back(std::move(s));
  } while (std::prev_permutation(mask.begin(), mask.end()));
  return out;
}

/// Evaluates every subset of the model's traits (sub-matrices, loadings kept)
/// and ranks them by the largest per-trait required sample size. Subsets with
/// a failed or unattainable trait rank last.
inline std::vector<SubsetDesign> best_subset(const VcModel& model, int subset_size, const PowerOptions& opt,
                                             TestType test = TestType::mtst, unsigned threads = 1) {
  model.validate();
  if (subset_size < 1 || subset_size > model.k())
    throw std::invalid_argument("best_subset: subset size must lie in [1, " + std::to_string(model.k()) + "]");
  auto subsets = trait_subsets(model.k(), subset_size);
  std::vector<SubsetDesign> designs(subsets.size());
  parallel_for(subsets.size(), threads, [&](std::size_t s) {
    auto& d = designs[s];
    d.traits = subsets[s];
    const VcModel sub = restrict_model(model, d.traits);
    bool ok = true;
    long long worst = 0;
    for (int t = 0; t < subset_size; ++t) {
      try {
        const PowerResult p = compute_power({sub, t, test}, opt);
        d.per_trait_required_n.push_back(p.required_n);
        if (p.required_n)
          worst = std::max(worst, *p.required_n);
        else
          ok = false;
      } catch (const std::exception& e) {
        d.per_trait_required_n.push_back(std::nullopt);
        d.error = e.what();
        ok = false;
      }
    }
    if (ok) d.design_n = worst;
  });
  std::stable_sort(designs.begin(), designs.end(), [](const SubsetDesign& a, const SubsetDesign& b) {
    if (a.design_n.has_value() != b.design_n.has_value()) return a.design_n.has_value();
    if (a.design_n && *a.design_n != *b.design_n) return *a.design_n < *b.design_n;
    return a.traits < b.traits;
  });
  for (std::size_t i = 0; i < designs.size(); ++i) designs[i].rank = static_cast<int>(i) + 1;
  return designs;
}

}  // namespace pleiopower
