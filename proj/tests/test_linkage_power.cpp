#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pleiopower.hpp"

using namespace pleiopower;

namespace {

MatrixXd corr2(double r) { return MatrixXd{{1.0, r}, {r, 1.0}}; }

ModelSpec bivariate_spec(double t1_effect) {
  ModelSpec s;
  s.traits = {{"T1", t1_effect, 0.28, 0.72 - t1_effect}, {"T2", 0.05, 0.30, 0.65}};
  s.rho_g = corr2(0.068);
  s.rho_e = corr2(-0.479);
  return s;
}

VcModel univariate(double a, double g) {
  return model_from_proportions({{"T1", a, g, 1.0 - a - g}}, MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1));
}

Dataset simulate(const VcModel& m, int families, std::uint64_t seed, int rep = 0, int sibs = 2) {
  SimConfig c;
  c.model = m;
  c.n_families = families;
  c.sibship_size = sibs;
  c.base_seed = seed;
  return gen_dataset(c, rep);
}

double rel_err(double x, double target) { return std::abs(x - target) / target; }

}  // namespace

// ---- linkage tests ---------------------------------------------------------

TEST(RunTest, MtstTraitPermutation) {
  const Dataset d = simulate(bivariate_spec(0.4).to_model(), 600, 11);
  const Dataset swapped = d.project({1, 0});
  for (int t : {0, 1}) {
    const TestResult a = run_test(d, {TestType::mtst, t});
    const TestResult b = run_test(swapped, {TestType::mtst, 1 - t});
    EXPECT_NEAR(a.lrt, b.lrt, 1e-5) << "trait " << t;
  }
  const TestResult g = run_test(d, {TestType::mtst_general, 1});
  const TestResult gs = run_test(swapped, {TestType::mtst_general, 0});
  EXPECT_NEAR(g.lrt, gs.lrt, 1e-5);
}

TEST(RunTest, UtZeroWhenIbdCarriesNoInformation) {
  // every pair at its expected pi = 1/2: A and G are confounded, no signal
  Dataset d = simulate(univariate(0.3, 0.2), 500, 3);
  for (auto& f : d.families) f.rel = FamilyRelatedness::sib_pair(0.5);
  const TestResult r = run_test(d, {TestType::ut, 0});
  EXPECT_LT(r.lrt, 1e-6);
  EXPECT_GT(r.p_value, 0.49);
}

TEST(RunTest, UtIsSmallOnNoiseTrait) {
  // second column is independent noise; UT on it should rarely be large
  int big = 0;
  for (int r = 0; r < 20; ++r) {
    const Dataset d = simulate(bivariate_spec(0.05).to_model(), 300, 71, r)
                          .project({0});
    Dataset noise = d;
    Rng rng = make_rng(derive_seed(5, r));
    std::normal_distribution<double> z;
    for (auto& f : noise.families)
      for (Eigen::Index j = 0; j < f.phenotypes.rows(); ++j) f.phenotypes(j, 0) = z(rng);
    const TestResult t = run_test(noise, {TestType::ut, 0});
    EXPECT_GE(t.lrt, 0.0);
    big += t.lrt > 5.412;
  }
  EXPECT_LE(big, 2);
}

TEST(RunTest, NullDistributions) {
  const Dataset d = simulate(bivariate_spec(0.1).to_model(), 200, 4);
  EXPECT_EQ(std::get<MixtureNull>(run_test(d, {TestType::mtst, 0}).null_dist).describe(),
            MixtureNull::chi_square(1).describe());
  EXPECT_EQ(std::get<MixtureNull>(run_test(d, {TestType::ut, 1}).null_dist).describe(),
            MixtureNull::half_half(0).describe());
  EXPECT_EQ(std::get<MixtureNull>(run_test(d, {TestType::mtst_general, 0}).null_dist).describe(),
            MixtureNull::half_half(1).describe());
}

TEST(RunTest, GeneralK3NeedsEmpiricalNull) {
  const Dataset d = simulate(default_null_model(3, 0, Structure::general), 150, 6);
  EXPECT_THROW(run_test(d, {TestType::mtst_general, 0}), std::invalid_argument);
  std::vector<double> sample(2000);
  for (std::size_t i = 0; i < sample.size(); ++i) sample[i] = 0.01 * static_cast<double>(i);
  TestOptions o;
  o.empirical_null = EmpiricalNull::from_sample(sample, "test");
  const TestResult r = run_test(d, {TestType::mtst_general, 0}, o);
  EXPECT_TRUE(std::holds_alternative<EmpiricalNull>(r.null_dist));
  EXPECT_NEAR(r.p_value, empirical_sf(r.lrt, *o.empirical_null), 0.0);
}

TEST(RunTest, BadInputs) {
  const Dataset d = simulate(bivariate_spec(0.1).to_model(), 50, 4);
  EXPECT_THROW(run_test(d, {TestType::mtst, 2}), std::invalid_argument);
  EXPECT_THROW(run_test(d.project({0}), {TestType::mtst_general, 0}), std::invalid_argument);
  EXPECT_THROW(parse_test_type("mtst_general"), std::invalid_argument);
  EXPECT_EQ(parse_test_type("mtst-general"), TestType::mtst_general);
}

TEST(RunTest, LrtNonnegativeAndNested) {
  const VcModel h0 = default_null_model(2, 0, Structure::pleiotropic);
  int clamped = 0;
  for (int r = 0; r < 100; ++r) {
    const TestResult t = run_test(simulate(h0, 200, 2024, r), {TestType::mtst, 0});
    EXPECT_GE(t.lrt, 0.0);
    EXPECT_LE(t.null_fit.loglik, t.alt_fit.loglik + 1e-6) << "rep " << r;
    clamped += t.clamped;
  }
  EXPECT_LT(clamped, 1);
}

TEST(RunTest, MtstOnOneTraitEqualsUtStatistic) {
  const Dataset d = simulate(univariate(0.2, 0.3), 800, 19);
  const TestResult ut = run_test(d, {TestType::ut, 0});
  const TestResult mt = run_test(d, {TestType::mtst, 0});
  EXPECT_NEAR(ut.lrt, mt.lrt, 1e-6);
  EXPECT_GT(ut.lrt, 0.0);
  // the nulls differ, so the p-values do
  EXPECT_NEAR(ut.p_value, 0.5 * mt.p_value, 1e-12);
}

TEST(RunTest, PValueMonotoneInLrt) {
  for (const NullDistribution& nd :
       {NullDistribution(MixtureNull::half_half(0)), NullDistribution(MixtureNull::chi_square(1)),
        NullDistribution(MixtureNull::half_half(1)),
        NullDistribution(EmpiricalNull::from_sample({0.1, 0.5, 0.5, 2.0, 7.0}, ""))}) {
    double prev = 1.0 + 1e-12;
    for (double x = 0.0; x < 20.0; x += 0.05) {
      const double p = null_sf(x, nd);
      EXPECT_LE(p, prev);
      prev = p;
    }
  }
}

TEST(Scan, RowCountAndOrder) {
  const VcModel m = default_null_model(5, 0, Structure::pleiotropic);
  const Dataset base = simulate(m, 40, 8);
  std::vector<LocusData> loci;
  for (int l = 0; l < 35; ++l) {
    Dataset d = base;
    Rng rng = make_rng(derive_seed(99, l));
    for (auto& f : d.families) f.rel = gen_sibship_ibd(2, rng);
    loci.push_back({"D3S" + std::to_string(1000 + l), std::move(d)});
  }
  std::vector<TestKind> kinds;
  for (TestType t : {TestType::ut, TestType::mtst})
    for (int i = 0; i < 5; ++i) kinds.push_back({t, i});
  const auto rows = scan(loci, kinds);
  ASSERT_EQ(rows.size(), 350u);
  EXPECT_EQ(rows[0].locus, "D3S1000");
  EXPECT_EQ(rows[349].locus, "D3S1034");
  EXPECT_EQ(rows[12].kind.type, TestType::ut);
  EXPECT_EQ(rows[12].kind.trait, 2);
  EXPECT_EQ(rows[17].kind.type, TestType::mtst);
  int failed = 0;
  for (const auto& r : rows) failed += !r.result.has_value();
  EXPECT_EQ(failed, 0);
}

TEST(Scan, SingleLocusMatchesRunTest) {
  const Dataset d = simulate(bivariate_spec(0.3).to_model(), 300, 21);
  const auto rows = scan({{"m1", d}}, {{TestType::mtst, 1}, {TestType::mtst_general, 1}, {TestType::ut, 0}});
  ASSERT_EQ(rows.size(), 3u);
  FitOptions fit;
  fit.seed = derive_seed(ScanOptions{}.base_seed, hash_label("m1"));
  TestOptions o{fit, std::nullopt, std::nullopt};
  for (const auto& row : rows) {
    ASSERT_TRUE(row.result) << row.error;
    EXPECT_NEAR(row.result->lrt, run_test(d, row.kind, o).lrt, 1e-6) << to_string(row.kind.type);
  }
}

TEST(Scan, DeterministicAcrossThreads) {
  const Dataset d = simulate(bivariate_spec(0.3).to_model(), 150, 21);
  std::vector<LocusData> loci;
  for (int l = 0; l < 4; ++l) {
    Dataset x = d;
    Rng rng = make_rng(derive_seed(7, l));
    for (auto& f : x.families) f.rel = gen_sibship_ibd(2, rng);
    loci.push_back({"L" + std::to_string(l), std::move(x)});
  }
  ScanOptions one, four;
  four.threads = 4;
  const auto a = scan(loci, {{TestType::mtst, 0}}, one), b = scan(loci, {{TestType::mtst, 0}}, four);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].result->lrt, b[i].result->lrt);
}

TEST(Scan, FindsTheLinkedLocus) {
  const VcModel qtl = model_from_proportions({{"T1", 0.15, 0.25, 0.60}, {"T2", 0.10, 0.30, 0.60}}, corr2(0.2), corr2(0.1));
  int hits = 0;
  for (int r = 0; r < 100; ++r) {
    const Dataset linked = simulate(qtl, 2000, 31337, r);
    std::vector<LocusData> loci;
    for (int l = 0; l < 3; ++l) {
      Dataset d = linked;
      if (l != 1) {
        Rng rng = make_rng(derive_seed(31337, r, l, 0xabc));
        for (auto& f : d.families) f.rel = gen_sibship_ibd(2, rng);
      }
      loci.push_back({"L" + std::to_string(l + 1), std::move(d)});
    }
    const auto rows = scan(loci, {{TestType::mtst, 0}});
    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
      if (rows[i].result->p_value < rows[best].result->p_value) best = i;
    hits += best == 1;
  }
  EXPECT_GE(hits, 95);
}

// ---- expected log-likelihood -----------------------------------------------

TEST(ExpectedF, AtTruthIsMinusLogdetMinusDim) {
  const VcModel m = bivariate_spec(0.4).to_model();
  for (double pi : {0.0, 0.5, 1.0}) {
    const auto rel = FamilyRelatedness::sib_pair(pi);
    const MatrixXd s = assemble_sigma(m, rel);
    EXPECT_NEAR(expected_f(m, m, rel), -std::log(s.determinant()) - 4.0, 1e-12);
  }
}

TEST(ExpectedF, GibbsInequality) {
  Rng rng = make_rng(2718);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const VcModel truth = bivariate_spec(0.3).to_model();
  for (int i = 0; i < 100; ++i) {
    const double a1 = 0.5 * u(rng), a2 = 0.5 * u(rng);
    const double g1 = 0.4 * u(rng), g2 = 0.4 * u(rng);
    const VcModel eval = model_from_proportions({{"T1", a1, g1, 1.0 - a1 - g1}, {"T2", a2, g2, 1.0 - a2 - g2}},
                                                corr2(2.0 * u(rng) - 1.0), corr2(1.8 * u(rng) - 0.9),
                                                corr2(2.0 * u(rng) - 1.0));
    for (const auto& [rel, w] : sib_pair_ibd_configs()) EXPECT_LE(expected_f(eval, truth, rel), expected_f(truth, truth, rel) + 1e-12);
    EXPECT_LE(expected_f_bar(eval, truth), expected_f_bar(truth, truth) + 1e-12);
  }
}

TEST(ExpectedF, MatchesMonteCarloLoglik) {
  const VcModel truth = bivariate_spec(0.4).to_model();
  VcModel eval = model_from_proportions({{"T1", 0.2, 0.3, 0.5}, {"T2", 0.1, 0.2, 0.7}}, corr2(0.3), corr2(-0.2));
  const auto rel = FamilyRelatedness::sib_pair(0.5);
  const MatrixXd st = assemble_sigma(truth, rel), se = assemble_sigma(eval, rel);
  const Eigen::LLT<MatrixXd> lt(st), le(se);
  const double logdet = std::log(se.determinant());
  const int d = 4;
  Rng rng = make_rng(11);
  std::normal_distribution<double> z;
  constexpr int draws = 1'000'000;
  double sum = 0.0, sum2 = 0.0;
  VectorXd e(d);
  for (int i = 0; i < draws; ++i) {
    for (int j = 0; j < d; ++j) e(j) = z(rng);
    const VectorXd y = lt.matrixL() * e;
    // 2 * loglik + d ln(2 pi)
    const double v = -logdet - le.matrixL().solve(y).squaredNorm();
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / draws, sd = std::sqrt(sum2 / draws - mean * mean);
  EXPECT_NEAR(expected_f(eval, truth, rel), mean, 3.0 * sd / std::sqrt(double(draws)));
}

TEST(ExpectedF, NonPdEvalThrows) {
  VcModel bad = univariate(0.4, 0.28);
  bad.E(0, 0) = -0.5;
  EXPECT_THROW(expected_f(bad, univariate(0.4, 0.28), FamilyRelatedness::sib_pair(1.0)), NumericalError);
}

// ---- NCP and power ---------------------------------------------------------

TEST(Ncp, ZeroWhenTruthInNull) {
  ModelSpec s = bivariate_spec(0.4);
  s.traits[1] = {"T2", 0.0, 0.30, 0.70};
  s.rho_a = MatrixXd::Identity(2, 2);
  const VcModel truth = s.to_model();
  for (TestType t : {TestType::mtst, TestType::mtst_general, TestType::ut}) {
    const NcpResult n = ncp_per_family({truth, 1, t});
    EXPECT_GE(n.lambda_star, 0.0);
    EXPECT_LT(n.lambda_star, 1e-8) << to_string(t);
    const PowerResult p = compute_power({truth, 1, t});
    EXPECT_FALSE(p.attainable());
  }
}

TEST(Ncp, UnivariateMatchesGridSearch) {
  // truth off the grid; the alternative sup is the truth, the null sup is
  // a 2-parameter search with a = 0
  const VcModel truth = model_from_proportions({{"T1", 0.405, 0.283, 0.312}}, MatrixXd::Ones(1, 1), MatrixXd::Ones(1, 1));
  auto fbar = [&](double a, double g, double e) {
    VcModel m = truth;
    std::get<Pleiotropic>(m.major_gene).loadings(0) = std::sqrt(a);
    m.G(0, 0) = g;
    m.E(0, 0) = e;
    return expected_f_bar(m, truth);
  };
  double best = -1e300, ga = 0, gg = 0, ge = 0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j)
      for (int l = 1; l <= 100; ++l) {
        const double v = fbar(0.01 * i, 0.01 * j, 0.01 * l);
        if (v > best) {
          best = v;
          ga = 0.01 * i;
          gg = 0.01 * j;
          ge = 0.01 * l;
        }
      }
  EXPECT_NEAR(ga, 0.405, 0.01);
  EXPECT_NEAR(gg, 0.283, 0.01);
  EXPECT_NEAR(ge, 0.312, 0.01);

  double nbest = -1e300, ng = 0, ne = 0;
  for (int j = 0; j <= 150; ++j)
    for (int l = 1; l <= 150; ++l) {
      const double v = fbar(0.0, 0.01 * j, 0.01 * l);
      if (v > nbest) {
        nbest = v;
        ng = 0.01 * j;
        ne = 0.01 * l;
      }
    }
  const NcpResult n = ncp_per_family({truth, 0, TestType::ut});
  EXPECT_NEAR(n.null_argmax.A()(0, 0), 0.0, 1e-12);
  EXPECT_NEAR(n.null_argmax.G(0, 0), ng, 0.01);
  EXPECT_NEAR(n.null_argmax.E(0, 0), ne, 0.01);
  EXPECT_GE(n.f_null, nbest - 1e-12);
  EXPECT_NEAR(n.f_alt, best, 1e-3);
  EXPECT_GE(n.f_alt, best - 1e-12);
}

TEST(Power, TotalNcpIdentity) {
  EXPECT_NEAR(solve_total_ncp(0.01, 0.8, 6.635, 1), 11.6789, 1e-3);
  const double lt = solve_total_ncp(0.01, 0.8, 6.635, 1);
  const PowerResult p = power_and_n(lt / 1465.0, 0.01, 0.8, std::nullopt, 6.635, 1);
  ASSERT_TRUE(p.required_n);
  EXPECT_EQ(*p.required_n, 1465);
}

TEST(Power, CeilingIdentity) {
  Rng rng = make_rng(1);
  std::uniform_real_distribution<double> u(-6.0, 0.0);
  for (int i = 0; i < 1000; ++i) {
    const double ls = std::pow(10.0, u(rng));
    const PowerResult p = power_and_n(ls, 0.01, 0.8, std::nullopt, 6.635, 1);
    ASSERT_TRUE(p.required_n);
    const double nl = static_cast<double>(*p.required_n) * ls;
    EXPECT_GE(nl, p.lambda_total * (1 - 1e-12));
    EXPECT_LT(nl, p.lambda_total + ls);
  }
}

TEST(Power, ZeroFamiliesGivesSize) {
  for (double ls : {0.0, 0.003, 0.5}) {
    const PowerResult p = power_and_n(ls, 0.01, 0.8, 0LL, 6.635, 1);
    EXPECT_NEAR(*p.power_at_n, chisq_sf(6.635, 1), 1e-12);
  }
  const PowerResult z = power_and_n(0.0, 0.01, 0.8, 100LL, 6.635, 1);
  EXPECT_FALSE(z.attainable());
  EXPECT_THROW(power_and_n(-1.0, 0.01, 0.8, std::nullopt, 6.635, 1), std::invalid_argument);
}

TEST(Power, UtConventions) {
  PowerOptions mix;
  const TestCalibration c = calibration_for(TestType::ut, 1, mix);
  EXPECT_NEAR(c.critical, 5.412, 1e-3);
  PowerOptions strict;
  strict.ut_critical = UtCritical::chisq1;
  EXPECT_NEAR(calibration_for(TestType::ut, 1, strict).critical, 6.635, 1e-3);
  EXPECT_NEAR(calibration_for(TestType::mtst, 4, mix).critical, 6.635, 1e-3);
  EXPECT_EQ(calibration_for(TestType::mtst_general, 4, mix).critical, 9.385);
  EXPECT_EQ(calibration_for(TestType::mtst_general, 4, mix).df, 4);
  EXPECT_EQ(calibration_for(TestType::mtst_general, 2, mix).df, 2);
  PowerOptions a05;
  a05.alpha = 0.05;
  EXPECT_THROW(calibration_for(TestType::mtst_general, 3, a05), std::invalid_argument);
  a05.general_criticals = std::map<int, double>{{3, 6.2}};
  EXPECT_EQ(calibration_for(TestType::mtst_general, 3, a05).critical, 6.2);
  EXPECT_THROW(calibration_for(TestType::mtst_general, 7, mix), std::invalid_argument);
}

TEST(Power, UtSampleSizesNineModels) {
  const double a[] = {40, 5, 7, 42, 38, 40, 7, 5, 6}, g[] = {28, 30, 32, 28, 30, 32, 28, 30, 32};
  const long long want[] = {330, 28956, 14928, 291, 367, 338, 14765, 28956, 20432};
  for (int i = 0; i < 9; ++i) {
    const VcModel m = univariate(a[i] / 100, g[i] / 100);
    const PowerResult p = compute_power({m, 0, TestType::ut});
    ASSERT_TRUE(p.required_n);
    EXPECT_LT(rel_err(static_cast<double>(*p.required_n), static_cast<double>(want[i])), 0.05)
        << a[i] << "/" << g[i] << " gives " << *p.required_n;
  }
}

TEST(Power, BivariateOtherEffectEndpoints) {
  PowerOptions o;
  o.n = 1500;
  const PowerResult lo = compute_power({bivariate_spec(0.05).to_model(), 1, TestType::mtst}, o);
  const PowerResult hi = compute_power({bivariate_spec(0.50).to_model(), 1, TestType::mtst}, o);
  EXPECT_LT(rel_err(static_cast<double>(*lo.required_n), 7260), 0.05) << *lo.required_n;
  EXPECT_LT(rel_err(static_cast<double>(*hi.required_n), 1150), 0.05) << *hi.required_n;
  EXPECT_NEAR(*lo.power_at_n, 0.15, 0.03);
  EXPECT_NEAR(*hi.power_at_n, 0.90, 0.03);
}

TEST(Sweep, UtFlatAndMtstRisesWithOtherEffect) {
  std::vector<double> grid;
  for (int i = 1; i <= 10; ++i) grid.push_back(0.05 * i);
  const auto rows = sweep(bivariate_spec(0.05), 1, 0, SweepParameter::other_effect, grid, {TestType::ut, TestType::mtst});
  ASSERT_EQ(rows.size(), 20u);
  double prev = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    ASSERT_TRUE(rows[i].result) << rows[i].error;
    if (rows[i].test == TestType::ut) {
      EXPECT_EQ(*rows[i].result->required_n, *rows[0].result->required_n);
    } else {
      EXPECT_GE(rows[i].result->lambda_star, prev - 1e-10);
      prev = rows[i].result->lambda_star;
    }
  }
}

TEST(Sweep, RhoAMonotoneAndNoHelpWithoutSharing) {
  ModelSpec base = bivariate_spec(0.3);
  base.rho_g = MatrixXd::Identity(2, 2);
  base.rho_e = MatrixXd::Identity(2, 2);
  double prev = 0.0;
  for (double r : {0.0, 0.3, 0.6, 0.9}) {
    const VcModel m = apply_sweep_value(base, SweepParameter::rho_a, 1, 0, r).to_model();
    const double l = ncp_per_family({m, 1, TestType::mtst_general}).lambda_star;
    EXPECT_GE(l, prev - 1e-9) << "rho_a " << r;
    prev = l;
  }
  // at rho_a = 0 the other trait's effect does not matter
  double first = -1.0;
  for (double t1 : {0.05, 0.2, 0.5}) {
    ModelSpec s = apply_sweep_value(base, SweepParameter::other_effect, 1, 0, t1);
    const VcModel m = apply_sweep_value(s, SweepParameter::rho_a, 1, 0, 0.0).to_model();
    const double l = ncp_per_family({m, 1, TestType::mtst_general}).lambda_star;
    if (first < 0.0) first = l;
    EXPECT_NEAR(l, first, 1e-5 * first);
  }
}

TEST(Sweep, InvalidPointIsReportedPerRow) {
  const auto rows = sweep(bivariate_spec(0.05), 1, 0, SweepParameter::other_effect, {0.2, 0.9}, {TestType::mtst});
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_TRUE(rows[0].result);
  EXPECT_FALSE(rows[1].result);
  EXPECT_FALSE(rows[1].error.empty());
  EXPECT_THROW(sweep(bivariate_spec(0.05), 1, 1, SweepParameter::rho_g, {0.1}, {TestType::mtst}), std::invalid_argument);
  EXPECT_THROW(parse_sweep_parameter("rho_a"), std::invalid_argument);
}

// ---- misspecification ------------------------------------------------------

TEST(Misspec, CrossoverOnBivariateGrid) {
  const auto rows = misspec_compare(bivariate_spec(0.40), 1, {0.0, 0.3, 0.5, 0.7, 0.9});
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& r : rows) {
    ASSERT_TRUE(r.pleiotropic && r.general) << r.error;
    const bool general_wins = *r.general->required_n < *r.pleiotropic->required_n;
    EXPECT_EQ(general_wins, r.rho_a < 0.35) << "rho_a " << r.rho_a;
    // the pleiotropic alternative set is a subset of the general one
    EXPECT_LE(r.pleiotropic->lambda_star, r.general->lambda_star + 1e-6);
  }
}

TEST(Misspec, BoundaryRhoAGivesEqualNcp) {
  for (double r : {1.0, -1.0}) {
    const auto rows = misspec_compare(bivariate_spec(0.40), 1, {r});
    ASSERT_TRUE(rows[0].pleiotropic && rows[0].general) << rows[0].error;
    EXPECT_NEAR(rows[0].pleiotropic->lambda_star, rows[0].general->lambda_star, 1e-7);
    EXPECT_LT(*rows[0].pleiotropic->required_n, *rows[0].general->required_n);
  }
}

TEST(Misspec, CrossoverIsEarlierWithSixTraits) {
  ModelSpec six = bivariate_spec(0.40);
  const double extra[] = {0.15, 0.25, 0.20, 0.30};
  for (int i = 0; i < 4; ++i) six.traits.push_back({"T" + std::to_string(i + 3), extra[i], 0.30, 0.70 - extra[i]});
  MatrixXd rg = MatrixXd::Identity(6, 6), re = MatrixXd::Identity(6, 6);
  rg.topLeftCorner(2, 2) = six.rho_g;
  re.topLeftCorner(2, 2) = six.rho_e;
  six.rho_g = rg;
  six.rho_e = re;
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(0.05 * i);
  auto crossover = [&](const ModelSpec& s) {
    for (const auto& r : misspec_compare(s, 1, grid)) {
      EXPECT_TRUE(r.pleiotropic && r.general) << r.error;
      if (*r.pleiotropic->required_n < *r.general->required_n) return r.rho_a;
    }
    return 1.0;
  };
  const double two = crossover(bivariate_spec(0.40));
  const double many = crossover(six);
  EXPECT_GT(two, 0.3);
  EXPECT_LT(many, two);
}
