// pleiopower command-line front end.
//
// Exit codes: 0 ok, 1 usage, 2 bad data/config, 3 numerical failure. Errors
// are also reported as one JSON line on stderr.

#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "pleiopower.hpp"

namespace pp = pleiopower;
using pp::fmt;

namespace {

constexpr std::uint64_t kDefaultSeed = 20100801;

struct Common {
  unsigned threads = pp::default_threads();
  std::optional<std::uint64_t> seed;
  std::string out;

  std::uint64_t resolved_seed() const {
    if (seed) return *seed;
    if (const char* env = std::getenv("PLEIOPOWER_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(env, &end, 10);
      if (end == env || *end != '\0') throw std::invalid_argument("PLEIOPOWER_SEED is not an unsigned integer");
      return v;
    }
    return kDefaultSeed;
  }
};

void emit(const pp::CsvTable& t, const std::string& out) {
  if (out.empty() || out == "-")
    std::cout << t.str();
  else
    t.save(out);
}

std::string opt_str(const std::optional<long long>& v) { return v ? std::to_string(*v) : "NA"; }
std::string opt_str(const std::optional<double>& v) { return v ? fmt(*v) : "NA"; }

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<pp::TestType> parse_tests(const std::string& s) {
  std::vector<pp::TestType> out;
  for (const auto& t : split_list(s)) out.push_back(pp::parse_test_type(t));
  if (out.empty()) throw std::invalid_argument("no test given");
  return out;
}

std::vector<int> resolve_traits(const std::vector<std::string>& names, const std::string& sel) {
  std::vector<int> out;
  if (sel == "all") {
    for (std::size_t i = 0; i < names.size(); ++i) out.push_back(static_cast<int>(i));
    return out;
  }
  for (const auto& n : split_list(sel)) out.push_back(pp::trait_index(names, n));
  if (out.empty()) throw std::invalid_argument("no trait given");
  return out;
}

pp::EmpiricalNull read_empirical_null(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw pp::DataError("cannot open " + path);
  std::string line;
  int column = -1;
  long line_no = 0;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = split_list(line + ",");
    if (column < 0) {
      for (std::size_t i = 0; i < fields.size(); ++i)
        if (fields[i] == "statistic") column = static_cast<int>(i);
      if (column < 0) throw pp::DataError(path + ": no 'statistic' column");
      continue;
    }
    if (column >= static_cast<int>(fields.size())) throw pp::DataError(path + ":" + std::to_string(line_no) + ": short row");
    if (fields[column] == "NA") continue;
    double v = 0.0;
    const auto& f = fields[column];
    const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
    if (ec != std::errc() || p != f.data() + f.size())
      throw pp::DataError(path + ":" + std::to_string(line_no) + ": bad statistic '" + f + "'");
    values.push_back(v);
  }
  if (values.empty()) throw pp::DataError(path + ": no statistics");
  return pp::EmpiricalNull::from_sample(values, path);
}

struct PowerFlags {
  double alpha = 0.01;
  double target_power = 0.8;
  std::optional<long long> n;
  std::string ut_critical = "mixture";
  std::optional<double> general_critical;

  void add(CLI::App* c) {
    c->add_option("--alpha", alpha, "significance level")->check(CLI::Range(1e-12, 0.5));
    c->add_option("--target-power", target_power, "target power")->check(CLI::Range(1e-6, 1.0 - 1e-9));
    c->add_option("--n", n, "also report power at this number of sib pairs")->check(CLI::NonNegativeNumber);
    c->add_option("--ut-critical", ut_critical, "UT critical value convention")
        ->check(CLI::IsMember({"mixture", "chisq1"}));
    c->add_option("--general-critical", general_critical,
                  "critical value for the general-model test when k >= 3 (default: simulated table, alpha=0.01)");
  }

  pp::PowerOptions options(int k) const {
    pp::PowerOptions o;
    o.alpha = alpha;
    o.target_power = target_power;
    o.n = n;
    o.ut_critical = ut_critical == "chisq1" ? pp::UtCritical::chisq1 : pp::UtCritical::mixture;
    if (general_critical) o.general_criticals = std::map<int, double>{{k, *general_critical}};
    return o;
  }

  std::vector<std::pair<std::string, std::string>> meta() const {
    std::vector<std::pair<std::string, std::string>> m{
        {"alpha", fmt(alpha)}, {"target_power", fmt(target_power)}, {"ut_critical", ut_critical}};
    if (general_critical) m.emplace_back("general_critical", fmt(*general_critical));
    return m;
  }
};

pp::ModelSpec unsigned_spec(const pp::VcModel& m, const char* command) {
  bool signed_loadings = false;
  pp::ModelSpec s = pp::spec_of(m, &signed_loadings);
  if (signed_loadings)
    throw pp::DataError(std::string(command) + " works on the proportions form of the model and would drop the "
                        "negative loadings of this config");
  if ((m.total_variance().array() - 1.0).abs().maxCoeff() > 1e-9)
    throw pp::DataError(std::string(command) + " needs a standardized model (unit trait variances)");
  return s;
}

// ------------------------------------------------------------------ scan

struct ScanArgs {
  std::string pheno, ibd, kinship, tests = "mtst", trait = "all", locus, empirical_null;
  bool all_loci = false;
};

int run_scan(const ScanArgs& a, const Common& c) {
  if (!a.locus.empty() && a.all_loci) throw std::invalid_argument("--locus and --all-loci are exclusive");
  const auto loaded = pp::load_loci(a.pheno, a.ibd, a.locus.empty() ? std::nullopt : std::optional(a.locus),
                                    a.kinship.empty() ? std::nullopt : std::optional(a.kinship));
  for (const auto& w : loaded.report.warnings) std::cerr << "warning: " << w << "\n";
  const auto& first = loaded.loci.front().data;
  std::vector<pp::TestKind> kinds;
  for (auto t : parse_tests(a.tests))
    for (int i : resolve_traits(first.trait_names, a.trait)) kinds.push_back({t, i});

  pp::ScanOptions so;
  so.base_seed = c.resolved_seed();
  so.threads = c.threads;
  if (!a.empirical_null.empty()) so.empirical_null = read_empirical_null(a.empirical_null);
  const auto rows = pp::scan(loaded.loci, kinds, so);

  std::ostringstream std_desc;
  for (int t = 0; t < first.k(); ++t)
    std_desc << (t ? ";" : "") << first.trait_names[t] << ":" << fmt(first.standardization->mean(t)) << ":"
             << fmt(first.standardization->sd(t));
  pp::CsvTable table({{"command", "scan"},
                      {"seed", std::to_string(so.base_seed)},
                      {"families", std::to_string(first.families.size())},
                      {"individuals_dropped", std::to_string(loaded.report.individuals_dropped)},
                      {"families_dropped", std::to_string(loaded.report.families_dropped)},
                      {"standardization", std_desc.str()},
                      {"convergence", "rel_tol=" + fmt(so.fit.rel_tol) + ";abs_tol=" + fmt(so.fit.abs_tol) + ";starts=" +
                                         std::to_string(so.fit.n_starts)}},
                     {"locus", "test", "trait", "lrt", "p_value", "null", "alt_loglik", "null_loglik", "clamped",
                      "error"});
  int failures = 0;
  for (const auto& r : rows) {
    if (r.result) {
      const auto& t = *r.result;
      table.add({r.locus, pp::to_string(r.kind.type), first.trait_names[r.kind.trait], fmt(t.lrt), fmt(t.p_value),
                 pp::describe(t.null_dist), fmt(t.alt_fit.loglik), fmt(t.null_fit.loglik), t.clamped ? "1" : "0",
                 ""});
    } else {
      ++failures;
      table.add({r.locus, pp::to_string(r.kind.type), first.trait_names[r.kind.trait], "NA", "NA", "", "NA", "NA",
                 "0", r.error});
    }
  }
  emit(table, c.out);
  if (failures) std::cerr << "warning: " << failures << " of " << rows.size() << " tests failed (see error column)\n";
  return 0;
}

// ------------------------------------------------------------------ power

struct PowerArgs {
  std::string model, tests = "mtst", trait = "all";
  PowerFlags flags;
};

int run_power(const PowerArgs& a, const Common& c) {
  const pp::VcModel model = pp::read_model_config(a.model);
  const auto opt = a.flags.options(model.k());
  auto meta = a.flags.meta();
  meta.insert(meta.begin(), {"command", "power"});
  pp::CsvTable table(meta, {"trait", "test", "lambda_star", "lambda_total", "critical", "df", "required_n", "n",
                            "power_at_n", "convention"});
  for (auto t : parse_tests(a.tests))
    for (int i : resolve_traits(model.trait_names, a.trait)) {
      const auto r = pp::compute_power({model, i, t}, opt);
      table.add({model.trait_names[i], pp::to_string(t), fmt(r.lambda_star), fmt(r.lambda_total),
                 fmt(r.critical_value), std::to_string(r.df), opt_str(r.required_n), opt_str(r.n),
                 opt_str(r.power_at_n), r.convention});
    }
  emit(table, c.out);
  return 0;
}

// ------------------------------------------------------------------ sweep

std::vector<double> parse_grid(const std::string& s) {
  std::vector<double> g;
  for (const auto& item : split_list(s)) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (ec != std::errc() || p != item.data() + item.size()) throw std::invalid_argument("bad grid value '" + item + "'");
    g.push_back(v);
  }
  if (g.empty()) throw std::invalid_argument("empty grid");
  return g;
}

struct SweepArgs {
  std::string model, vary, grid, trait, other, tests = "mtst";
  PowerFlags flags;
};

int run_sweep(const SweepArgs& a, const Common& c) {
  const pp::VcModel model = pp::read_model_config(a.model);
  const pp::ModelSpec spec = unsigned_spec(model, "sweep");
  const auto p = pp::parse_sweep_parameter(a.vary);
  const int tested = pp::trait_index(model.trait_names, a.trait);
  int other = tested;
  if (!a.other.empty()) {
    other = pp::trait_index(model.trait_names, a.other);
  } else if (model.k() > 1) {
    other = tested == 0 ? 1 : 0;
  }
  const auto rows = pp::sweep(spec, tested, other, p, parse_grid(a.grid), parse_tests(a.tests),
                              a.flags.options(model.k()), c.threads);
  auto meta = a.flags.meta();
  meta.insert(meta.begin(), {{"command", "sweep"}, {"vary", a.vary}, {"trait", a.trait},
                             {"other", model.trait_names[other]}});
  pp::CsvTable table(meta, {"value", "test", "lambda_star", "required_n", "power_at_n", "critical", "df", "error"});
  for (const auto& r : rows) {
    if (r.result)
      table.add({fmt(r.value), pp::to_string(r.test), fmt(r.result->lambda_star), opt_str(r.result->required_n),
                 opt_str(r.result->power_at_n), fmt(r.result->critical_value), std::to_string(r.result->df), ""});
    else
      table.add({fmt(r.value), pp::to_string(r.test), "NA", "NA", "NA", "NA", "NA", r.error});
  }
  emit(table, c.out);
  return 0;
}

// ------------------------------------------------------------------ misspec

struct MisspecArgs {
  std::string model, trait, grid = "0,0.3,0.5,0.7,0.9";
  PowerFlags flags;
};

int run_misspec(const MisspecArgs& a, const Common& c) {
  const pp::VcModel model = pp::read_model_config(a.model);
  const pp::ModelSpec spec = unsigned_spec(model, "misspec");
  const int tested = pp::trait_index(model.trait_names, a.trait);
  const auto rows = pp::misspec_compare(spec, tested, parse_grid(a.grid), a.flags.options(model.k()), c.threads);
  auto meta = a.flags.meta();
  meta.insert(meta.begin(), {{"command", "misspec"}, {"trait", a.trait}});
  pp::CsvTable table(meta, {"rho_a", "lambda_pleiotropic", "n_pleiotropic", "power_pleiotropic", "lambda_general",
                            "n_general", "power_general", "error"});
  for (const auto& r : rows) {
    if (r.pleiotropic && r.general)
      table.add({fmt(r.rho_a), fmt(r.pleiotropic->lambda_star), opt_str(r.pleiotropic->required_n),
                 opt_str(r.pleiotropic->power_at_n), fmt(r.general->lambda_star), opt_str(r.general->required_n),
                 opt_str(r.general->power_at_n), ""});
    else
      table.add({fmt(r.rho_a), "NA", "NA", "NA", "NA", "NA", "NA", r.error});
  }
  emit(table, c.out);
  return 0;
}

// ------------------------------------------------------------------ simulate-null

struct SimArgs {
  std::string model, test = "mtst", trait, structure = "pleiotropic", summary, alphas = "0.01,0.05";
  int k = 0;
  int reps = 2000;
  int families = 1000;
  int sibs = 2;
};

int run_simulate(const SimArgs& a, const Common& c) {
  pp::SimConfig cfg;
  const auto type = pp::parse_test_type(a.test);
  bool default_model = false;
  if (!a.model.empty()) {
    if (a.k) throw std::invalid_argument("--model and --k are exclusive");
    cfg.model = pp::read_model_config(a.model);
  } else {
    if (a.k < 1) throw std::invalid_argument("give --model or --k");
    if (a.structure != "pleiotropic" && a.structure != "general")
      throw std::invalid_argument("--structure must be pleiotropic or general");
    std::vector<std::string> names;
    for (int t = 0; t < a.k; ++t) names.push_back("T" + std::to_string(t + 1));
    const int tested = a.trait.empty() ? 0 : pp::trait_index(names, a.trait);
    cfg.model = pp::default_null_model(a.k, tested, a.structure == "general" ? pp::Structure::general
                                                                               : pp::Structure::pleiotropic);
    default_model = true;
  }
  const int tested = a.trait.empty() ? 0 : pp::trait_index(cfg.model.trait_names, a.trait);
  cfg.reps = a.reps;
  cfg.n_families = a.families;
  cfg.sibship_size = a.sibs;
  cfg.base_seed = c.resolved_seed();
  const pp::TestKind kind{type, tested};
  const auto reference = pp::asymptotic_null(type, type == pp::TestType::ut ? 1 : cfg.model.k());
  pp::CalibrationOptions co;
  co.threads = c.threads;
  co.alphas = parse_grid(a.alphas);
  const auto cal = pp::calibrate_null(cfg, kind, reference, co);

  pp::CsvTable table({{"command", "simulate-null"},
                      {"seed", std::to_string(cfg.base_seed)},
                      {"test", a.test},
                      {"trait", cfg.model.trait_names[tested]},
                      {"k", std::to_string(cfg.model.k())},
                      {"reps", std::to_string(cfg.reps)},
                      {"families", std::to_string(cfg.n_families)},
                      {"sibs", std::to_string(cfg.sibship_size)}},
                     {"rep", "statistic"});
  for (std::size_t r = 0; r < cal.per_rep.size(); ++r) table.add({std::to_string(r + 1), fmt(cal.per_rep[r])});
  emit(table, c.out);

  if (!a.summary.empty()) {
    pp::json s;
    s["version"] = pp::kVersion;
    s["config"] = {{"test", a.test},        {"trait", cfg.model.trait_names[tested]},
                   {"reps", cfg.reps},      {"families", cfg.n_families},
                   {"sibs", cfg.sibship_size}, {"seed", cfg.base_seed},
                   {"model", pp::model_to_json(cfg.model)}};
    if (default_model)
    {
      const pp::NullModelOptions d;
      s["assumptions"] = "default null model: tested trait without major-gene effect, other traits a_prop=" +
                         fmt(d.other_a) + ", g_prop=" + fmt(d.polygenic) + ", rho_g=rho_e=" + fmt(d.rho) +
                         (a.structure == "general" ? ", rho_a=" + fmt(d.rho_a_others) + " among the other traits" : "");
    }
    s["reference"] = reference ? pp::json(cal.reference) : pp::json(nullptr);
    pp::json t1 = pp::json::array();
    for (const auto& t : cal.type1)
      t1.push_back({{"alpha", t.alpha}, {"critical", t.critical}, {"rate", t.rate}, {"se", t.standard_error}});
    s["type1"] = t1;
    if (reference && cal.statistics.size() >= 50)
      s["ks"] = {{"D", cal.ks.statistic}, {"p", cal.ks.p_value}};
    else
      s["ks"] = nullptr;
    pp::json crit = pp::json::object();
    for (const auto& [alpha, v] : cal.empirical_criticals) crit[fmt(alpha)] = v;
    s["empirical_criticals"] = crit;
    s["failures"] = cal.failures;
    s["clamped"] = cal.clamped;
    s["valid"] = cal.valid;
    pp::write_text_file(a.summary, s.dump(2) + "\n");
  }
  if (!cal.valid) {
    std::cerr << "warning: calibration invalid (" << cal.failures << " of " << cfg.reps << " replicates failed)\n";
    return 3;
  }
  return 0;
}

// ------------------------------------------------------------------ sample-correlations

struct SampleArgs {
  int k = 2;
  int count = 100;
  int clusters = 3;
};

int run_sample(const SampleArgs& a, const Common& c) {
  const auto seed = c.resolved_seed();
  const auto samples = pp::sample_correlation_sets(a.k, a.count, seed);
  const auto reps = pp::select_representatives(samples, a.clusters, seed);
  std::vector<std::string> header{"index", "cluster", "representative"};
  for (const char* m : {"rho_g", "rho_e"})
    for (int i = 0; i < a.k; ++i)
      for (int j = i + 1; j < a.k; ++j) header.push_back(std::string(m) + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
  pp::CsvTable table({{"command", "sample-correlations"},
                      {"seed", std::to_string(seed)},
                      {"k", std::to_string(a.k)},
                      {"clusters", std::to_string(a.clusters)},
                      {"within_ss", fmt(reps.within_ss)},
                      {"iw_df", std::to_string(a.k + 1)}},
                     header);
  std::vector<int> rep_rank(samples.size(), 0);
  for (std::size_t r = 0; r < reps.indices.size(); ++r) rep_rank[reps.indices[r]] = static_cast<int>(r) + 1;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<std::string> row{std::to_string(i + 1), std::to_string(reps.assignment[i] + 1),
                                 rep_rank[i] ? std::to_string(rep_rank[i]) : ""};
    const auto f = pp::correlation_features(samples[i]);
    for (Eigen::Index p = 0; p < f.size(); ++p) row.push_back(fmt(f(p)));
    table.add(std::move(row));
  }
  emit(table, c.out);
  return 0;
}

// ------------------------------------------------------------------ design

struct DesignArgs {
  std::string model, test = "mtst";
  int subset_size = 0;
  PowerFlags flags;
};

int run_design(const DesignArgs& a, const Common& c) {
  const pp::VcModel model = pp::read_model_config(a.model);
  const auto test = pp::parse_test_type(a.test);
  const auto designs =
      pp::best_subset(model, a.subset_size, a.flags.options(a.subset_size), test, c.threads);
  auto meta = a.flags.meta();
  meta.insert(meta.begin(), {{"command", "design"}, {"test", a.test}, {"subset_size", std::to_string(a.subset_size)}});
  pp::CsvTable table(meta, {"rank", "traits", "per_trait_required_n", "design_n", "error"});
  for (const auto& d : designs) {
    std::string names, ns;
    for (std::size_t i = 0; i < d.traits.size(); ++i) {
      names += (i ? ";" : "") + model.trait_names[d.traits[i]];
      ns += (i ? ";" : "") + model.trait_names[d.traits[i]] + "=" + opt_str(d.per_trait_required_n[i]);
    }
    table.add({std::to_string(d.rank), names, ns, opt_str(d.design_n), d.error});
  }
  emit(table, c.out);
  return 0;
}

void error_line(const char* kind, const std::string& msg, int code) {
  std::cerr << pp::json{{"error", kind}, {"message", msg}, {"exit_code", code}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Variance-components linkage tests, power and study design for multiple traits"};
  app.set_version_flag("--version", pp::kVersion);
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* s, bool seeded) {
    s->add_option("--threads", common.threads, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--out", common.out, "output CSV (default: stdout)");
    if (seeded) s->add_option("--seed", common.seed, "base seed (fallback: PLEIOPOWER_SEED)");
  };

  ScanArgs scan;
  auto* sc = app.add_subcommand("scan", "linkage tests at one or all loci");
  sc->add_option("--pheno", scan.pheno, "phenotype TSV")->required()->check(CLI::ExistingFile);
  sc->add_option("--ibd", scan.ibd, "IBD TSV")->required()->check(CLI::ExistingFile);
  sc->add_option("--kinship", scan.kinship, "optional kinship TSV")->check(CLI::ExistingFile);
  sc->add_option("--test", scan.tests, "ut, mtst, mtst-general (comma list)");
  sc->add_option("--trait", scan.trait, "trait name, comma list or 'all'");
  sc->add_option("--locus", scan.locus, "single locus label");
  sc->add_flag("--all-loci", scan.all_loci, "test every locus (default)");
  sc->add_option("--empirical-null", scan.empirical_null, "simulate-null CSV for general tests with k >= 3")
      ->check(CLI::ExistingFile);
  add_common(sc, true);

  PowerArgs power;
  auto* pw = app.add_subcommand("power", "required sample size and power");
  pw->add_option("--model", power.model, "model config JSON")->required()->check(CLI::ExistingFile);
  pw->add_option("--test", power.tests, "ut, mtst, mtst-general (comma list)");
  pw->add_option("--trait", power.trait, "trait name, comma list or 'all'");
  power.flags.add(pw);
  add_common(pw, false);

  SweepArgs sw;
  auto* swc = app.add_subcommand("sweep", "power over a grid of one model parameter");
  swc->add_option("--model", sw.model, "model config JSON")->required()->check(CLI::ExistingFile);
  swc->add_option("--vary", sw.vary, "tested-effect, other-effect, rho-g, rho-e, rho-a")->required();
  swc->add_option("--grid", sw.grid, "comma-separated values")->required();
  swc->add_option("--trait", sw.trait, "tested trait")->required();
  swc->add_option("--other", sw.other, "second trait for other-effect / rho-g / rho-e");
  swc->add_option("--test", sw.tests, "ut, mtst, mtst-general (comma list)");
  sw.flags.add(swc);
  add_common(swc, false);

  MisspecArgs ms;
  auto* msc = app.add_subcommand("misspec", "pleiotropic vs general fit under imperfect major-gene correlation");
  msc->add_option("--model", ms.model, "model config JSON")->required()->check(CLI::ExistingFile);
  msc->add_option("--trait", ms.trait, "tested trait")->required();
  msc->add_option("--rho-a-grid", ms.grid, "comma-separated major-gene correlations");
  ms.flags.add(msc);
  add_common(msc, false);

  SimArgs sim;
  auto* smc = app.add_subcommand("simulate-null", "simulate the null distribution of a test");
  smc->add_option("--model", sim.model, "null model config JSON")->check(CLI::ExistingFile);
  smc->add_option("--k", sim.k, "use the default null model with k traits");
  smc->add_option("--structure", sim.structure, "default null model structure: pleiotropic or general");
  smc->add_option("--test", sim.test, "ut, mtst or mtst-general");
  smc->add_option("--trait", sim.trait, "tested trait (default: first)");
  smc->add_option("--reps", sim.reps, "replicates")->check(CLI::PositiveNumber);
  smc->add_option("--families", sim.families, "families per replicate")->check(CLI::PositiveNumber);
  smc->add_option("--sibs", sim.sibs, "sibship size")->check(CLI::PositiveNumber);
  smc->add_option("--alphas", sim.alphas, "levels for rates and empirical criticals");
  smc->add_option("--summary", sim.summary, "JSON summary output");
  add_common(smc, true);

  SampleArgs sa;
  auto* sac = app.add_subcommand("sample-correlations", "Inverse-Wishart correlation sets and k-means representatives");
  sac->add_option("--k", sa.k, "traits")->check(CLI::Range(2, 64));
  sac->add_option("--count", sa.count, "number of (rho_g, rho_e) pairs")->check(CLI::PositiveNumber);
  sac->add_option("--clusters", sa.clusters, "k-means centers")->check(CLI::PositiveNumber);
  add_common(sac, true);

  DesignArgs ds;
  auto* dsc = app.add_subcommand("design", "rank trait subsets by required sample size");
  dsc->add_option("--model", ds.model, "model config JSON")->required()->check(CLI::ExistingFile);
  dsc->add_option("--subset-size", ds.subset_size, "traits per subset")->required()->check(CLI::PositiveNumber);
  dsc->add_option("--test", ds.test, "mtst or mtst-general");
  ds.flags.add(dsc);
  add_common(dsc, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    error_line("usage", e.what(), 1);
    return 1;
  }

  try {
    if (sc->parsed()) return run_scan(scan, common);
    if (pw->parsed()) return run_power(power, common);
    if (swc->parsed()) return run_sweep(sw, common);
    if (msc->parsed()) return run_misspec(ms, common);
    if (smc->parsed()) return run_simulate(sim, common);
    if (sac->parsed()) return run_sample(sa, common);
    if (dsc->parsed()) return run_design(ds, common);
  } catch (const std::invalid_argument& e) {
    error_line("usage", e.what(), 1);
    return 1;
  } catch (const pp::DataError& e) {
    error_line("data", e.what(), 2);
    return 2;
  } catch (const pp::json::exception& e) {
    error_line("data", e.what(), 2);
    return 2;
  } catch (const pp::NumericalError& e) {
    error_line("numerical", e.what(), 3);
    return 3;
  } catch (const std::exception& e) {
    error_line("numerical", e.what(), 3);
    return 3;
  }
  return 1;
}
