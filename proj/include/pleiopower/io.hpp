#pragma once

// File formats: tab-delimited phenotype / IBD / kinship tables, JSON model
// configs and summaries, CSV results with a metadata comment header.

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pleiopower/error.hpp"
#include "pleiopower/likelihood.hpp"
#include "pleiopower/linkage_tests.hpp"
#include "pleiopower/model_core.hpp"

namespace pleiopower {

inline constexpr const char* kVersion = "0.1.0";

using json = nlohmann::json;

namespace io_detail {

inline std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

inline std::string where(const std::string& path, long line) { return path + ":" + std::to_string(line) + ": "; }

inline double parse_number(const std::string& field, const std::string& path, long line, const std::string& what) {
  const char* b = field.data();
  const char* e = b + field.size();
  if (b != e && *b == '+') ++b;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e || field.empty() || !std::isfinite(v))
    throw DataError(where(path, line) + what + " '" + field + "' is not a decimal number");
  return v;
}

/// Reads non-empty, non-comment lines; the first one is the header.
struct TsvReader {
  std::string path;
  std::ifstream in;
  long line_no = 0;

  explicit TsvReader(std::string p) : path(std::move(p)), in(path) {
    if (!in) throw DataError("cannot open " + path);
  }

  bool next(std::vector<std::string>& fields) {
    std::string line;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      fields = split_tabs(line);
      return true;
    }
    return false;
  }
};

inline void expect_header(const std::vector<std::string>& got, const std::vector<std::string>& want,
                          const TsvReader& r) {
  if (got.size() < want.size() || !std::equal(want.begin(), want.end(), got.begin())) {
    std::string w;
    for (const auto& s : want) w += (w.empty() ? "" : "\t") + s;
    throw DataError(where(r.path, r.line_no) + "header must start with: " + w);
  }
}

}  // namespace io_detail

struct PhenotypeRow {
  std::string family_id;
  std::string individual_id;
  std::vector<std::optional<double>> values;  ///< nullopt = NA
  long line = 0;
};

struct PhenotypeTable {
  std::vector<std::string> trait_names;
  std::vector<PhenotypeRow> rows;
};

/// Header: family_id, individual_id, then one column per trait. Values are
/// decimals or NA; "." is rejected.
inline PhenotypeTable read_phenotypes(const std::string& path) {
  io_detail::TsvReader r(path);
  std::vector<std::string> f;
  if (!r.next(f)) throw DataError(path + ": empty phenotype file");
  io_detail::expect_header(f, {"family_id", "individual_id"}, r);
  PhenotypeTable t;
  t.trait_names.assign(f.begin() + 2, f.end());
  if (t.trait_names.empty()) throw DataError(io_detail::where(path, r.line_no) + "no trait columns");
  std::set<std::string> names(t.trait_names.begin(), t.trait_names.end());
  if (names.size() != t.trait_names.size()) throw DataError(io_detail::where(path, r.line_no) + "duplicate trait name");
  std::set<std::pair<std::string, std::string>> seen;
  while (r.next(f)) {
    if (f.size() != t.trait_names.size() + 2)
      throw DataError(io_detail::where(path, r.line_no) + "expected " + std::to_string(t.trait_names.size() + 2) +
                      " fields, found " + std::to_string(f.size()));
    PhenotypeRow row{f[0], f[1], {}, r.line_no};
    if (row.family_id.empty() || row.individual_id.empty())
      throw DataError(io_detail::where(path, r.line_no) + "empty family or individual id");
    if (!seen.emplace(row.family_id, row.individual_id).second)
      throw DataError(io_detail::where(path, r.line_no) + "duplicate individual " + row.family_id + "/" +
                      row.individual_id);
    for (std::size_t c = 2; c < f.size(); ++c) {
      if (f[c] == "NA") {
        row.values.push_back(std::nullopt);
      } else if (f[c] == ".") {
        throw DataError(io_detail::where(path, r.line_no) + "'.' is not accepted as missing; use NA");
      } else {
        row.values.push_back(io_detail::parse_number(f[c], path, r.line_no, t.trait_names[c - 2]));
      }
    }
    t.rows.push_back(std::move(row));
  }
  if (t.rows.empty()) throw DataError(path + ": no phenotype rows");
  return t;
}

/// Unordered pair key within a family.
using PairKey = std::tuple<std::string, std::string, std::string>;

inline PairKey pair_key(const std::string& fam, const std::string& a, const std::string& b) {
  return a < b ? PairKey{fam, a, b} : PairKey{fam, b, a};
}

struct IbdLocus {
  std::string label;
  double position_cm = 0.0;
  std::map<PairKey, double> pi_hat;
};

struct IbdTable {
  std::vector<IbdLocus> loci;  ///< order of first appearance

  const IbdLocus& find(const std::string& label) const {
    for (const auto& l : loci)
      if (l.label == label) return l;
    throw DataError("locus '" + label + "' not present in the IBD file");
  }
};

/// Header: family_id id1 id2 locus position_cM pi_hat. One row per unordered
/// pair per locus; identical duplicates (either orientation) are collapsed,
/// conflicting ones are an error.
inline IbdTable read_ibd(const std::string& path) {
  io_detail::TsvReader r(path);
  std::vector<std::string> f;
  if (!r.next(f)) throw DataError(path + ": empty IBD file");
  io_detail::expect_header(f, {"family_id", "id1", "id2", "locus", "position_cM", "pi_hat"}, r);
  IbdTable t;
  std::map<std::string, std::size_t> index;
  while (r.next(f)) {
    if (f.size() != 6) throw DataError(io_detail::where(path, r.line_no) + "expected 6 fields, found " + std::to_string(f.size()));
    if (f[1] == f[2]) throw DataError(io_detail::where(path, r.line_no) + "pair of an individual with itself");
    const double pos = io_detail::parse_number(f[4], path, r.line_no, "position_cM");
    const double pi = io_detail::parse_number(f[5], path, r.line_no, "pi_hat");
    if (pi < 0.0 || pi > 1.0) throw DataError(io_detail::where(path, r.line_no) + "pi_hat " + f[5] + " outside [0,1]");
    auto it = index.find(f[3]);
    if (it == index.end()) {
      it = index.emplace(f[3], t.loci.size()).first;
      t.loci.push_back({f[3], pos, {}});
    } else if (t.loci[it->second].position_cm != pos) {
      throw DataError(io_detail::where(path, r.line_no) + "locus " + f[3] + " listed at two positions");
    }
    auto& loc = t.loci[it->second];
    const auto key = pair_key(f[0], f[1], f[2]);
    const auto [slot, inserted] = loc.pi_hat.emplace(key, pi);
    if (!inserted && slot->second != pi)
      throw DataError(io_detail::where(path, r.line_no) + "conflicting pi_hat for pair " + f[1] + "," + f[2] +
                      " of family " + f[0] + " at locus " + f[3]);
  }
  if (t.loci.empty()) throw DataError(path + ": no IBD rows");
  return t;
}

/// Optional header: family_id id1 id2 kinship (the kinship coefficient phi;
/// the model uses 2*phi).
inline std::map<PairKey, double> read_kinship(const std::string& path) {
  io_detail::TsvReader r(path);
  std::vector<std::string> f;
  if (!r.next(f)) throw DataError(path + ": empty kinship file");
  io_detail::expect_header(f, {"family_id", "id1", "id2", "kinship"}, r);
  std::map<PairKey, double> out;
  while (r.next(f)) {
    if (f.size() != 4) throw DataError(io_detail::where(path, r.line_no) + "expected 4 fields, found " + std::to_string(f.size()));
    const double phi = io_detail::parse_number(f[3], path, r.line_no, "kinship");
    if (phi < 0.0 || phi > 0.5) throw DataError(io_detail::where(path, r.line_no) + "kinship outside [0,0.5]");
    const auto [slot, inserted] = out.emplace(pair_key(f[0], f[1], f[2]), 2.0 * phi);
    if (!inserted && slot->second != 2.0 * phi)
      throw DataError(io_detail::where(path, r.line_no) + "conflicting kinship for pair " + f[1] + "," + f[2]);
  }
  return out;
}

struct LoadReport {
  int individuals_dropped = 0;  ///< any trait NA
  int families_dropped = 0;     ///< fewer than 2 members left
  std::vector<std::string> warnings;
};

namespace io_detail {

struct Member {
  std::string id;
  std::vector<double> values;
};

struct Prepared {
  std::vector<std::string> trait_names;
  std::vector<std::pair<std::string, std::vector<Member>>> families;
  Standardization standardization;
  std::set<std::pair<std::string, std::string>> all_ids;
};

inline Prepared prepare(const PhenotypeTable& pheno, LoadReport& report) {
  Prepared p;
  p.trait_names = pheno.trait_names;
  std::map<std::string, std::size_t> fam_index;
  const auto k = pheno.trait_names.size();
  for (const auto& row : pheno.rows) {
    p.all_ids.emplace(row.family_id, row.individual_id);
    auto it = fam_index.find(row.family_id);
    if (it == fam_index.end()) {
      it = fam_index.emplace(row.family_id, p.families.size()).first;
      p.families.push_back({row.family_id, {}});
    }
    bool complete = true;
    Member m{row.individual_id, {}};
    for (const auto& v : row.values) {
      if (!v) {
        complete = false;
        break;
      }
      m.values.push_back(*v);
    }
    if (!complete) {
      ++report.individuals_dropped;
      continue;
    }
    p.families[it->second].second.push_back(std::move(m));
  }
  std::vector<std::pair<std::string, std::vector<Member>>> kept;
  for (auto& f : p.families) {
    if (f.second.size() < 2) {
      ++report.families_dropped;
      continue;
    }
    kept.push_back(std::move(f));
  }
  p.families = std::move(kept);
  if (report.individuals_dropped > 0)
    report.warnings.push_back(std::to_string(report.individuals_dropped) + " individuals with missing traits dropped");
  if (report.families_dropped > 0)
    report.warnings.push_back(std::to_string(report.families_dropped) + " families with fewer than 2 complete members dropped");
  if (p.families.empty()) throw DataError("no family has two or more members with complete phenotypes");

  VectorXd sum = VectorXd::Zero(static_cast<Eigen::Index>(k));
  VectorXd sq = VectorXd::Zero(static_cast<Eigen::Index>(k));
  double n = 0;
  for (const auto& f : p.families)
    for (const auto& m : f.second) {
      for (std::size_t t = 0; t < k; ++t) sum(t) += m.values[t];
      n += 1;
    }
  const VectorXd mean = sum / n;
  for (const auto& f : p.families)
    for (const auto& m : f.second)
      for (std::size_t t = 0; t < k; ++t) sq(t) += (m.values[t] - mean(t)) * (m.values[t] - mean(t));
  VectorXd sd = (sq / (n - 1.0)).cwiseSqrt();
  for (std::size_t t = 0; t < k; ++t)
    if (!(sd(t) > 0.0)) throw DataError("trait " + pheno.trait_names[t] + " has zero variance after deletion");
  p.standardization = {mean, sd};
  return p;
}

inline Dataset build(const Prepared& p, const IbdLocus& locus, const std::map<PairKey, double>* kinship) {
  Dataset d;
  d.trait_names = p.trait_names;
  d.standardization = p.standardization;
  const auto k = static_cast<Eigen::Index>(p.trait_names.size());
  for (const auto& [fam, members] : p.families) {
    const auto m = static_cast<Eigen::Index>(members.size());
    Family f;
    f.id = fam;
    f.rel.pi_hat = MatrixXd::Identity(m, m);
    f.rel.two_phi = MatrixXd::Constant(m, m, 0.5);
    f.rel.two_phi.diagonal().setOnes();
    f.phenotypes.resize(m, k);
    for (Eigen::Index j = 0; j < m; ++j) {
      f.rel.member_ids.push_back(members[j].id);
      for (Eigen::Index t = 0; t < k; ++t)
        f.phenotypes(j, t) = (members[j].values[t] - p.standardization.mean(t)) / p.standardization.sd(t);
      for (Eigen::Index l = 0; l < j; ++l) {
        const auto key = pair_key(fam, members[j].id, members[l].id);
        const auto it = locus.pi_hat.find(key);
        if (it == locus.pi_hat.end())
          throw DataError("family " + fam + ": no pi_hat for pair " + members[l].id + "," + members[j].id +
                          " at locus " + locus.label);
        f.rel.pi_hat(j, l) = f.rel.pi_hat(l, j) = it->second;
        if (kinship) {
          const auto kt = kinship->find(key);
          if (kt != kinship->end()) f.rel.two_phi(j, l) = f.rel.two_phi(l, j) = kt->second;
        }
      }
    }
    d.families.push_back(std::move(f));
  }
  return d;
}

inline void check_ids(const Prepared& p, const IbdTable& ibd) {
  for (const auto& loc : ibd.loci)
    for (const auto& [key, pi] : loc.pi_hat) {
      const auto& [fam, a, b] = key;
      for (const auto* id : {&a, &b})
        if (!p.all_ids.count({fam, *id}))
          throw DataError("IBD file: individual " + fam + "/" + *id + " at locus " + loc.label +
                          " is not in the phenotype file");
    }
}

}  // namespace io_detail

struct LoadedData {
  std::vector<LocusData> loci;
  LoadReport report;
};

/// Loads phenotypes once and builds one dataset per selected locus (all loci
/// when `locus` is empty). Individuals with any NA are dropped; traits are
/// standardized over the retained individuals.
inline LoadedData load_loci(const std::string& pheno_path, const std::string& ibd_path,
                            const std::optional<std::string>& locus = std::nullopt,
                            const std::optional<std::string>& kinship_path = std::nullopt) {
  const PhenotypeTable pheno = read_phenotypes(pheno_path);
  const IbdTable ibd = read_ibd(ibd_path);
  std::optional<std::map<PairKey, double>> kin;
  if (kinship_path) kin = read_kinship(*kinship_path);
  LoadedData out;
  const io_detail::Prepared prepared = io_detail::prepare(pheno, out.report);
  io_detail::check_ids(prepared, ibd);
  if (locus) {
    out.loci.push_back({*locus, io_detail::build(prepared, ibd.find(*locus), kin ? &*kin : nullptr)});
  } else {
    for (const auto& l : ibd.loci) out.loci.push_back({l.label, io_detail::build(prepared, l, kin ? &*kin : nullptr)});
  }
  return out;
}

inline Dataset load_dataset(const std::string& pheno_path, const std::string& ibd_path, const std::string& locus,
                            LoadReport* report = nullptr,
                            const std::optional<std::string>& kinship_path = std::nullopt) {
  LoadedData d = load_loci(pheno_path, ibd_path, locus, kinship_path);
  if (report) *report = d.report;
  return std::move(d.loci.front().data);
}

// ---------------------------------------------------------------- model configs

namespace io_detail {

inline json matrix_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

inline MatrixXd matrix_from(const json& j, int k, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != k) throw DataError(what + ": must be a " + std::to_string(k) + "x" + std::to_string(k) + " array");
  MatrixXd m(k, k);
  for (int i = 0; i < k; ++i) {
    if (!j[i].is_array() || static_cast<int>(j[i].size()) != k) throw DataError(what + ": row " + std::to_string(i) + " has the wrong length");
    for (int c = 0; c < k; ++c) {
      if (!j[i][c].is_number()) throw DataError(what + ": non-numeric entry");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

inline VectorXd vector_from(const json& j, int k, const std::string& what) {
  if (!j.is_array() || static_cast<int>(j.size()) != k) throw DataError(what + ": must have " + std::to_string(k) + " entries");
  VectorXd v(k);
  for (int i = 0; i < k; ++i) {
    if (!j[i].is_number()) throw DataError(what + ": non-numeric entry");
    v(i) = j[i].get<double>();
  }
  return v;
}

inline double number_at(const json& obj, const char* key, const std::string& ctx) {
  if (!obj.contains(key) || !obj[key].is_number()) throw DataError(ctx + ": missing numeric field '" + key + "'");
  return obj[key].get<double>();
}

}  // namespace io_detail

/// JSON form of a model: per-trait proportions plus correlation matrices.
/// Optional per-trait "variance" (default 1) and explicit pleiotropic
/// "loadings" (to carry signs) make the mapping exact for any VcModel.
inline json model_to_json(const VcModel& m) {
  m.validate();
  json j;
  j["k"] = m.k();
  j["structure"] = to_string(m.structure());
  const VectorXd v = m.total_variance();
  const auto props = m.traits();
  json traits = json::array();
  for (int t = 0; t < m.k(); ++t)
    traits.push_back({{"name", props[t].name},
                      {"a_prop", props[t].a_prop},
                      {"g_prop", props[t].g_prop},
                      {"e_prop", props[t].e_prop},
                      {"variance", v(t)}});
  j["traits"] = traits;
  j["rho_g"] = io_detail::matrix_json(correlation_of(m.G));
  j["rho_e"] = io_detail::matrix_json(correlation_of(m.E));
  if (m.structure() == Structure::general) {
    j["rho_a"] = io_detail::matrix_json(correlation_of(m.A()));
  } else {
    const auto& l = std::get<Pleiotropic>(m.major_gene).loadings;
    j["loadings"] = std::vector<double>(l.data(), l.data() + l.size());
  }
  j["means"] = std::vector<double>(m.means.data(), m.means.data() + m.means.size());
  return j;
}

inline VcModel model_from_json(const json& j) {
  if (!j.is_object()) throw DataError("model config: top level must be an object");
  if (!j.contains("traits") || !j["traits"].is_array() || j["traits"].empty())
    throw DataError("model config: 'traits' must be a non-empty array");
  const int k = static_cast<int>(j["traits"].size());
  if (j.contains("k") && (!j["k"].is_number_integer() || j["k"].get<int>() != k))
    throw DataError("model config: k does not match the number of traits");
  std::vector<TraitSpec> traits;
  VectorXd variance = VectorXd::Ones(k);
  for (int t = 0; t < k; ++t) {
    const json& tr = j["traits"][t];
    const std::string ctx = "model config: trait " + std::to_string(t + 1);
    if (!tr.is_object() || !tr.contains("name") || !tr["name"].is_string()) throw DataError(ctx + ": missing name");
    traits.push_back({tr["name"].get<std::string>(), io_detail::number_at(tr, "a_prop", ctx),
                      io_detail::number_at(tr, "g_prop", ctx), io_detail::number_at(tr, "e_prop", ctx)});
    if (tr.contains("variance")) {
      variance(t) = io_detail::number_at(tr, "variance", ctx);
      if (!(variance(t) > 0.0)) throw DataError(ctx + ": variance must be positive");
    }
  }
  std::set<std::string> names;
  for (const auto& t : traits)
    if (!names.insert(t.name).second) throw DataError("model config: duplicate trait name " + t.name);
  const auto req = [&](const char* key) -> const json& {
    if (!j.contains(key)) throw DataError(std::string("model config: missing '") + key + "'");
    return j[key];
  };
  const MatrixXd rho_g = io_detail::matrix_from(req("rho_g"), k, "rho_g");
  const MatrixXd rho_e = io_detail::matrix_from(req("rho_e"), k, "rho_e");
  std::optional<MatrixXd> rho_a;
  if (j.contains("rho_a") && !j["rho_a"].is_null()) rho_a = io_detail::matrix_from(j["rho_a"], k, "rho_a");
  if (j.contains("structure")) {
    const std::string s = j["structure"].is_string() ? j["structure"].get<std::string>() : "";
    if (s == "general") {
      if (!rho_a) throw DataError("model config: structure 'general' requires rho_a");
    } else if (s == "pleiotropic") {
      if (rho_a) throw DataError("model config: structure 'pleiotropic' must not carry rho_a");
    } else {
      throw DataError("model config: structure must be 'pleiotropic' or 'general'");
    }
  }
  std::optional<VectorXd> means;
  if (j.contains("means")) means = io_detail::vector_from(j["means"], k, "means");

  VcModel m = model_from_proportions(traits, rho_g, rho_e, rho_a, means);
  const VectorXd s = variance.cwiseSqrt();
  m.G = s.asDiagonal() * m.G * s.asDiagonal();
  m.E = s.asDiagonal() * m.E * s.asDiagonal();
  if (auto* p = std::get_if<Pleiotropic>(&m.major_gene)) {
    p->loadings = s.cwiseProduct(p->loadings);
    if (j.contains("loadings")) {
      if (rho_a) throw DataError("model config: loadings apply to the pleiotropic structure only");
      const VectorXd l = io_detail::vector_from(j["loadings"], k, "loadings");
      for (int t = 0; t < k; ++t)
        if (std::abs(std::abs(l(t)) - p->loadings(t)) > 1e-9 * std::max(1.0, p->loadings(t)))
          throw DataError("model config: loading of " + traits[t].name + " disagrees with a_prop * variance");
      p->loadings = l;
    }
  } else {
    auto& g = std::get<General>(m.major_gene);
    g.A = s.asDiagonal() * g.A * s.asDiagonal();
  }
  m.validate();
  return m;
}

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline VcModel read_model_config(const std::string& path) {
  try {
    return model_from_json(read_json_file(path));
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path);
  out << text;
  if (!out) throw DataError("write failed: " + path);
}

inline void write_model_config(const std::string& path, const VcModel& m) {
  write_text_file(path, model_to_json(m).dump(2) + "\n");
}

/// Trait index by name.
inline int trait_index(const std::vector<std::string>& names, const std::string& name) {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return static_cast<int>(i);
  throw std::invalid_argument("unknown trait '" + name + "'");
}

// ---------------------------------------------------------------- CSV output

/// Shortest round-trip text of a double.
inline std::string fmt(double v) {
  if (std::isnan(v)) return "NA";
  if (std::isinf(v)) return v > 0 ? "Inf" : "-Inf";
  char buf[32];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

/// Metadata line "# pleiopower <version> key=value ..." (keys in the order
/// given), then a header and rows.
class CsvTable {
 public:
  CsvTable(std::vector<std::pair<std::string, std::string>> meta, std::vector<std::string> header)
      : meta_(std::move(meta)), header_(std::move(header)) {}

  void add(std::vector<std::string> row) {
    if (row.size() != header_.size()) throw std::logic_error("CsvTable: row width does not match header");
    rows_.push_back(std::move(row));
  }

  std::string str() const {
    std::ostringstream o;
    o << "# pleiopower " << kVersion;
    for (const auto& [k, v] : meta_) o << ' ' << k << '=' << v;
    o << '\n';
    write_row(o, header_);
    for (const auto& r : rows_) write_row(o, r);
    return o.str();
  }

  void save(const std::string& path) const { write_text_file(path, str()); }

 private:
  static void write_row(std::ostream& o, const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) o << (i ? "," : "") << csv_field(r[i]);
    o << '\n';
  }

  std::vector<std::pair<std::string, std::string>> meta_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace pleiopower
