// perinv: command-line front end for the periodic-set invariants library.

#include <glob.h>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "perinv/dedup.hpp"
#include "perinv/error.hpp"
#include "perinv/geometry.hpp"
#include "perinv/invariants.hpp"
#include "perinv/io.hpp"
#include "perinv/metrics.hpp"
#include "perinv/parallel.hpp"

namespace {

using namespace perinv;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCompute = 1;
constexpr int kExitUsage = 2;

/// Usage problems and unreadable input, mapped to exit status 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument:
    case ErrorCode::MissingCellParameter:
    case ErrorCode::MalformedLoop:
    case ErrorCode::UnparsableSymOp:
    case ErrorCode::PartialOccupancy:
    case ErrorCode::SchemaViolation:
    case ErrorCode::RankDeficientBasis:
    case ErrorCode::DuplicateMotifPoint:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::MalformedRow:
      return true;
    default:
      return false;
  }
}

struct Options {
  int h = 2;
  int k = 100;
  std::string ground = "linf";
  std::string invariant = "pda";
  std::string format = "csv";
  std::string output;
  int threads = 0;
  double site_tolerance = 1e-4;
};

GroundMetric ground_of(const Options& o) {
  try {
    return GroundMetric::parse(o.ground);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void check_orders(const Options& o) {
  if (o.h < 1) throw UsageError("--h must be at least 1");
  if (o.k < 1) throw UsageError("--k must be at least 1");
  if (o.format != "csv" && o.format != "json") throw UsageError("--format must be csv or json");
}

bool has_wildcard(const std::string& s) { return s.find_first_of("*?[") != std::string::npos; }

std::vector<std::string> expand_inputs(const std::vector<std::string>& patterns) {
  std::vector<std::string> files;
  for (const auto& pattern : patterns) {
    if (!has_wildcard(pattern)) {
      if (!std::filesystem::exists(pattern)) throw UsageError("no such file: " + pattern);
      files.push_back(pattern);
      continue;
    }
    glob_t g{};
    const int rc = ::glob(pattern.c_str(), 0, nullptr, &g);
    std::vector<std::string> found;
    if (rc == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) found.emplace_back(g.gl_pathv[i]);
    ::globfree(&g);
    if (found.empty()) throw UsageError("pattern matched no files: " + pattern);
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  if (files.empty()) throw UsageError("no input files");
  return files;
}

struct Loaded {
  std::vector<PeriodicSet> sets;
  int failures = 0;
};

/// Loads every file, reporting per-file failures on stderr. Structures without
/// an id are named after their file.
Loaded load_all(const std::vector<std::string>& patterns, const Options& o) {
  Loaded out;
  CifOptions cif;
  cif.site_tolerance = o.site_tolerance;
  for (const auto& path : expand_inputs(patterns)) {
    try {
      auto sets = load_structures(path, cif);
      const std::string stem = std::filesystem::path(path).stem().string();
      for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].id().empty())
          sets[i] = sets[i].with_id(sets.size() == 1 ? stem : stem + "#" + std::to_string(i));
        out.sets.push_back(std::move(sets[i]));
      }
    } catch (const Error& e) {
      std::cerr << "perinv: " << path << ": " << e.what() << '\n';
      ++out.failures;
    }
  }
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path);
      if (!file_) throw UsageError("cannot write " + path);
    }
    stream().precision(17);
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

 private:
  std::ofstream file_;
};

json row_json(const RowVector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void write_values(std::ostream& out, const RowVector& v) {
  for (Eigen::Index j = 0; j < v.size(); ++j) out << ',' << v(j);
}

std::string columns_header(int k) {
  std::string s;
  for (int j = 1; j <= k; ++j) s += ",c" + std::to_string(j);
  return s;
}

// ---------------------------------------------------------------- invariant

int cmd_invariant(const std::vector<std::string>& inputs, const Options& o, int moments_t) {
  check_orders(o);
  const std::string what = o.invariant;
  const std::vector<std::string> known = {"pdd", "pda", "concat", "amd", "ada", "moments", "psd"};
  if (std::find(known.begin(), known.end(), what) == known.end())
    throw UsageError("--invariant must be one of pdd, pda, concat, amd, ada, moments, psd");
  Loaded loaded = load_all(inputs, o);

  struct Record {
    std::string id;
    RowDistribution dist;
    Matrix values;  // vectors and moments
    std::string error;
  };
  std::vector<Record> records(loaded.sets.size());
  parallel_for(loaded.sets.size(), resolve_threads(o.threads), [&](std::size_t i) {
    const PeriodicSet& s = loaded.sets[i];
    Record& r = records[i];
    r.id = s.id();
    try {
      if (what == "pdd") r.dist = pdd_h(s, o.h, o.k);
      else if (what == "pda") r.dist = pda_h(s, o.h, o.k);
      else if (what == "concat") r.dist = pdd_concat(s, o.h, o.k);
      else if (what == "psd") r.dist = psd(s, o.k);
      else if (what == "amd") r.values = amd(s, o.k);
      else if (what == "ada") r.values = ada_h(s, o.h, o.k);
      else r.values = moments(pdd_h(s, o.h, o.k), moments_t).values;
    } catch (const Error& e) {
      r.error = e.what();
    }
  });

  Output out(o.output);
  std::ostream& os = out.stream();
  const bool distribution = (what == "pdd" || what == "pda" || what == "concat" || what == "psd");
  const int cols = what == "concat" ? o.h * o.k : o.k;
  int errors = loaded.failures;
  json arr = json::array();
  if (o.format == "csv") {
    if (distribution) os << "id,weight" << columns_header(cols) << '\n';
    else if (what == "moments") os << "id,t" << columns_header(cols) << '\n';
    else os << "id" << columns_header(cols) << '\n';
  }
  for (const Record& r : records) {
    if (!r.error.empty()) {
      std::cerr << "perinv: " << r.id << ": " << r.error << '\n';
      ++errors;
      continue;
    }
    if (o.format == "json") {
      json obj{{"id", r.id}, {"invariant", what}, {"h", o.h}, {"k", o.k}};
      if (distribution) {
        obj["weights"] = std::vector<double>(r.dist.weights.data(), r.dist.weights.data() + r.dist.weights.size());
        json rows = json::array();
        for (Eigen::Index i = 0; i < r.dist.rows.rows(); ++i) rows.push_back(row_json(r.dist.rows.row(i)));
        obj["rows"] = rows;
      } else {
        json rows = json::array();
        for (Eigen::Index i = 0; i < r.values.rows(); ++i) rows.push_back(row_json(r.values.row(i)));
        obj["values"] = what == "moments" ? rows : rows[0];
      }
      arr.push_back(obj);
      continue;
    }
    if (distribution) {
      for (Eigen::Index i = 0; i < r.dist.rows.rows(); ++i) {
        os << r.id << ',' << r.dist.weights(i);
        write_values(os, r.dist.rows.row(i));
        os << '\n';
      }
    } else {
      for (Eigen::Index i = 0; i < r.values.rows(); ++i) {
        os << r.id;
        if (what == "moments") os << ',' << i + 1;
        write_values(os, r.values.row(i));
        os << '\n';
      }
    }
  }
  if (o.format == "json") os << arr.dump(2) << '\n';
  return errors ? kExitCompute : kExitOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const std::string& file_a, const std::string& file_b, const Options& o) {
  check_orders(o);
  const GroundMetric g = ground_of(o);
  InvariantKind kind;
  try {
    kind = parse_invariant_kind(o.invariant);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Loaded a = load_all({file_a}, o);
  Loaded b = load_all({file_b}, o);
  if (a.failures || b.failures) return kExitUsage;

  struct Row {
    std::string id_a, id_b, measure;
    int order;
    double value;
  };
  std::vector<Row> rows;
  const std::string vec_name = kind == InvariantKind::PDA ? "ADA" : "AMD";
  const std::string dist_name = kind == InvariantKind::PDA ? "EMD_PDA" : "EMD_PDD";
  for (const auto& sa : a.sets) {
    const auto oa = invariant_orders(sa, o.h, o.k, kind);
    for (const auto& sb : b.sets) {
      const auto ob = invariant_orders(sb, o.h, o.k, kind);
      rows.push_back({sa.id(), sb.id(), vec_name, 1, ground_distance(column_means(oa[0]), column_means(ob[0]), g)});
      double best = 0.0;
      for (int i = 0; i < o.h; ++i) {
        const double v = emd(oa[static_cast<std::size_t>(i)], ob[static_cast<std::size_t>(i)], g).value;
        best = std::max(best, v);
        rows.push_back({sa.id(), sb.id(), dist_name, i + 1, v});
      }
      rows.push_back({sa.id(), sb.id(), dist_name + "_max", o.h, best});
    }
  }

  Output out(o.output);
  std::ostream& os = out.stream();
  if (o.format == "json") {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"idA", r.id_a}, {"idB", r.id_b}, {"measure", r.measure}, {"h", r.order}, {"k", o.k},
                     {"ground", g.name()}, {"value", r.value}});
    os << arr.dump(2) << '\n';
  } else {
    os << "idA,idB,measure,h,k,ground,value\n";
    for (const auto& r : rows)
      os << r.id_a << ',' << r.id_b << ',' << r.measure << ',' << r.order << ',' << o.k << ',' << g.name() << ','
         << r.value << '\n';
  }
  return kExitOk;
}

// ---------------------------------------------------------------- nn

int cmd_nn(const std::string& query_file, const std::vector<std::string>& corpus_files, int top,
           const Options& o) {
  check_orders(o);
  LndConfig config;
  config.h = o.h;
  config.k = o.k;
  config.ground = ground_of(o);
  try {
    config.kind = parse_invariant_kind(o.invariant);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  Loaded queries = load_all({query_file}, o);
  Loaded corpus = load_all(corpus_files, o);
  if (queries.failures || corpus.failures) return kExitUsage;
  if (corpus.sets.empty()) throw UsageError("empty corpus");

  // Corpus invariants are shared by all queries.
  std::vector<std::vector<RowDistribution>> corpus_orders(corpus.sets.size());
  const int threads = resolve_threads(o.threads);
  parallel_for(corpus.sets.size(), threads, [&](std::size_t i) {
    corpus_orders[i] = invariant_orders(corpus.sets[i], config.h, config.k, config.kind);
  });

  Output out(o.output);
  std::ostream& os = out.stream();
  json arr = json::array();
  if (o.format == "csv") os << "query,rank,id,distance,lnd,min_perturbation\n";
  for (const auto& q : queries.sets) {
    const auto qo = invariant_orders(q, config.h, config.k, config.kind);
    std::vector<double> d(corpus.sets.size());
    parallel_for(corpus.sets.size(), threads,
                 [&](std::size_t i) { d[i] = emd_max(qo, corpus_orders[i], config.ground); });
    std::vector<std::size_t> order(d.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return d[x] < d[y]; });
    const double lnd_value = d[order[0]];
    const std::size_t shown = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(1, top)));
    if (o.format == "json") {
      json nbrs = json::array();
      for (std::size_t r = 0; r < shown; ++r)
        nbrs.push_back({{"id", corpus.sets[order[r]].id()}, {"distance", d[order[r]]}});
      arr.push_back({{"query", q.id()},
                     {"lnd", lnd_value},
                     {"nearest", corpus.sets[order[0]].id()},
                     {"min_perturbation", 0.5 * lnd_value},
                     {"neighbours", nbrs}});
    } else {
      for (std::size_t r = 0; r < shown; ++r)
        os << q.id() << ',' << r + 1 << ',' << corpus.sets[order[r]].id() << ',' << d[order[r]] << ',' << lnd_value
           << ',' << 0.5 * lnd_value << '\n';
    }
  }
  if (o.format == "json") os << arr.dump(2) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- dedup

int cmd_dedup(const std::vector<std::string>& inputs, const std::vector<std::string>& against,
              std::vector<double> thresholds, const std::string& pairs_path, const std::string& report_format,
              const Options& o) {
  if (o.k < 1) throw UsageError("--k must be at least 1");
  if (report_format != "text" && report_format != "csv") throw UsageError("--report must be text or csv");
  if (thresholds.empty()) thresholds = {1e-10, 1e-6, 1e-5, 1e-4, 1e-3, 1e-2};
  for (double t : thresholds)
    if (!(t > 0.0)) throw UsageError("thresholds must be positive");
  DedupConfig config;
  config.ground = ground_of(o);
  config.threads = resolve_threads(o.threads);

  Loaded a = load_all(inputs, o);
  Loaded b;
  if (!against.empty()) b = load_all(against, o);
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedDataset pa = prepare_dataset(a.sets, o.k, config.threads);
  PreparedDataset pb;
  if (!against.empty()) pb = prepare_dataset(b.sets, o.k, config.threads);
  std::cerr << "perinv: invariants computed in "
            << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() << " s\n";
  for (const PreparedDataset* data : std::initializer_list<const PreparedDataset*>{&pa, &pb})
    for (const auto& q : data->quarantined) std::cerr << "perinv: quarantined " << q.id << ": " << q.reason << '\n';

  Output out(o.output);
  std::ostream& os = out.stream();
  for (std::size_t ti = 0; ti < thresholds.size(); ++ti) {
    const double t = thresholds[ti];
    config.threshold = t;
    const DedupResult result = hierarchical_dedup(pa, against.empty() ? nullptr : &pb, config);
    if (report_format == "csv") {
      std::istringstream lines(report_summary(result.report, "csv"));
      std::string line;
      bool header = true;
      while (std::getline(lines, line)) {
        if (header) {
          if (ti == 0) os << "threshold,ground," << line << '\n';
          header = false;
          continue;
        }
        os << t << ',' << result.report.metric << ',' << line << '\n';
      }
    } else {
      os << "threshold " << t << " A, ground " << result.report.metric << ", k " << o.k << '\n'
         << report_summary(result.report, "text") << '\n';
    }
    if (!pairs_path.empty()) {
      std::string path = pairs_path;
      if (thresholds.size() > 1) {
        const std::filesystem::path p(pairs_path);
        std::ostringstream name;
        name << p.stem().string() << "_" << t << p.extension().string();
        path = (p.parent_path() / name.str()).string();
      }
      std::ofstream pf(path);
      if (!pf) throw UsageError("cannot write " + path);
      pf << pairs_csv(result.pairs);
    }
  }
  const bool any_bad = a.failures || b.failures || !pa.quarantined.empty() || !pb.quarantined.empty();
  return any_bad ? kExitCompute : kExitOk;
}

// ---------------------------------------------------------------- reconstruct1d

RowDistribution read_psd_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  std::vector<std::vector<double>> rows;
  std::vector<double> weights;
  if (first != std::string::npos && (text[first] == '{' || text[first] == '[')) {
    try {
      json doc = json::parse(text);
      if (doc.is_array()) doc = doc.at(0);
      rows = doc.at("rows").get<std::vector<std::vector<double>>>();
      if (doc.contains("weights")) weights = doc["weights"].get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw Error(ErrorCode::SchemaViolation, e.what());
    }
  } else {
    // Plain rows of numbers, or the CSV written by `invariant --invariant psd`.
    std::istringstream lines(text);
    std::string line;
    bool tagged = false;
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      if (line.rfind("id,", 0) == 0) {
        tagged = true;
        continue;
      }
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      std::vector<double> row;
      try {
        for (std::size_t c = tagged ? 1 : 0; c < cells.size(); ++c) row.push_back(std::stod(cells[c]));
      } catch (const std::exception&) {
        throw Error(ErrorCode::MalformedRow, "non-numeric PSD entry in: " + line);
      }
      if (tagged) {
        if (row.empty()) throw Error(ErrorCode::MalformedRow, "missing weight in: " + line);
        weights.push_back(row.front());
        row.erase(row.begin());
      }
      rows.push_back(std::move(row));
    }
  }
  if (rows.empty()) throw Error(ErrorCode::MalformedRow, "no PSD rows in " + path);
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw Error(ErrorCode::MalformedRow, "PSD rows differ in length");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  RowDistribution dist = RowDistribution::uniform(m);
  if (!weights.empty()) {
    if (weights.size() != rows.size()) throw Error(ErrorCode::MalformedRow, "one weight per row expected");
    dist.weights = Eigen::Map<Vector>(weights.data(), static_cast<Eigen::Index>(weights.size()));
  }
  return dist;
}

int cmd_reconstruct1d(const std::string& psd_file, const std::string& id, const Options& o) {
  const RowDistribution dist = read_psd_file(psd_file);
  const PeriodicSet rebuilt = psd_reconstruct(dist).with_id(id);
  Output out(o.output);
  out.stream() << write_native(rebuilt) << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- asymptote

int cmd_asymptote(const std::vector<std::string>& inputs, int step, const Options& o) {
  check_orders(o);
  if (step < 1) throw UsageError("--step must be at least 1");
  Loaded loaded = load_all(inputs, o);
  Output out(o.output);
  std::ostream& os = out.stream();
  int errors = loaded.failures;
  json arr = json::array();
  if (o.format == "csv") os << "id,h,k,a,a_over_shape,ada,c,ppc\n";
  for (const auto& s : loaded.sets) {
    try {
      const RowDistribution dist = pdd_h(s, o.h, o.k);
      const RowVector a = column_means(dist);
      const RowVector x = asymptote_shape(o.h, s.dim(), o.k);
      const double c = o.h == 1 ? ppc(s) : fit_least_squares(dist, o.h, s.dim());
      const double packing = s.is_full_rank() ? ppc(s) : std::nan("");
      for (int j = step; j <= o.k; j += step) {
        const double aj = a(j - 1), xj = x(j - 1);
        if (o.format == "csv") {
          os << s.id() << ',' << o.h << ',' << j << ',' << aj << ',' << aj / xj << ',' << aj - c * xj << ',' << c << ','
             << packing << '\n';
        } else {
          arr.push_back({{"id", s.id()}, {"h", o.h}, {"k", j}, {"a", aj}, {"a_over_shape", aj / xj},
                         {"ada", aj - c * xj}, {"c", c}, {"ppc", std::isnan(packing) ? json() : json(packing)}});
        }
      }
    } catch (const Error& e) {
      std::cerr << "perinv: " << s.id() << ": " << e.what() << '\n';
      ++errors;
    }
  }
  if (o.format == "json") os << arr.dump(2) << '\n';
  return errors ? kExitCompute : kExitOk;
}

// ---------------------------------------------------------------- perturb

int cmd_perturb(const std::vector<std::string>& inputs, double epsilon, std::uint64_t seed, const Options& o) {
  if (!(epsilon >= 0.0)) throw UsageError("--epsilon must be non-negative");
  Loaded loaded = load_all(inputs, o);
  std::vector<PeriodicSet> moved;
  for (std::size_t i = 0; i < loaded.sets.size(); ++i)
    moved.push_back(perturb(loaded.sets[i], epsilon, seed + i));
  Output out(o.output);
  out.stream() << write_native(moved) << '\n';
  return loaded.failures ? kExitUsage : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isometry invariants, distances and near-duplicate search for periodic point sets"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "Print this help message and exit");
  Options o;
  app.add_option("--threads", o.threads, "Worker threads (default: PERINV_THREADS or all cores)");

  auto common = [&](CLI::App* sub, bool orders) {
    if (orders) {
      sub->add_option("--h", o.h, "Order h")->capture_default_str();
      sub->add_option("--k", o.k, "Number of neighbours k")->capture_default_str();
    }
    sub->add_option("--ground", o.ground, "Ground metric: linf | l1 | l2 | q:<r> | rms")->capture_default_str();
    sub->add_option("--format", o.format, "Output format: csv | json")->capture_default_str();
    sub->add_option("-o,--output", o.output, "Output file (default: stdout)");
    sub->add_option("--site-tolerance", o.site_tolerance, "CIF site merge tolerance (fractional)")->capture_default_str();
  };

  std::vector<std::string> inputs, corpus, against;
  std::string file_a, file_b, query, pairs_path, report_format = "text", psd_file, id = "reconstructed";
  std::vector<double> thresholds;
  int moments_t = 2, top = 5, step = 1;
  double epsilon = 0.0;
  std::uint64_t seed = 0;

  auto* inv = app.add_subcommand("invariant", "Compute PDD^{h}, PDA^{h}, PDD^{(h)}, AMD, ADA, moments or PSD");
  common(inv, true);
  inv->add_option("--invariant", o.invariant, "pdd | pda | concat | amd | ada | moments | psd")->capture_default_str();
  inv->add_option("--t", moments_t, "Number of moments for --invariant moments")->capture_default_str();
  inv->add_option("inputs", inputs, "Structure files or globs (.cif, .json)")->required();

  auto* cmp = app.add_subcommand("compare", "Distances between every structure of two files");
  common(cmp, true);
  cmp->add_option("--invariant", o.invariant, "pdd | pda")->capture_default_str();
  cmp->add_option("a", file_a, "First file")->required();
  cmp->add_option("b", file_b, "Second file")->required();

  auto* nn = app.add_subcommand("nn", "Local novelty distance and nearest corpus entries");
  common(nn, true);
  nn->add_option("--invariant", o.invariant, "pdd | pda")->capture_default_str();
  nn->add_option("--top", top, "Neighbours to list")->capture_default_str();
  nn->add_option("query", query, "Query file")->required();
  nn->add_option("corpus", corpus, "Corpus files or globs")->required();

  auto* dd = app.add_subcommand("dedup", "Hierarchical near-duplicate search");
  common(dd, true);
  dd->add_option("--against", against, "Second dataset (files or globs); default: self-comparison");
  dd->add_option("--threshold", thresholds, "Distance thresholds in Angstrom (repeatable)");
  dd->add_option("--pairs", pairs_path, "Write the candidate pair list CSV here");
  dd->add_option("--report", report_format, "Report format: text | csv")->capture_default_str();
  dd->add_option("inputs", inputs, "Dataset files or globs")->required();

  auto* rec = app.add_subcommand("reconstruct1d", "Rebuild a periodic sequence from PSD(S; m)");
  common(rec, false);
  rec->add_option("--id", id, "Id of the rebuilt set")->capture_default_str();
  rec->add_option("psd", psd_file, "PSD rows (CSV or JSON)")->required();

  auto* asy = app.add_subcommand("asymptote", "Column averages against the asymptotic curve");
  common(asy, true);
  asy->add_option("--step", step, "Emit every step-th k")->capture_default_str();
  asy->add_option("inputs", inputs, "Structure files or globs")->required();

  auto* per = app.add_subcommand("perturb", "Randomly displace motif points by at most epsilon");
  common(per, false);
  per->add_option("--epsilon", epsilon, "Maximal displacement")->required();
  per->add_option("--seed", seed, "Random seed")->capture_default_str();
  per->add_option("inputs", inputs, "Structure files or globs")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (inv->parsed()) return cmd_invariant(inputs, o, moments_t);
    if (cmp->parsed()) return cmd_compare(file_a, file_b, o);
    if (nn->parsed()) return cmd_nn(query, corpus, top, o);
    if (dd->parsed()) return cmd_dedup(inputs, against, thresholds, pairs_path, report_format, o);
    if (rec->parsed()) return cmd_reconstruct1d(psd_file, id, o);
    if (asy->parsed()) return cmd_asymptote(inputs, step, o);
    if (per->parsed()) return cmd_perturb(inputs, epsilon, seed, o);
  } catch (const UsageError& e) {
    std::cerr << "perinv: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "perinv: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitUsage : kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "perinv: " << e.what() << '\n';
    return kExitCompute;
  }
  return kExitUsage;
}
